use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_stability, transition_table, TransitionTable};
use crate::error::{invalid, Error, Result};
use crate::grid::{ConeGrid, PeriodicGrid};
use crate::rng::{mean_and_std_error, StreamKey};
use crate::schemes::{
    apply_weights, cell_weights, neighbourhood, Boundary, SchemeConfig, SpeedModel, StencilWeights,
    Velocity,
};

fn local_speed(scheme: &SchemeConfig, u: f64) -> f64 {
    match &scheme.speed {
        SpeedModel::Constant(a) => *a,
        SpeedModel::Law { law, .. } => law.speed(u),
    }
}

fn stability_error(scheme: &SchemeConfig, u_center: f64, w: &StencilWeights, lambda: f64) -> Error {
    let mut report = check_stability(
        &scheme.kind,
        Velocity::new(local_speed(scheme, u_center)),
        lambda,
    );
    report.probabilistic = false;
    report.violated_entries = TransitionTable(w.0).violations();
    Error::Stability(Box::new(report))
}

/// Weights for one step, optionally refusing any negative weight.
fn step_weights(
    u: &[f64],
    scheme: &SchemeConfig,
    lambda: f64,
    boundary: Boundary,
    strict: bool,
) -> Result<Vec<StencilWeights>> {
    let coeffs = scheme.coefficients(u, lambda, boundary)?;
    let weights = cell_weights(&coeffs, u.len(), lambda, boundary)?;
    if strict {
        let shift = usize::from(boundary == Boundary::Cone);
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !TransitionTable(w.0).is_probabilistic())
        {
            return Err(stability_error(scheme, u[k + shift], w, lambda));
        }
    }
    Ok(weights)
}

/// Runs `steps` levels of the cone from the initial layer `d0`.
///
/// Returns every layer, starting with `d0`; layer `j` holds the values at
/// global indices `j..=2n-j`. With `strict`, any negative weight aborts with
/// [`Error::Stability`].
pub fn evolve_deterministic(
    d0: &[f64],
    scheme: &SchemeConfig,
    grid: &ConeGrid,
    steps: usize,
    strict: bool,
) -> Result<Vec<Vec<f64>>> {
    check_cone_input(d0, grid, steps)?;
    let mut layers = Vec::with_capacity(steps + 1);
    layers.push(d0.to_vec());
    for level in 0..steps {
        let u = &layers[level];
        let lambda = grid.lambda(level);
        let weights = step_weights(u, scheme, lambda, Boundary::Cone, strict)?;
        let next = apply_weights(u, &weights, Boundary::Cone, None, grid.tau(level))?;
        layers.push(next);
    }
    Ok(layers)
}

/// Runs `steps` periodic steps of size `tau` and returns the final state.
pub fn evolve_periodic(
    u0: &[f64],
    scheme: &SchemeConfig,
    grid: &PeriodicGrid,
    tau: f64,
    steps: usize,
    source: Option<&[f64]>,
    strict: bool,
) -> Result<Vec<f64>> {
    if u0.len() != grid.m() {
        return Err(invalid(format!(
            "state has {} cells, grid has {}",
            u0.len(),
            grid.m()
        )));
    }
    let lambda = tau / grid.h();
    let mut u = u0.to_vec();
    for _ in 0..steps {
        let weights = step_weights(&u, scheme, lambda, Boundary::Periodic, strict)?;
        u = apply_weights(&u, &weights, Boundary::Periodic, source, tau)?;
    }
    Ok(u)
}

/// New layer as the table expectation of the old one, cell by cell.
pub fn expectation_step(
    u: &[f64],
    tables: &[TransitionTable],
    boundary: Boundary,
) -> Result<Vec<f64>> {
    let shift = usize::from(boundary == Boundary::Cone);
    if tables.len() + 2 * shift != u.len() {
        return Err(invalid(format!(
            "{} tables for a state of length {}",
            tables.len(),
            u.len()
        )));
    }
    Ok(tables
        .iter()
        .enumerate()
        .map(|(k, tt)| tt.expectation(neighbourhood(u, k + shift, boundary)))
        .collect())
}

fn check_cone_input(d0: &[f64], grid: &ConeGrid, steps: usize) -> Result<()> {
    if d0.len() != grid.initial_len() {
        return Err(invalid(format!(
            "initial layer has {} values, cone needs {}",
            d0.len(),
            grid.initial_len()
        )));
    }
    if steps > grid.n() {
        return Err(invalid(format!(
            "{steps} steps exceed cone depth {}",
            grid.n()
        )));
    }
    Ok(())
}

/// Layers of a cone run with the transition tables used between them.
pub type ChainRun = (Vec<Vec<f64>>, Vec<Vec<TransitionTable>>);

/// Deterministic layers together with the transition tables used between them.
///
/// `tables[j][k]` drives the point with global index `j + 1 + k` on layer
/// `j + 1`.
pub fn chain_tables(
    d0: &[f64],
    scheme: &SchemeConfig,
    grid: &ConeGrid,
    steps: usize,
) -> Result<ChainRun> {
    check_cone_input(d0, grid, steps)?;
    let mut layers = vec![d0.to_vec()];
    let mut tables = Vec::with_capacity(steps);
    for level in 0..steps {
        let u = &layers[level];
        let lambda = grid.lambda(level);
        let weights = step_weights(u, scheme, lambda, Boundary::Cone, true)?;
        let tt = weights
            .iter()
            .map(transition_table)
            .collect::<Result<Vec<_>>>()?;
        let next = apply_weights(u, &weights, Boundary::Cone, None, grid.tau(level))?;
        layers.push(next);
        tables.push(tt);
    }
    Ok((layers, tables))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: u64,
    /// Value of the deterministic recursion at the same point.
    pub deterministic: f64,
}

impl McEstimate {
    /// `(estimate - deterministic) / std_error`; zero when both agree exactly.
    pub fn z_score(&self) -> f64 {
        let diff = self.estimate - self.deterministic;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

fn sample_offset(tt: &TransitionTable, uniform: f64) -> isize {
    let total: f64 = tt.0.iter().map(|p| p.max(0.0)).sum();
    let target = uniform * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, p) in tt.0.iter().enumerate() {
        let p = p.max(0.0);
        if p > 0.0 {
            last = k;
            acc += p;
            if target < acc {
                return k as isize - 2;
            }
        }
    }
    last as isize - 2
}

/// Monte Carlo estimate of the layer value at `target = (layer, global index)`.
///
/// Each path starts at the target and jumps backwards one layer at a time with
/// the transition probabilities of the scheme until it lands on the initial
/// layer, where it reads `d0`. Path `p` draws from stream `p` of `seed`, so
/// the estimate does not depend on thread scheduling.
pub fn simulate_mc(
    target: (usize, usize),
    d0: &[f64],
    scheme: &SchemeConfig,
    grid: &ConeGrid,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    let (layer, index) = target;
    if n_paths == 0 {
        return Err(invalid("need at least one path"));
    }
    if !grid.layer_indices(layer)?.contains(&index) {
        return Err(invalid(format!("index {index} is not on layer {layer}")));
    }
    let (layers, tables) = chain_tables(d0, scheme, grid, layer)?;
    let deterministic = layers[layer][index - layer];
    let key = StreamKey::new(seed);
    let samples: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = key.stream(path);
            let mut i = index;
            for l in (1..=layer).rev() {
                let tt = &tables[l - 1][i - l];
                let off = sample_offset(tt, rng.gen::<f64>());
                i = (i as isize + off) as usize;
            }
            d0[i]
        })
        .collect();
    let (estimate, std_error) = mean_and_std_error(&samples);
    Ok(McEstimate {
        estimate,
        std_error,
        n_paths,
        deterministic,
    })
}
