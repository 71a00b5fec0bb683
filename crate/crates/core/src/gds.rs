//! Two-scale evolution: a slow scalar trajectory `h(τ)` driven by
//! `dh/dτ = v0(τ, h, m)`, where `m` summarizes a fast field `μ(t, x)` that is
//! transported by one of the explicit schemes between slow steps.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::PeriodicGrid;
use crate::markov::evolve_periodic;
use crate::schemes::SchemeConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleState {
    pub h_slow: f64,
    pub mu_field: Vec<f64>,
    pub tau_slow: f64,
    pub t_fast: f64,
}

impl TwoScaleState {
    pub fn mu_mean(&self) -> f64 {
        mean(&self.mu_field)
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_field.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mu_max(&self) -> f64 {
        self.mu_field
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Cell average; the default summary of the fast field.
pub fn mean(mu: &[f64]) -> f64 {
    mu.iter().sum::<f64>() / mu.len() as f64
}

/// The fast transport problem advanced between slow steps.
#[derive(Debug, Clone)]
pub struct FastTransport {
    pub scheme: SchemeConfig,
    pub grid: PeriodicGrid,
    /// Fast time step.
    pub tau: f64,
    pub source: Option<Vec<f64>>,
    pub strict: bool,
}

/// Slow explicit-Euler step, then `substeps` fast steps; returns the initial
/// state followed by one state per slow step.
pub fn evolve_two_scale(
    init: TwoScaleState,
    v0: &dyn Fn(f64, f64, f64) -> f64,
    fast: &FastTransport,
    slow_step: f64,
    substeps: usize,
    n_slow: usize,
) -> Result<Vec<TwoScaleState>> {
    evolve_two_scale_with(init, v0, &mean, fast, slow_step, substeps, n_slow)
}

/// [`evolve_two_scale`] with a caller-supplied summary of the fast field.
pub fn evolve_two_scale_with(
    init: TwoScaleState,
    v0: &dyn Fn(f64, f64, f64) -> f64,
    summary: &dyn Fn(&[f64]) -> f64,
    fast: &FastTransport,
    slow_step: f64,
    substeps: usize,
    n_slow: usize,
) -> Result<Vec<TwoScaleState>> {
    if substeps == 0 {
        return Err(invalid("need at least one fast substep per slow step"));
    }
    if !(slow_step > 0.0) {
        return Err(invalid(format!(
            "slow step must be positive, got {slow_step}"
        )));
    }
    if init.mu_field.len() != fast.grid.m() {
        return Err(invalid(format!(
            "fast field has {} cells, grid has {}",
            init.mu_field.len(),
            fast.grid.m()
        )));
    }
    let mut trajectory = Vec::with_capacity(n_slow + 1);
    let mut state = init;
    trajectory.push(state.clone());
    for _ in 0..n_slow {
        let m = summary(&state.mu_field);
        let h_slow = state.h_slow + slow_step * v0(state.tau_slow, state.h_slow, m);
        let mu_field = evolve_periodic(
            &state.mu_field,
            &fast.scheme,
            &fast.grid,
            fast.tau,
            substeps,
            fast.source.as_deref(),
            fast.strict,
        )?;
        state = TwoScaleState {
            h_slow,
            mu_field,
            tau_slow: state.tau_slow + slow_step,
            t_fast: state.t_fast + substeps as f64 * fast.tau,
        };
        trajectory.push(state.clone());
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::SchemeKind;

    fn transport(a: f64, strict: bool) -> FastTransport {
        FastTransport {
            scheme: SchemeConfig::constant(SchemeKind::Upwind, a),
            grid: PeriodicGrid::covering(16, 0.0, 1.0).unwrap(),
            tau: 0.5 / 16.0,
            source: None,
            strict,
        }
    }

    fn init(mu: Vec<f64>) -> TwoScaleState {
        TwoScaleState {
            h_slow: 2.0,
            mu_field: mu,
            tau_slow: 0.0,
            t_fast: 0.0,
        }
    }

    fn bump() -> Vec<f64> {
        (0..16)
            .map(|i| (-(i as f64 - 8.0).powi(2) / 4.0).exp())
            .collect()
    }

    #[test]
    fn decoupled_slow_scale_is_constant() {
        let traj = evolve_two_scale(
            init(bump()),
            &|_, _, _| 0.0,
            &transport(1.0, true),
            0.1,
            3,
            5,
        )
        .unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj.iter().all(|s| s.h_slow == 2.0));
        assert_ne!(traj[5].mu_field, traj[0].mu_field);
        assert!((traj[5].t_fast - 15.0 * 0.5 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn unit_rate_grows_linearly() {
        let traj = evolve_two_scale(
            init(bump()),
            &|_, _, _| 1.0,
            &transport(1.0, true),
            0.1,
            1,
            10,
        )
        .unwrap();
        assert!((traj[10].h_slow - 3.0).abs() < 1e-12);
        assert!((traj[10].tau_slow - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_coupling_tracks_exact_solution() {
        let c = 0.7;
        let slow_step = 0.05;
        let traj = evolve_two_scale(
            init(vec![c; 16]),
            &|_, _, m| m,
            &transport(1.0, true),
            slow_step,
            2,
            40,
        )
        .unwrap();
        for s in &traj {
            let exact = 2.0 + c * s.tau_slow;
            // explicit Euler is exact for a constant rate; allow O(slow_step) anyway
            assert!((s.h_slow - exact).abs() <= slow_step * 1e-9 + 1e-12);
            assert!(s.mu_field.iter().all(|x| (x - c).abs() < 1e-12));
        }
    }

    #[test]
    fn slow_trajectory_matches_standalone_euler_when_uncoupled() {
        let v0 = |t: f64, h: f64, _m: f64| (t - h).sin();
        let traj =
            evolve_two_scale(init(bump()), &v0, &transport(-0.5, true), 0.03, 4, 30).unwrap();
        let (mut h, mut t) = (2.0, 0.0);
        for s in &traj[1..] {
            h += 0.03 * v0(t, h, 0.0);
            t += 0.03;
            assert_eq!(s.h_slow.to_bits(), h.to_bits());
        }
    }

    #[test]
    fn fast_field_keeps_mass_inside_loop() {
        let traj = evolve_two_scale(
            init(bump()),
            &|_, _, m| -m,
            &transport(1.0, true),
            0.1,
            5,
            8,
        )
        .unwrap();
        let m0: f64 = traj[0].mu_field.iter().sum();
        for s in &traj {
            assert!((s.mu_field.iter().sum::<f64>() - m0).abs() < 1e-10);
        }
    }

    #[test]
    fn strict_mode_rejects_unstable_fast_scheme() {
        let mut fast = transport(1.0, true);
        fast.scheme = SchemeConfig::constant(SchemeKind::LaxWendroff, 1.0);
        let err = evolve_two_scale(init(bump()), &|_, _, _| 0.0, &fast, 0.1, 1, 1).unwrap_err();
        assert!(matches!(err, crate::Error::Stability(_)));
        assert!(evolve_two_scale(init(bump()), &|_, _, _| 0.0, &fast, 0.1, 0, 1).is_err());
    }

    #[test]
    fn source_forces_fast_field() {
        let mut fast = transport(0.0, true);
        fast.source = Some(vec![1.0; 16]);
        let traj = evolve_two_scale(init(vec![0.0; 16]), &|_, _, _| 0.0, &fast, 0.1, 4, 2).unwrap();
        let expected = 8.0 * fast.tau;
        assert!(traj[2]
            .mu_field
            .iter()
            .all(|x| (x - expected).abs() < 1e-14));
    }
}
