//! Experiment runner behind the `probflux` binary.
//!
//! Every command turns a [`RunConfig`] into one artifact, a CSV table or a JSON
//! document, and every artifact records the mesh ratio `λ = τ/h` it was
//! produced with.

pub mod config;
pub mod records;

use probflux_core::fnn::{l1_distance, BoxDomain};
use probflux_core::gds::{evolve_two_scale, FastTransport, TwoScaleState};
use probflux_core::limiters::{equality_limiters, stability_equality_residual};
use probflux_core::markov::{cfl_bound, evolve_periodic, stability_summary};
use probflux_core::problems::{exact_solution, l1_error};
use probflux_core::{
    check_stability, evolve_deterministic, simulate_mc, PeriodicGrid, SchemeKind, StabilityReport,
    Velocity,
};
use serde::Serialize;

pub use config::{Command, Format, RunConfig};
use config::{GridMode, SlowVelocity};
use records::*;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Config(String),
    #[error("scheme is not probabilistic at lambda = {}", .0.lambda)]
    Stability(Box<StabilityReport>),
    #[error(transparent)]
    Core(probflux_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<probflux_core::Error> for Failure {
    fn from(e: probflux_core::Error) -> Self {
        use probflux_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::UnsupportedProblem(_) => Self::Config(e.to_string()),
            E::Stability(report) => Self::Stability(report),
            other => Self::Core(other),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Stability(_) => 3,
            Self::Core(_) | Self::Io(_) => 1,
        }
    }
}

/// Command-line overrides applied on top of the config document.
#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub strict: bool,
    pub seed: Option<u64>,
}

/// Runs `command` and returns the rendered artifact.
pub fn run(command: Command, cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    if let Some(declared) = cfg.command {
        if declared != command {
            return Err(Failure::Config(format!(
                "config is for `{}` but `{}` was requested",
                declared.name(),
                command.name()
            )));
        }
    }
    match command {
        Command::Solve => solve(cfg, opts),
        Command::Check => check(cfg, opts),
        Command::Mc => mc(cfg, opts),
        Command::Limiters => limiters(cfg),
        Command::Convergence => convergence(cfg, opts),
        Command::Gds => gds(cfg, opts),
        Command::FnnApprox => fnn_approx(cfg, opts),
    }
}

fn format_for(
    cfg: &RunConfig,
    command: Command,
    default: Format,
    allowed: &[Format],
) -> Result<Format, Failure> {
    let format = cfg.output.format.unwrap_or(default);
    if !allowed.contains(&format) {
        return Err(Failure::Config(format!(
            "`{}` cannot write {format:?} output",
            command.name()
        )));
    }
    Ok(format)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize to JSON");
    text.push('\n');
    Ok(text)
}

/// CSV with a leading `# lambda=...` line, or the same rows as a JSON table.
fn table<T: Serialize>(format: Format, lambda: f64, rows: &[T]) -> Result<String, Failure> {
    match format {
        Format::Json => json(&Table { lambda, rows }),
        Format::Csv => {
            let mut out = format!("# lambda={lambda}\n").into_bytes();
            {
                let mut writer = csv::Writer::from_writer(&mut out);
                for row in rows {
                    writer.serialize(row).map_err(|e| Failure::Io(e.into()))?;
                }
                writer.flush()?;
            }
            Ok(String::from_utf8(out).expect("csv output is utf-8"))
        }
    }
}

fn require_seed(opts: Options, configured: Option<u64>, command: Command) -> Result<u64, Failure> {
    opts.seed.or(configured).ok_or_else(|| {
        Failure::Config(format!(
            "`{}` is stochastic and needs a seed",
            command.name()
        ))
    })
}

fn solve(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::Solve;
    let format = format_for(cfg, command, Format::Csv, &[Format::Csv, Format::Json])?;
    let scheme = cfg.scheme_config(command)?;
    let profile = cfg.problem_block(command)?.profile()?;
    let g = cfg.grid_block(command)?;
    let mut rows = Vec::new();
    match g.mode {
        GridMode::Cone => {
            let grid = g.cone()?;
            let steps = g.steps.unwrap_or(grid.n());
            let d0 = profile.sample((0..grid.initial_len()).map(|i| grid.x(i)));
            let layers = evolve_deterministic(&d0, &scheme, &grid, steps, opts.strict)?;
            for (j, layer) in layers.iter().enumerate() {
                let t = grid.time(j)?;
                for (k, &u) in layer.iter().enumerate() {
                    let i = j + k;
                    rows.push(SolveRow {
                        layer: j,
                        i,
                        x: grid.x(i),
                        t,
                        u,
                    });
                }
            }
        }
        GridMode::Periodic => {
            let grid = g.periodic()?;
            let steps = g
                .steps
                .ok_or_else(|| Failure::Config("periodic solve needs `steps`".into()))?;
            let mut u = profile.sample(grid.points());
            for j in 0..=steps {
                if j > 0 {
                    u = evolve_periodic(&u, &scheme, &grid, g.tau, 1, None, opts.strict)?;
                }
                let t = g.t0 + j as f64 * g.tau;
                rows.extend(u.iter().enumerate().map(|(i, &u)| SolveRow {
                    layer: j,
                    i,
                    x: grid.x(i),
                    t,
                    u,
                }));
            }
        }
    }
    table(format, g.lambda(), &rows)
}

fn check(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::Check;
    format_for(cfg, command, Format::Json, &[Format::Json])?;
    let kind = cfg.kind(command)?;
    let v = cfg.problem_block(command)?.advection_speed()?;
    let g = cfg.grid_block(command)?;
    let vel = Velocity::new(v);
    let summary = stability_summary(&kind, vel, g.h, g.tau)?;
    if opts.strict && !summary.probabilistic {
        return Err(Failure::Stability(Box::new(check_stability(
            &kind,
            vel,
            g.lambda(),
        ))));
    }
    json(&summary)
}

fn mc(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::Mc;
    format_for(cfg, command, Format::Json, &[Format::Json])?;
    let block = cfg.block(&cfg.mc, "mc", command)?;
    let seed = require_seed(opts, block.seed, command)?;
    let scheme = cfg.scheme_config(command)?;
    let profile = cfg.problem_block(command)?.profile()?;
    let g = cfg.grid_block(command)?;
    if g.mode != GridMode::Cone {
        return Err(Failure::Config("`mc` runs on a cone grid".into()));
    }
    let grid = g.cone()?;
    let (layer, index) = block.target.unwrap_or((grid.n(), grid.n()));
    let d0 = profile.sample((0..grid.initial_len()).map(|i| grid.x(i)));
    let est = simulate_mc((layer, index), &d0, &scheme, &grid, block.n_paths, seed)?;
    json(&McRecord {
        estimate: est.estimate,
        std_error: est.std_error,
        deterministic_value: est.deterministic,
        z_score: Some(est.z_score()).filter(|z| z.is_finite()),
        n_paths: est.n_paths,
        seed,
        layer,
        index,
        x: grid.x(index),
        t: grid.time(layer)?,
        lambda: g.lambda(),
    })
}

fn limiters(cfg: &RunConfig) -> Result<String, Failure> {
    let command = Command::Limiters;
    format_for(cfg, command, Format::Json, &[Format::Json])?;
    let block = cfg.block(&cfg.limiters, "limiters", command)?;
    let vel = Velocity::new(block.v);
    let (lim, solution) = equality_limiters(block.v, block.gamma2, block.gamma3)?;
    let kind = SchemeKind::Limiter(lim);
    let bound = cfl_bound(&kind, vel);
    let lambda = cfg.grid.as_ref().map(|g| g.lambda());
    json(&LimitersRecord {
        v: block.v,
        gamma1: lim.gamma1(),
        gamma2: lim.gamma2(),
        gamma3: lim.gamma3(),
        gamma4: lim.gamma4(),
        branch: solution.branch,
        quadratic_residual: solution.residual,
        equality_residual: stability_equality_residual(vel, &lim),
        cfl_bound: bound,
        lambda,
        limiter_feasible: lambda
            .map(|l| check_stability(&kind, vel, l).limiter_feasible == Some(true)),
    })
}

fn convergence(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::Convergence;
    let format = format_for(cfg, command, Format::Csv, &[Format::Csv, Format::Json])?;
    let block = cfg.block(&cfg.convergence, "convergence", command)?;
    let scheme = cfg.scheme_config(command)?;
    let problem = cfg.problem_block(command)?;
    let law = problem.law()?;
    problem.advection_speed()?;
    let profile = problem.profile()?;
    if block.resolutions.is_empty() {
        return Err(Failure::Config(
            "`convergence` needs at least one resolution".into(),
        ));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(block.resolutions.len());
    for &m in &block.resolutions {
        let grid = PeriodicGrid::covering(m, block.x0, block.length)?;
        let h = grid.h();
        let tau = block.lambda * h;
        let steps = (block.final_time / tau).round() as usize;
        let t = steps as f64 * tau;
        let u = evolve_periodic(
            &profile.sample(grid.points()),
            &scheme,
            &grid,
            tau,
            steps,
            None,
            opts.strict,
        )?;
        let exact = grid
            .points()
            .into_iter()
            .map(|x| exact_solution(&law, &profile, x, t))
            .collect::<Result<Vec<_>, _>>()?;
        let l1 = l1_error(&u, &exact, h)?;
        let observed_order = rows
            .last()
            .map(|prev| (prev.l1_error / l1).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow {
            m,
            h,
            steps,
            l1_error: l1,
            observed_order,
        });
    }
    table(format, block.lambda, &rows)
}

fn gds(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::Gds;
    let format = format_for(cfg, command, Format::Csv, &[Format::Csv, Format::Json])?;
    let block = cfg.block(&cfg.gds, "gds", command)?;
    let scheme = cfg.scheme_config(command)?;
    let profile = cfg.problem_block(command)?.profile()?;
    let g = cfg.grid_block(command)?;
    if g.mode != GridMode::Periodic {
        return Err(Failure::Config(
            "`gds` transports the fast field on a periodic grid".into(),
        ));
    }
    let grid = g.periodic()?;
    let init = TwoScaleState {
        h_slow: block.h0,
        mu_field: profile.sample(grid.points()),
        tau_slow: 0.0,
        t_fast: g.t0,
    };
    let rate = block.rate;
    let v0: Box<dyn Fn(f64, f64, f64) -> f64> = match block.v0 {
        SlowVelocity::Zero => Box::new(|_, _, _| 0.0),
        SlowVelocity::Const => Box::new(move |_, _, _| rate),
        SlowVelocity::MeanCoupled => Box::new(|_, _, m| m),
    };
    let fast = FastTransport {
        scheme,
        grid,
        tau: g.tau,
        source: None,
        strict: opts.strict,
    };
    let trajectory = evolve_two_scale(
        init,
        &*v0,
        &fast,
        block.slow_step,
        block.substeps,
        block.n_slow,
    )?;
    let rows: Vec<GdsRow> = trajectory
        .iter()
        .map(|s| GdsRow {
            tau: s.tau_slow,
            h_slow: s.h_slow,
            mu_mean: s.mu_mean(),
            mu_min: s.mu_min(),
            mu_max: s.mu_max(),
        })
        .collect();
    table(format, g.lambda(), &rows)
}

fn fnn_approx(cfg: &RunConfig, opts: Options) -> Result<String, Failure> {
    let command = Command::FnnApprox;
    format_for(cfg, command, Format::Json, &[Format::Json])?;
    let block = cfg.block(&cfg.fnn, "fnn", command)?;
    let seed = require_seed(opts, block.seed, command)?;
    let net = block.network()?;
    let domain = BoxDomain(block.domain.clone());
    let direction = match &block.target.direction {
        Some(d) if d.len() != domain.dim() => {
            return Err(Failure::Config(format!(
                "target direction has {} entries for a {}-dimensional box",
                d.len(),
                domain.dim()
            )))
        }
        Some(d) => d.clone(),
        None => (0..domain.dim())
            .map(|k| if k == 0 { 1.0 } else { 0.0 })
            .collect(),
    };
    let profile = block.target.profile;
    let target = move |x: &[f64]| profile.eval(x.iter().zip(&direction).map(|(a, b)| a * b).sum());
    let est = l1_distance(&net, &target, &domain, block.n_samples, seed)?;
    json(&FnnRecord {
        l1_estimate: est.estimate,
        std_error: est.std_error,
        volume: est.volume,
        n_samples: block.n_samples,
        seed,
        lambda: cfg.grid.as_ref().map(|g| g.lambda()),
    })
}
