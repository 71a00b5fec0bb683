//! Run configuration: one JSON document per invocation.

use std::path::PathBuf;

use probflux_core::fnn::{SigmoidNode, SigmoidalNetwork};
use probflux_core::{
    ConeGrid, ConservationLaw, InitialProfile, PeriodicGrid, SchemeConfig, SchemeKind, SpeedModel,
    SpeedSampling,
};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Check,
    Mc,
    Limiters,
    Convergence,
    Gds,
    FnnApprox,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Check => "check",
            Self::Mc => "mc",
            Self::Limiters => "limiters",
            Self::Convergence => "convergence",
            Self::Gds => "gds",
            Self::FnnApprox => "fnn-approx",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub scheme: Option<SchemeBlock>,
    pub problem: Option<ProblemBlock>,
    pub grid: Option<GridBlock>,
    pub mc: Option<McBlock>,
    pub limiters: Option<LimitersBlock>,
    pub convergence: Option<ConvergenceBlock>,
    pub gds: Option<GdsBlock>,
    pub fnn: Option<FnnBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeBlock {
    pub name: String,
    pub gammas: Option<[f64; 4]>,
    #[serde(default)]
    pub speed_sampling: SpeedSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    Advection,
    Burgers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Constant,
    Sine,
    Gauss,
    Riemann,
}

/// Law and initial data. Profile parameters sit next to `u0`; the ones a
/// profile does not use are ignored.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub law: LawName,
    pub a: Option<f64>,
    pub u0: ProfileName,
    pub value: Option<f64>,
    pub amplitude: Option<f64>,
    pub wavenumber: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub u_left: Option<f64>,
    pub u_right: Option<f64>,
    pub x_jump: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    Cone,
    Periodic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub mode: GridMode,
    /// Cone half-width: the initial layer has `2n + 1` points.
    pub n: Option<usize>,
    /// Number of periodic cells.
    pub m: Option<usize>,
    pub h: f64,
    pub tau: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub t0: f64,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBlock {
    pub n_paths: u64,
    pub seed: Option<u64>,
    /// `(layer, global index)`; defaults to the apex of the cone.
    pub target: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitersBlock {
    pub v: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub gamma3: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceBlock {
    /// Cell counts of the successive periodic grids.
    pub resolutions: Vec<usize>,
    pub lambda: f64,
    pub final_time: f64,
    #[serde(default = "unit")]
    pub length: f64,
    #[serde(default)]
    pub x0: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlowVelocity {
    Zero,
    Const,
    MeanCoupled,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdsBlock {
    pub v0: SlowVelocity,
    /// Growth rate for `v0 = "const"`.
    #[serde(default = "unit")]
    pub rate: f64,
    #[serde(default)]
    pub h0: f64,
    pub slow_step: f64,
    pub substeps: usize,
    pub n_slow: usize,
}

/// Ridge target `f(x) = profile(direction · x)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetBlock {
    pub profile: InitialProfile,
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnnBlock {
    #[serde(default)]
    pub alpha0: f64,
    pub nodes: Vec<SigmoidNode>,
    pub target: TargetBlock,
    pub domain: Vec<(f64, f64)>,
    pub n_samples: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Parses a config document; errors carry serde's line and column.
pub fn parse(text: &str) -> Result<RunConfig, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Config(format!("config: {e}")))
}

fn missing(block: &str, command: Command) -> Failure {
    Failure::Config(format!("`{}` needs a `{block}` block", command.name()))
}

impl RunConfig {
    pub fn scheme_block(&self, command: Command) -> Result<&SchemeBlock, Failure> {
        self.scheme
            .as_ref()
            .ok_or_else(|| missing("scheme", command))
    }

    pub fn problem_block(&self, command: Command) -> Result<&ProblemBlock, Failure> {
        self.problem
            .as_ref()
            .ok_or_else(|| missing("problem", command))
    }

    pub fn grid_block(&self, command: Command) -> Result<&GridBlock, Failure> {
        self.grid.as_ref().ok_or_else(|| missing("grid", command))
    }

    pub fn block<'a, T>(
        &self,
        block: &'a Option<T>,
        name: &str,
        command: Command,
    ) -> Result<&'a T, Failure> {
        block.as_ref().ok_or_else(|| missing(name, command))
    }

    pub fn kind(&self, command: Command) -> Result<SchemeKind, Failure> {
        let s = self.scheme_block(command)?;
        Ok(SchemeKind::from_name(&s.name, s.gammas)?)
    }

    /// Scheme driven by the configured law.
    pub fn scheme_config(&self, command: Command) -> Result<SchemeConfig, Failure> {
        let kind = self.kind(command)?;
        let problem = self.problem_block(command)?;
        let speed = match problem.law {
            LawName::Advection => SpeedModel::Constant(problem.advection_speed()?),
            LawName::Burgers => SpeedModel::Law {
                law: ConservationLaw::Burgers,
                sampling: self.scheme_block(command)?.speed_sampling,
            },
        };
        Ok(SchemeConfig { kind, speed })
    }
}

impl ProblemBlock {
    pub fn advection_speed(&self) -> Result<f64, Failure> {
        match self.law {
            LawName::Advection => self
                .a
                .ok_or_else(|| Failure::Config("advection needs the speed `a`".into())),
            LawName::Burgers => Err(Failure::Config(
                "this command needs a linear advection problem".into(),
            )),
        }
    }

    pub fn law(&self) -> Result<ConservationLaw, Failure> {
        Ok(match self.law {
            LawName::Advection => ConservationLaw::LinearAdvection {
                a: self.advection_speed()?,
            },
            LawName::Burgers => ConservationLaw::Burgers,
        })
    }

    pub fn profile(&self) -> Result<InitialProfile, Failure> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Failure::Config(format!("initial profile needs `{name}`")))
        };
        Ok(match self.u0 {
            ProfileName::Constant => InitialProfile::Constant {
                value: need(self.value, "value")?,
            },
            ProfileName::Sine => InitialProfile::Sine {
                amplitude: self.amplitude.unwrap_or(1.0),
                wavenumber: self.wavenumber.unwrap_or(1.0),
            },
            ProfileName::Gauss => InitialProfile::Gauss {
                amplitude: self.amplitude.unwrap_or(1.0),
                center: self.center.unwrap_or(0.0),
                width: need(self.width, "width")?,
            },
            ProfileName::Riemann => InitialProfile::Riemann {
                u_left: need(self.u_left, "u_left")?,
                u_right: need(self.u_right, "u_right")?,
                x_jump: self.x_jump.unwrap_or(0.0),
            },
        })
    }
}

impl GridBlock {
    pub fn lambda(&self) -> f64 {
        self.tau / self.h
    }

    pub fn cone(&self) -> Result<ConeGrid, Failure> {
        let n = self
            .n
            .ok_or_else(|| Failure::Config("cone grid needs the half-width `n`".into()))?;
        Ok(ConeGrid::new(n, self.h, self.tau, self.x0, self.t0)?)
    }

    pub fn periodic(&self) -> Result<PeriodicGrid, Failure> {
        let m = self
            .m
            .ok_or_else(|| Failure::Config("periodic grid needs the cell count `m`".into()))?;
        Ok(PeriodicGrid::new(m, self.h, self.x0)?)
    }
}

impl FnnBlock {
    pub fn network(&self) -> Result<SigmoidalNetwork, Failure> {
        Ok(SigmoidalNetwork::new(self.alpha0, self.nodes.clone())?)
    }
}
