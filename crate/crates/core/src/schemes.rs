//! The general five-point explicit family and its classical members.
//!
//! A scheme is described by per-cell [`FluxCoefficients`]; the explicit update
//! multiplies `u_{j-2}, ..., u_{j+2}` by the [`StencilWeights`] derived from them:
//!
//! ```text
//! w(-2) = λ·b̃_{j-1}
//! w(-1) = λ·(b_j - b_{j-1})
//! w( 0) = 1 - λ·(b_j - b_{j+1})
//! w(+1) = λ·(b_{j+2} - b_{j+1})
//! w(+2) = -λ·b̃_{j+2}
//! ```
//!
//! The weights telescope to one whenever `b̃_{j-1} - b_{j-1} = b̃_{j+2} - b_{j+2}`,
//! which every preset here satisfies.
//!
//! Sign conventions: `v⁺ = max(v, 0)` and `v⁻ = max(-v, 0)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problems::ConservationLaw;

/// Offsets of the five stencil points, in the order weights are stored.
pub const OFFSETS: [isize; 5] = [-2, -1, 0, 1, 2];

/// Above this length `step` fans cells out over the rayon pool.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    v: f64,
    plus: f64,
    minus: f64,
}

impl Velocity {
    pub fn new(v: f64) -> Self {
        Self {
            v,
            plus: v.max(0.0),
            minus: (-v).max(0.0),
        }
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn plus(&self) -> f64 {
        self.plus
    }

    pub fn minus(&self) -> f64 {
        self.minus
    }

    pub fn abs(&self) -> f64 {
        self.plus + self.minus
    }
}

/// Constant flux limiters of the five-point upwind scheme.
///
/// Sign constraints: `γ1 ≤ 0`, `γ2 ≤ 0`, `γ3 ≥ 0`, `γ4 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimiterSet {
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    gamma4: f64,
}

impl LimiterSet {
    pub fn new(gamma1: f64, gamma2: f64, gamma3: f64, gamma4: f64) -> Result<Self> {
        let all = [gamma1, gamma2, gamma3, gamma4];
        if all.iter().any(|g| !g.is_finite()) {
            return Err(invalid(format!("limiters must be finite, got {all:?}")));
        }
        if gamma1 > 0.0 || gamma2 > 0.0 {
            return Err(invalid(format!(
                "gamma1 and gamma2 must be non-positive, got {gamma1} and {gamma2}"
            )));
        }
        if gamma3 < 0.0 || gamma4 < 0.0 {
            return Err(invalid(format!(
                "gamma3 and gamma4 must be non-negative, got {gamma3} and {gamma4}"
            )));
        }
        Ok(Self {
            gamma1,
            gamma2,
            gamma3,
            gamma4,
        })
    }

    pub fn zero() -> Self {
        Self {
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma4: 0.0,
        }
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn gamma3(&self) -> f64 {
        self.gamma3
    }

    pub fn gamma4(&self) -> f64 {
        self.gamma4
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma1, self.gamma2, self.gamma3, self.gamma4]
    }

    /// Closed-form chain velocity `v⁻(1 - γ4 + γ3) - v⁺(1 + γ1 - γ2)`.
    pub fn chain_velocity(&self, vel: Velocity) -> f64 {
        vel.minus() * (1.0 - self.gamma4 + self.gamma3)
            - vel.plus() * (1.0 + self.gamma1 - self.gamma2)
    }

    /// `v⁺(1 - γ1 - 3γ2) + v⁻(1 + γ4 + 3γ3)`: the second moment of one jump in
    /// units of `τ·h`.
    pub fn spread(&self, vel: Velocity) -> f64 {
        vel.plus() * (1.0 - self.gamma1 - 3.0 * self.gamma2)
            + vel.minus() * (1.0 + self.gamma4 + 3.0 * self.gamma3)
    }

    /// Reported flux-coefficient aggregate
    /// `v⁺[2(1 + 2γ2) + γ1 + γ2] + v⁻(γ3 + γ4) - |v|`.
    ///
    /// This is the tabulated closed form; it is not the plain sum of the
    /// coefficients returned by [`preset_limiter_scheme`] unless all limiters vanish.
    pub fn flux_sum(&self, vel: Velocity) -> f64 {
        vel.plus() * (2.0 * (1.0 + 2.0 * self.gamma2) + self.gamma1 + self.gamma2)
            + vel.minus() * (self.gamma3 + self.gamma4)
            - vel.abs()
    }

    /// Balance `v⁺(1 + 2γ2) + v⁻(1 - 2γ3) - |v|` between the two ways of reading
    /// `b_{j+1}` off the scheme; zero whenever `γ2 = γ3 = 0`.
    pub fn balance(&self, vel: Velocity) -> f64 {
        vel.plus() * (1.0 + 2.0 * self.gamma2) + vel.minus() * (1.0 - 2.0 * self.gamma3) - vel.abs()
    }
}

impl<'de> Deserialize<'de> for LimiterSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [g1, g2, g3, g4] = <[f64; 4]>::deserialize(d)?;
        LimiterSet::new(g1, g2, g3, g4).map_err(serde::de::Error::custom)
    }
}

/// Weights of the numerical fluxes `h_{j±1/2}` on the neighbouring values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FluxCoefficients {
    pub b_prev: f64,
    pub b_center: f64,
    pub b_next: f64,
    pub b_far: f64,
    pub bt_prev: f64,
    pub bt_far: f64,
}

impl FluxCoefficients {
    /// Coefficients whose tilde variants equal the plain ones.
    pub fn plain(b_prev: f64, b_center: f64, b_next: f64, b_far: f64) -> Self {
        Self {
            b_prev,
            b_center,
            b_next,
            b_far,
            bt_prev: b_prev,
            bt_far: b_far,
        }
    }

    pub fn weights(&self, lambda: f64) -> StencilWeights {
        weights_from_fluxes(self, lambda)
    }

    /// `b_{j-1} + b_j + b_{j+1} + b_{j+2}`.
    pub fn flux_sum(&self) -> f64 {
        self.b_prev + self.b_center + self.b_next + self.b_far
    }

    /// Sum that fixes the first moment of the associated jump: the chain drift
    /// is `-τ` times this. Reduces to [`flux_sum`](Self::flux_sum) when the tilde
    /// coefficients equal the plain ones.
    pub fn chain_flux_sum(&self) -> f64 {
        self.b_center
            + self.b_next
            + (2.0 * self.bt_prev - self.b_prev)
            + (2.0 * self.bt_far - self.b_far)
    }

    /// Second moment of one jump in units of `τ·h`.
    pub fn spread(&self) -> f64 {
        (self.b_center - self.b_prev)
            + (self.b_far - self.b_next)
            + 4.0 * (self.bt_prev - self.bt_far)
    }

    /// Numerical flux `h_{j+1/2}` given `[u_{j-1}, u_j, u_{j+1}, u_{j+2}]`.
    pub fn right_flux(&self, u: [f64; 4]) -> f64 {
        self.b_prev * u[0] + self.b_center * u[1] + self.b_next * u[2] + self.bt_far * u[3]
    }

    /// Numerical flux `h_{j-1/2}` given `[u_{j-2}, u_{j-1}, u_j, u_{j+1}]`.
    pub fn left_flux(&self, u: [f64; 4]) -> f64 {
        self.bt_prev * u[0] + self.b_center * u[1] + self.b_next * u[2] + self.b_far * u[3]
    }
}

/// Multipliers of `u_{j-2}, u_{j-1}, u_j, u_{j+1}, u_{j+2}` in the explicit update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilWeights(pub [f64; 5]);

impl StencilWeights {
    pub const IDENTITY: StencilWeights = StencilWeights([0.0, 0.0, 1.0, 0.0, 0.0]);

    pub fn get(&self, offset: isize) -> f64 {
        self.0[(offset + 2) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        OFFSETS.iter().copied().zip(self.0.iter().copied())
    }

    /// Moves the next-nearest weight onto the nearest neighbour on the requested
    /// side(s). For the limiter scheme this is the same as zeroing `γ2`
    /// (left) or `γ3` (right).
    pub fn folded(mut self, left: bool, right: bool) -> Self {
        if left {
            self.0[1] += self.0[0];
            self.0[0] = 0.0;
        }
        if right {
            self.0[3] += self.0[4];
            self.0[4] = 0.0;
        }
        self
    }

    /// Weighted combination of the values `[u_{j-2}, ..., u_{j+2}]`.
    pub fn apply(&self, u: [f64; 5]) -> f64 {
        self.0.iter().zip(u.iter()).map(|(w, x)| w * x).sum()
    }
}

/// Stencil weights of the general explicit family at mesh ratio `lambda = τ/h`.
pub fn weights_from_fluxes(fc: &FluxCoefficients, lambda: f64) -> StencilWeights {
    StencilWeights([
        lambda * fc.bt_prev,
        lambda * (fc.b_center - fc.b_prev),
        1.0 - lambda * (fc.b_center - fc.b_next),
        lambda * (fc.b_far - fc.b_next),
        -lambda * fc.bt_far,
    ])
}

/// Forward centered Euler: `h_{j+1/2} = a(u_{j+1} + u_j)/2`.
pub fn preset_centered_euler(a: f64) -> FluxCoefficients {
    FluxCoefficients::plain(0.0, 0.5 * a, 0.5 * a, 0.0)
}

/// Lax-Friedrichs: `b_j = a/2 + 1/(2λ)`, `b_{j+1} = a/2 - 1/(2λ)`.
///
/// The centre coefficient is the solution of the defining linear system; it is
/// the only value that reproduces `u_j' = (u_{j+1} + u_{j-1})/2 - λa(u_{j+1} - u_{j-1})/2`.
pub fn preset_lax_friedrichs(a: f64, lambda: f64) -> Result<FluxCoefficients> {
    check_lambda(lambda)?;
    let d = 0.5 / lambda;
    Ok(FluxCoefficients::plain(0.0, 0.5 * a + d, 0.5 * a - d, 0.0))
}

/// Upwind (uncentered Euler): `b_j = (a + |a|)/2`, `b_{j+1} = (a - |a|)/2`.
pub fn preset_upwind(a: f64) -> FluxCoefficients {
    FluxCoefficients::plain(0.0, 0.5 * (a + a.abs()), 0.5 * (a - a.abs()), 0.0)
}

/// Lax-Wendroff: `b_j = a/2 + λa²/2`, `b_{j+1} = a/2 - λa²/2`.
pub fn preset_lax_wendroff(a: f64, lambda: f64) -> FluxCoefficients {
    let diff = 0.5 * lambda * a * a;
    FluxCoefficients::plain(0.0, 0.5 * a + diff, 0.5 * a - diff, 0.0)
}

/// Five-point upwind scheme with constant flux limiters.
///
/// The coefficients are chosen so the assembled weights are exactly
///
/// ```text
/// w(-2) = -λ v⁺γ2
/// w(-1) =  λ [v⁺(1 + γ2) + v⁻γ4]
/// w( 0) =  1 - λ [|v| + v⁻γ4 - v⁺γ1]
/// w(+1) =  λ [v⁻(1 - γ3) - v⁺γ1]
/// w(+2) =  λ v⁻γ3
/// ```
pub fn preset_limiter_scheme(vel: Velocity, lim: &LimiterSet) -> FluxCoefficients {
    let (vp, vm) = (vel.plus(), vel.minus());
    let b_center = vp * (1.0 + lim.gamma2) + vm * lim.gamma4;
    let b_next = b_center - vel.abs() - vm * lim.gamma4 + vp * lim.gamma1;
    FluxCoefficients {
        b_prev: 0.0,
        b_center,
        b_next,
        b_far: vp * lim.gamma2 - vm * lim.gamma3,
        bt_prev: -vp * lim.gamma2,
        bt_far: -vm * lim.gamma3,
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!(
            "mesh ratio tau/h must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// A named member of the explicit family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    CenteredEuler,
    LaxFriedrichs,
    Upwind,
    LaxWendroff,
    Limiter(LimiterSet),
}

impl SchemeKind {
    pub const NAMES: [&'static str; 5] = [
        "centered-euler",
        "lax-friedrichs",
        "upwind",
        "lax-wendroff",
        "limiter",
    ];

    /// Looks a preset up by name; `limiter` needs the four limiter values.
    pub fn from_name(name: &str, gammas: Option<[f64; 4]>) -> Result<Self> {
        let kind = match name {
            "centered-euler" => Self::CenteredEuler,
            "lax-friedrichs" => Self::LaxFriedrichs,
            "upwind" => Self::Upwind,
            "lax-wendroff" => Self::LaxWendroff,
            "limiter" => {
                let [g1, g2, g3, g4] =
                    gammas.ok_or_else(|| invalid("limiter scheme needs four gamma values"))?;
                Self::Limiter(LimiterSet::new(g1, g2, g3, g4)?)
            }
            other => {
                return Err(invalid(format!(
                    "unknown scheme {other:?}, expected one of {:?}",
                    Self::NAMES
                )))
            }
        };
        Ok(kind)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CenteredEuler => "centered-euler",
            Self::LaxFriedrichs => "lax-friedrichs",
            Self::Upwind => "upwind",
            Self::LaxWendroff => "lax-wendroff",
            Self::Limiter(_) => "limiter",
        }
    }

    pub fn limiters(&self) -> Option<&LimiterSet> {
        match self {
            Self::Limiter(lim) => Some(lim),
            _ => None,
        }
    }

    /// Flux coefficients at local speed `v` and mesh ratio `lambda`.
    pub fn fluxes(&self, v: f64, lambda: f64) -> Result<FluxCoefficients> {
        check_lambda(lambda)?;
        Ok(match self {
            Self::CenteredEuler => preset_centered_euler(v),
            Self::LaxFriedrichs => preset_lax_friedrichs(v, lambda)?,
            Self::Upwind => preset_upwind(v),
            Self::LaxWendroff => preset_lax_wendroff(v, lambda),
            Self::Limiter(lim) => preset_limiter_scheme(Velocity::new(v), lim),
        })
    }

    pub fn weights(&self, v: f64, lambda: f64) -> Result<StencilWeights> {
        Ok(self.fluxes(v, lambda)?.weights(lambda))
    }

    /// Symbolic chain velocity (drift per unit time) at speed `v`.
    pub fn chain_velocity(&self, v: f64, lambda: f64) -> Result<f64> {
        Ok(match self {
            Self::Limiter(lim) => lim.chain_velocity(Velocity::new(v)),
            _ => -self.fluxes(v, lambda)?.chain_flux_sum(),
        })
    }

    /// Symbolic second moment of one jump, in units of `τ·h`.
    pub fn spread(&self, v: f64, lambda: f64) -> Result<f64> {
        Ok(match self {
            Self::Limiter(lim) => lim.spread(Velocity::new(v)),
            _ => self.fluxes(v, lambda)?.spread(),
        })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Limiter(l) => write!(f, "limiter{:?}", l.as_array()),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Each step drops one cell at each end; edge cells fold their
    /// next-nearest weight onto the nearest neighbour.
    Cone,
    Periodic,
}

/// How local speeds of a nonlinear law enter the flux coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedSampling {
    /// All coefficients of cell `j` use `a(u_j)`.
    #[default]
    Frozen,
    /// Coefficient `b_m` uses `(v_{m-1} + v_m)/2`.
    Averaged,
}

#[derive(Debug, Clone)]
pub enum SpeedModel {
    Constant(f64),
    Law {
        law: ConservationLaw,
        sampling: SpeedSampling,
    },
}

/// A preset together with the transport speed it is driven by.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub speed: SpeedModel,
}

/// Per-cell coefficients for one step.
#[derive(Debug, Clone)]
pub enum Coefficients {
    Uniform(FluxCoefficients),
    /// Indexed like the input state: entry `i` belongs to the stencil centred at `u[i]`.
    PerCell(Vec<FluxCoefficients>),
}

impl SchemeConfig {
    pub fn constant(kind: SchemeKind, a: f64) -> Self {
        Self {
            kind,
            speed: SpeedModel::Constant(a),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.speed, SpeedModel::Constant(_))
    }

    /// Flux coefficients for a step leaving state `u`.
    pub fn coefficients(&self, u: &[f64], lambda: f64, boundary: Boundary) -> Result<Coefficients> {
        let (law, sampling) = match &self.speed {
            SpeedModel::Constant(a) => {
                return Ok(Coefficients::Uniform(self.kind.fluxes(*a, lambda)?))
            }
            SpeedModel::Law { law, sampling } => (law, *sampling),
        };
        let speeds: Vec<f64> = u.iter().map(|&x| law.speed(x)).collect();
        let n = u.len() as isize;
        let at = |i: isize| -> f64 {
            let idx = match boundary {
                Boundary::Periodic => i.rem_euclid(n),
                Boundary::Cone => i.clamp(0, n - 1),
            };
            speeds[idx as usize]
        };
        let per_cell = (0..n)
            .map(|j| match sampling {
                SpeedSampling::Frozen => self.kind.fluxes(at(j), lambda),
                SpeedSampling::Averaged => {
                    let psi = |m: isize| 0.5 * (at(m - 1) + at(m));
                    let left = self.kind.fluxes(psi(j - 1), lambda)?;
                    let center = self.kind.fluxes(psi(j), lambda)?;
                    let next = self.kind.fluxes(psi(j + 1), lambda)?;
                    let right = self.kind.fluxes(psi(j + 2), lambda)?;
                    Ok(FluxCoefficients {
                        b_prev: left.b_prev,
                        bt_prev: left.bt_prev,
                        b_center: center.b_center,
                        b_next: next.b_next,
                        b_far: right.b_far,
                        bt_far: right.bt_far,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coefficients::PerCell(per_cell))
    }
}

/// Stencil weights of every output cell, with cone edges folded.
///
/// Output cell `k` is centred at input index `k` (periodic) or `k + 1` (cone).
pub fn cell_weights(
    coeffs: &Coefficients,
    len: usize,
    lambda: f64,
    boundary: Boundary,
) -> Result<Vec<StencilWeights>> {
    check_len(len, boundary)?;
    if let Coefficients::PerCell(v) = coeffs {
        if v.len() != len {
            return Err(invalid(format!(
                "{} coefficient sets for {len} cells",
                v.len()
            )));
        }
    }
    let fc_at = |i: usize| match coeffs {
        Coefficients::Uniform(fc) => fc,
        Coefficients::PerCell(v) => &v[i],
    };
    Ok(match boundary {
        Boundary::Periodic => (0..len).map(|i| fc_at(i).weights(lambda)).collect(),
        Boundary::Cone => (1..len - 1)
            .map(|i| fc_at(i).weights(lambda).folded(i < 2, i + 2 >= len))
            .collect(),
    })
}

fn check_len(len: usize, boundary: Boundary) -> Result<()> {
    let min = match boundary {
        Boundary::Periodic => 5,
        Boundary::Cone => 3,
    };
    if len < min {
        return Err(invalid(format!(
            "state of length {len} is too short for a {boundary:?} step"
        )));
    }
    Ok(())
}

/// Values `[u_{i-2}, ..., u_{i+2}]` around input index `i`; cone reads outside the
/// state only where the corresponding weight is zero.
pub(crate) fn neighbourhood(u: &[f64], i: usize, boundary: Boundary) -> [f64; 5] {
    let n = u.len() as isize;
    let mut out = [0.0; 5];
    for (slot, off) in OFFSETS.iter().enumerate() {
        let k = i as isize + off;
        out[slot] = match boundary {
            Boundary::Periodic => u[k.rem_euclid(n) as usize],
            Boundary::Cone if (0..n).contains(&k) => u[k as usize],
            Boundary::Cone => 0.0,
        };
    }
    out
}

/// One explicit step of the general family, plus `τ·f` forcing.
///
/// In cone mode the result is two entries shorter than `u` (one per end).
pub fn step(
    u: &[f64],
    coeffs: &Coefficients,
    lambda: f64,
    boundary: Boundary,
    source: Option<&[f64]>,
    tau: f64,
) -> Result<Vec<f64>> {
    let weights = cell_weights(coeffs, u.len(), lambda, boundary)?;
    apply_weights(u, &weights, boundary, source, tau)
}

/// Applies precomputed per-cell weights (as returned by [`cell_weights`]).
pub fn apply_weights(
    u: &[f64],
    weights: &[StencilWeights],
    boundary: Boundary,
    source: Option<&[f64]>,
    tau: f64,
) -> Result<Vec<f64>> {
    let shift = match boundary {
        Boundary::Periodic => 0,
        Boundary::Cone => 1,
    };
    if weights.len() + 2 * shift != u.len() {
        return Err(invalid(format!(
            "{} weight sets for a state of length {}",
            weights.len(),
            u.len()
        )));
    }
    if let Some(f) = source {
        if f.len() != u.len() {
            return Err(invalid(format!(
                "source has {} entries, state has {}",
                f.len(),
                u.len()
            )));
        }
    }
    let cell = |(k, w): (usize, &StencilWeights)| {
        let i = k + shift;
        let mut value = w.apply(neighbourhood(u, i, boundary));
        if let Some(f) = source {
            value += tau * f[i];
        }
        value
    };
    Ok(if weights.len() >= PARALLEL_THRESHOLD {
        weights.par_iter().enumerate().map(cell).collect()
    } else {
        weights.iter().enumerate().map(cell).collect()
    })
}
