//! Explicit schemes read as Markov chains.
//!
//! The new-layer value at `x` is the expectation of old-layer values over a jump
//! to `x - 2h, ..., x + 2h`, with the stencil weights as jump probabilities. The
//! chain therefore runs backwards in time, from the point being computed to the
//! data it depends on. A scheme has this interpretation exactly when its
//! weights are nonnegative, which is also its monotone (stable) regime.

mod evolve;

pub use evolve::{
    chain_tables, evolve_deterministic, evolve_periodic, expectation_step, simulate_mc, ChainRun,
    McEstimate,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::{SchemeKind, StencilWeights, Velocity, OFFSETS};

/// Entries above `-PROBABILITY_TOL` count as nonnegative.
pub const PROBABILITY_TOL: f64 = 1e-14;
/// Largest tolerated deviation of a table's total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Jump probabilities to `x - 2h, x - h, x, x + h, x + 2h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable(pub [f64; 5]);

impl TransitionTable {
    pub fn get(&self, offset: isize) -> f64 {
        self.0[(offset + 2) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_probabilistic(&self) -> bool {
        self.0.iter().all(|p| *p >= -PROBABILITY_TOL)
    }

    /// `(offset, value)` of every entry below `-PROBABILITY_TOL`.
    pub fn violations(&self) -> Vec<(i32, f64)> {
        OFFSETS
            .iter()
            .zip(self.0.iter())
            .filter(|(_, p)| **p < -PROBABILITY_TOL)
            .map(|(o, p)| (*o as i32, *p))
            .collect()
    }

    /// Expected old-layer value seen from the new-layer point.
    pub fn expectation(&self, values: [f64; 5]) -> f64 {
        let mut acc = 0.0;
        for (p, v) in self.0.iter().zip(values.iter()) {
            acc += p * v;
        }
        acc
    }
}

pub fn transition_table(w: &StencilWeights) -> Result<TransitionTable> {
    let sum = w.sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Inconsistent { sum });
    }
    Ok(TransitionTable(w.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainMoments {
    /// Mean displacement of one jump.
    pub drift: f64,
    /// Mean squared displacement of one jump.
    pub second_moment: f64,
    pub covariance: f64,
}

impl ChainMoments {
    /// Chain velocity `drift / τ`.
    pub fn velocity(&self, tau: f64) -> f64 {
        self.drift / tau
    }
}

pub fn chain_moments(tt: &TransitionTable, h: f64) -> ChainMoments {
    let [pm2, pm1, _, pp1, pp2] = tt.0;
    let drift = h * (-pm1 + pp1 - 2.0 * pm2 + 2.0 * pp2);
    let second_moment = h * h * (pm1 + pp1 + 4.0 * pm2 + 4.0 * pp2);
    ChainMoments {
        drift,
        second_moment,
        covariance: second_moment - drift * drift,
    }
}

/// First-moment consistency of a chain against the transported speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalConsistency {
    /// `|drift - v_chain·τ| / (τ + h)` with the scheme's symbolic chain velocity.
    pub residual: f64,
    /// Symbolic chain velocity the residual is measured against.
    pub chain_velocity: f64,
    /// `b_{j-1} + b_j + b_{j+1} + b_{j+2}` of the assembled coefficients.
    pub flux_sum: f64,
    /// Tabulated closed form of the flux sum for the limiter scheme.
    pub tabulated_flux_sum: Option<f64>,
    /// `|drift - vτ| / (τ + h)`: the chain moving with the transport.
    pub residual_vs_plus_v: f64,
    /// `|drift + vτ| / (τ + h)`: the chain moving against the transport.
    pub residual_vs_minus_v: f64,
}

pub fn local_consistency(
    moments: &ChainMoments,
    kind: &SchemeKind,
    vel: Velocity,
    tau: f64,
    h: f64,
) -> Result<LocalConsistency> {
    let lambda = tau / h;
    let chain_velocity = kind.chain_velocity(vel.value(), lambda)?;
    let scale = tau + h;
    Ok(LocalConsistency {
        residual: (moments.drift - chain_velocity * tau).abs() / scale,
        chain_velocity,
        flux_sum: kind.fluxes(vel.value(), lambda)?.flux_sum(),
        tabulated_flux_sum: kind.limiters().map(|l| l.flux_sum(vel)),
        residual_vs_plus_v: (moments.drift - vel.value() * tau).abs() / scale,
        residual_vs_minus_v: (moments.drift + vel.value() * tau).abs() / scale,
    })
}

pub fn local_consistency_residual(
    moments: &ChainMoments,
    kind: &SchemeKind,
    vel: Velocity,
    tau: f64,
    h: f64,
) -> Result<f64> {
    Ok(local_consistency(moments, kind, vel, tau, h)?.residual)
}

/// Second-moment consistency of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalConsistency {
    /// `|covariance - symbolic| / (τ + h)`.
    pub residual: f64,
    /// `τ·(h·spread - τ·v_chain²)`.
    pub symbolic_covariance: f64,
    /// Measured covariance is below `-1e-12`.
    pub negative_covariance: bool,
}

pub fn global_consistency(
    moments: &ChainMoments,
    kind: &SchemeKind,
    vel: Velocity,
    tau: f64,
    h: f64,
) -> Result<GlobalConsistency> {
    let lambda = tau / h;
    let v_chain = kind.chain_velocity(vel.value(), lambda)?;
    let spread = kind.spread(vel.value(), lambda)?;
    let symbolic_covariance = tau * (h * spread - tau * v_chain * v_chain);
    Ok(GlobalConsistency {
        residual: (moments.covariance - symbolic_covariance).abs() / (tau + h),
        symbolic_covariance,
        negative_covariance: moments.covariance < -1e-12,
    })
}

pub fn global_consistency_residual(
    moments: &ChainMoments,
    kind: &SchemeKind,
    vel: Velocity,
    tau: f64,
    h: f64,
) -> Result<f64> {
    Ok(global_consistency(moments, kind, vel, tau, h)?.residual)
}

/// Prelimit Landau constant `2τv / (τ + h)`.
pub fn landau_constant(v: f64, tau: f64, h: f64) -> f64 {
    2.0 * tau * v / (tau + h)
}

/// `τa / (c(τ + h))` with `c` the Landau constant at speed `v`; the
/// Lax-Wendroff CFL-type bound asks for this to be at most one.
pub fn landau_cfl_ratio(a: f64, v: f64, tau: f64, h: f64) -> f64 {
    tau * a / (landau_constant(v, tau, h) * (tau + h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub probabilistic: bool,
    pub violated_entries: Vec<(i32, f64)>,
    /// Largest mesh ratio with nonnegative weights; `0` if there is none and
    /// infinite (serialized as `null`) if every ratio works.
    #[serde(with = "unbounded")]
    pub cfl_bound: f64,
    /// Sign, nonnegativity and covariance conditions on the limiters; `None`
    /// for presets without limiters.
    pub limiter_feasible: Option<bool>,
    pub lambda: f64,
}

/// Stability verdict of a preset at speed `vel` and mesh ratio `lambda`.
pub fn check_stability(kind: &SchemeKind, vel: Velocity, lambda: f64) -> StabilityReport {
    let (probabilistic, violated_entries) = match kind.weights(vel.value(), lambda) {
        Ok(w) => {
            let tt = TransitionTable(w.0);
            (tt.is_probabilistic(), tt.violations())
        }
        Err(_) => (false, Vec::new()),
    };
    StabilityReport {
        probabilistic: probabilistic && violated_entries.is_empty(),
        violated_entries,
        cfl_bound: cfl_bound(kind, vel),
        limiter_feasible: kind
            .limiters()
            .map(|lim| limiter_feasible(lim, vel, lambda)),
        lambda,
    }
}

/// Closed-form largest mesh ratio keeping every weight nonnegative.
pub fn cfl_bound(kind: &SchemeKind, vel: Velocity) -> f64 {
    let speed = vel.abs();
    match kind {
        _ if speed == 0.0 => f64::INFINITY,
        SchemeKind::CenteredEuler => 0.0,
        SchemeKind::LaxFriedrichs | SchemeKind::Upwind | SchemeKind::LaxWendroff => 1.0 / speed,
        SchemeKind::Limiter(lim) => {
            // w = identity + λ·d with d fixed by the limiters
            let fc = crate::schemes::preset_limiter_scheme(vel, lim);
            let d = fc.weights(1.0).0;
            let off_center = [d[0], d[1], d[3], d[4]];
            if off_center.iter().any(|x| *x < -PROBABILITY_TOL) {
                return 0.0;
            }
            let outflow = 1.0 - d[2];
            if outflow > 0.0 {
                1.0 / outflow
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Largest `λ ∈ (0, hi]` with nonnegative weights, by bisection on the sign
/// pattern of `weights(λ)`. Assumes the admissible ratios form an interval
/// starting at zero.
pub fn cfl_bound_by_bisection(
    mut weights: impl FnMut(f64) -> Result<StencilWeights>,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let ok = |w: StencilWeights| TransitionTable(w.0).is_probabilistic();
    if ok(weights(hi)?) {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 {
            break;
        }
        if ok(weights(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Nonnegativity of all five limiter-scheme weights at `lambda`, the limiter
/// sign constraints, and nonnegative jump covariance
/// `λ ≤ spread / v_chain²`.
pub fn limiter_feasible(lim: &crate::schemes::LimiterSet, vel: Velocity, lambda: f64) -> bool {
    let (vp, vm) = (vel.plus(), vel.minus());
    let [g1, g2, g3, g4] = lim.as_array();
    let nonnegative = 1.0 - lambda * (vel.abs() + vm * g4 - vp * g1) >= -PROBABILITY_TOL
        && g2 <= 0.0
        && g3 >= 0.0
        && vp * (1.0 + g2) + vm * g4 >= 0.0
        && vm * (g3 - 1.0) + vp * g1 <= 0.0;
    nonnegative && lambda <= covariance_bound(lim, vel) * (1.0 + 1e-12)
}

/// Mesh-ratio bound from nonnegative jump covariance: `spread / v_chain²`.
pub fn covariance_bound(lim: &crate::schemes::LimiterSet, vel: Velocity) -> f64 {
    let v_chain = lim.chain_velocity(vel);
    let spread = lim.spread(vel);
    if v_chain == 0.0 {
        return if spread >= 0.0 { f64::INFINITY } else { 0.0 };
    }
    spread / (v_chain * v_chain)
}

/// Machine-readable stability summary of a preset on a given discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySummary {
    pub scheme: String,
    pub velocity: f64,
    pub lambda: f64,
    pub probabilistic: bool,
    pub violated_entries: Vec<(i32, f64)>,
    #[serde(with = "unbounded")]
    pub cfl_bound: f64,
    pub limiter_feasible: Option<bool>,
    pub drift: f64,
    pub second_moment: f64,
    pub v_mc: f64,
    pub local_residual: f64,
    pub global_residual: f64,
}

pub fn stability_summary(
    kind: &SchemeKind,
    vel: Velocity,
    h: f64,
    tau: f64,
) -> Result<StabilitySummary> {
    let lambda = tau / h;
    let report = check_stability(kind, vel, lambda);
    let tt = transition_table(&kind.weights(vel.value(), lambda)?)?;
    let moments = chain_moments(&tt, h);
    Ok(StabilitySummary {
        scheme: kind.name().to_string(),
        velocity: vel.value(),
        lambda,
        probabilistic: report.probabilistic,
        violated_entries: report.violated_entries,
        cfl_bound: report.cfl_bound,
        limiter_feasible: report.limiter_feasible,
        drift: moments.drift,
        second_moment: moments.second_moment,
        v_mc: moments.velocity(tau),
        local_residual: local_consistency_residual(&moments, kind, vel, tau, h)?,
        global_residual: global_consistency_residual(&moments, kind, vel, tau, h)?,
    })
}

/// `f64` where infinity travels as JSON `null`.
pub mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
