//! Closed-form flux limiters that turn the covariance bound into an equality.
//!
//! Requiring `spread = v_chain²` for the five-point limiter scheme gives a
//! quadratic in `γ1` when `v > 0` and in `γ4` when `v < 0`:
//!
//! ```text
//! v⁺γ1² + [2v⁺(1 - γ2) + 1]γ1 + [v⁺(1 - γ2)² + 3γ2 - 1] = 0
//! v⁻γ4² - [2v⁻(1 + γ3) + 1]γ4 + [v⁻(1 + γ3)² - 1 - 3γ3] = 0
//! ```
//!
//! The root kept is the one with the sign the limiter must have; the other
//! root (zero when `γ2 = 0` or `γ3 = 0`) is rejected.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::schemes::{LimiterSet, Velocity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    MinusRoot,
    PlusRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimiterSolution {
    pub gamma: f64,
    /// The defining quadratic evaluated at `gamma`.
    pub residual: f64,
    pub branch: Branch,
}

/// Coefficients `(a, b, c)` of the `γ1` quadratic.
pub fn gamma1_quadratic(v_plus: f64, gamma2: f64) -> (f64, f64, f64) {
    let s = 1.0 - gamma2;
    (
        v_plus,
        2.0 * v_plus * s + 1.0,
        v_plus * s * s + 3.0 * gamma2 - 1.0,
    )
}

/// Coefficients `(a, b, c)` of the `γ4` quadratic.
pub fn gamma4_quadratic(v_minus: f64, gamma3: f64) -> (f64, f64, f64) {
    let s = 1.0 + gamma3;
    (
        v_minus,
        -(2.0 * v_minus * s + 1.0),
        v_minus * s * s - 1.0 - 3.0 * gamma3,
    )
}

fn eval((a, b, c): (f64, f64, f64), x: f64) -> f64 {
    (a * x + b) * x + c
}

/// `γ1 = -1 + γ2 - (√(8v⁺ + 1 - 16v⁺γ2) + 1) / (2v⁺)`.
pub fn solve_gamma1(v_plus: f64, gamma2: f64) -> Result<LimiterSolution> {
    if !(v_plus > 0.0) || !v_plus.is_finite() {
        return Err(invalid(format!("v+ must be positive, got {v_plus}")));
    }
    if !(gamma2 <= 0.0) {
        return Err(invalid(format!(
            "gamma2 must be non-positive, got {gamma2}"
        )));
    }
    let disc = 8.0 * v_plus + 1.0 - 16.0 * v_plus * gamma2;
    let gamma = -1.0 + gamma2 - (disc.sqrt() + 1.0) / (2.0 * v_plus);
    Ok(LimiterSolution {
        gamma,
        residual: eval(gamma1_quadratic(v_plus, gamma2), gamma),
        branch: Branch::MinusRoot,
    })
}

/// `γ4 = 1 + γ3 + (√(8v⁻ + 1 + 16v⁻γ3) + 1) / (2v⁻)`.
pub fn solve_gamma4(v_minus: f64, gamma3: f64) -> Result<LimiterSolution> {
    if !(v_minus > 0.0) || !v_minus.is_finite() {
        return Err(invalid(format!("v- must be positive, got {v_minus}")));
    }
    if !(gamma3 >= 0.0) {
        return Err(invalid(format!(
            "gamma3 must be non-negative, got {gamma3}"
        )));
    }
    let disc = 8.0 * v_minus + 1.0 + 16.0 * v_minus * gamma3;
    let gamma = 1.0 + gamma3 + (disc.sqrt() + 1.0) / (2.0 * v_minus);
    Ok(LimiterSolution {
        gamma,
        residual: eval(gamma4_quadratic(v_minus, gamma3), gamma),
        branch: Branch::PlusRoot,
    })
}

/// `spread - v_chain²`, i.e.
/// `v⁺(1 - γ1 - 3γ2) + v⁻(1 + γ4 + 3γ3) - [v⁻(1 + γ3 - γ4) - v⁺(1 + γ1 - γ2)]²`.
pub fn stability_equality_residual(vel: Velocity, lim: &LimiterSet) -> f64 {
    let v_chain = lim.chain_velocity(vel);
    lim.spread(vel) - v_chain * v_chain
}

/// Limiters for speed `v` that meet the equality: `γ1` solved when `v > 0`,
/// `γ4` solved when `v < 0`, the unused one left at zero.
pub fn equality_limiters(
    v: f64,
    gamma2: f64,
    gamma3: f64,
) -> Result<(LimiterSet, LimiterSolution)> {
    let vel = Velocity::new(v);
    if vel.plus() > 0.0 {
        let sol = solve_gamma1(vel.plus(), gamma2)?;
        Ok((LimiterSet::new(sol.gamma, gamma2, gamma3, 0.0)?, sol))
    } else if vel.minus() > 0.0 {
        let sol = solve_gamma4(vel.minus(), gamma3)?;
        Ok((LimiterSet::new(0.0, gamma2, gamma3, sol.gamma)?, sol))
    } else {
        Err(invalid(
            "stability-equality limiters are undefined at zero speed",
        ))
    }
}
