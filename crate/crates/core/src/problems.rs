//! Scalar conservation laws `u_t + F(u)_x = 0`, Cauchy and Riemann data, exact
//! solutions for the cases that have them, and discrete error norms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ConservationLaw {
    /// `F(u) = a·u`.
    LinearAdvection { a: f64 },
    /// `F(u) = u²/2`.
    Burgers,
    Custom {
        name: String,
        flux: ScalarFn,
        speed: ScalarFn,
    },
}

impl ConservationLaw {
    pub fn custom(
        name: impl Into<String>,
        flux: impl Fn(f64) -> f64 + Send + Sync + 'static,
        speed: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            flux: Arc::new(flux),
            speed: Arc::new(speed),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::LinearAdvection { .. } => "advection",
            Self::Burgers => "burgers",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn flux(&self, u: f64) -> f64 {
        match self {
            Self::LinearAdvection { a } => a * u,
            Self::Burgers => 0.5 * u * u,
            Self::Custom { flux, .. } => flux(u),
        }
    }

    /// `a(u) = F'(u)`.
    pub fn speed(&self, u: f64) -> f64 {
        match self {
            Self::LinearAdvection { a } => *a,
            Self::Burgers => u,
            Self::Custom { speed, .. } => speed(u),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Self::LinearAdvection { .. })
    }

    /// Largest deviation between `a(u)` and a central difference of `F` over the samples.
    pub fn derivative_mismatch(&self, samples: &[f64], eps: f64) -> f64 {
        samples
            .iter()
            .map(|&u| {
                let fd = (self.flux(u + eps) - self.flux(u - eps)) / (2.0 * eps);
                (fd - self.speed(u)).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for ConservationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LinearAdvection { a } => f.debug_struct("LinearAdvection").field("a", a).finish(),
            Self::Burgers => f.write_str("Burgers"),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

/// Initial profiles `u0(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialProfile {
    Constant {
        value: f64,
    },
    /// `amplitude·sin(wavenumber·x)`.
    Sine {
        amplitude: f64,
        wavenumber: f64,
    },
    /// `amplitude·exp(-(x - center)² / (2 width²))`.
    Gauss {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `u_left` for `x < x_jump`, `u_right` otherwise.
    Riemann {
        u_left: f64,
        u_right: f64,
        x_jump: f64,
    },
}

impl InitialProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Sine {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * x).sin(),
            Self::Gauss {
                amplitude,
                center,
                width,
            } => {
                let z = (x - center) / width;
                amplitude * (-0.5 * z * z).exp()
            }
            Self::Riemann {
                u_left,
                u_right,
                x_jump,
            } => {
                if x < x_jump {
                    u_left
                } else {
                    u_right
                }
            }
        }
    }

    pub fn sample(&self, xs: impl IntoIterator<Item = f64>) -> Vec<f64> {
        xs.into_iter().map(|x| self.eval(x)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CauchyProblem {
    pub law: ConservationLaw,
    pub u0: InitialProfile,
    pub domain: (f64, f64),
    pub horizon: f64,
}

impl CauchyProblem {
    pub fn new(
        law: ConservationLaw,
        u0: InitialProfile,
        domain: (f64, f64),
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if !(domain.1 > domain.0) {
            return Err(invalid(format!("empty domain {domain:?}")));
        }
        Ok(Self {
            law,
            u0,
            domain,
            horizon,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RiemannProblem {
    pub law: ConservationLaw,
    pub u_left: f64,
    pub u_right: f64,
    pub x_jump: f64,
}

/// How a jump between two states evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discontinuity {
    /// Characteristics enter the jump from both sides.
    Shock,
    /// Characteristics run parallel to the jump.
    Contact,
    /// Characteristics leave the jump; the discontinuity opens into a fan.
    Rarefaction,
}

impl RiemannProblem {
    pub fn new(law: ConservationLaw, u_left: f64, u_right: f64, x_jump: f64) -> Result<Self> {
        if u_left == u_right {
            return Err(invalid("Riemann data needs u_left != u_right"));
        }
        Ok(Self {
            law,
            u_left,
            u_right,
            x_jump,
        })
    }

    /// Jump speed `[F] / [u]`.
    pub fn rankine_hugoniot_speed(&self) -> f64 {
        (self.law.flux(self.u_right) - self.law.flux(self.u_left)) / (self.u_right - self.u_left)
    }

    /// `a(u_right) < s < a(u_left)`, strictly.
    pub fn entropy_admissible(&self) -> bool {
        let s = self.rankine_hugoniot_speed();
        self.law.speed(self.u_right) < s && s < self.law.speed(self.u_left)
    }

    pub fn classify(&self) -> Discontinuity {
        let (al, ar) = (self.law.speed(self.u_left), self.law.speed(self.u_right));
        if self.entropy_admissible() {
            Discontinuity::Shock
        } else if al == ar {
            Discontinuity::Contact
        } else {
            Discontinuity::Rarefaction
        }
    }

    pub fn initial_profile(&self) -> InitialProfile {
        InitialProfile::Riemann {
            u_left: self.u_left,
            u_right: self.u_right,
            x_jump: self.x_jump,
        }
    }
}

pub fn rankine_hugoniot_speed(rp: &RiemannProblem) -> Result<f64> {
    if rp.u_left == rp.u_right {
        return Err(invalid("Riemann data needs u_left != u_right"));
    }
    Ok(rp.rankine_hugoniot_speed())
}

pub fn entropy_admissible(rp: &RiemannProblem) -> Result<bool> {
    if rp.u_left == rp.u_right {
        return Err(invalid("Riemann data needs u_left != u_right"));
    }
    Ok(rp.entropy_admissible())
}

/// Closed-form solution where one is available: linear advection of any profile,
/// and Burgers with Riemann data.
pub fn exact_solution(law: &ConservationLaw, u0: &InitialProfile, x: f64, t: f64) -> Result<f64> {
    match (law, u0) {
        (ConservationLaw::LinearAdvection { a }, _) => Ok(u0.eval(x - a * t)),
        (ConservationLaw::Burgers, InitialProfile::Constant { value }) => Ok(*value),
        (
            ConservationLaw::Burgers,
            &InitialProfile::Riemann {
                u_left,
                u_right,
                x_jump,
            },
        ) => {
            if t <= 0.0 {
                return Ok(u0.eval(x));
            }
            let xi = x - x_jump;
            if u_left > u_right {
                let s = 0.5 * (u_left + u_right);
                Ok(if xi < s * t { u_left } else { u_right })
            } else if xi < u_left * t {
                Ok(u_left)
            } else if xi > u_right * t {
                Ok(u_right)
            } else {
                Ok(xi / t)
            }
        }
        (law, u0) => Err(Error::UnsupportedProblem(format!(
            "no closed-form solution for {} with {u0:?}",
            law.name()
        ))),
    }
}

/// Cell-weighted discrete L1 norm `h·Σ|numeric - exact|`.
pub fn l1_error(numeric: &[f64], exact: &[f64], h: f64) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(invalid(format!(
            "length mismatch: {} numeric vs {} exact values",
            numeric.len(),
            exact.len()
        )));
    }
    Ok(h * numeric
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>())
}

/// `log2(coarse / fine)` for one grid halving.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
