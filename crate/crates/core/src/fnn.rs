//! One-hidden-layer sigmoidal networks `α0 + Σ αᵢ σ(yᵢ·x + βᵢ)` and their L1
//! distance to a target function on a box.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{mean_and_std_error, StreamKey};

/// Logistic function, evaluated without overflow for large `|t|`.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmoidNode {
    pub alpha: f64,
    pub y: Vec<f64>,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmoidalNetwork {
    pub alpha0: f64,
    #[serde(default)]
    pub nodes: Vec<SigmoidNode>,
}

impl SigmoidalNetwork {
    pub fn new(alpha0: f64, nodes: Vec<SigmoidNode>) -> Result<Self> {
        let net = Self { alpha0, nodes };
        net.validate()?;
        Ok(net)
    }

    pub fn constant(alpha0: f64) -> Self {
        Self {
            alpha0,
            nodes: Vec::new(),
        }
    }

    /// Input dimension, if the network has any nodes.
    pub fn dim(&self) -> Option<usize> {
        self.nodes.first().map(|n| n.y.len())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.dim() {
            if let Some((i, n)) = self.nodes.iter().enumerate().find(|(_, n)| n.y.len() != d) {
                return Err(invalid(format!(
                    "node {i} has dimension {}, expected {d}",
                    n.y.len()
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if x.len() != d {
                return Err(invalid(format!(
                    "input has dimension {}, network expects {d}",
                    x.len()
                )));
            }
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.alpha0
            + self
                .nodes
                .iter()
                .map(|n| {
                    let z: f64 = n.y.iter().zip(x).map(|(a, b)| a * b).sum();
                    n.alpha * sigmoid(z + n.beta)
                })
                .sum::<f64>()
    }
}

pub fn eval_fnn(net: &SigmoidalNetwork, x: &[f64]) -> Result<f64> {
    net.eval(x)
}

/// Axis-aligned box given by per-dimension `(low, high)` bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain(pub Vec<(f64, f64)>);

impl BoxDomain {
    pub fn volume(&self) -> f64 {
        self.0.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub volume: f64,
}

/// Monte Carlo estimate of `‖target - net‖_{L1(box)}` from uniform samples.
///
/// Sample `k` is drawn from stream `k` of `seed`.
pub fn l1_distance(
    net: &SigmoidalNetwork,
    target: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    n_samples: u64,
    seed: u64,
) -> Result<L1Estimate> {
    if n_samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    if domain.0.is_empty() || domain.0.iter().any(|(lo, hi)| !(hi > lo)) {
        return Err(invalid(format!("empty box {:?}", domain.0)));
    }
    if let Some(d) = net.dim() {
        if d != domain.dim() {
            return Err(invalid(format!(
                "box has dimension {}, network expects {d}",
                domain.dim()
            )));
        }
    }
    let key = StreamKey::new(seed);
    let volume = domain.volume();
    let gaps: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = key.stream(k);
            let x: Vec<f64> = domain
                .0
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                .collect();
            (target(&x) - net.eval_unchecked(&x)).abs()
        })
        .collect();
    let (mean, se) = mean_and_std_error(&gaps);
    Ok(L1Estimate {
        estimate: volume * mean,
        std_error: volume * se,
        volume,
    })
}
