//! Artifacts written by the commands. Each record deserializes back into
//! itself and rejects fields it does not know.

use probflux_core::limiters::Branch;
use probflux_core::markov::unbounded;
use serde::{Deserialize, Serialize};

/// JSON form of a CSV table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table<R> {
    pub lambda: f64,
    pub rows: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRow {
    pub layer: usize,
    pub i: usize,
    pub x: f64,
    pub t: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceRow {
    pub m: usize,
    pub h: f64,
    pub steps: usize,
    pub l1_error: f64,
    /// Empty on the coarsest grid.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdsRow {
    pub tau: f64,
    pub h_slow: f64,
    pub mu_mean: f64,
    pub mu_min: f64,
    pub mu_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRecord {
    pub estimate: f64,
    pub std_error: f64,
    pub deterministic_value: f64,
    /// `None` when the estimate differs from the recursion but has no spread.
    pub z_score: Option<f64>,
    pub n_paths: u64,
    pub seed: u64,
    pub layer: usize,
    pub index: usize,
    pub x: f64,
    pub t: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitersRecord {
    pub v: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub branch: Branch,
    pub quadratic_residual: f64,
    pub equality_residual: f64,
    #[serde(with = "unbounded")]
    pub cfl_bound: f64,
    /// Mesh ratio of the optional grid block.
    pub lambda: Option<f64>,
    pub limiter_feasible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnnRecord {
    pub l1_estimate: f64,
    pub std_error: f64,
    pub volume: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub lambda: Option<f64>,
}
