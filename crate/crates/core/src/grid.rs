//! Discrete space-time of events.
//!
//! A [`ConeGrid`] starts from `2n + 1` points on the initial layer and loses one
//! point at each end per time level, ending at a single apex point after `n`
//! levels. Layer `j` holds the global indices `j..=2n-j`. A [`PeriodicGrid`] is a
//! ring of `m` cells used for long runs where the cone would be exhausted.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeGrid {
    n: usize,
    h: f64,
    /// Per-level increments; `tau_levels[j]` separates layer `j` from `j + 1`.
    tau_levels: Vec<f64>,
    x0: f64,
    t0: f64,
}

impl ConeGrid {
    /// Cone with uniform time increments.
    pub fn new(n: usize, h: f64, tau: f64, x0: f64, t0: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        Self::with_levels(n, h, vec![tau; n], x0, t0)
    }

    /// Cone with a floating time grid: one increment per level.
    pub fn with_levels(n: usize, h: f64, tau_levels: Vec<f64>, x0: f64, t0: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("cone half-width must be at least 1"));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid(format!("space step must be positive, got {h}")));
        }
        if tau_levels.len() != n {
            return Err(invalid(format!(
                "expected {n} time increments, got {}",
                tau_levels.len()
            )));
        }
        if let Some(bad) = tau_levels.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(invalid(format!(
                "time increments must be positive, got {bad}"
            )));
        }
        Ok(Self {
            n,
            h,
            tau_levels,
            x0,
            t0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points on the initial layer, `N + 1` with `N = 2n`.
    pub fn initial_len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self, level: usize) -> f64 {
        self.tau_levels[level]
    }

    /// `tau / h` for the step leaving `level`.
    pub fn lambda(&self, level: usize) -> f64 {
        self.tau_levels[level] / self.h
    }

    /// Global index range of layer `j`.
    pub fn layer_indices(&self, j: usize) -> Result<std::ops::RangeInclusive<usize>> {
        self.check_layer(j)?;
        Ok(j..=2 * self.n - j)
    }

    pub fn layer_len(&self, j: usize) -> Result<usize> {
        self.check_layer(j)?;
        Ok(2 * (self.n - j) + 1)
    }

    /// Time of layer `j`: `t_0 = t0`, `t_j = t_{j-1} + tau_{j-1}`.
    pub fn time(&self, j: usize) -> Result<f64> {
        self.check_layer(j)?;
        Ok(self.t0 + self.tau_levels[..j].iter().sum::<f64>())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn apex(&self) -> (f64, f64) {
        let t = self.time(self.n).expect("apex layer is in range");
        (self.x(self.n), t)
    }

    /// Space-time coordinates of every point on layer `j`.
    pub fn layer_points(&self, j: usize) -> Result<Vec<(f64, f64)>> {
        let t = self.time(j)?;
        Ok(self.layer_indices(j)?.map(|i| (self.x(i), t)).collect())
    }

    /// Whether the full five-point stencil of cell `i` on layer `j + 1` reads only
    /// points that exist on layer `j`.
    pub fn stencil_inside(&self, j: usize, i: usize) -> bool {
        if j >= self.n {
            return false;
        }
        let lo = j;
        let hi = 2 * self.n - j;
        i >= lo + 2 && i + 2 <= hi
    }

    fn check_layer(&self, j: usize) -> Result<()> {
        if j > self.n {
            return Err(invalid(format!(
                "layer {j} outside cone of depth {}",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    m: usize,
    h: f64,
    x0: f64,
}

impl PeriodicGrid {
    pub fn new(m: usize, h: f64, x0: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("periodic grid needs at least one cell"));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid(format!("space step must be positive, got {h}")));
        }
        Ok(Self { m, h, x0 })
    }

    /// Grid of `m` cells covering `[x0, x0 + length)`.
    pub fn covering(m: usize, x0: f64, length: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("periodic grid needs at least one cell"));
        }
        Self::new(m, length / m as f64, x0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn period(&self) -> f64 {
        self.m as f64 * self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.m as isize) as usize
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }
}
