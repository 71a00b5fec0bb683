//! Fixtures shared by the benchmarks.

use probflux_core::{ConeGrid, PeriodicGrid};

/// Gaussian bump sampled on a periodic ring of `m` cells over `[0, 1)`.
pub fn periodic_bump(m: usize) -> (PeriodicGrid, Vec<f64>) {
    let grid = PeriodicGrid::covering(m, 0.0, 1.0).expect("valid ring");
    let u = grid
        .points()
        .iter()
        .map(|x| (-((x - 0.5) / 0.1).powi(2)).exp())
        .collect();
    (grid, u)
}

/// Cone of half-width `n` at mesh ratio `lambda` with a Gaussian initial layer.
pub fn cone_bump(n: usize, lambda: f64) -> (ConeGrid, Vec<f64>) {
    let h = 1.0 / (2 * n) as f64;
    let grid = ConeGrid::new(n, h, lambda * h, -0.5, 0.0).expect("valid cone");
    let d0 = (0..grid.initial_len())
        .map(|i| (-(grid.x(i) / 0.1).powi(2)).exp())
        .collect();
    (grid, d0)
}
