//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use modspace_core::{ComplexField, Grid, Window};

/// A square line grid of `n` nodes with an off-center Gaussian and a unit window.
pub fn gaussian_setup(n: usize) -> (ComplexField, Window) {
    let grid = Grid::line(n, (PI * n as f64 / 2.0).sqrt()).expect("power-of-two grid");
    let f = ComplexField::gaussian(&grid, &[0.5], &[-1.0], 1.0);
    let phi = Window::gaussian(&grid, 1.0).expect("nonzero window");
    (f, phi)
}
