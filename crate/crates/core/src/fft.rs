//! Multi-dimensional FFTs over a [`Grid`] shape, built from per-axis rustfft plans.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    /// Unnormalized inverse (`e^{+2πi mk/N}` kernel, no `1/N`).
    Inverse,
}

/// Plans for one transform direction along every axis of a grid.
pub(crate) struct Spectral {
    shape: Vec<usize>,
    plans: Vec<Arc<dyn Fft<f64>>>,
    scratch_len: usize,
}

impl Spectral {
    pub fn new(grid: &Grid, direction: Direction) -> Self {
        let mut planner = FftPlanner::new();
        let shape = grid.shape();
        let plans: Vec<Arc<dyn Fft<f64>>> = shape
            .iter()
            .map(|&n| match direction {
                Direction::Forward => planner.plan_fft_forward(n),
                Direction::Inverse => planner.plan_fft_inverse(n),
            })
            .collect();
        let scratch_len = plans
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0)
            .max(*shape.iter().max().unwrap_or(&0));
        Self {
            shape,
            plans,
            scratch_len,
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len + *self.shape.iter().max().unwrap()]
    }

    /// In-place transform of a row-major buffer of the grid's shape.
    pub fn process(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        match self.shape.len() {
            1 => {
                let (s, _) = scratch.split_at_mut(self.plans[0].get_inplace_scratch_len());
                self.plans[0].process_with_scratch(buf, s);
            }
            2 => {
                let (n0, n1) = (self.shape[0], self.shape[1]);
                let s1 = self.plans[1].get_inplace_scratch_len();
                let s0 = self.plans[0].get_inplace_scratch_len();
                // Rows are contiguous.
                {
                    let (s, _) = scratch.split_at_mut(s1);
                    self.plans[1].process_with_scratch(buf, s);
                }
                // Columns are gathered into the tail of the scratch buffer.
                let (s, col) = scratch.split_at_mut(s0.max(s1));
                let col = &mut col[..n0];
                for c in 0..n1 {
                    for r in 0..n0 {
                        col[r] = buf[r * n1 + c];
                    }
                    self.plans[0].process_with_scratch(col, &mut s[..s0]);
                    for r in 0..n0 {
                        buf[r * n1 + c] = col[r];
                    }
                }
            }
            d => unreachable!("unsupported dimension {d}"),
        }
    }
}

/// Maps a dual-node flat index (ordered ξ ascending per axis) to the FFT
/// output index holding that frequency, and returns the sign
/// `Π (-1)^{k_i - N_i/2}` that accounts for the lattice starting at `-L`.
pub(crate) fn dual_to_fft(grid: &Grid, dual_index: usize) -> (usize, f64) {
    let multi = grid.unravel(dual_index);
    let mut fft_multi = [0usize; crate::grid::MAX_DIM];
    let mut sign = 1.0;
    for (i, axis) in grid.axes().iter().enumerate() {
        let kappa = axis.dual_index(multi[i]);
        let n = axis.count() as isize;
        fft_multi[i] = kappa.rem_euclid(n) as usize;
        if kappa.rem_euclid(2) == 1 {
            sign = -sign;
        }
    }
    (grid.ravel(&fft_multi[..grid.dim()]), sign)
}

/// Precomputed [`dual_to_fft`] table.
pub(crate) fn dual_table(grid: &Grid) -> Vec<(usize, f64)> {
    (0..grid.len()).map(|k| dual_to_fft(grid, k)).collect()
}

/// `|ξ|²` for every FFT output index.
pub(crate) fn fft_frequency_sq(grid: &Grid) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let (m, _) = dual_to_fft(grid, k);
        let xi = grid.frequency(k);
        out[m] = xi[..grid.dim()].iter().map(|v| v * v).sum();
    }
    out
}
