//! Separable Catmull–Rom interpolation of phase-space fields.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::grid::{Grid, PhaseSpaceField, Point, MAX_DIM};

/// Nodes of zero padding beyond each edge before a target counts as outside.
pub const PAD: f64 = 2.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Weights for the nodes `i-1, i, i+1, i+2` at fractional offset `t ∈ [0, 1)`.
fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Evaluates a field off-grid, treating values beyond the lattice as zero.
pub struct PhaseInterpolator<'a> {
    field: &'a PhaseSpaceField,
    outside: AtomicUsize,
}

impl<'a> PhaseInterpolator<'a> {
    pub fn new(field: &'a PhaseSpaceField) -> Self {
        Self {
            field,
            outside: AtomicUsize::new(0),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    /// Targets that fell outside the padded lattice so far.
    pub fn outside_count(&self) -> usize {
        self.outside.load(Ordering::Relaxed)
    }

    pub fn eval(&self, x: &Point, xi: &Point) -> Complex64 {
        let grid = self.field.grid();
        let n = grid.dim();
        let count = grid.axis(0).count();
        let len = grid.len();

        // Per phase-space axis: first stencil node and its four weights.
        let mut base = [0isize; 2 * MAX_DIM];
        let mut weights = [[0.0; 4]; 2 * MAX_DIM];
        for a in 0..2 * n {
            let (axis, coord) = if a < n {
                let ax = grid.axis(a);
                (ax, (x[a] + ax.half_width()) / ax.spacing())
            } else {
                let ax = grid.axis(a - n);
                (ax, xi[a - n] / ax.dual_spacing() + (ax.count() / 2) as f64)
            };
            let last = (axis.count() - 1) as f64;
            if !(coord >= -PAD && coord <= last + PAD) {
                self.outside.fetch_add(1, Ordering::Relaxed);
                return ZERO;
            }
            // Snap targets that sit on a node up to roundoff.
            let nearest = coord.round();
            let coord = if (coord - nearest).abs() < 1e-9 { nearest } else { coord };
            let i = coord.floor();
            base[a] = i as isize - 1;
            weights[a] = catmull_rom(coord - i);
        }

        let in_range = |a: usize, i: isize| -> Option<usize> {
            let c = if a < n { grid.axis(a) } else { grid.axis(a - n) }.count();
            (i >= 0 && (i as usize) < c).then_some(i as usize)
        };

        let mut acc = ZERO;
        let total = 4usize.pow(2 * n as u32);
        'stencil: for s in 0..total {
            let mut w = 1.0;
            let mut x_flat = 0usize;
            let mut xi_flat = 0usize;
            let mut rest = s;
            for a in 0..2 * n {
                let o = rest % 4;
                rest /= 4;
                let Some(idx) = in_range(a, base[a] + o as isize) else {
                    continue 'stencil;
                };
                w *= weights[a][o];
                if a < n {
                    x_flat = x_flat * count + idx;
                } else {
                    xi_flat = xi_flat * count + idx;
                }
            }
            if w != 0.0 {
                acc += self.field.values()[x_flat * len + xi_flat] * w;
            }
        }
        acc
    }
}
