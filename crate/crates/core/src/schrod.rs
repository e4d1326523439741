//! Reference solver for `i ∂_t u = -½Δu + V(t, x) u`: the free propagator as
//! a Fourier multiplier and a Strang split-step scheme.

use num_complex::Complex64;

use crate::classical::potential::{PotentialClass, PotentialModel};
use crate::error::{Error, Result};
use crate::fft::{fft_frequency_sq, Direction, Spectral};
use crate::grid::Grid;
use crate::wpt::ComplexField;

/// Reusable FFT plans and multiplier data for one grid.
pub struct FreePropagator {
    grid: Grid,
    forward: Spectral,
    inverse: Spectral,
    freq_sq: Vec<f64>,
}

impl FreePropagator {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            forward: Spectral::new(grid, Direction::Forward),
            inverse: Spectral::new(grid, Direction::Inverse),
            freq_sq: fft_frequency_sq(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Applies `e^{-it|ξ|²/2}` in place.
    pub fn apply_in_place(&self, values: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        let mut scratch = self.forward.scratch();
        self.forward.process(values, &mut scratch);
        let norm = 1.0 / self.grid.len() as f64;
        for (v, &k2) in values.iter_mut().zip(&self.freq_sq) {
            *v *= Complex64::from_polar(norm, -0.5 * t * k2);
        }
        self.inverse.process(values, &mut scratch);
    }

    pub fn apply(&self, f: &ComplexField, t: f64) -> Result<ComplexField> {
        self.grid.check_same(f.grid(), "field and propagator grids differ")?;
        let mut values = f.values().to_vec();
        self.apply_in_place(&mut values, t);
        ComplexField::from_values(&self.grid, values)
    }
}

/// `e^{itΔ/2} f` by the discrete Fourier multiplier.
pub fn free_propagate(f: &ComplexField, t: f64) -> ComplexField {
    let prop = FreePropagator::new(f.grid());
    let mut values = f.values().to_vec();
    prop.apply_in_place(&mut values, t);
    ComplexField::from_values(f.grid(), values).expect("shape preserved")
}

/// Strang splitting from time `t0` to `t1` in `steps` equal steps. The
/// potential is sampled at each step's midpoint.
pub fn propagate_between(
    u0: &ComplexField,
    v: &dyn PotentialModel,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<ComplexField> {
    let grid = u0.grid();
    if steps == 0 {
        return Err(Error::Config("propagate needs at least one step".into()));
    }
    if v.dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "potential dimension {} on a {}-dimensional grid",
            v.dim(),
            grid.dim()
        )));
    }
    let prop = FreePropagator::new(grid);
    let mut values = u0.values().to_vec();
    let dt = (t1 - t0) / steps as f64;
    if v.class() == PotentialClass::Free {
        prop.apply_in_place(&mut values, t1 - t0);
        return ComplexField::from_values(grid, values);
    }
    let n = grid.dim();
    let positions: Vec<_> = (0..grid.len()).map(|i| grid.position(i)).collect();
    let half_phase = |t: f64| -> Vec<Complex64> {
        positions
            .iter()
            .map(|x| Complex64::from_polar(1.0, -0.5 * dt * v.value(t, &x[..n])))
            .collect()
    };
    let mut cached: Option<Vec<Complex64>> = None;
    for k in 0..steps {
        let tm = t0 + (k as f64 + 0.5) * dt;
        let phase = if !v.time_dependent() {
            cached.get_or_insert_with(|| half_phase(tm)).clone()
        } else {
            half_phase(tm)
        };
        values.iter_mut().zip(&phase).for_each(|(u, p)| *u *= p);
        prop.apply_in_place(&mut values, dt);
        values.iter_mut().zip(&phase).for_each(|(u, p)| *u *= p);
    }
    ComplexField::from_values(grid, values)
}

/// [`propagate_between`] starting at time zero.
pub fn propagate(u0: &ComplexField, v: &dyn PotentialModel, t: f64, steps: usize) -> Result<ComplexField> {
    propagate_between(u0, v, 0.0, t, steps)
}

/// Step count for a target step length.
pub fn steps_for(span: f64, dt: f64) -> usize {
    ((span.abs() / dt) - 1e-9).ceil().max(1.0) as usize
}
