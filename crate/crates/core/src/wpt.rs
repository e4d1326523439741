//! Wave packet (short-time Fourier) transform on a periodic grid.
//!
//! For a window `φ` the transform is
//! `W_φ f(x, ξ) = ∫ conj(φ(y - x)) f(y) e^{-i y·ξ} dy`, discretized as one
//! `N`-point DFT per spatial node with weight `Π Δy_i` and circular window
//! shifts. The adjoint carries the measure `dy đξ` with `đξ = (2π)^{-n} dξ`,
//! which makes `W*_ψ W_φ f = ⟨ψ, φ⟩ f` hold exactly on the lattice.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{dual_table, Direction, Spectral};
use crate::grid::{Grid, PhaseSpaceField, Point};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex samples of a function on the spatial nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![ZERO; grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("complex field"));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&Point) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(&grid.position(j))).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// `exp(-|x - c|² / (2 w²)) · exp(i p·x)`, unnormalized.
    pub fn gaussian(grid: &Grid, center: &[f64], momentum: &[f64], width: f64) -> Self {
        let n = grid.dim();
        Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for i in 0..n {
                let c = center.get(i).copied().unwrap_or(0.0);
                let p = momentum.get(i).copied().unwrap_or(0.0);
                r2 += (x[i] - c).powi(2);
                phase += p * x[i];
            }
            Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), phase)
        })
    }

    /// The `L²`-normalized Hermite function of order `k` along the first
    /// axis, times the ground state along the others, with length scale `width`.
    pub fn hermite(grid: &Grid, k: usize, width: f64) -> Self {
        let n = grid.dim();
        Self::from_fn(grid, |x| {
            let mut v = hermite_function(k, x[0] / width);
            for xi in x.iter().take(n).skip(1) {
                v *= hermite_function(0, xi / width);
            }
            Complex64::new(v / width.powf(n as f64 / 2.0), 0.0)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `Σ |f|² Π Δx_i`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `⟨self, other⟩ = Σ self · conj(other) Π Δx_i`, linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.grid.check_same(&other.grid, "inner product")?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid, "sup distance")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "field sum")?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Circular shift by an integer number of nodes per axis: `out(y) = self(y - a)`.
    pub fn shifted(&self, offsets: &[isize]) -> Self {
        let g = &self.grid;
        let values = (0..g.len())
            .map(|m| {
                let multi = g.unravel(m);
                let mut src = [0usize; crate::grid::MAX_DIM];
                for (i, axis) in g.axes().iter().enumerate() {
                    let n = axis.count() as isize;
                    src[i] = (multi[i] as isize - offsets[i]).rem_euclid(n) as usize;
                }
                self.values[g.ravel(&src[..g.dim()])]
            })
            .collect();
        Self {
            grid: g.clone(),
            values,
        }
    }

    /// Writes the `x_index,re,im` text format.
    pub fn write_text(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x_index,re,im")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{j},{:e},{:e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_text(grid: &Grid, input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty field file".into()))??;
        if header.trim() != "x_index,re,im" {
            return Err(Error::Parse(format!("unexpected header `{header}`")));
        }
        let mut values = vec![ZERO; grid.len()];
        let mut seen = vec![false; grid.len()];
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 2));
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(bad("column count"));
            }
            let j: usize = cols[0].parse().map_err(|_| bad("x_index"))?;
            let re: f64 = cols[1].parse().map_err(|_| bad("re"))?;
            let im: f64 = cols[2].parse().map_err(|_| bad("im"))?;
            if j >= grid.len() {
                return Err(bad("x_index (out of range)"));
            }
            values[j] = Complex64::new(re, im);
            seen[j] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse(format!(
                "field file does not cover all {} nodes",
                grid.len()
            )));
        }
        Self::from_values(grid, values)
    }
}

/// Normalized Hermite function `H_k(x) e^{-x²/2} / sqrt(2^k k! √π)`.
pub fn hermite_function(k: usize, x: f64) -> f64 {
    // Stable three-term recurrence on the normalized functions.
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    for j in 0..k {
        let next = (2.0 / (j as f64 + 1.0)).sqrt() * x * cur
            - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// A nonzero window function with its cached squared `L²` norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    field: ComplexField,
    l2_norm_sq: f64,
}

impl Window {
    pub fn new(field: ComplexField) -> Result<Self> {
        let l2_norm_sq = field.l2_norm_sq();
        if !(l2_norm_sq > 0.0) {
            return Err(Error::ZeroWindow);
        }
        Ok(Self { field, l2_norm_sq })
    }

    /// Centered Gaussian window `exp(-|x|² / (2 w²))`.
    pub fn gaussian(grid: &Grid, width: f64) -> Result<Self> {
        Self::new(ComplexField::gaussian(grid, &[], &[], width))
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn into_field(self) -> ComplexField {
        self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    /// The window `y ↦ y_j y_k φ(y)`, whose conjugate is the weight
    /// `y_j y_k conj(φ(y))` of the remainder term.
    pub fn moment(&self, j: usize, k: usize) -> Result<Self> {
        let g = self.grid();
        let values = (0..g.len())
            .map(|m| {
                let y = g.position(m);
                self.field.values[m] * y[j] * y[k]
            })
            .collect();
        Self::new(ComplexField::from_values(g, values)?)
    }
}

/// Applies `kernel(j, m) · u[m]` along each spatial row `j` and transforms
/// with the weight `Π Δy_i` and the phase `e^{-i y_m · ξ_k}`.
pub(crate) fn windowed_transform<K>(grid: &Grid, u: &[Complex64], kernel: K) -> Vec<Complex64>
where
    K: Fn(usize, usize) -> Complex64 + Sync,
{
    let n = grid.len();
    let fwd = Spectral::new(grid, Direction::Forward);
    let table = dual_table(grid);
    let weight = grid.cell_volume();
    let mut values = vec![ZERO; n * n];
    values.par_chunks_mut(n).enumerate().for_each_init(
        || (vec![ZERO; n], fwd.scratch()),
        |(buf, scratch), (j, row)| {
            for (m, b) in buf.iter_mut().enumerate() {
                *b = kernel(j, m) * u[m];
            }
            fwd.process(buf, scratch);
            for (out, &(idx, sign)) in row.iter_mut().zip(&table) {
                *out = buf[idx] * (sign * weight);
            }
        },
    );
    values
}

/// `W_φ f` sampled on the phase-space grid.
pub fn wpt(f: &ComplexField, window: &Window) -> Result<PhaseSpaceField> {
    let grid = f.grid();
    grid.check_same(window.grid(), "wpt: signal and window grids differ")?;
    let conj_phi: Vec<Complex64> = window.field.values.iter().map(|v| v.conj()).collect();
    let values = windowed_transform(grid, &f.values, |j, m| {
        conj_phi[grid.wrapped_difference(m, j)]
    });
    PhaseSpaceField::from_values(grid, values)
}

/// Rows per partial sum in the adjoint; fixed so the reduction order does
/// not depend on the worker count.
const ADJOINT_BLOCK: usize = 32;

/// `W*_φ F(x) = ∬ F(y, ξ) φ(x - y) e^{i x·ξ} dy đξ`.
pub fn wpt_adjoint(field: &PhaseSpaceField, window: &Window) -> Result<ComplexField> {
    let grid = field.grid();
    grid.check_same(window.grid(), "adjoint: field and window grids differ")?;
    let n = grid.len();
    let inv = Spectral::new(grid, Direction::Inverse);
    let table = dual_table(grid);
    let weight = grid.cell_volume() * grid.dual_cell_volume()
        / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
    let phi = &window.field.values;

    let partials: Vec<Vec<Complex64>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(ADJOINT_BLOCK)
        .map(|rows| {
            let mut acc = vec![ZERO; n];
            let mut buf = vec![ZERO; n];
            let mut scratch = inv.scratch();
            for &j in rows {
                buf.iter_mut().for_each(|b| *b = ZERO);
                for (v, &(idx, sign)) in field.row(j).iter().zip(&table) {
                    buf[idx] = v * sign;
                }
                inv.process(&mut buf, &mut scratch);
                for (m, a) in acc.iter_mut().enumerate() {
                    *a += phi[grid.wrapped_difference(m, j)] * buf[m];
                }
            }
            acc
        })
        .collect();

    let mut out = vec![ZERO; n];
    for part in &partials {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    out.iter_mut().for_each(|v| *v *= weight);
    ComplexField::from_values(grid, out)
}

/// Relative threshold below which `⟨ψ, φ⟩` counts as degenerate.
pub const DEGENERATE_OVERLAP: f64 = 1e-8;

/// `W*_ψ F / ⟨ψ, φ⟩`; recovers `f` from `F = W_φ f`.
pub fn invert(field: &PhaseSpaceField, psi: &Window, phi: &Window) -> Result<ComplexField> {
    let overlap = psi.field.inner(&phi.field)?;
    let threshold = DEGENERATE_OVERLAP * (psi.l2_norm_sq * phi.l2_norm_sq).sqrt();
    if !(overlap.norm() > threshold) {
        return Err(Error::DegenerateWindowPair {
            overlap: overlap.norm(),
            threshold,
        });
    }
    let back = wpt_adjoint(field, psi)?;
    Ok(back.scaled(1.0 / overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{mixed_norm, MixedNormSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Grid, rng: &mut ChaCha8Rng) -> ComplexField {
        ComplexField::from_fn(grid, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Direct O(N³) evaluation of the defining sum, without FFTs.
    fn wpt_direct(f: &ComplexField, phi: &ComplexField) -> Vec<Complex64> {
        let g = f.grid();
        let ax = g.axis(0);
        let n = ax.count();
        let dx = ax.spacing();
        let mut out = vec![ZERO; n * n];
        for j in 0..n {
            for k in 0..n {
                let xi = ax.dual_node(k);
                let mut s = ZERO;
                for m in 0..n {
                    let d = (m as isize - j as isize + (n / 2) as isize).rem_euclid(n as isize) as usize;
                    let y = ax.node(m);
                    s += phi.values[d].conj() * f.values[m] * Complex64::from_polar(1.0, -y * xi);
                }
                out[j * n + k] = s * dx;
            }
        }
        out
    }

    #[test]
    fn matches_direct_sum() {
        let g = Grid::line(16, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(&g, &mut rng);
        let phi = Window::new(random_field(&g, &mut rng)).unwrap();
        let fast = wpt(&f, &phi).unwrap();
        let slow = wpt_direct(&f, phi.field());
        for (a, b) in fast.values().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_signal() {
        let g = Grid::line(32, 8.0).unwrap();
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let w = wpt(&ComplexField::zeros(&g), &phi).unwrap();
        assert!(w.values().iter().all(|v| *v == ZERO));
    }

    #[test]
    fn gaussian_peak_at_origin() {
        let g = Grid::line(128, 12.0).unwrap();
        let f = ComplexField::gaussian(&g, &[], &[], 1.0);
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let w = wpt(&f, &phi).unwrap();
        let (best, _) = w
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        let n = g.len();
        assert_eq!(g.position(best / n)[0], 0.0);
        assert_eq!(g.frequency(best % n)[0], 0.0);
    }

    #[test]
    fn gaussian_closed_form() {
        // ∫ e^{-(y-x)²/2} e^{-y²/2} e^{-iyξ} dy = √π e^{-x²/4} e^{-ξ²/4} e^{-ixξ/2}
        let g = Grid::line(512, 32.0).unwrap();
        let f = ComplexField::gaussian(&g, &[], &[], 1.0);
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let w = wpt(&f, &phi).unwrap();
        let exact = PhaseSpaceField::from_fn(&g, |x, xi| {
            let (x, xi) = (x[0], xi[0]);
            Complex64::from_polar(PI.sqrt() * (-(x * x + xi * xi) / 4.0).exp(), -x * xi / 2.0)
        });
        let err = w
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "modulus error {err:e}");
        let full = w.sub(&exact).unwrap().values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(full <= 1e-10, "complex error {full:e}");
    }

    #[test]
    fn adjoint_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [Grid::line(32, 5.0).unwrap(), Grid::uniform(2, 8, 2.0).unwrap()] {
            let f = random_field(&g, &mut rng);
            let phi = Window::new(random_field(&g, &mut rng)).unwrap();
            let n = g.len();
            let big = PhaseSpaceField::from_values(
                &g,
                (0..n * n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let wf = wpt(&f, &phi).unwrap();
            let w = g.cell_volume() * g.dual_cell_volume() / (2.0 * PI).powi(g.dim() as i32);
            let lhs: Complex64 = wf
                .values()
                .iter()
                .zip(big.values())
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                * w;
            let rhs = f.inner(&wpt_adjoint(&big, &phi).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm(), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn adjoint_of_zero() {
        let g = Grid::line(16, 4.0).unwrap();
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let out = wpt_adjoint(&PhaseSpaceField::zeros(&g), &phi).unwrap();
        assert_eq!(out.sup_norm(), 0.0);
    }

    #[test]
    fn self_inversion_gaussian() {
        let g = Grid::line(256, 20.0).unwrap();
        let f = ComplexField::gaussian(&g, &[1.0], &[0.5], 1.3);
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let w = wpt(&f, &phi).unwrap();
        let back = wpt_adjoint(&w, &phi).unwrap().scaled((1.0 / phi.l2_norm_sq()).into());
        assert!(back.sup_distance(&f).unwrap() <= 1e-8);
        let inv = invert(&w, &phi, &phi).unwrap();
        assert!(inv.sup_distance(&f).unwrap() <= 1e-8);
    }

    #[test]
    fn cross_window_inversion_random_signal() {
        let g = Grid::line(64, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(&g, &mut rng);
        let phi = Window::gaussian(&g, 1.0).unwrap();
        let psi = Window::new(ComplexField::gaussian(&g, &[0.3], &[0.7], 2.0)).unwrap();
        let w = wpt(&f, &phi).unwrap();
        let back = invert(&w, &psi, &phi).unwrap();
        assert!(back.sup_distance(&f).unwrap() <= 1e-8);
    }

    #[test]
    fn orthogonal_windows_rejected() {
        let g = Grid::line(64, 8.0).unwrap();
        let even = Window::gaussian(&g, 1.0).unwrap();
        let odd = Window::new(ComplexField::hermite(&g, 1, 1.0)).unwrap();
        let w = wpt(&ComplexField::gaussian(&g, &[], &[], 1.0), &even).unwrap();
        assert!(matches!(
            invert(&w, &odd, &even),
            Err(Error::DegenerateWindowPair { .. })
        ));
    }

    #[test]
    fn zero_window_rejected() {
        let g = Grid::line(16, 4.0).unwrap();
        assert!(matches!(Window::new(ComplexField::zeros(&g)), Err(Error::ZeroWindow)));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = Grid::line(16, 4.0).unwrap();
        let g2 = Grid::line(32, 4.0).unwrap();
        let phi = Window::gaussian(&g2, 1.0).unwrap();
        assert!(matches!(
            wpt(&ComplexField::zeros(&g1), &phi),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn plancherel_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [Grid::line(128, 10.0).unwrap(), Grid::uniform(2, 16, 4.0).unwrap()] {
            let f = random_field(&g, &mut rng);
            let phi = Window::gaussian(&g, 1.0).unwrap();
            let w = wpt(&f, &phi).unwrap();
            let norm = mixed_norm(&w, MixedNormSpec::from_values(2.0, 2.0).unwrap()).unwrap();
            let expected = (2.0 * PI).powi(g.dim() as i32) * f.l2_norm_sq() * phi.l2_norm_sq();
            assert!((norm * norm - expected).abs() <= 1e-8 * expected);
        }
    }

    #[test]
    fn covariance_under_grid_shift() {
        let g = Grid::line(64, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_field(&g, &mut rng);
        let phi = Window::gaussian(&g, 0.8).unwrap();
        let shift = 5isize;
        let a = shift as f64 * g.axis(0).spacing();
        let w = wpt(&f, &phi).unwrap();
        let ws = wpt(&f.shifted(&[shift]), &phi).unwrap();
        let n = g.len();
        for j in 0..n {
            let src = (j as isize - shift).rem_euclid(n as isize) as usize;
            for k in 0..n {
                let xi = g.frequency(k)[0];
                let expected = w.get(src, k) * Complex64::from_polar(1.0, -a * xi);
                assert!((ws.get(j, k) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_in_signal_conjugate_linear_in_window() {
        let g = Grid::line(32, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_field(&g, &mut rng);
        let h = random_field(&g, &mut rng);
        let phi = Window::new(random_field(&g, &mut rng)).unwrap();
        let c = Complex64::new(0.3, -1.2);
        let lhs = wpt(&f.scaled(c).add(&h).unwrap(), &phi).unwrap();
        let rhs = wpt(&f, &phi).unwrap().scaled(c).add(&wpt(&h, &phi).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().l2_norm() < 1e-12 * rhs.l2_norm());

        let scaled_window = Window::new(phi.field().scaled(c)).unwrap();
        let lhs = wpt(&f, &scaled_window).unwrap();
        let rhs = wpt(&f, &phi).unwrap().scaled(c.conj());
        assert!(lhs.sub(&rhs).unwrap().l2_norm() < 1e-12 * rhs.l2_norm());
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = Grid::line(256, 16.0).unwrap();
        let h: Vec<ComplexField> = (0..5).map(|k| ComplexField::hermite(&g, k, 1.0)).collect();
        for a in 0..5 {
            for b in 0..5 {
                let ip = h[a].inner(&h[b]).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip.re - expected).abs() < 1e-12 && ip.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn field_text_roundtrip() {
        let g = Grid::line(8, 2.0).unwrap();
        let f = ComplexField::gaussian(&g, &[0.2], &[1.0], 0.7);
        let mut buf = Vec::new();
        f.write_text(&mut buf).unwrap();
        assert!(buf.starts_with(b"x_index,re,im\n"));
        assert_eq!(ComplexField::read_text(&g, &buf[..]).unwrap(), f);
        let truncated = &buf[..buf.len() / 2];
        assert!(ComplexField::read_text(&g, truncated).is_err());
    }
}
