//! Periodic spatial lattices, their dual frequency lattices, phase-space
//! fields and the mixed `L^p_x L^q_ξ` norm.
//!
//! Along each axis the spatial nodes are `x_j = -L + j Δx` for
//! `j = 0..N` with `Δx = 2L / N`, and the dual nodes are `ξ_k = (k - N/2) Δξ`
//! with `Δξ = π / L`, so that `Δx · Δξ · N = 2π`. Multi-dimensional
//! grids are flattened row-major (the first axis varies slowest).

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 2;

/// Coordinates of a point in `R^n`, padded with zeros past `n`.
pub type Point = [f64; MAX_DIM];

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    count: usize,
    half_width: f64,
}

impl Axis {
    pub fn new(count: usize, half_width: f64) -> Result<Self> {
        if count < 8 || !count.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "node count {count} must be a power of two >= 8"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        Ok(Self { count, half_width })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    pub fn dual_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Signed frequency index `k - N/2` of the dual node `k`.
    pub fn dual_index(&self, k: usize) -> isize {
        k as isize - (self.count / 2) as isize
    }

    pub fn dual_node(&self, k: usize) -> f64 {
        self.dual_index(k) as f64 * self.dual_spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.node(j)).collect()
    }

    pub fn dual_nodes(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.dual_node(k)).collect()
    }

    /// Node index of the coordinate `d · Δx` for an integer offset `d`,
    /// wrapped periodically onto the lattice.
    pub(crate) fn wrap_offset(&self, d: isize) -> usize {
        let n = self.count as isize;
        (d + n / 2).rem_euclid(n) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    /// Builds a grid of dimension `dim` from per-axis counts and half widths.
    pub fn new(dim: usize, counts: &[usize], half_widths: &[f64]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        if counts.len() != dim || half_widths.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} counts and half widths, got {} and {}",
                counts.len(),
                half_widths.len()
            )));
        }
        let axes = counts
            .iter()
            .zip(half_widths)
            .map(|(&n, &l)| Axis::new(n, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    /// One-dimensional grid with `count` nodes on `[-half_width, half_width)`.
    pub fn line(count: usize, half_width: f64) -> Result<Self> {
        Self::new(1, &[count], &[half_width])
    }

    /// Grid with the same count and half width on every axis.
    pub fn uniform(dim: usize, count: usize, half_width: f64) -> Result<Self> {
        Self::new(dim, &vec![count; dim], &vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    /// Number of spatial nodes (equal to the number of dual nodes).
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::count).collect()
    }

    /// `Π Δx_i`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// `Π Δξ_i`.
    pub fn dual_cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::dual_spacing).product()
    }

    /// Whether every axis has `Δx = Δξ`, so the phase-space grid is square.
    pub fn is_square(&self) -> bool {
        self.axes
            .iter()
            .all(|a| ((a.spacing() - a.dual_spacing()) / a.spacing()).abs() < 1e-12)
    }

    pub fn unravel(&self, index: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rest = index;
        for (i, axis) in self.axes.iter().enumerate().rev() {
            out[i] = rest % axis.count;
            rest /= axis.count;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        self.axes
            .iter()
            .zip(multi)
            .fold(0, |acc, (axis, &m)| acc * axis.count + m)
    }

    pub fn position(&self, index: usize) -> Point {
        let multi = self.unravel(index);
        let mut out = [0.0; MAX_DIM];
        for (i, axis) in self.axes.iter().enumerate() {
            out[i] = axis.node(multi[i]);
        }
        out
    }

    pub fn frequency(&self, index: usize) -> Point {
        let multi = self.unravel(index);
        let mut out = [0.0; MAX_DIM];
        for (i, axis) in self.axes.iter().enumerate() {
            out[i] = axis.dual_node(multi[i]);
        }
        out
    }

    /// Flat index of the node at `a - b` (periodically wrapped), for flat
    /// node indices `a` and `b`.
    pub(crate) fn wrapped_difference(&self, a: usize, b: usize) -> usize {
        let ma = self.unravel(a);
        let mb = self.unravel(b);
        let mut multi = [0; MAX_DIM];
        for (i, axis) in self.axes.iter().enumerate() {
            multi[i] = axis.wrap_offset(ma[i] as isize - mb[i] as isize);
        }
        self.ravel(&multi[..self.dim()])
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(what.to_string()))
        }
    }
}

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Self::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent `{s}`")))?;
        Self::finite(p)
    }
}

/// Exponents `(p, q)` of the norm `‖‖F‖_{L^p_x}‖_{L^q_ξ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedNormSpec {
    pub p: Exponent,
    pub q: Exponent,
}

impl MixedNormSpec {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        Self { p, q }
    }

    /// Convenience constructor; `f64::INFINITY` maps to [`Exponent::Infinity`].
    pub fn from_values(p: f64, q: f64) -> Result<Self> {
        Ok(Self::new(Exponent::finite(p)?, Exponent::finite(q)?))
    }

    pub fn diagonal(p: Exponent) -> Self {
        Self::new(p, p)
    }
}

impl fmt::Display for MixedNormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.q)
    }
}

impl FromStr for MixedNormSpec {
    type Err = Error;

    /// Parses `p:q`, e.g. `1:inf`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected p:q, got `{s}`")))?;
        Ok(Self::new(p.parse()?, q.parse()?))
    }
}

/// Samples of a function on the `(x, ξ)` product grid, stored row-major with
/// the spatial index outermost: `values[x_index * len + xi_index]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl PhaseSpaceField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "phase-space field has {} entries, grid needs {}",
                values.len(),
                n * n
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase-space field"));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f(x, ξ)` at every phase-space node.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&Point, &Point) -> Complex64) -> Self {
        let n = grid.len();
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            let x = grid.position(j);
            for k in 0..n {
                values.push(f(&x, &grid.frequency(k)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
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

    pub fn get(&self, x_index: usize, xi_index: usize) -> Complex64 {
        self.values[x_index * self.grid.len() + xi_index]
    }

    /// Row of values over all ξ-nodes at a fixed spatial node.
    pub fn row(&self, x_index: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[x_index * n..(x_index + 1) * n]
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "phase-space difference")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "phase-space sum")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    /// Field with the roles of the position and frequency indices exchanged:
    /// `out(j, k) = self(k, j)`. Only meaningful on square grids.
    pub fn swapped(&self) -> Result<Self> {
        if !self.grid.is_square() {
            return Err(Error::InvalidGrid(
                "argument swap needs Δx = Δξ on every axis".into(),
            ));
        }
        let n = self.grid.len();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                values[j * n + k] = self.values[k * n + j];
            }
        }
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    /// Weighted `L²` norm with weights `Π Δx_i Δξ_i` (plain `dξ`).
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_volume() * self.grid.dual_cell_volume();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// `‖self - other‖ / ‖other‖` in the weighted `L²` norm.
    pub fn relative_l2_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.l2_norm() / other.l2_norm())
    }

    /// Writes the `x_index,xi_index,re,im` text format.
    pub fn write_text(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x_index,xi_index,re,im")?;
        let n = self.grid.len();
        for j in 0..n {
            for k in 0..n {
                let v = self.values[j * n + k];
                writeln!(out, "{j},{k},{:e},{:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn read_text(grid: &Grid, input: impl BufRead) -> Result<Self> {
        let n = grid.len();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        let mut seen = vec![false; n * n];
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty phase-space file".into()))??;
        if header.trim() != "x_index,xi_index,re,im" {
            return Err(Error::Parse(format!("unexpected header `{header}`")));
        }
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 columns", lineno + 2)));
            }
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 2));
            let j: usize = cols[0].parse().map_err(|_| bad("x_index"))?;
            let k: usize = cols[1].parse().map_err(|_| bad("xi_index"))?;
            let re: f64 = cols[2].parse().map_err(|_| bad("re"))?;
            let im: f64 = cols[3].parse().map_err(|_| bad("im"))?;
            if j >= n || k >= n {
                return Err(bad("index (out of range)"));
            }
            values[j * n + k] = Complex64::new(re, im);
            seen[j * n + k] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse("phase-space file is missing rows".into()));
        }
        Self::from_values(grid, values)
    }
}

/// Discrete `‖‖F(x, ξ)‖_{L^p_x}‖_{L^q_ξ}` with Riemann weights `Π Δx_i` and
/// `Π Δξ_i`. Infinite exponents take the unweighted maximum over nodes.
pub fn mixed_norm(field: &PhaseSpaceField, spec: MixedNormSpec) -> Result<f64> {
    if field.values.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
        return Err(Error::NonFinite("mixed norm input"));
    }
    let grid = &field.grid;
    let n = grid.len();
    let dx = grid.cell_volume();
    let dxi = grid.dual_cell_volume();

    // inner[k] = ‖F(·, ξ_k)‖_{L^p_x}^p for finite p, or the sup for p = ∞,
    // accumulated in a fixed order over x.
    let mut inner = vec![0.0_f64; n];
    match spec.p {
        Exponent::Infinity => {
            for j in 0..n {
                for (acc, v) in inner.iter_mut().zip(field.row(j)) {
                    *acc = acc.max(v.norm());
                }
            }
        }
        Exponent::Finite(p) => {
            for j in 0..n {
                for (acc, v) in inner.iter_mut().zip(field.row(j)) {
                    *acc += abs_pow(*v, p);
                }
            }
            for acc in &mut inner {
                *acc = root(*acc * dx, p);
            }
        }
    }

    let out = match spec.q {
        Exponent::Infinity => inner.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let sum: f64 = inner.iter().map(|&a| real_pow(a, q)).sum();
            root(sum * dxi, q)
        }
    };
    Ok(out)
}

fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 1.0 {
        v.norm()
    } else if p == 2.0 {
        v.norm_sqr()
    } else {
        v.norm().powf(p)
    }
}

fn real_pow(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

fn root(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a.sqrt()
    } else {
        a.powf(1.0 / p)
    }
}
