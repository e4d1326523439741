//! Characteristic flow `f' = g, g' = -∇V(s, f)` with initial data
//! `f(t) = x, g(t) = ξ`, and its variational matrix
//! `M = ∂(f, g) / ∂(x, ξ)`.

use std::io::Write;

use crate::classical::potential::{grad_at, hess_at, PotentialClass, PotentialModel};
use crate::error::{Error, Result};
use crate::grid::{Point, MAX_DIM};

/// Default fixed step of the flow integrators.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Default bound on `|s - t|`.
pub const DEFAULT_MAX_SPAN: f64 = 16.0;

const TANGENT: usize = 2 * MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Störmer–Verlet (kick–drift–kick); the tangent map is the exact
    /// derivative of the discrete step.
    #[default]
    Verlet,
    /// Classical fourth-order Runge–Kutta on the joint base/variational system.
    Rk4,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "verlet" | "symplectic" => Ok(Self::Verlet),
            "rk4" => Ok(Self::Rk4),
            other => Err(Error::Parse(format!("unknown integrator `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub integrator: Integrator,
    /// Upper bound on the step length; the actual step divides `s - t` evenly.
    pub step: f64,
    pub max_span: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Verlet,
            step: DEFAULT_STEP,
            max_span: DEFAULT_MAX_SPAN,
        }
    }
}

impl FlowOptions {
    pub fn rk4() -> Self {
        Self {
            integrator: Integrator::Rk4,
            ..Self::default()
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Number of equal steps covering `span`.
    pub fn steps_for(&self, span: f64) -> usize {
        if span == 0.0 {
            0
        } else {
            ((span.abs() / self.step) - 1e-9).ceil().max(1.0) as usize
        }
    }
}

/// Position and momentum on a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// The `2n × 2n` matrix with rows `(∂f/∂x, ∂f/∂ξ)` then `(∂g/∂x, ∂g/∂ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalState {
    dim: usize,
    entries: Vec<f64>,
}

impl VariationalState {
    pub fn identity(dim: usize) -> Self {
        let m = 2 * dim;
        let mut entries = vec![0.0; m * m];
        (0..m).for_each(|i| entries[i * m + i] = 1.0);
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        2 * self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size() + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn det(&self) -> f64 {
        determinant(&self.entries, self.size())
    }

    fn from_tangent(dim: usize, t: &Tangent) -> Self {
        let m = 2 * dim;
        let mut entries = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                entries[r * m + c] = t[row_slot(dim, r)][col_slot(dim, c)];
            }
        }
        Self { dim, entries }
    }
}

/// Gaussian elimination with partial pivoting.
fn determinant(a: &[f64], m: usize) -> f64 {
    let mut a = a.to_vec();
    let mut det = 1.0;
    for c in 0..m {
        let p = (c..m)
            .max_by(|&i, &j| a[i * m + c].abs().partial_cmp(&a[j * m + c].abs()).unwrap())
            .unwrap();
        if a[p * m + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
            }
            det = -det;
        }
        let pivot = a[c * m + c];
        det *= pivot;
        for r in c + 1..m {
            let factor = a[r * m + c] / pivot;
            for k in c..m {
                a[r * m + k] -= factor * a[c * m + k];
            }
        }
    }
    det
}

/// Internal phase-space point; only the first `dim` entries are used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Phase {
    pub f: Point,
    pub g: Point,
}

impl Phase {
    pub fn new(x: &[f64], xi: &[f64]) -> Self {
        let mut p = Self {
            f: [0.0; MAX_DIM],
            g: [0.0; MAX_DIM],
        };
        p.f[..x.len()].copy_from_slice(x);
        p.g[..xi.len()].copy_from_slice(xi);
        p
    }

    fn is_finite(&self) -> bool {
        self.f.iter().chain(&self.g).all(|v| v.is_finite())
    }

    pub fn to_state(self, dim: usize) -> FlowState {
        FlowState {
            f: self.f[..dim].to_vec(),
            g: self.g[..dim].to_vec(),
        }
    }
}

/// Tangent matrix stored with the position rows in slots `0..MAX_DIM` and
/// momentum rows in `MAX_DIM..2 MAX_DIM` (same for columns).
type Tangent = [[f64; TANGENT]; TANGENT];

fn row_slot(dim: usize, r: usize) -> usize {
    if r < dim {
        r
    } else {
        MAX_DIM + r - dim
    }
}

fn col_slot(dim: usize, c: usize) -> usize {
    row_slot(dim, c)
}

fn tangent_identity() -> Tangent {
    let mut t = [[0.0; TANGENT]; TANGENT];
    (0..TANGENT).for_each(|i| t[i][i] = 1.0);
    t
}

/// One step of length `h` from time `s`, optionally carrying the tangent.
fn step(
    v: &dyn PotentialModel,
    integrator: Integrator,
    s: f64,
    h: f64,
    z: &mut Phase,
    tangent: Option<&mut Tangent>,
) {
    let n = v.dim();
    match integrator {
        Integrator::Verlet => {
            let half = 0.5 * h;
            let force0 = grad_at(v, s, &z.f);
            let hess0 = tangent.is_some().then(|| hess_at(v, s, &z.f));
            for i in 0..n {
                z.g[i] -= half * force0[i];
            }
            for i in 0..n {
                z.f[i] += h * z.g[i];
            }
            let force1 = grad_at(v, s + h, &z.f);
            for i in 0..n {
                z.g[i] -= half * force1[i];
            }
            if let Some(t) = tangent {
                let hess1 = hess_at(v, s + h, &z.f);
                kick(t, &hess0.unwrap(), n, half);
                for i in 0..n {
                    for c in 0..TANGENT {
                        t[i][c] += h * t[MAX_DIM + i][c];
                    }
                }
                kick(t, &hess1, n, half);
            }
        }
        Integrator::Rk4 => rk4_step(v, s, h, z, tangent),
    }
}

/// `M_g ← M_g - w H M_f`.
fn kick(t: &mut Tangent, hess: &[f64; MAX_DIM * MAX_DIM], n: usize, w: f64) {
    for i in 0..n {
        for c in 0..TANGENT {
            let mut acc = 0.0;
            for k in 0..n {
                acc += hess[i * n + k] * t[k][c];
            }
            t[MAX_DIM + i][c] -= w * acc;
        }
    }
}

fn rk4_step(v: &dyn PotentialModel, s: f64, h: f64, z: &mut Phase, tangent: Option<&mut Tangent>) {
    let n = v.dim();
    let with_tangent = tangent.is_some();
    let t0 = tangent.as_ref().map(|t| **t).unwrap_or([[0.0; TANGENT]; TANGENT]);

    let rhs = |s: f64, z: &Phase, t: &Tangent| -> (Phase, Tangent) {
        let grad = grad_at(v, s, &z.f);
        let mut dz = Phase {
            f: [0.0; MAX_DIM],
            g: [0.0; MAX_DIM],
        };
        for i in 0..n {
            dz.f[i] = z.g[i];
            dz.g[i] = -grad[i];
        }
        let mut dt = [[0.0; TANGENT]; TANGENT];
        if with_tangent {
            let hess = hess_at(v, s, &z.f);
            for i in 0..n {
                for c in 0..TANGENT {
                    dt[i][c] = t[MAX_DIM + i][c];
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += hess[i * n + k] * t[k][c];
                    }
                    dt[MAX_DIM + i][c] = -acc;
                }
            }
        }
        (dz, dt)
    };
    let axpy = |z: &Phase, t: &Tangent, w: f64, dz: &Phase, dt: &Tangent| -> (Phase, Tangent) {
        let mut zo = *z;
        let mut to = *t;
        for i in 0..MAX_DIM {
            zo.f[i] += w * dz.f[i];
            zo.g[i] += w * dz.g[i];
        }
        if with_tangent {
            for r in 0..TANGENT {
                for c in 0..TANGENT {
                    to[r][c] += w * dt[r][c];
                }
            }
        }
        (zo, to)
    };

    let (k1z, k1t) = rhs(s, z, &t0);
    let (z2, t2) = axpy(z, &t0, 0.5 * h, &k1z, &k1t);
    let (k2z, k2t) = rhs(s + 0.5 * h, &z2, &t2);
    let (z3, t3) = axpy(z, &t0, 0.5 * h, &k2z, &k2t);
    let (k3z, k3t) = rhs(s + 0.5 * h, &z3, &t3);
    let (z4, t4) = axpy(z, &t0, h, &k3z, &k3t);
    let (k4z, k4t) = rhs(s + h, &z4, &t4);

    let w = h / 6.0;
    for i in 0..MAX_DIM {
        z.f[i] += w * (k1z.f[i] + 2.0 * k2z.f[i] + 2.0 * k3z.f[i] + k4z.f[i]);
        z.g[i] += w * (k1z.g[i] + 2.0 * k2z.g[i] + 2.0 * k3z.g[i] + k4z.g[i]);
    }
    if let Some(t) = tangent {
        for r in 0..TANGENT {
            for c in 0..TANGENT {
                t[r][c] += w * (k1t[r][c] + 2.0 * k2t[r][c] + 2.0 * k3t[r][c] + k4t[r][c]);
            }
        }
    }
}

fn check_span(t: f64, s: f64, opts: &FlowOptions) -> Result<()> {
    let span = (s - t).abs();
    if span > opts.max_span {
        return Err(Error::HorizonExceeded {
            span,
            limit: opts.max_span,
        });
    }
    Ok(())
}

fn check_dims(v: &dyn PotentialModel, x: &[f64], xi: &[f64]) -> Result<()> {
    let n = v.dim();
    if x.len() != n || xi.len() != n {
        return Err(Error::GridMismatch(format!(
            "potential has dimension {n}, initial data has {} and {}",
            x.len(),
            xi.len()
        )));
    }
    Ok(())
}

/// Integrates from `t` to `s` in `steps` equal steps, calling
/// `visit(s_k, z_k)` at every step point including both ends.
pub(crate) fn integrate_path(
    v: &dyn PotentialModel,
    integrator: Integrator,
    t: f64,
    s: f64,
    steps: usize,
    z: &mut Phase,
    mut tangent: Option<&mut Tangent>,
    mut visit: impl FnMut(f64, &Phase, Option<&Tangent>),
) -> Result<()> {
    visit(t, z, tangent.as_deref());
    if steps == 0 {
        return Ok(());
    }
    let n = v.dim();
    let h = (s - t) / steps as f64;
    if v.class() == PotentialClass::Free {
        // Straight lines, evaluated in closed form at every step point.
        let start = *z;
        for k in 1..=steps {
            let sk = if k == steps { s } else { t + k as f64 * h };
            let dt = sk - t;
            for i in 0..n {
                z.f[i] = start.f[i] + dt * start.g[i];
            }
            if let Some(tan) = tangent.as_deref_mut() {
                *tan = tangent_identity();
                for i in 0..n {
                    tan[i][MAX_DIM + i] = dt;
                }
            }
            visit(sk, z, tangent.as_deref());
        }
        return Ok(());
    }
    for k in 0..steps {
        let sk = t + k as f64 * h;
        step(v, integrator, sk, h, z, tangent.as_deref_mut());
        let next = if k + 1 == steps { s } else { t + (k + 1) as f64 * h };
        if !z.is_finite() {
            return Err(Error::FlowDiverged { time: next });
        }
        visit(next, z, tangent.as_deref());
    }
    Ok(())
}

/// `(f(s; t, x, ξ), g(s; t, x, ξ))`.
pub fn flow(
    v: &dyn PotentialModel,
    t: f64,
    x: &[f64],
    xi: &[f64],
    s: f64,
    opts: &FlowOptions,
) -> Result<FlowState> {
    check_dims(v, x, xi)?;
    check_span(t, s, opts)?;
    let mut z = Phase::new(x, xi);
    integrate_path(v, opts.integrator, t, s, opts.steps_for(s - t), &mut z, None, |_, _, _| {})?;
    Ok(z.to_state(v.dim()))
}

/// The flow together with its variational matrix `M(s; t, x, ξ)`.
pub fn variational_flow(
    v: &dyn PotentialModel,
    t: f64,
    x: &[f64],
    xi: &[f64],
    s: f64,
    opts: &FlowOptions,
) -> Result<(FlowState, VariationalState)> {
    check_dims(v, x, xi)?;
    check_span(t, s, opts)?;
    let mut z = Phase::new(x, xi);
    let mut tan = tangent_identity();
    integrate_path(
        v,
        opts.integrator,
        t,
        s,
        opts.steps_for(s - t),
        &mut z,
        Some(&mut tan),
        |_, _, _| {},
    )?;
    let n = v.dim();
    Ok((z.to_state(n), VariationalState::from_tangent(n, &tan)))
}

/// Sample of a trajectory with the Liouville determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub s: f64,
    pub state: FlowState,
    pub det: f64,
}

/// Trajectory from `t` to `s`, keeping every `stride`-th step point.
pub fn trajectory(
    v: &dyn PotentialModel,
    t: f64,
    x: &[f64],
    xi: &[f64],
    s: f64,
    opts: &FlowOptions,
    stride: usize,
) -> Result<Vec<TrajectoryPoint>> {
    check_dims(v, x, xi)?;
    check_span(t, s, opts)?;
    let n = v.dim();
    let steps = opts.steps_for(s - t);
    let stride = stride.max(1);
    let mut z = Phase::new(x, xi);
    let mut tan = tangent_identity();
    let mut out = Vec::new();
    let mut k = 0usize;
    integrate_path(v, opts.integrator, t, s, steps, &mut z, Some(&mut tan), |sk, z, tan| {
        if k % stride == 0 || k == steps {
            out.push(TrajectoryPoint {
                s: sk,
                state: z.to_state(n),
                det: VariationalState::from_tangent(n, tan.unwrap()).det(),
            });
        }
        k += 1;
    })?;
    Ok(out)
}

/// Writes `s,f_1..f_n,g_1..g_n,detM`.
pub fn write_trajectory(points: &[TrajectoryPoint], mut out: impl Write) -> Result<()> {
    let n = points.first().map(|p| p.state.f.len()).unwrap_or(1);
    let mut header = vec!["s".to_string()];
    header.extend((1..=n).map(|i| format!("f_{i}")));
    header.extend((1..=n).map(|i| format!("g_{i}")));
    header.push("detM".into());
    writeln!(out, "{}", header.join(","))?;
    for p in points {
        let mut row = vec![format!("{:e}", p.s)];
        row.extend(p.state.f.iter().map(|v| format!("{v:e}")));
        row.extend(p.state.g.iter().map(|v| format!("{v:e}")));
        row.push(format!("{:e}", p.det));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Largest entrywise gap between the central-difference Jacobian of the
/// flow (step `h` in each of the `2n` initial coordinates) and the
/// variational matrix, relative to `max(1, max |M|)`.
pub fn jacobian_fd_check(
    v: &dyn PotentialModel,
    t: f64,
    x: &[f64],
    xi: &[f64],
    s: f64,
    h: f64,
    opts: &FlowOptions,
) -> Result<f64> {
    let n = v.dim();
    let (_, m) = variational_flow(v, t, x, xi, s, opts)?;
    let mut worst = 0.0_f64;
    for col in 0..2 * n {
        let shifted = |sign: f64| -> Result<FlowState> {
            let mut xp = x.to_vec();
            let mut xip = xi.to_vec();
            if col < n {
                xp[col] += sign * h;
            } else {
                xip[col - n] += sign * h;
            }
            flow(v, t, &xp, &xip, s, opts)
        };
        let plus = shifted(1.0)?;
        let minus = shifted(-1.0)?;
        for row in 0..2 * n {
            let (p, q) = if row < n {
                (plus.f[row], minus.f[row])
            } else {
                (plus.g[row - n], minus.g[row - n])
            };
            let fd = (p - q) / (2.0 * h);
            worst = worst.max((fd - m.get(row, col)).abs());
        }
    }
    Ok(worst / m.max_abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::potential::Potential;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn free_flow_is_straight_line() {
        let v = Potential::free(2);
        let st = flow(&v, 0.5, &[1.0, -2.0], &[0.25, 3.0], -3.0, &FlowOptions::default()).unwrap();
        assert_eq!(st.f, vec![1.0 - 3.5 * 0.25, -2.0 - 3.5 * 3.0]);
        assert_eq!(st.g, vec![0.25, 3.0]);
    }

    #[test]
    fn harmonic_flow_matches_rotation() {
        let v = Potential::harmonic(1);
        let opts = FlowOptions::default().with_step(PI / 2.0 / 1e4);
        let (x, xi) = (0.7, -1.3);
        let s = PI / 2.0;
        let st = flow(&v, 0.0, &[x], &[xi], s, &opts).unwrap();
        assert_eq!(opts.steps_for(s), 10_000);
        assert!((st.f[0] - (x * s.cos() + xi * s.sin())).abs() <= 1e-8);
        assert!((st.g[0] - (-x * s.sin() + xi * s.cos())).abs() <= 1e-8);
    }

    #[test]
    fn forward_backward_returns_home() {
        let v = Potential::cosine(1);
        for opts in [FlowOptions::default(), FlowOptions::rk4()] {
            let there = flow(&v, 0.3, &[0.4], &[1.1], 3.3, &opts).unwrap();
            let back = flow(&v, 3.3, &there.f, &there.g, 0.3, &opts).unwrap();
            assert!((back.f[0] - 0.4).abs() <= 1e-8 && (back.g[0] - 1.1).abs() <= 1e-8);
        }
    }

    #[test]
    fn free_variational_matrix() {
        let v = Potential::free(1);
        let (_, m) = variational_flow(&v, 1.0, &[0.0], &[1.0], -1.5, &FlowOptions::default()).unwrap();
        assert_eq!(m.entries(), &[1.0, -2.5, 0.0, 1.0]);
    }

    #[test]
    fn harmonic_variational_rotation() {
        let v = Potential::harmonic(1);
        for s in [0.5, 2.0, -3.0] {
            let (_, m) = variational_flow(&v, 0.0, &[0.3], &[0.1], s, &FlowOptions::rk4()).unwrap();
            let (c, sn) = (s.cos(), s.sin());
            let expected = [c, sn, -sn, c];
            for (a, b) in m.entries().iter().zip(expected) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((m.det() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn liouville_determinant() {
        let v = Potential::harmonic_cosine(1);
        for s in [-4.0, -1.0, 1.0, 4.0] {
            let (_, m) = variational_flow(&v, 0.0, &[0.9], &[-0.4], s, &FlowOptions::rk4()).unwrap();
            assert!((m.det() - 1.0).abs() <= 1e-6);
            let (_, m) = variational_flow(&v, 0.0, &[0.9], &[-0.4], s, &FlowOptions::default()).unwrap();
            assert!((m.det() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn liouville_in_two_dimensions() {
        let v = Potential::HarmonicCosine {
            amplitude: 0.7,
            wavevector: vec![1.0, -0.6],
        };
        let (_, m) =
            variational_flow(&v, 0.0, &[0.2, 1.1], &[-0.4, 0.8], 3.0, &FlowOptions::default()).unwrap();
        assert_eq!(m.size(), 4);
        assert!((m.det() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn fd_check_free_is_exact() {
        let v = Potential::free(1);
        let err = jacobian_fd_check(&v, 0.0, &[0.3], &[-2.0], 2.0, 0.5, &FlowOptions::default()).unwrap();
        assert!(err <= 1e-12, "{err:e}");
    }

    #[test]
    fn fd_check_cosine() {
        let v = Potential::cosine(1);
        let opts = FlowOptions::default();
        let e1 = jacobian_fd_check(&v, 0.0, &[0.5], &[0.8], 2.0, 1e-4, &opts).unwrap();
        let e2 = jacobian_fd_check(&v, 0.0, &[0.5], &[0.8], 2.0, 5e-5, &opts).unwrap();
        assert!(e1 <= 1e-4, "{e1:e}");
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
    }

    #[test]
    fn momentum_identity() {
        // g(s) = ξ + ∫_s^t ∇V(σ, f(σ)) dσ, trapezoid on the RK4 step grid.
        let v = Potential::pulsed_cosine(1);
        let opts = FlowOptions::rk4();
        let (t, s) = (1.0, -2.0);
        let pts = trajectory(&v, t, &[0.3], &[0.6], s, &opts, 1).unwrap();
        let mut integral = 0.0;
        for w in pts.windows(2) {
            let mut g0 = [0.0];
            let mut g1 = [0.0];
            v.grad(w[0].s, &w[0].state.f, &mut g0);
            v.grad(w[1].s, &w[1].state.f, &mut g1);
            integral += 0.5 * (g0[0] + g1[0]) * (w[0].s - w[1].s);
        }
        let last = pts.last().unwrap();
        assert!((last.state.g[0] - (0.6 + integral)).abs() < 1e-6);
    }

    #[test]
    fn energy_is_conserved_for_static_potential() {
        let v = Potential::harmonic_cosine(1);
        let pts = trajectory(&v, 0.0, &[1.0], &[0.5], 6.0, &FlowOptions::default(), 100).unwrap();
        let energy = |p: &TrajectoryPoint| 0.5 * p.state.g[0].powi(2) + v.value(0.0, &p.state.f);
        let e0 = energy(&pts[0]);
        for p in &pts {
            assert!((energy(p) - e0).abs() < 1e-6);
        }
    }

    #[test]
    fn horizon_and_dimension_errors() {
        let v = Potential::cosine(1);
        assert!(matches!(
            flow(&v, 0.0, &[0.0], &[0.0], 20.0, &FlowOptions::default()),
            Err(Error::HorizonExceeded { .. })
        ));
        assert!(matches!(
            flow(&v, 0.0, &[0.0, 1.0], &[0.0, 1.0], 1.0, &FlowOptions::default()),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn divergence_is_reported() {
        // An inverted quadratic with a huge curvature overflows quickly.
        let v = Potential::Quadratic {
            hessian: vec![-1e6],
            linear: vec![0.0],
        };
        let err = flow(&v, 0.0, &[1.0], &[0.0], 10.0, &FlowOptions::default()).unwrap_err();
        match err {
            Error::FlowDiverged { time } => assert!(time > 0.0 && time < 10.0),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn trajectory_dump_format() {
        let v = Potential::harmonic(1);
        let pts = trajectory(&v, 0.0, &[1.0], &[0.0], 0.01, &FlowOptions::default(), 5).unwrap();
        assert_eq!(pts.len(), 3);
        let mut buf = Vec::new();
        write_trajectory(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,f_1,g_1,detM\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn determinant_helper() {
        let a = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        assert!((determinant(&a, 3) - 18.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // Swapping two rows flips the sign.
        let mut c = b.clone();
        for k in 0..4 {
            c.swap(k, 4 + k);
        }
        assert!((determinant(&b, 4) + determinant(&c, 4)).abs() < 1e-12);
    }
}
