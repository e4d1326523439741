//! Characteristic transport of the wave packet transform.
//!
//! Along the classical flow `(f, g)` ending at `(x, ξ)` at time `t`,
//!
//! `W(t) = e^{-i∫₀ᵗ h} W₀(f(0), g(0)) - i ∫₀ᵗ e^{-i∫_τᵗ h} Ru(τ, f(τ), g(τ)) dτ`
//!
//! with `h = ½|g|² + V(f) - ∇V(f)·f` and `R` the second-order Taylor remainder
//! of the potential acting through the window. The window evolves freely.

use std::io::Write;
use std::num::NonZeroUsize;
use std::time::Instant;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::classical::flow::{integrate_path, FlowOptions, Phase};
use crate::classical::potential::{grad_at, hess_at, PotentialModel};
use crate::error::{Error, Result};
use crate::grid::{Exponent, Grid, PhaseSpaceField, Point, MAX_DIM};
use crate::interp::PhaseInterpolator;
use crate::schrod::FreePropagator;
use crate::wpt::{invert, windowed_transform, wpt, ComplexField, Window};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quadrature of `∫ h ds`: the trapezoid rule on the flow's own step grid.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PhaseIntegralSpec {
    pub flow: FlowOptions,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderSpec {
    /// Gauss–Legendre nodes for the `θ` integral of the Taylor kernel.
    pub theta_nodes: usize,
    /// Target spacing of the composite trapezoid rule in `τ`.
    pub tau_step: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the relative `L²` increment.
    pub tolerance: f64,
}

impl Default for RemainderSpec {
    fn default() -> Self {
        Self {
            theta_nodes: 8,
            tau_step: 0.05,
            max_iterations: 8,
            tolerance: 1e-6,
        }
    }
}

impl RemainderSpec {
    fn validate(&self) -> Result<()> {
        if self.theta_nodes == 0 || self.max_iterations == 0 || !(self.tau_step > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("invalid remainder options {self:?}")));
        }
        Ok(())
    }
}

/// `h = ½|g|² + V(s, f) - ∇V(s, f)·f`.
pub fn phase_h(v: &dyn PotentialModel, s: f64, f: &[f64], g: &[f64]) -> f64 {
    let n = v.dim();
    let mut grad = [0.0; MAX_DIM];
    v.grad(s, &f[..n], &mut grad[..n]);
    let kinetic: f64 = g[..n].iter().map(|g| g * g).sum::<f64>() * 0.5;
    let work: f64 = grad[..n].iter().zip(&f[..n]).map(|(a, b)| a * b).sum();
    kinetic + v.value(s, &f[..n]) - work
}

fn phase_h_at(v: &dyn PotentialModel, s: f64, z: &Phase) -> f64 {
    let n = v.dim();
    let grad = grad_at(v, s, &z.f);
    let mut h = 0.0;
    for i in 0..n {
        h += 0.5 * z.g[i] * z.g[i] - grad[i] * z.f[i];
    }
    h + v.value(s, &z.f[..n])
}

/// A transported field together with the number of interpolation targets
/// that landed outside the padded lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Transported {
    pub field: PhaseSpaceField,
    pub outside_targets: usize,
}

/// Uniform `τ` nodes from `0` to `t` with spacing at most `step`.
fn tau_nodes(t: f64, step: f64) -> Vec<f64> {
    let m = if t == 0.0 {
        0
    } else {
        ((t.abs() / step) - 1e-9).ceil().max(1.0) as usize
    };
    (0..=m).map(|l| if l == m { t } else { t * l as f64 / m as f64 }).collect()
}

/// One phase-space slice at `taus[target]`. Every node is followed back to
/// `τ = 0`, picking up `sources[l]` at `taus[l]` with trapezoid weights; with
/// no sources this is the leading term alone.
fn transport_slice(
    grid: &Grid,
    v: &dyn PotentialModel,
    taus: &[f64],
    target: usize,
    flow_opts: &FlowOptions,
    initial: &PhaseInterpolator,
    sources: &[PhaseInterpolator],
) -> Result<PhaseSpaceField> {
    let len = grid.len();
    let n = grid.dim();
    let weights: Vec<f64> = (0..=target)
        .map(|l| {
            if target == 0 {
                0.0
            } else {
                let left = if l > 0 { taus[l] - taus[l - 1] } else { 0.0 };
                let right = if l < target { taus[l + 1] - taus[l] } else { 0.0 };
                0.5 * (left + right)
            }
        })
        .collect();

    let mut values = vec![ZERO; len * len];
    values
        .par_chunks_mut(len)
        .enumerate()
        .try_for_each(|(xj, row)| -> Result<()> {
            let x = grid.position(xj);
            for (xk, out) in row.iter_mut().enumerate() {
                let xi = grid.frequency(xk);
                let mut z = Phase::new(&x[..n], &xi[..n]);
                let mut action = 0.0;
                let mut forcing = ZERO;
                if !sources.is_empty() {
                    forcing += sources[target].eval(&z.f, &z.g) * weights[target];
                }
                let mut last = (taus[target], phase_h_at(v, taus[target], &z));
                for l in (0..target).rev() {
                    let steps = flow_opts.steps_for(taus[l + 1] - taus[l]);
                    integrate_path(v, flow_opts.integrator, taus[l + 1], taus[l], steps, &mut z, None, |s, z, _| {
                        if s != last.0 {
                            let h = phase_h_at(v, s, z);
                            action += 0.5 * (last.1 + h) * (last.0 - s);
                            last = (s, h);
                        }
                    })?;
                    if !sources.is_empty() {
                        forcing += Complex64::from_polar(weights[l], -action) * sources[l].eval(&z.f, &z.g);
                    }
                }
                *out = Complex64::from_polar(1.0, -action) * initial.eval(&z.f, &z.g) - I * forcing;
            }
            Ok(())
        })?;
    PhaseSpaceField::from_values(grid, values)
}

fn check_inputs(u0: &ComplexField, phi0: &Window, v: &dyn PotentialModel, t: f64, opts: &FlowOptions) -> Result<()> {
    u0.grid().check_same(phi0.grid(), "transport: signal and window grids differ")?;
    if v.dim() != u0.grid().dim() {
        return Err(Error::GridMismatch("potential and grid dimensions differ".into()));
    }
    if t.abs() > opts.max_span {
        return Err(Error::HorizonExceeded {
            span: t.abs(),
            limit: opts.max_span,
        });
    }
    Ok(())
}

/// The leading term `e^{-i∫₀ᵗ h} W_{φ₀}u₀(f(0), g(0))` on every node.
pub fn leading_transport(
    u0: &ComplexField,
    phi0: &Window,
    v: &dyn PotentialModel,
    t: f64,
    phase: &PhaseIntegralSpec,
) -> Result<Transported> {
    check_inputs(u0, phi0, v, t, &phase.flow)?;
    let w0 = wpt(u0, phi0)?;
    let interp = PhaseInterpolator::new(&w0);
    let taus = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    let field = transport_slice(u0.grid(), v, &taus, taus.len() - 1, &phase.flow, &interp, &[])?;
    Ok(Transported {
        field,
        outside_targets: interp.outside_count(),
    })
}

/// `θ` nodes and weights on `[0, 1]`, with the Taylor factor `1 - θ` folded in.
fn taylor_rule(nodes: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("at least one node"));
    rule.iter()
        .map(|(x, w)| {
            let theta = 0.5 * (x + 1.0);
            (theta, 0.5 * w * (1.0 - theta))
        })
        .collect()
}

/// `Ru(τ, x, ξ) = Σ_jk ∫ conj(φ(y-x)) V_jk(τ, x, y) (y-x)_j (y-x)_k u(y) e^{-iy·ξ} dy`.
pub fn remainder_apply(
    u: &ComplexField,
    phi: &Window,
    v: &dyn PotentialModel,
    tau: f64,
    spec: &RemainderSpec,
) -> Result<PhaseSpaceField> {
    let grid = u.grid();
    grid.check_same(phi.grid(), "remainder: signal and window grids differ")?;
    match v.constant_hessian() {
        Some(h) => remainder_quadratic(u, phi, &h),
        None => remainder_general(u, phi, v, tau, spec.theta_nodes),
    }
}

/// Constant Hessian: `V_jk = H_jk / 2`, so `R = ½ Σ H_jk W_{y_j y_k φ} u`.
fn remainder_quadratic(u: &ComplexField, phi: &Window, hess: &[f64]) -> Result<PhaseSpaceField> {
    let grid = u.grid();
    let n = grid.dim();
    let mut out = PhaseSpaceField::zeros(grid);
    for j in 0..n {
        for k in j..n {
            let c = hess[j * n + k] * if j == k { 0.5 } else { 1.0 };
            if c == 0.0 {
                continue;
            }
            let term = wpt(u, &phi.moment(j, k)?)?;
            out = out.add(&term.scaled(Complex64::new(c, 0.0)))?;
        }
    }
    Ok(out)
}

/// `θ`-quadrature of the Hessian along each chord, then a windowed DFT per row.
pub(crate) fn remainder_general(
    u: &ComplexField,
    phi: &Window,
    v: &dyn PotentialModel,
    tau: f64,
    theta_nodes: usize,
) -> Result<PhaseSpaceField> {
    let grid = u.grid();
    let n = grid.dim();
    let rule = taylor_rule(theta_nodes);
    let displacements: Vec<Point> = (0..grid.len()).map(|d| grid.position(d)).collect();
    let conj_phi: Vec<Complex64> = phi.field().values().iter().map(|c| c.conj()).collect();
    let values = windowed_transform(grid, u.values(), |j, m| {
        let d = grid.wrapped_difference(m, j);
        let w = conj_phi[d];
        if w == ZERO {
            return ZERO;
        }
        let x = grid.position(j);
        let y = &displacements[d];
        let mut acc = 0.0;
        for &(theta, weight) in &rule {
            let mut p: Point = [0.0; MAX_DIM];
            for i in 0..n {
                p[i] = x[i] + theta * y[i];
            }
            let hs = hess_at(v, tau, &p);
            let mut quad = 0.0;
            for a in 0..n {
                for b in 0..n {
                    quad += hs[a * n + b] * y[a] * y[b];
                }
            }
            acc += weight * quad;
        }
        w * acc
    });
    PhaseSpaceField::from_values(grid, values)
}

/// One line of the iteration report.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Largest relative `L²` change over the `τ` slices.
    pub increment: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardTransport {
    /// `W_{φ(t)} u(t)` on the phase-space grid.
    pub field: PhaseSpaceField,
    pub iterations: Vec<IterationRecord>,
    pub outside_targets: usize,
}

impl PicardTransport {
    pub fn increments(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.increment).collect()
    }

    /// Index of the returned iterate; zero when the leading term is exact.
    pub fn converged_at(&self) -> usize {
        self.iterations.last().map_or(0, |r| r.k)
    }
}

/// Writes `k,increment_l2,wall_seconds`.
pub fn write_iteration_report(records: &[IterationRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "k,increment_l2,wall_seconds")?;
    for r in records {
        writeln!(out, "{},{:e},{:.6}", r.k, r.increment, r.wall_seconds)?;
    }
    Ok(())
}

/// Solves the transport representation as a fixed point on a `τ` grid.
///
/// Iterate `k` reconstructs `u^{(k)}(τ)` from `W^{(k)}(τ)` by self-inversion
/// with the freely evolved window, applies the remainder, and re-transports.
/// Stops once the relative increment drops below `spec.tolerance`.
pub fn picard_propagate(
    u0: &ComplexField,
    phi0: &Window,
    v: &dyn PotentialModel,
    t: f64,
    spec: &RemainderSpec,
    phase: &PhaseIntegralSpec,
) -> Result<PicardTransport> {
    spec.validate()?;
    check_inputs(u0, phi0, v, t, &phase.flow)?;
    let grid = u0.grid();
    let taus = tau_nodes(t, spec.tau_step);
    let free = FreePropagator::new(grid);
    let windows: Vec<Window> = taus
        .iter()
        .map(|&tau| Window::new(free.apply(phi0.field(), tau)?))
        .collect::<Result<_>>()?;

    let w0 = wpt(u0, phi0)?;
    let initial = PhaseInterpolator::new(&w0);
    let mut current: Vec<PhaseSpaceField> = (0..taus.len())
        .map(|m| transport_slice(grid, v, &taus, m, &phase.flow, &initial, &[]))
        .collect::<Result<_>>()?;

    let trivial = v.constant_hessian().is_some_and(|h| h.iter().all(|&c| c == 0.0));
    let mut iterations = Vec::new();
    let mut outside = 0;
    if !trivial {
        for k in 1..=spec.max_iterations {
            let clock = Instant::now();
            let remainders: Vec<PhaseSpaceField> = current
                .iter()
                .zip(&windows)
                .zip(&taus)
                .map(|((w, phi), &tau)| {
                    let u = invert(w, phi, phi)?;
                    remainder_apply(&u, phi, v, tau, spec)
                })
                .collect::<Result<_>>()?;
            let sources: Vec<PhaseInterpolator> = remainders.iter().map(PhaseInterpolator::new).collect();
            let next: Vec<PhaseSpaceField> = (0..taus.len())
                .map(|m| transport_slice(grid, v, &taus, m, &phase.flow, &initial, &sources[..=m]))
                .collect::<Result<_>>()?;
            outside = sources.iter().map(|s| s.outside_count()).sum::<usize>();
            let increment = next
                .iter()
                .zip(&current)
                .map(|(a, b)| a.relative_l2_distance(b))
                .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)))?;
            current = next;
            iterations.push(IterationRecord {
                k,
                increment,
                wall_seconds: clock.elapsed().as_secs_f64(),
            });
            if increment < spec.tolerance {
                break;
            }
            if k == spec.max_iterations {
                return Err(Error::NotConverged {
                    iterations: k,
                    increments: iterations.iter().map(|r| r.increment).collect(),
                });
            }
        }
    }
    Ok(PicardTransport {
        field: current.pop().expect("at least one slice"),
        iterations,
        outside_targets: outside + initial.outside_count(),
    })
}

/// Outcome of comparing a transported `L^p` sum with the direct one.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeOfVariables {
    pub mapped: f64,
    pub direct: f64,
    pub relative_difference: f64,
    pub outside_targets: usize,
}

/// Compares `‖W(f(0), g(0))‖_{L^p}` over the `(x, ξ)` grid with `‖W‖_{L^p}`
/// over the `(X, Ξ)` grid. They agree when the flow map preserves volume.
pub fn change_of_variables_check(
    v: &dyn PotentialModel,
    t: f64,
    field: &PhaseSpaceField,
    p: Exponent,
    opts: &FlowOptions,
) -> Result<ChangeOfVariables> {
    let grid = field.grid();
    let n = grid.dim();
    let len = grid.len();
    let interp = PhaseInterpolator::new(field);
    let steps = opts.steps_for(t);
    let mapped_values: Vec<f64> = (0..len * len)
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let x = grid.position(idx / len);
            let xi = grid.frequency(idx % len);
            let mut z = Phase::new(&x[..n], &xi[..n]);
            integrate_path(v, opts.integrator, t, 0.0, steps, &mut z, None, |_, _, _| {})?;
            Ok(interp.eval(&z.f, &z.g).norm())
        })
        .collect::<Result<_>>()?;
    let reduce = |vals: &mut dyn Iterator<Item = f64>| match p {
        Exponent::Infinity => vals.fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let cell = grid.cell_volume() * grid.dual_cell_volume();
            (vals.map(|a| a.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
        }
    };
    let mapped = reduce(&mut mapped_values.into_iter());
    let direct = reduce(&mut field.values().iter().map(|c| c.norm()));
    Ok(ChangeOfVariables {
        mapped,
        direct,
        relative_difference: (mapped - direct).abs() / direct.max(f64::MIN_POSITIVE),
        outside_targets: interp.outside_count(),
    })
}
