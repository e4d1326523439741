//! The named experiments. Each one measures its metrics and attaches the
//! tolerance it is judged by; tolerances live here, not in the configs.

use std::f64::consts::PI;
use std::time::Instant;

use crate::classical::{
    jacobian_fd_check, random_bound_samples, trajectory_bound_check, variational_flow, FlowOptions, Integrator,
    PotentialClass, PotentialModel,
};
use crate::error::{Error, Result};
use crate::grid::{mixed_norm, Exponent, MixedNormSpec};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::series::{growth_exponent, log_envelope, rotation_check, run_norm_series};
use crate::schrod::{free_propagate, propagate, steps_for};
use crate::transport::{leading_transport, picard_propagate, write_iteration_report, PhaseIntegralSpec};
use crate::wpt::{invert, wpt, Window};

/// How a metric is judged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    AtMost(f64),
    /// Strictly below.
    Below(f64),
    AtLeast(f64),
    Within(f64, f64),
    /// Reported only; must be finite.
    Report,
}

impl Check {
    pub fn passes(self, value: f64) -> bool {
        match self {
            Self::AtMost(b) => value <= b,
            Self::Below(b) => value < b,
            Self::AtLeast(b) => value >= b,
            Self::Within(lo, hi) => (lo..=hi).contains(&value),
            Self::Report => value.is_finite(),
        }
    }

    pub fn describe(self) -> String {
        match self {
            Self::AtMost(b) => format!("<= {b:e}"),
            Self::Below(b) => format!("< {b:e}"),
            Self::AtLeast(b) => format!(">= {b:e}"),
            Self::Within(lo, hi) => format!("in [{lo}, {hi}]"),
            Self::Report => "finite".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub check: Check,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64, check: Check) -> Self {
        Self {
            name: name.into(),
            value,
            check,
        }
    }

    pub fn passed(&self) -> bool {
        self.check.passes(self.value)
    }
}

/// A named CSV produced by an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Measurements of one experiment case.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CaseResult {
    pub metrics: Vec<Metric>,
    pub artifacts: Vec<Artifact>,
}

impl CaseResult {
    fn metric(&mut self, name: impl Into<String>, value: f64, check: Check) {
        self.metrics.push(Metric::new(name, value, check));
    }

    fn artifact(&mut self, name: impl Into<String>, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.artifacts.push(Artifact {
            name: name.into(),
            contents: String::from_utf8(buf).expect("csv output is utf-8"),
        });
        Ok(())
    }
}

/// Free evolution with a freely evolved window keeps every ratio at one.
const FREE_CONSERVATION_TOL: f64 = 1e-3;
const FREE_CONSERVATION_SECONDS: f64 = 30.0;
const HARMONIC_CONSERVATION_TOL: f64 = 1e-2;
const ROTATION_TOL: f64 = 1e-2;
const ROTATION_ASYMMETRY: f64 = 1.5;
const LIOUVILLE_RK4_TOL: f64 = 1e-6;
const LIOUVILLE_VERLET_TOL: f64 = 1e-9;
const FD_TOL: f64 = 1e-4;
const FD_RATIO: (f64, f64) = (3.5, 4.5);
const TRANSPORT_EXACT_TOL: f64 = 1e-3;
const PICARD_TOL: f64 = 1e-2;
const PICARD_MAX_K: f64 = 8.0;
const BOUNDED_START_TOL: f64 = 1e-12;
const GROWTH_RANGE: (f64, f64) = (0.3, 0.6);
const L2_GROWTH_TOL: f64 = 0.05;
const INVERSION_TOL: f64 = 1e-8;
const PLANCHEREL_TOL: f64 = 1e-8;
const UNITARITY_TOL: f64 = 1e-12;
const RICHARDSON_RATIO: (f64, f64) = (3.5, 4.5);

/// Runs one resolved case.
pub fn run_case(cfg: &ExperimentConfig) -> Result<CaseResult> {
    let wrap = |e: Error| Error::Experiment {
        name: cfg.label(),
        source: Box::new(e),
    };
    let mut out = CaseResult::default();
    match cfg.kind {
        ExperimentKind::FreeConservation => free_conservation(cfg, &mut out),
        ExperimentKind::HarmonicConservation => harmonic_conservation(cfg, &mut out),
        ExperimentKind::Rotation => rotation(cfg, &mut out),
        ExperimentKind::Liouville => liouville(cfg, &mut out),
        ExperimentKind::FlowJacobian => flow_jacobian(cfg, &mut out),
        ExperimentKind::TrajectoryBounds => trajectory_bounds(cfg, &mut out),
        ExperimentKind::TransportExact => transport_exact(cfg, &mut out),
        ExperimentKind::PicardTransport => picard_transport(cfg, &mut out),
        ExperimentKind::Boundedness => boundedness(cfg, &mut out),
        ExperimentKind::GrowthExponent => growth(cfg, &mut out),
        ExperimentKind::Identities => identities(cfg, &mut out),
        ExperimentKind::NormSeries => norm_series(cfg, &mut out),
    }
    .map_err(wrap)?;
    Ok(out)
}

fn require_class(cfg: &ExperimentConfig, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::PotentialClass(format!("{} needs {what}, got {:?}", cfg.kind.name(), cfg.potential)))
    }
}

fn spec_label(spec: MixedNormSpec) -> String {
    format!("{}:{}", spec.p, spec.q)
}

fn norm_series(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let series = run_norm_series(cfg)?;
    for spec in series.specs() {
        out.metric(format!("{}.max_ratio", spec_label(spec)), series.for_spec(spec).max_ratio(), Check::Report);
    }
    out.artifact("norms", |w| series.write_csv(w))
}

fn free_conservation(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    require_class(cfg, cfg.potential.class() == PotentialClass::Free, "V = 0")?;
    let clock = Instant::now();
    let series = run_norm_series(cfg)?;
    for spec in series.specs() {
        let s = series.for_spec(spec);
        let label = spec_label(spec);
        out.metric(format!("{label}.reference"), s.rows[0].reference, Check::Report);
        out.metric(format!("{label}.max_deviation"), s.max_deviation(), Check::AtMost(FREE_CONSERVATION_TOL));
    }
    out.metric("wall_seconds", clock.elapsed().as_secs_f64(), Check::AtMost(FREE_CONSERVATION_SECONDS));
    out.artifact("norms", |w| series.write_csv(w))
}

fn harmonic_conservation(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    require_class(cfg, cfg.potential.class() == PotentialClass::Quadratic, "a quadratic potential")?;
    if cfg.norms.iter().any(|s| s.p != s.q) {
        return Err(Error::Config("harmonic conservation holds on the diagonal p = q".into()));
    }
    let series = run_norm_series(cfg)?;
    for spec in series.specs() {
        let dev = series.for_spec(spec).max_deviation();
        out.metric(format!("{}.max_deviation", spec_label(spec)), dev, Check::AtMost(HARMONIC_CONSERVATION_TOL));
    }
    out.artifact("norms", |w| series.write_csv(w))
}

fn rotation(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let report = rotation_check(cfg)?;
    for row in &report.rows {
        out.metric(
            format!("{}.relative_difference", spec_label(row.spec)),
            row.relative_difference,
            Check::AtMost(ROTATION_TOL),
        );
    }
    out.metric("swap_asymmetry", report.asymmetry, Check::AtLeast(ROTATION_ASYMMETRY));
    out.artifact("rotation", |w| report.write_csv(w))
}

fn liouville(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let v = &cfg.potential;
    let samples = random_bound_samples(v.dim(), cfg.samples, cfg.span, cfg.extent, cfg.seed);
    let base = FlowOptions {
        max_span: cfg.flow.max_span.max(cfg.span),
        ..cfg.flow
    };
    for (name, integrator, tol) in [
        ("rk4", Integrator::Rk4, LIOUVILLE_RK4_TOL),
        ("verlet", Integrator::Verlet, LIOUVILLE_VERLET_TOL),
    ] {
        let opts = FlowOptions { integrator, ..base };
        let mut worst = 0.0_f64;
        for s in &samples {
            let (_, m) = variational_flow(v, s.t, &s.x, &s.xi, s.s, &opts)?;
            worst = worst.max((m.det() - 1.0).abs());
        }
        out.metric(format!("{name}.max_det_error"), worst, Check::AtMost(tol));
    }
    Ok(())
}

fn flow_jacobian(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let v = &cfg.potential;
    let samples = random_bound_samples(v.dim(), cfg.samples, cfg.span, cfg.extent, cfg.seed);
    let h = cfg.fd_h;
    let (mut coarse, mut fine) = (0.0_f64, 0.0_f64);
    for s in &samples {
        coarse = coarse.max(jacobian_fd_check(v, s.t, &s.x, &s.xi, s.s, h, &cfg.flow)?);
        fine = fine.max(jacobian_fd_check(v, s.t, &s.x, &s.xi, s.s, 0.5 * h, &cfg.flow)?);
    }
    out.metric("fd_error", coarse, Check::AtMost(FD_TOL));
    out.metric("fd_error_half_step", fine, Check::Report);
    out.metric("fd_ratio", coarse / fine, Check::Within(FD_RATIO.0, FD_RATIO.1));
    Ok(())
}

fn trajectory_bounds(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let v = &cfg.potential;
    let samples = random_bound_samples(v.dim(), cfg.samples, cfg.span, cfg.extent, cfg.seed);
    let opts = FlowOptions {
        max_span: cfg.flow.max_span.max(2.0 * cfg.span),
        ..cfg.flow
    };
    let report = trajectory_bound_check(v, &samples, &opts)?;
    out.metric("gradient_bound", report.constant, Check::Report);
    out.metric("c1", report.c1, Check::Report);
    out.metric("c2", report.c2, Check::Report);
    out.metric("worst_position_ratio", report.worst_position, Check::Report);
    out.metric("worst_momentum_ratio", report.worst_momentum, Check::Report);
    out.metric("violations", report.violations.len() as f64, Check::AtMost(0.0));
    Ok(())
}

fn transport_exact(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    require_class(cfg, cfg.potential.class() == PotentialClass::Free, "V = 0")?;
    let grid = cfg.grid()?;
    let u0 = cfg.initial.build(&grid)?;
    let phi0 = cfg.window.build(&grid)?;
    let phase = PhaseIntegralSpec { flow: cfg.flow };
    let (mut worst, mut outside) = (0.0_f64, 0usize);
    for &t in &cfg.times {
        let transported = leading_transport(&u0, &phi0, &cfg.potential, t, &phase)?;
        let phi = Window::new(free_propagate(phi0.field(), t))?;
        let direct = wpt(&free_propagate(&u0, t), &phi)?;
        worst = worst.max(transported.field.relative_l2_distance(&direct)?);
        outside += transported.outside_targets;
    }
    out.metric("relative_l2", worst, Check::AtMost(TRANSPORT_EXACT_TOL));
    out.metric("outside_targets", outside as f64, Check::Report);
    Ok(())
}

fn picard_transport(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    let grid = cfg.grid()?;
    let v = &cfg.potential;
    let u0 = cfg.initial.build(&grid)?;
    let phi0 = cfg.window.build(&grid)?;
    let phase = PhaseIntegralSpec { flow: cfg.flow };
    let mut worst_error = 0.0_f64;
    let mut worst_k = 0usize;
    let mut worst_contraction = 0.0_f64;
    for &t in &cfg.times {
        let result = picard_propagate(&u0, &phi0, v, t, &cfg.picard, &phase)?;
        let u = propagate(&u0, v, t, steps_for(t, cfg.dt))?;
        let phi = Window::new(free_propagate(phi0.field(), t))?;
        let reference = wpt(&u, &phi)?;
        worst_error = worst_error.max(result.field.relative_l2_distance(&reference)?);
        worst_k = worst_k.max(result.converged_at());
        let inc = result.increments();
        for pair in inc.windows(2) {
            worst_contraction = worst_contraction.max(pair[1] / pair[0]);
        }
        out.artifact(format!("iterations_t{t}"), |w| write_iteration_report(&result.iterations, w))?;
    }
    out.metric("relative_l2", worst_error, Check::AtMost(PICARD_TOL));
    out.metric("iterations", worst_k as f64, Check::AtMost(PICARD_MAX_K));
    // Largest ratio of consecutive increments; strictly below one means the
    // sequence decreases.
    out.metric("increment_ratio", worst_contraction, Check::Below(1.0));
    Ok(())
}

fn boundedness(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    require_class(cfg, cfg.potential.class().has_bounded_hessian(), "a sub-quadratic potential")?;
    let series = run_norm_series(cfg)?;
    for spec in series.specs() {
        let s = series.for_spec(spec);
        let label = spec_label(spec);
        let start = s.rows.first().filter(|r| r.t == 0.0).map_or(f64::INFINITY, |r| (r.ratio - 1.0).abs());
        let env = log_envelope(&s);
        out.metric(format!("{label}.initial_deviation"), start, Check::AtMost(BOUNDED_START_TOL));
        out.metric(format!("{label}.max_ratio"), s.max_ratio(), Check::Report);
        out.metric(format!("{label}.envelope_intercept"), env.intercept, Check::Report);
        out.metric(format!("{label}.envelope_slope"), env.slope, Check::Report);
        out.metric(format!("{label}.fit_residual"), env.residual, Check::Report);
    }
    out.artifact("norms", |w| series.write_csv(w))
}

fn growth(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    require_class(cfg, cfg.potential.class() == PotentialClass::Free, "V = 0")?;
    let series = run_norm_series(cfg)?;
    let (one, inf, two) = (Exponent::Finite(1.0), Exponent::Infinity, Exponent::Finite(2.0));
    for spec in series.specs() {
        let e = growth_exponent(&series.for_spec(spec))?;
        let check = if spec == MixedNormSpec::new(inf, one) {
            Check::Within(GROWTH_RANGE.0, GROWTH_RANGE.1)
        } else if spec == MixedNormSpec::diagonal(two) {
            Check::Within(-L2_GROWTH_TOL, L2_GROWTH_TOL)
        } else {
            Check::Report
        };
        out.metric(format!("{}.exponent", spec_label(spec)), e, check);
    }
    out.artifact("norms", |w| series.write_csv(w))
}

fn identities(cfg: &ExperimentConfig, out: &mut CaseResult) -> Result<()> {
    // The free solve is exact, which leaves the Richardson ratio undefined.
    require_class(cfg, cfg.potential.class() != PotentialClass::Free, "a nonzero potential")?;
    let grid = cfg.grid()?;
    let v = &cfg.potential;
    let f = cfg.initial.build(&grid)?;
    let phi = cfg.window.build(&grid)?;
    let psi = Window::gaussian(&grid, 2.0 * cfg.window.width)?;

    let w = wpt(&f, &phi)?;
    let norm = f.l2_norm();
    let mut inversion = 0.0_f64;
    for synth in [&phi, &psi] {
        let back = invert(&w, synth, &phi)?;
        inversion = inversion.max(back.add(&f.scaled((-1.0).into()))?.l2_norm() / norm);
    }
    out.metric("inversion_error", inversion, Check::AtMost(INVERSION_TOL));

    let expected = (2.0 * PI).powi(grid.dim() as i32) * f.l2_norm_sq() * phi.l2_norm_sq();
    let m22 = mixed_norm(&w, MixedNormSpec::diagonal(Exponent::Finite(2.0)))?;
    out.metric("plancherel_error", (m22 * m22 - expected).abs() / expected, Check::AtMost(PLANCHEREL_TOL));

    let t = cfg.times.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if t == 0.0 {
        return Err(Error::Config("identities need a positive time".into()));
    }
    let u = propagate(&f, v, t, steps_for(t, cfg.dt))?;
    out.metric("l2_drift_per_time", (u.l2_norm() - norm).abs() / norm / t, Check::AtMost(UNITARITY_TOL));

    // Strang order from steps dt, dt/2 against a much finer solve.
    let steps = steps_for(t, cfg.dt);
    let reference = propagate(&f, v, t, 64 * steps)?;
    let e1 = propagate(&f, v, t, steps)?.sup_distance(&reference)?;
    let e2 = propagate(&f, v, t, 2 * steps)?.sup_distance(&reference)?;
    out.metric("richardson_ratio", e1 / e2, Check::Within(RICHARDSON_RATIO.0, RICHARDSON_RATIO.1));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks() {
        assert!(Check::AtMost(1.0).passes(1.0));
        assert!(!Check::Below(1.0).passes(1.0));
        assert!(Check::Within(3.5, 4.5).passes(4.0));
        assert!(!Check::AtLeast(1.5).passes(1.4));
        assert!(!Check::Report.passes(f64::NAN));
        assert!(!Check::AtMost(1.0).passes(f64::NAN));
    }
}
