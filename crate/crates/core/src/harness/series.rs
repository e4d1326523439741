//! Norm series over time, the quarter-period rotation check, and
//! growth-exponent fits.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use crate::classical::{Potential, PotentialClass, PotentialModel};
use crate::error::{Error, Result};
use crate::grid::{mixed_norm, Exponent, MixedNormSpec};
use crate::harness::config::ExperimentConfig;
use crate::modspace::WindowEvolution;
use crate::schrod::{propagate_between, steps_for, FreePropagator};
use crate::wpt::{wpt, ComplexField, Window};

/// One `(t, p, q)` entry of a series.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub spec: MixedNormSpec,
    pub norm: f64,
    /// `‖u₀‖` in the same norm with the initial window.
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormSeries {
    pub rows: Vec<NormRow>,
}

impl NormSeries {
    /// Norm specs in order of first appearance.
    pub fn specs(&self) -> Vec<MixedNormSpec> {
        let mut out: Vec<MixedNormSpec> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.spec) {
                out.push(r.spec);
            }
        }
        out
    }

    pub fn for_spec(&self, spec: MixedNormSpec) -> NormSeries {
        NormSeries {
            rows: self.rows.iter().filter(|r| r.spec == spec).cloned().collect(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    /// `max |ratio - 1|` over all rows.
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max((r.ratio - 1.0).abs()))
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.ratio))
    }

    /// Writes `t,p,q,norm,reference,ratio`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "t,p,q,norm,reference,ratio")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:e},{},{},{:e},{:e},{:e}",
                r.t, r.spec.p, r.spec.q, r.norm, r.reference, r.ratio
            )?;
        }
        Ok(())
    }
}

/// Advances `f` from `t0` to `t1` under `v`, exactly when `v` is free.
fn advance(
    prop: &FreePropagator,
    f: &ComplexField,
    v: Option<&dyn PotentialModel>,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<ComplexField> {
    if t1 == t0 {
        return Ok(f.clone());
    }
    match v {
        Some(v) if v.class() != PotentialClass::Free => {
            propagate_between(f, v, t0, t1, steps_for(t1 - t0, dt))
        }
        _ => prop.apply(f, t1 - t0),
    }
}

/// Propagates `u` with the reference solver and the window per its mode,
/// measuring every configured norm at every configured time.
pub fn run_norm_series(cfg: &ExperimentConfig) -> Result<NormSeries> {
    let grid = cfg.grid()?;
    let v = &cfg.potential;
    if v.dim() != grid.dim() {
        return Err(Error::Config(format!("{}-dimensional potential on a {}-dimensional grid", v.dim(), grid.dim())));
    }
    if cfg.times.iter().any(|t| *t < 0.0) || cfg.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("norm series times must be non-negative and increasing".into()));
    }
    let prop = FreePropagator::new(&grid);
    let u0 = cfg.initial.build(&grid)?;
    let phi0 = cfg.window.build(&grid)?;
    let w0 = wpt(&u0, &phi0)?;
    let references: Vec<f64> = cfg.norms.iter().map(|&s| mixed_norm(&w0, s)).collect::<Result<_>>()?;

    let free = Potential::free(grid.dim());
    let window_potential: Option<&dyn PotentialModel> = match cfg.window.mode {
        WindowEvolution::Static => None,
        WindowEvolution::Free => Some(&free),
        WindowEvolution::SameEquation => Some(v),
    };

    let (mut t_prev, mut u, mut phi) = (0.0, u0, phi0.field().clone());
    let mut rows = Vec::new();
    for &t in &cfg.times {
        u = advance(&prop, &u, Some(v), t_prev, t, cfg.dt)?;
        if window_potential.is_some() {
            phi = advance(&prop, &phi, window_potential, t_prev, t, cfg.dt)?;
        }
        t_prev = t;
        let w = wpt(&u, &Window::new(phi.clone())?)?;
        for (&spec, &reference) in cfg.norms.iter().zip(&references) {
            let norm = mixed_norm(&w, spec)?;
            if !norm.is_finite() {
                return Err(Error::NonFinite("norm series"));
            }
            rows.push(NormRow {
                t,
                spec,
                norm,
                reference,
                ratio: norm / reference,
            });
        }
    }
    Ok(NormSeries { rows })
}

/// Least-squares slope of `log(ratio)` against `log(1 + t)`.
pub fn growth_exponent(series: &NormSeries) -> Result<f64> {
    if series.specs().len() > 1 {
        return Err(Error::Config("growth exponent needs a single (p, q) series".into()));
    }
    let n = series.rows.len();
    if n < 5 {
        return Err(Error::InsufficientPoints { needed: 5, got: n });
    }
    let t_max = series.rows.iter().fold(0.0_f64, |m, r| m.max(r.t));
    if t_max < 4.0 {
        return Err(Error::Config(format!("growth exponent needs times up to 4, got {t_max}")));
    }
    let xs: Vec<f64> = series.rows.iter().map(|r| (1.0 + r.t).ln()).collect();
    let ys: Vec<f64> = series.rows.iter().map(|r| r.ratio.ln()).collect();
    Ok(line_fit(&xs, &ys).1)
}

/// Ordinary least squares `y ≈ a + b x`, returning `(a, b, rms residual)`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Linear upper envelope `log ratio ≤ a + b t`: the least-squares line
/// lifted until it clears every point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub intercept: f64,
    pub slope: f64,
    pub residual: f64,
}

pub fn log_envelope(series: &NormSeries) -> Envelope {
    let xs = series.times();
    let ys: Vec<f64> = series.ratios().iter().map(|r| r.ln()).collect();
    let (a, b, residual) = line_fit(&xs, &ys);
    let lift = xs.iter().zip(&ys).fold(f64::NEG_INFINITY, |m, (x, y)| m.max(y - a - b * x));
    Envelope {
        intercept: a + lift,
        slope: b,
        residual,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationRow {
    pub spec: MixedNormSpec,
    /// `‖u(π/2)‖_{M^{p,q}_{φ(π/2)}}`.
    pub evolved: f64,
    /// The mixed norm of `W_{φ₀}u₀` with its arguments swapped.
    pub swapped: f64,
    pub relative_difference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationReport {
    pub rows: Vec<RotationRow>,
    /// `‖W₀‖_{L^{1,∞}}` over the same norm of the swapped field, or its
    /// inverse, whichever is at least one.
    pub asymmetry: f64,
}

impl RotationReport {
    pub fn worst(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.relative_difference))
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "p,q,evolved,swapped,relative_difference")?;
        for r in &self.rows {
            writeln!(out, "{},{},{:e},{:e},{:e}", r.spec.p, r.spec.q, r.evolved, r.swapped, r.relative_difference)?;
        }
        Ok(())
    }
}

/// Compares both sides of the quarter-period identity of the harmonic
/// oscillator for `(1,∞)`, `(∞,1)` and `(2,2)`.
pub fn rotation_check(cfg: &ExperimentConfig) -> Result<RotationReport> {
    let grid = cfg.grid()?;
    if grid.dim() != 1 {
        return Err(Error::Config("rotation check is one-dimensional".into()));
    }
    if !grid.is_square() {
        return Err(Error::InvalidGrid("rotation check needs Δx = Δξ".into()));
    }
    let v = &cfg.potential;
    if v.constant_hessian() != Some(vec![1.0]) {
        return Err(Error::PotentialClass("rotation check needs V = x²/2".into()));
    }
    let u0 = cfg.initial.build(&grid)?;
    let phi0 = cfg.window.build(&grid)?;
    let w0 = wpt(&u0, &phi0)?;
    let swapped = w0.swapped()?;

    let prop = FreePropagator::new(&grid);
    let u = advance(&prop, &u0, Some(v), 0.0, FRAC_PI_2, cfg.dt)?;
    let phi = match cfg.window.mode {
        WindowEvolution::Static => phi0.clone(),
        WindowEvolution::Free => Window::new(prop.apply(phi0.field(), FRAC_PI_2)?)?,
        WindowEvolution::SameEquation => Window::new(advance(&prop, phi0.field(), Some(v), 0.0, FRAC_PI_2, cfg.dt)?)?,
    };
    let w = wpt(&u, &phi)?;

    let (one, inf) = (Exponent::Finite(1.0), Exponent::Infinity);
    let specs = [
        MixedNormSpec::new(one, inf),
        MixedNormSpec::new(inf, one),
        MixedNormSpec::diagonal(Exponent::Finite(2.0)),
    ];
    let rows = specs
        .iter()
        .map(|&spec| {
            let evolved = mixed_norm(&w, spec)?;
            let swapped = mixed_norm(&swapped, spec)?;
            Ok(RotationRow {
                spec,
                evolved,
                swapped,
                relative_difference: (evolved - swapped).abs() / swapped,
            })
        })
        .collect::<Result<_>>()?;
    let direct = mixed_norm(&w0, specs[0])?;
    let flipped = mixed_norm(&swapped, specs[0])?;
    let asymmetry = (direct / flipped).max(flipped / direct);
    Ok(RotationReport { rows, asymmetry })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(times: &[f64], ratios: &[f64]) -> NormSeries {
        let spec = MixedNormSpec::from_values(2.0, 2.0).unwrap();
        NormSeries {
            rows: times
                .iter()
                .zip(ratios)
                .map(|(&t, &ratio)| NormRow {
                    t,
                    spec,
                    norm: ratio,
                    reference: 1.0,
                    ratio,
                })
                .collect(),
        }
    }

    #[test]
    fn exponent_of_a_power_law() {
        let times = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0];
        let ratios: Vec<f64> = times.iter().map(|t: &f64| (1.0 + t).powf(0.5)).collect();
        let e = growth_exponent(&series(&times, &ratios)).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exponent_needs_five_points_up_to_four() {
        let s = series(&[0.0, 1.0, 2.0, 4.0], &[1.0; 4]);
        assert!(matches!(growth_exponent(&s), Err(Error::InsufficientPoints { needed: 5, got: 4 })));
        let s = series(&[0.0, 0.5, 1.0, 1.5, 2.0], &[1.0; 5]);
        assert!(growth_exponent(&s).is_err());
    }

    #[test]
    fn envelope_clears_every_point() {
        let times = [0.0, 0.5, 1.0, 1.5, 2.0];
        let ratios = [1.0, 1.3, 1.2, 1.9, 2.1];
        let s = series(&times, &ratios);
        let env = log_envelope(&s);
        for (t, r) in times.iter().zip(ratios) {
            assert!(r.ln() <= env.intercept + env.slope * t + 1e-15);
        }
        assert!(env.residual > 0.0);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        series(&[0.0], &[1.0]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,p,q,norm,reference,ratio\n0e0,2,2,"));
    }
}
