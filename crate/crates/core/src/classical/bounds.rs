//! Polynomial-in-time bounds relating a trajectory to straight-line motion
//! when `∇V` is bounded:
//!
//! `⟨y - f(s)⟩⁻¹ ≤ C₁ (1 + |t-s|²) / ⟨y - x + (t-s)ξ⟩`,
//! `⟨η - g(s)⟩⁻¹ ≤ C₂ (1 + |t-s|) / ⟨η - ξ⟩`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::flow::{flow, FlowOptions};
use crate::classical::potential::PotentialModel;
use crate::error::{Error, Result};

/// `⟨x⟩ = (1 + |x|²)^{1/2}`.
pub fn japanese_bracket(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// One test point `(t, s, x, ξ, y, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundSample {
    pub t: f64,
    pub s: f64,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Uniform samples with coordinates in `[-extent, extent]` and `|t - s| ≤ max_span`.
pub fn random_bound_samples(
    dim: usize,
    count: usize,
    max_span: f64,
    extent: f64,
    seed: u64,
) -> Vec<BoundSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(-extent..=extent)).collect()
    };
    (0..count)
        .map(|_| {
            let t = rng.gen_range(-max_span..=max_span);
            let s = t + rng.gen_range(-max_span..=max_span);
            BoundSample {
                t,
                s,
                x: vec(&mut rng),
                xi: vec(&mut rng),
                y: vec(&mut rng),
                eta: vec(&mut rng),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundViolation {
    pub sample: BoundSample,
    /// `"position"` or `"momentum"`.
    pub inequality: &'static str,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub constant: f64,
    pub c1: f64,
    pub c2: f64,
    /// Largest `lhs / rhs` of the position inequality.
    pub worst_position: f64,
    pub worst_momentum: f64,
    pub violations: Vec<BoundViolation>,
}

impl BoundReport {
    pub fn worst(&self) -> f64 {
        self.worst_position.max(self.worst_momentum)
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The constants `(C₁, C₂)` for gradient bound `c` in dimension `n`.
pub fn bound_constants(c: f64, n: usize) -> (f64, f64) {
    let rn = (n as f64).sqrt();
    let r2 = std::f64::consts::SQRT_2;
    (r2 * (rn * c).max(1.0), r2 * (2.0 * rn * c).max(1.0))
}

/// Evaluates both inequalities at every sample.
///
/// `C` is the largest sup-bound over the partial derivatives `∂_j V`. A sample
/// whose ratio exceeds one is listed in [`BoundReport::violations`].
pub fn trajectory_bound_check(
    v: &dyn PotentialModel,
    samples: &[BoundSample],
    opts: &FlowOptions,
) -> Result<BoundReport> {
    let n = v.dim();
    let constant = v.gradient_bound().ok_or_else(|| {
        Error::PotentialClass(format!("{} potential has no gradient bound", v.class()))
    })?;
    let (c1, c2) = bound_constants(constant, n);
    let mut report = BoundReport {
        constant,
        c1,
        c2,
        worst_position: 0.0,
        worst_momentum: 0.0,
        violations: Vec::new(),
    };
    for sample in samples {
        let st = flow(v, sample.t, &sample.x, &sample.xi, sample.s, opts)?;
        let d = sample.t - sample.s;
        let free_gap: Vec<f64> = (0..n).map(|i| sample.y[i] - sample.x[i] + d * sample.xi[i]).collect();
        let pos_gap: Vec<f64> = (0..n).map(|i| sample.y[i] - st.f[i]).collect();
        let mom_free: Vec<f64> = (0..n).map(|i| sample.eta[i] - sample.xi[i]).collect();
        let mom_gap: Vec<f64> = (0..n).map(|i| sample.eta[i] - st.g[i]).collect();

        let pos = japanese_bracket(&free_gap) / (c1 * (1.0 + d * d) * japanese_bracket(&pos_gap));
        let mom = japanese_bracket(&mom_free) / (c2 * (1.0 + d.abs()) * japanese_bracket(&mom_gap));
        report.worst_position = report.worst_position.max(pos);
        report.worst_momentum = report.worst_momentum.max(mom);
        for (inequality, ratio) in [("position", pos), ("momentum", mom)] {
            if ratio > 1.0 {
                report.violations.push(BoundViolation {
                    sample: sample.clone(),
                    inequality,
                    ratio,
                });
            }
        }
    }
    Ok(report)
}
