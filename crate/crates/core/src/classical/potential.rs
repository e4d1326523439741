//! Potentials `V(t, x)` with their gradients, Hessians and derivative bounds.

use std::fmt;

use crate::grid::{Point, MAX_DIM};

/// Which derivatives of `V` are uniformly bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialClass {
    /// `V ≡ 0`.
    Free,
    /// Polynomial of degree at most two in `x`.
    Quadratic,
    /// All derivatives of order `>= 2` bounded.
    SubQuadratic2,
    /// All derivatives of order `>= 1` bounded.
    SubQuadratic1,
}

impl PotentialClass {
    /// Whether every derivative of order `>= 2` is bounded.
    pub fn has_bounded_hessian(self) -> bool {
        true
    }

    /// Whether every derivative of order `>= 1` is bounded.
    pub fn has_bounded_gradient(self) -> bool {
        matches!(self, Self::Free | Self::SubQuadratic1)
    }
}

impl fmt::Display for PotentialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Free => "free",
            Self::Quadratic => "quadratic",
            Self::SubQuadratic2 => "subquad2",
            Self::SubQuadratic1 => "subquad1",
        })
    }
}

/// Evaluator for a real potential and its first two `x`-derivatives.
///
/// Slices passed in and out have length [`PotentialModel::dim`]; the Hessian
/// is written row-major into an `n × n` slice.
pub trait PotentialModel: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, t: f64, x: &[f64]) -> f64;
    fn grad(&self, t: f64, x: &[f64], out: &mut [f64]);
    fn hess(&self, t: f64, x: &[f64], out: &mut [f64]);
    fn class(&self) -> PotentialClass;

    /// `sup_{t,x} max_j |∂_{x_j} V|`, finite only when the gradient is bounded.
    fn gradient_bound(&self) -> Option<f64>;

    /// `sup_{t,x} max_{jk} |∂_{x_j} ∂_{x_k} V|`.
    fn hessian_bound(&self) -> f64;

    /// The Hessian when it does not depend on `(t, x)`.
    fn constant_hessian(&self) -> Option<Vec<f64>> {
        None
    }

    /// Whether `V` depends on `t`; solvers cache potential data otherwise.
    fn time_dependent(&self) -> bool {
        true
    }
}

/// The potentials shipped with the toolkit.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Free { dim: usize },
    /// `sign · |x|² / 2` with `sign = ±1`.
    Harmonic { dim: usize, sign: f64 },
    /// `xᵀ H x / 2 + b·x` with symmetric `H` (row-major `n × n`).
    Quadratic { hessian: Vec<f64>, linear: Vec<f64> },
    /// `A cos(v·x)`.
    Cosine { amplitude: f64, wavevector: Vec<f64> },
    /// `|x|² / 2 + A cos(v·x)`.
    HarmonicCosine { amplitude: f64, wavevector: Vec<f64> },
    /// `A cos(ω t) cos(v·x)`.
    PulsedCosine {
        amplitude: f64,
        frequency: f64,
        wavevector: Vec<f64>,
    },
}

impl Potential {
    pub fn free(dim: usize) -> Self {
        Self::Free { dim }
    }

    pub fn harmonic(dim: usize) -> Self {
        Self::Harmonic { dim, sign: 1.0 }
    }

    /// `cos(x_1)` in one dimension, `cos(x_1 + ... + x_n)` otherwise.
    pub fn cosine(dim: usize) -> Self {
        Self::Cosine {
            amplitude: 1.0,
            wavevector: vec![1.0; dim],
        }
    }

    pub fn harmonic_cosine(dim: usize) -> Self {
        Self::HarmonicCosine {
            amplitude: 1.0,
            wavevector: vec![1.0; dim],
        }
    }

    pub fn pulsed_cosine(dim: usize) -> Self {
        Self::PulsedCosine {
            amplitude: 1.0,
            frequency: 1.0,
            wavevector: vec![1.0; dim],
        }
    }

    fn wavevector(&self) -> &[f64] {
        match self {
            Self::Cosine { wavevector, .. }
            | Self::HarmonicCosine { wavevector, .. }
            | Self::PulsedCosine { wavevector, .. } => wavevector,
            _ => &[],
        }
    }

    /// Amplitude of the cosine term at time `t`.
    fn cosine_amplitude(&self, t: f64) -> f64 {
        match self {
            Self::Cosine { amplitude, .. } | Self::HarmonicCosine { amplitude, .. } => *amplitude,
            Self::PulsedCosine {
                amplitude, frequency, ..
            } => amplitude * (frequency * t).cos(),
            _ => 0.0,
        }
    }

    fn phase(&self, x: &[f64]) -> f64 {
        self.wavevector().iter().zip(x).map(|(v, x)| v * x).sum()
    }

    fn max_abs_wavevector(&self) -> f64 {
        self.wavevector().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn harmonic_sign(&self) -> f64 {
        match self {
            Self::Harmonic { sign, .. } => *sign,
            Self::HarmonicCosine { .. } => 1.0,
            _ => 0.0,
        }
    }
}

impl PotentialModel for Potential {
    fn dim(&self) -> usize {
        match self {
            Self::Free { dim } | Self::Harmonic { dim, .. } => *dim,
            Self::Quadratic { linear, .. } => linear.len(),
            Self::Cosine { wavevector, .. }
            | Self::HarmonicCosine { wavevector, .. }
            | Self::PulsedCosine { wavevector, .. } => wavevector.len(),
        }
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        let n = self.dim();
        match self {
            Self::Quadratic { hessian, linear } => {
                let mut v = 0.0;
                for j in 0..n {
                    v += linear[j] * x[j];
                    for k in 0..n {
                        v += 0.5 * x[j] * hessian[j * n + k] * x[k];
                    }
                }
                v
            }
            _ => {
                let r2: f64 = x[..n].iter().map(|v| v * v).sum();
                0.5 * self.harmonic_sign() * r2 + self.cosine_amplitude(t) * self.phase(x).cos()
            }
        }
    }

    fn grad(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        match self {
            Self::Quadratic { hessian, linear } => {
                for j in 0..n {
                    out[j] = linear[j] + (0..n).map(|k| hessian[j * n + k] * x[k]).sum::<f64>();
                }
            }
            _ => {
                let s = self.harmonic_sign();
                let a = self.cosine_amplitude(t);
                let sin = if a != 0.0 { self.phase(x).sin() } else { 0.0 };
                let v = self.wavevector();
                for j in 0..n {
                    out[j] = s * x[j] - a * sin * v.get(j).copied().unwrap_or(0.0);
                }
            }
        }
    }

    fn hess(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        match self {
            Self::Quadratic { hessian, .. } => out[..n * n].copy_from_slice(hessian),
            _ => {
                let s = self.harmonic_sign();
                let a = self.cosine_amplitude(t);
                let cos = if a != 0.0 { self.phase(x).cos() } else { 0.0 };
                let v = self.wavevector();
                for j in 0..n {
                    for k in 0..n {
                        let vj = v.get(j).copied().unwrap_or(0.0);
                        let vk = v.get(k).copied().unwrap_or(0.0);
                        out[j * n + k] = if j == k { s } else { 0.0 } - a * cos * vj * vk;
                    }
                }
            }
        }
    }

    fn class(&self) -> PotentialClass {
        match self {
            Self::Free { .. } => PotentialClass::Free,
            Self::Harmonic { .. } | Self::Quadratic { .. } => PotentialClass::Quadratic,
            Self::HarmonicCosine { .. } => PotentialClass::SubQuadratic2,
            Self::Cosine { .. } | Self::PulsedCosine { .. } => PotentialClass::SubQuadratic1,
        }
    }

    fn gradient_bound(&self) -> Option<f64> {
        match self {
            Self::Free { .. } => Some(0.0),
            Self::Cosine { amplitude, .. } | Self::PulsedCosine { amplitude, .. } => {
                Some(amplitude.abs() * self.max_abs_wavevector())
            }
            _ => None,
        }
    }

    fn hessian_bound(&self) -> f64 {
        let w = self.max_abs_wavevector();
        match self {
            Self::Free { .. } => 0.0,
            Self::Harmonic { sign, .. } => sign.abs(),
            Self::Quadratic { hessian, .. } => hessian.iter().fold(0.0, |m, h| m.max(h.abs())),
            Self::Cosine { amplitude, .. } | Self::PulsedCosine { amplitude, .. } => {
                amplitude.abs() * w * w
            }
            Self::HarmonicCosine { amplitude, .. } => 1.0 + amplitude.abs() * w * w,
        }
    }

    fn constant_hessian(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        match self {
            Self::Free { .. } => Some(vec![0.0; n * n]),
            Self::Harmonic { sign, .. } => {
                let mut h = vec![0.0; n * n];
                (0..n).for_each(|j| h[j * n + j] = *sign);
                Some(h)
            }
            Self::Quadratic { hessian, .. } => Some(hessian.clone()),
            _ => None,
        }
    }

    fn time_dependent(&self) -> bool {
        matches!(self, Self::PulsedCosine { .. })
    }
}

pub(crate) fn grad_at(v: &dyn PotentialModel, t: f64, x: &Point) -> Point {
    let mut out = [0.0; MAX_DIM];
    let n = v.dim();
    v.grad(t, &x[..n], &mut out[..n]);
    out
}

pub(crate) fn hess_at(v: &dyn PotentialModel, t: f64, x: &Point) -> [f64; MAX_DIM * MAX_DIM] {
    let mut out = [0.0; MAX_DIM * MAX_DIM];
    let n = v.dim();
    v.hess(t, &x[..n], &mut out[..n * n]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shipped(dim: usize) -> Vec<Potential> {
        vec![
            Potential::free(dim),
            Potential::harmonic(dim),
            Potential::Harmonic { dim, sign: -1.0 },
            Potential::Quadratic {
                hessian: if dim == 1 { vec![0.7] } else { vec![0.7, 0.2, 0.2, -0.4] },
                linear: vec![0.3; dim],
            },
            Potential::Cosine {
                amplitude: 0.8,
                wavevector: if dim == 1 { vec![1.5] } else { vec![1.5, -0.5] },
            },
            Potential::harmonic_cosine(dim),
            Potential::pulsed_cosine(dim),
        ]
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = 1e-5;
        for dim in 1..=2 {
            for v in shipped(dim) {
                for _ in 0..20 {
                    let t = rng.gen_range(-3.0..3.0);
                    let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
                    let mut g = vec![0.0; dim];
                    v.grad(t, &x, &mut g);
                    for j in 0..dim {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[j] += h;
                        xm[j] -= h;
                        let fd = (v.value(t, &xp) - v.value(t, &xm)) / (2.0 * h);
                        assert!((fd - g[j]).abs() < 1e-8, "{v:?} grad {j}: {fd} vs {}", g[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn hessian_is_symmetric_and_matches_gradient_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = 1e-5;
        for dim in 1..=2 {
            for v in shipped(dim) {
                let t = rng.gen_range(-3.0..3.0);
                let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let mut hs = vec![0.0; dim * dim];
                v.hess(t, &x, &mut hs);
                for j in 0..dim {
                    for k in 0..dim {
                        assert!((hs[j * dim + k] - hs[k * dim + j]).abs() <= 1e-12);
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[k] += h;
                        xm[k] -= h;
                        let (mut gp, mut gm) = (vec![0.0; dim], vec![0.0; dim]);
                        v.grad(t, &xp, &mut gp);
                        v.grad(t, &xm, &mut gm);
                        let fd = (gp[j] - gm[j]) / (2.0 * h);
                        assert!((fd - hs[j * dim + k]).abs() < 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn class_tags_are_consistent() {
        for v in shipped(1).into_iter().chain(shipped(2)) {
            match v.class() {
                PotentialClass::SubQuadratic1 | PotentialClass::Free => {
                    assert!(v.gradient_bound().is_some())
                }
                _ => assert!(v.gradient_bound().is_none()),
            }
            assert!(v.hessian_bound().is_finite());
        }
    }

    #[test]
    fn bounds_dominate_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in shipped(2) {
            for _ in 0..200 {
                let t = rng.gen_range(-10.0..10.0);
                let x = [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)];
                let mut g = [0.0; 2];
                let mut h = [0.0; 4];
                v.grad(t, &x, &mut g);
                v.hess(t, &x, &mut h);
                if let Some(c) = v.gradient_bound() {
                    assert!(g.iter().all(|gj| gj.abs() <= c + 1e-12));
                }
                assert!(h.iter().all(|hj| hj.abs() <= v.hessian_bound() + 1e-12));
            }
        }
    }

    #[test]
    fn cosine_unit_bound() {
        let v = Potential::cosine(1);
        assert_eq!(v.gradient_bound(), Some(1.0));
        assert_eq!(v.class(), PotentialClass::SubQuadratic1);
    }
}
