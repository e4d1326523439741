//! Picard iteration for the characteristic system as a pair of integral
//! equations: `f = x + ∫_t^s g`, `g = ξ - ∫_t^s ∇V(σ, f(σ)) dσ`.

use crate::classical::flow::FlowState;
use crate::classical::potential::{grad_at, PotentialModel};
use crate::error::{Error, Result};
use crate::grid::{Point, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardFlowOptions {
    pub iterations: usize,
    /// Upper bound on the trapezoid node spacing.
    pub step: f64,
    pub max_span: f64,
}

impl Default for PicardFlowOptions {
    fn default() -> Self {
        Self {
            iterations: 20,
            step: 1e-3,
            max_span: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardFlow {
    /// The final iterate evaluated at `s`.
    pub state: FlowState,
    /// Sup-norm change of `(f, g)` over the node grid per iteration.
    pub increments: Vec<f64>,
}

const GROWTH_LIMIT: usize = 3;

/// Runs `opts.iterations` Picard sweeps from the constant path `(x, ξ)`.
/// Fails if the increment grows three times in a row.
pub fn picard_flow(
    v: &dyn PotentialModel,
    t: f64,
    x: &[f64],
    xi: &[f64],
    s: f64,
    opts: &PicardFlowOptions,
) -> Result<PicardFlow> {
    let n = v.dim();
    if x.len() != n || xi.len() != n {
        return Err(Error::GridMismatch("initial data dimension".into()));
    }
    let span = (s - t).abs();
    if span > opts.max_span {
        return Err(Error::HorizonExceeded {
            span,
            limit: opts.max_span,
        });
    }
    let intervals = if span == 0.0 {
        0
    } else {
        (span / opts.step).ceil().max(1.0) as usize
    };
    let h = if intervals == 0 { 0.0 } else { (s - t) / intervals as f64 };
    let times: Vec<f64> = (0..=intervals).map(|k| t + k as f64 * h).collect();

    let mut x0: Point = [0.0; MAX_DIM];
    let mut xi0: Point = [0.0; MAX_DIM];
    x0[..n].copy_from_slice(x);
    xi0[..n].copy_from_slice(xi);
    let mut f = vec![x0; intervals + 1];
    let mut g = vec![xi0; intervals + 1];

    let mut increments = Vec::with_capacity(opts.iterations);
    let mut growth = 0;
    for _ in 0..opts.iterations {
        let forces: Vec<Point> = times.iter().zip(&f).map(|(&tau, fk)| grad_at(v, tau, fk)).collect();
        let mut nf = vec![x0; intervals + 1];
        let mut ng = vec![xi0; intervals + 1];
        for k in 1..=intervals {
            for i in 0..n {
                nf[k][i] = nf[k - 1][i] + 0.5 * h * (g[k - 1][i] + g[k][i]);
                ng[k][i] = ng[k - 1][i] - 0.5 * h * (forces[k - 1][i] + forces[k][i]);
            }
        }
        let inc = nf
            .iter()
            .zip(&f)
            .chain(ng.iter().zip(&g))
            .flat_map(|(a, b)| (0..n).map(move |i| (a[i] - b[i]).abs()))
            .fold(0.0, f64::max);
        if !inc.is_finite() {
            return Err(Error::NoContraction { increments });
        }
        if increments.last().is_some_and(|&prev| inc > prev) {
            growth += 1;
        } else {
            growth = 0;
        }
        increments.push(inc);
        f = nf;
        g = ng;
        if growth >= GROWTH_LIMIT {
            return Err(Error::NoContraction { increments });
        }
        if inc == 0.0 {
            break;
        }
    }
    let last = intervals;
    Ok(PicardFlow {
        state: FlowState {
            f: f[last][..n].to_vec(),
            g: g[last][..n].to_vec(),
        },
        increments,
    })
}
