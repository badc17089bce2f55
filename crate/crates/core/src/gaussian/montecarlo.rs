//! Monte Carlo estimate of the excess minimum risk under the clamped loss.
//!
//! For each sampled observation the posterior of `Y` is Gaussian, so the
//! posterior expected loss of an action has a closed form in `erfc`; the Bayes
//! action is found by a grid scan followed by golden-section refinement.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{chain_covariance, ClampedAbsLoss, GaussianChainSpec, X, Y, Z};
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 16_384;
const GRID_HALF_WIDTH: f64 = 6.0;
const GRID_POINTS: usize = 49;
const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub n: usize,
    pub seed: u64,
    /// `L*(Y|X)`
    pub risk_x: f64,
    pub se_x: f64,
    /// `L*(Y|Z)`
    pub risk_z: f64,
    pub se_z: f64,
    pub excess: f64,
    pub se_excess: f64,
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `P(lo < U < hi)` for `U ~ N(0,1)`, evaluated on the tail that avoids cancellation.
fn normal_mass(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let upper = |x: f64| 0.5 * libm::erfc(x * FRAC_1_SQRT_2);
    if lo >= 0.0 {
        upper(lo) - upper(hi)
    } else if hi <= 0.0 {
        upper(-hi) - upper(-lo)
    } else {
        1.0 - upper(-lo) - upper(hi)
    }
}

/// `E[(U - b)·1{lo < U < hi}]` for `U ~ N(0,1)`.
fn partial_first_moment(b: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    -b * normal_mass(lo, hi) + phi(lo) - phi(hi)
}

/// `E[min(|U - a|, |U - c|)]` for `U ~ N(0,1)`.
fn standard_clamped_risk(a: f64, c: f64) -> f64 {
    let (lo, hi) = if a <= c { (a, c) } else { (c, a) };
    let mid = 0.5 * (lo + hi);
    let inf = f64::INFINITY;
    let v = -partial_first_moment(lo, -inf, lo) + partial_first_moment(lo, lo, mid) - partial_first_moment(hi, mid, hi)
        + partial_first_moment(hi, hi, inf);
    v.max(0.0)
}

/// `E[min(|Y - a|, |Y - c|)]` for `Y ~ N(mean, sd²)`.
pub fn clamped_abs_risk(mean: f64, sd: f64, a: f64, c: f64) -> f64 {
    sd * standard_clamped_risk((a - mean) / sd, (c - mean) / sd)
}

/// Bayes risk of a standardised posterior against anchor `c`.
fn standard_bayes_risk(c: f64) -> Result<f64> {
    let f = |a: f64| standard_clamped_risk(a, c);
    let step = 2.0 * GRID_HALF_WIDTH / (GRID_POINTS - 1) as f64;
    let grid = |k: usize| -GRID_HALF_WIDTH + step * k as f64;
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for k in 0..GRID_POINTS {
        let v = f(grid(k));
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let anchor = f(c);

    let (mut lo, mut hi) = (grid(best_k.saturating_sub(1)), grid((best_k + 1).min(GRID_POINTS - 1)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iters = 0;
    while hi - lo > GOLDEN_TOL {
        iters += 1;
        if iters > GOLDEN_MAX_ITER {
            return Err(Error::Numerical(format!(
                "golden-section search stalled: bracket [{lo}, {hi}] for anchor {c} after {GOLDEN_MAX_ITER} steps"
            )));
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(best.min(f1).min(f2).min(anchor))
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (nf - 1.0) / nf).sqrt())
}

/// Paired estimate of `L*(Y|Z) - L*(Y|X)` from `n` joint draws of `(X, Z)`.
///
/// Chunk `k` draws from a ChaCha8 stream `k` keyed by `seed`, so the result is
/// independent of thread count.
pub fn mc_excess_risk_clamped(
    spec: &GaussianChainSpec,
    loss: &ClampedAbsLoss,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!("sample count {n} is below the minimum {MIN_SAMPLES}")));
    }
    spec.validate()?;
    let c = chain_covariance(spec);
    // (X, Z) by Cholesky
    let l11 = c[X][X].sqrt();
    let l21 = c[X][Z] / l11;
    let l22 = (c[Z][Z] - l21 * l21).sqrt();
    let (bx, sx) = (c[Y][X] / c[X][X], (c[Y][Y] - c[Y][X] * c[Y][X] / c[X][X]).sqrt());
    let (bz, sz) = (c[Y][Z] / c[Z][Z], (c[Y][Y] - c[Y][Z] * c[Y][Z] / c[Z][Z]).sqrt());
    let anchor = loss.c;

    let chunks = n.div_ceil(CHUNK);
    let pairs: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(n - k * CHUNK);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let g1: f64 = StandardNormal.sample(&mut rng);
                let g2: f64 = StandardNormal.sample(&mut rng);
                let x = l11 * g1;
                let z = l21 * g1 + l22 * g2;
                let rx = sx * standard_bayes_risk((anchor - bx * x) / sx)?;
                let rz = sz * standard_bayes_risk((anchor - bz * z) / sz)?;
                out.push((rx, rz));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let all = pairs.iter().flatten();
    let (risk_x, se_x) = mean_and_se(all.clone().map(|p| p.0), n);
    let (risk_z, se_z) = mean_and_se(all.clone().map(|p| p.1), n);
    let (excess, se_excess) = mean_and_se(all.map(|p| p.1 - p.0), n);
    Ok(McEstimate { n, seed, risk_x, se_x, risk_z, se_z, excess, se_excess })
}
