//! Brute-force and sampling oracles that certify the analytic code paths.
//!
//! Oracles evaluate divergences by naive direct summation and never call the
//! library's own kernels for the quantity they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{js_bound, mi_bound, renyi_bound};
use crate::discrete::{chain_joint, ChannelMatrix, ConditionedChain, MarkovChainSpec};
use crate::divergence::{
    binary_entropy, js_alpha, kl, mutual_information, renyi, sibson_mi, sibson_minimizer, tilted_joint, AlphaOrder,
    JointPmf, Pmf,
};
use crate::error::{Error, Result};
use crate::gaussian::{chain_covariance, gaussian_js_term, GaussianChainSpec, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomJointConfig {
    pub dims: (usize, usize),
    pub seed: u64,
    pub count: usize,
}

impl RandomJointConfig {
    pub fn new(dims: (usize, usize), seed: u64, count: usize) -> Result<Self> {
        if dims.0 < 2 || dims.1 < 2 {
            return Err(Error::Config(format!("random joint dims {dims:?} must both be at least 2")));
        }
        if count == 0 {
            return Err(Error::Config("random joint count must be at least 1".into()));
        }
        Ok(RandomJointConfig { dims, seed, count })
    }

    /// `count` joints drawn uniformly from the simplex (flat Dirichlet).
    pub fn generate(&self) -> Vec<JointPmf> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count).map(|_| random_joint(&mut rng, self.dims.0, self.dims.1)).collect()
    }
}

fn flat_dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_joint(rng: &mut ChaCha8Rng, qu: usize, qv: usize) -> JointPmf {
    JointPmf::renormalize(qu, qv, flat_dirichlet(rng, qu * qv)).expect("flat Dirichlet draws are positive")
}

/// Random chains with alphabet sizes in `2..=max_q`, Dirichlet prior and
/// Dirichlet channel rows.
pub fn random_chains(seed: u64, count: usize, max_q: usize) -> Vec<MarkovChainSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (qy, qx, qz) = (rng.random_range(2..=max_q), rng.random_range(2..=max_q), rng.random_range(2..=max_q));
            let prior = Pmf::renormalize(flat_dirichlet(&mut rng, qy)).expect("positive");
            let mut channel = |r: usize, c: usize| {
                let rows: Vec<Vec<f64>> = (0..r).map(|_| flat_dirichlet(&mut rng, c)).collect();
                ChannelMatrix::from_rows(&rows).expect("rows are normalised")
            };
            let w1 = channel(qy, qx);
            let w2 = channel(qx, qz);
            MarkovChainSpec::new(prior, w1, w2).expect("dimensions chain")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The quantity compared against `tolerance`.
    pub discrepancy: f64,
    pub tolerance: f64,
    pub max_abs: f64,
    pub max_rel: f64,
    pub cases: usize,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Check { name: name.into(), discrepancy: 0.0, tolerance, max_abs: 0.0, max_rel: 0.0, cases: 0, pass: true }
    }

    /// Folds in one case; `discrepancy` is what the tolerance applies to.
    fn record(&mut self, discrepancy: f64, abs: f64, rel: f64) {
        self.cases += 1;
        if discrepancy.is_nan() || discrepancy > self.discrepancy {
            self.discrepancy = discrepancy;
        }
        self.max_abs = self.max_abs.max(abs);
        self.max_rel = self.max_rel.max(rel);
        self.pass = self.discrepancy <= self.tolerance;
    }

    /// Compares two extended reals: equal infinities agree exactly.
    fn compare(&mut self, got: f64, want: f64, scale: f64) {
        let abs = if got.is_infinite() && got == want { 0.0 } else { (got - want).abs() };
        let rel = abs / scale;
        self.record(rel, abs, rel);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Appends `other` and keeps checks ordered by name.
    pub fn merge(&mut self, other: OracleReport) {
        self.checks.extend(other.checks);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

// ---- naive references -------------------------------------------------------

fn naive_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return f64::INFINITY;
            }
            s += a * (a / b).ln();
        }
    }
    s
}

fn naive_renyi(p: &[f64], q: &[f64], al: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(&a, &b)| if a > 0.0 && b > 0.0 { a.powf(al) * b.powf(1.0 - al) } else { 0.0 }).sum();
    s.ln() / (al - 1.0)
}

fn naive_js(p: &[f64], q: &[f64], al: f64) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(&a, &b)| al * a + (1.0 - al) * b).collect();
    al * naive_kl(p, &m) + (1.0 - al) * naive_kl(q, &m)
}

fn marginals(j: &JointPmf) -> (Vec<f64>, Vec<f64>) {
    let pu = (0..j.rows()).map(|u| (0..j.cols()).map(|v| j.get(u, v)).sum()).collect();
    let pv = (0..j.cols()).map(|v| (0..j.rows()).map(|u| j.get(u, v)).sum()).collect();
    (pu, pv)
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

// ---- Sibson brute force -----------------------------------------------------

pub const BRUTEFORCE_MAX_ROWS: usize = 4;

/// `min_Q D_α(j ‖ Q ⊗ P_V)` over the simplex grid with spacing `resolution`,
/// followed by one coordinate-descent pass over every pair of coordinates.
pub fn sibson_bruteforce(j: &JointPmf, a: AlphaOrder, resolution: f64) -> Result<(f64, Pmf)> {
    let qu = j.rows();
    if qu > BRUTEFORCE_MAX_ROWS {
        return Err(Error::Scope(format!(
            "simplex enumeration over {qu} rows is too large (max {BRUTEFORCE_MAX_ROWS}); use the closed form"
        )));
    }
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::Domain(format!("grid resolution {resolution} must lie in (0, 0.5]")));
    }
    let al = a.value();
    let (_, pv) = marginals(j);
    let flat = j.flat().to_vec();
    let objective = |q: &[f64]| naive_renyi(&flat, &product(q, &pv), al);

    let steps = (1.0 / resolution).round() as usize;
    let mut best = (f64::INFINITY, vec![0.0; qu]);
    let mut counts = vec![0usize; qu];
    enumerate_simplex(&mut counts, 0, steps, &mut |c| {
        let q: Vec<f64> = c.iter().map(|&k| k as f64 / steps as f64).collect();
        let v = objective(&q);
        if v < best.0 {
            best = (v, q);
        }
    });

    let (mut val, mut q) = best;
    for i in 0..qu {
        for k in i + 1..qu {
            // move mass t from coordinate i to k, t ∈ [-q_k, q_i]
            let (lo, hi) = (-q[k], q[i]);
            let at = |t: f64, q: &[f64]| {
                let mut r = q.to_vec();
                r[i] -= t;
                r[k] += t;
                r
            };
            let (t, v) = golden_min(|t| objective(&at(t, &q)), lo, hi, 1e-13);
            if v < val {
                val = v;
                q = at(t, &q);
            }
        }
    }
    let q: Vec<f64> = q.into_iter().map(|x| x.max(0.0)).collect();
    Ok((val, Pmf::renormalize(q)?))
}

fn enumerate_simplex(counts: &mut [usize], idx: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if idx == counts.len() - 1 {
        counts[idx] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[idx] = k;
        enumerate_simplex(counts, idx + 1, left - k, f);
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
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
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Closed-form Sibson MI and its minimiser against the brute-force search.
pub fn sibson_bruteforce_check(joints: &[JointPmf], alphas: &[f64], resolution: f64) -> Result<OracleReport> {
    let results: Vec<Result<(f64, f64, f64)>> = joints
        .par_iter()
        .flat_map_iter(|j| alphas.iter().map(move |&al| (j, al)))
        .map(|(j, al)| {
            let a = AlphaOrder::new(al)?;
            let (val, arg) = sibson_bruteforce(j, a, resolution)?;
            let closed = sibson_mi(j, a)?;
            let star = sibson_minimizer(j, a)?;
            let dist = arg.probs().iter().zip(star.pmf.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Ok((closed, val, dist))
        })
        .collect();
    let mut value = Check::new("sibson/bruteforce-value", 1e-5);
    let mut argmin = Check::new("sibson/bruteforce-argmin", 1e-3);
    for r in results {
        let (closed, val, dist) = r?;
        let d = (closed - val).abs();
        value.record(d, d, d / val.abs().max(1e-300));
        argmin.record(dist, dist, dist);
    }
    Ok(OracleReport { checks: vec![value, argmin] })
}

/// `α·KL(t‖j) + (1-α)·KL(t‖u*⊗P_V) = (1-α)·I_α^S` plus agreement of the two
/// Sibson routes, on random joints of every shape up to `max_dim × max_dim`.
pub fn sibson_identity_check(seed: u64, count: usize, max_dim: usize, alphas: &[f64]) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let joints: Vec<JointPmf> = (0..count)
        .map(|_| {
            let (qu, qv) = (rng.random_range(2..=max_dim), rng.random_range(2..=max_dim));
            random_joint(&mut rng, qu, qv)
        })
        .collect();
    let mut identity = Check::new("sibson/tilt-identity", 1e-10);
    let mut routes = Check::new("sibson/routes", 1e-10);
    let mut valid = Check::new("sibson/minimizer-normalized", 1e-12);
    for j in &joints {
        let (pu, pv) = marginals(j);
        let _ = pu;
        for &al in alphas {
            let a = AlphaOrder::unit(al)?;
            let star = sibson_minimizer(j, a)?;
            let t = tilted_joint(j, &star.pmf, a)?;
            let r = product(star.pmf.probs(), &pv);
            let lhs = al * naive_kl(t.flat(), j.flat()) + (1.0 - al) * naive_kl(t.flat(), &r);
            // right side from the brute definition D_α(j ‖ u*⊗P_V)
            let rhs = (1.0 - al) * naive_renyi(j.flat(), &r, al);
            let d = (lhs - rhs).abs();
            identity.record(d, d, d / rhs.abs().max(1e-300));
            let (closed, via) = crate::divergence::sibson_mi_routes(j, a)?;
            let d = (closed - via).abs();
            routes.record(d, d, d);
            let s = (star.pmf.probs().iter().sum::<f64>() - 1.0).abs();
            valid.record(s, s, s);
        }
    }
    Ok(OracleReport { checks: vec![identity, routes, valid] })
}

// ---- decoupling inequalities ------------------------------------------------------

/// Both sides of the Rényi and α-JS decoupling inequalities for test function
/// `h` (a `|U| × |V|` table), with the Hoeffding assignment
/// `σ²(u) = (max_v h(u,v) - min_v h(u,v))²/4`.
///
/// The check's discrepancy is the largest excess of the left side over the
/// right side (0 when the inequality holds).
pub fn decoupling_check(j: &JointPmf, h: &[Vec<f64>], a: AlphaOrder) -> Result<OracleReport> {
    a.require_unit()?;
    if h.len() != j.rows() || h.iter().any(|r| r.len() != j.cols()) {
        return Err(Error::Dimension("h table shape does not match the joint".into()));
    }
    let al = a.value();
    let (pu, pv) = marginals(j);
    let mut e_joint = 0.0;
    let mut e_prod = 0.0;
    for u in 0..j.rows() {
        for v in 0..j.cols() {
            e_joint += j.get(u, v) * h[u][v];
            e_prod += pu[u] * pv[v] * h[u][v];
        }
    }
    let lhs = (e_joint - e_prod).abs();
    let e_sigma2: f64 = h
        .iter()
        .zip(&pu)
        .map(|(row, &p)| {
            let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            p * (hi - lo) * (hi - lo) / 4.0
        })
        .sum();
    // conditional Rényi Σ_u P_U(u) D_α(P_{V|U=u} ‖ P_V)
    let cond_renyi: f64 = (0..j.rows())
        .filter(|&u| pu[u] > 0.0)
        .map(|u| {
            let row: Vec<f64> = (0..j.cols()).map(|v| j.get(u, v) / pu[u]).collect();
            pu[u] * naive_renyi(&row, &pv, al)
        })
        .sum();
    let rhs_renyi = (2.0 * e_sigma2 * cond_renyi / al).sqrt();
    let js = naive_js(j.flat(), &product(&pu, &pv), al);
    let rhs_js = (2.0 * e_sigma2 * js / (al * (1.0 - al))).sqrt();

    let mut r = Check::new("decoupling/renyi", 1e-10);
    r.record((lhs - rhs_renyi).max(0.0), lhs, if rhs_renyi > 0.0 { lhs / rhs_renyi } else { 0.0 });
    let mut s = Check::new("decoupling/js", 1e-10);
    s.record((lhs - rhs_js).max(0.0), lhs, if rhs_js > 0.0 { lhs / rhs_js } else { 0.0 });
    Ok(OracleReport { checks: vec![r, s] })
}

/// `count` random `(joint, h)` pairs; `h` rows use row-dependent ranges so
/// `σ²(u)` genuinely varies with `u`.
pub fn decoupling_suite(seed: u64, count: usize, alphas: &[f64]) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut merged = [Check::new("decoupling/renyi", 1e-10), Check::new("decoupling/js", 1e-10)];
    for _ in 0..count {
        let (qu, qv) = (rng.random_range(2..=5), rng.random_range(2..=5));
        let j = random_joint(&mut rng, qu, qv);
        let h: Vec<Vec<f64>> = (0..qu)
            .map(|_| {
                let scale = rng.random_range(0.1..5.0);
                let shift = rng.random_range(-2.0..2.0);
                (0..qv).map(|_| shift + scale * rng.random::<f64>()).collect()
            })
            .collect();
        for &al in alphas {
            let rep = decoupling_check(&j, &h, AlphaOrder::unit(al)?)?;
            for (m, c) in merged.iter_mut().zip(&rep.checks) {
                m.record(c.discrepancy, c.max_abs, c.max_rel);
            }
        }
    }
    Ok(OracleReport { checks: merged.to_vec() })
}

// ---- limits -----------------------------------------------------------------

/// Near-endpoint behaviour on random joints (divergence level) and random
/// chains (bound level).
pub fn limit_suite(cfg: &RandomJointConfig) -> Result<OracleReport> {
    let mut renyi_kl = Check::new("limits/renyi-to-kl", 1e-3);
    let mut sibson_mi_check = Check::new("limits/sibson-to-mi", 1e-3);
    let mut js_ends = Check::new("limits/js-endpoints", 0.0);
    for j in cfg.generate() {
        let p = Pmf::new(j.flat().to_vec())?;
        let q = Pmf::new(j.marginal_product().flat().to_vec())?;
        let k = kl(&p, &q)?;
        let r = renyi(&p, &q, AlphaOrder::unit(0.9999)?)?;
        renyi_kl.compare(r, k, 1.0 + k);
        let mi = mutual_information(&j);
        let s = sibson_mi(&j, AlphaOrder::unit(0.9999)?)?;
        sibson_mi_check.compare(s, mi, 1.0 + mi);
        for al in [1e-6, 1.0 - 1e-6] {
            let v = js_alpha(&p, &q, AlphaOrder::unit(al)?)?;
            let excess = (v - binary_entropy(al)).max(0.0);
            js_ends.record(excess, v, v / binary_entropy(al));
        }
    }
    let chains = chain_limits(cfg.seed, cfg.count)?;
    let mut report = OracleReport { checks: vec![renyi_kl, sibson_mi_check, js_ends] };
    report.merge(chains);
    Ok(report)
}

/// Rényi bound at α = 0.9999 and JS bound at α = 1e-4 against the MI bound on
/// random chains, relative to `1 + mi_bound`.
pub fn chain_limits(seed: u64, count: usize) -> Result<OracleReport> {
    let results: Vec<Result<(f64, f64, f64)>> = random_chains(seed, count, 5)
        .par_iter()
        .map(|spec| {
            let c = ConditionedChain::new(&chain_joint(spec)?)?;
            let e = 0.25;
            let mi = mi_bound(e, c.mi_gap())?;
            let hi = AlphaOrder::unit(0.9999)?;
            let lo = AlphaOrder::unit(1e-4)?;
            let r = renyi_bound(e, c.renyi_term(hi), hi)?;
            let js = js_bound(e, c.js_term(lo)?, lo)?;
            Ok((mi, r, js))
        })
        .collect();
    let mut renyi_c = Check::new("limits/renyi-bound-to-mi-bound", 1e-3);
    let mut js_c = Check::new("limits/js-bound-to-mi-bound", 1e-2);
    for res in results {
        let (mi, r, js) = res?;
        renyi_c.compare(r, mi, 1.0 + mi);
        js_c.compare(js, mi, 1.0 + mi);
    }
    Ok(OracleReport { checks: vec![renyi_c, js_c] })
}

// ---- Gaussian JS: quadrature vs Monte Carlo --------------------------------

pub const MIN_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JsMcEstimate {
    pub quadrature: f64,
    pub monte_carlo: f64,
    pub standard_error: f64,
}

/// Monte Carlo estimate of `JS_α(P ‖ Q)` for the conditional law `P` of
/// `(Y, X)` given `Z` and the product `Q` of its marginals: `KL(P‖M)` is
/// averaged over draws from `P` and `KL(Q‖M)` over independent draws from `Q`.
pub fn js_mc_estimate(spec: &GaussianChainSpec, a: AlphaOrder, n: usize, seed: u64, order: usize) -> Result<JsMcEstimate> {
    a.require_unit()?;
    if n < MIN_MC_SAMPLES {
        return Err(Error::Domain(format!("sample count {n} is below the minimum {MIN_MC_SAMPLES}")));
    }
    let c = chain_covariance(spec);
    // Cov((Y,X) | Z) by direct Schur complement
    let syy = c[0][0] - c[0][2] * c[0][2] / c[2][2];
    let sxx = c[1][1] - c[1][2] * c[1][2] / c[2][2];
    let sxy = c[0][1] - c[0][2] * c[1][2] / c[2][2];
    let det = syy * sxx - sxy * sxy;
    if !(det > 0.0 && syy > 0.0 && sxx > 0.0) {
        return Err(Error::Numerical(format!("degenerate conditional covariance (det {det})")));
    }
    let al = a.value();
    let log_p = |y: f64, x: f64| -0.5 * (sxx * y * y - 2.0 * sxy * y * x + syy * x * x) / det - 0.5 * det.ln();
    let log_q = |y: f64, x: f64| -0.5 * (y * y / syy + x * x / sxx) - 0.5 * (syy * sxx).ln();
    let log_m = |lp: f64, lq: f64| {
        let hi = lp.max(lq);
        hi + (al * (lp - hi).exp() + (1.0 - al) * (lq - hi).exp()).ln()
    };
    let (l11, l21) = (syy.sqrt(), sxy / syy.sqrt());
    let l22 = (sxx - l21 * l21).sqrt();

    const CHUNK: usize = 1 << 16;
    let chunks = n.div_ceil(CHUNK);
    let sums: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut acc = [0.0; 4];
            for _ in 0..CHUNK.min(n - k * CHUNK) {
                let (g1, g2, g3, g4): (f64, f64, f64, f64) = (
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                );
                let (y, x) = (l11 * g1, l21 * g1 + l22 * g2);
                let (lp, lq) = (log_p(y, x), log_q(y, x));
                let f = lp - log_m(lp, lq);
                let (y, x) = (syy.sqrt() * g3, sxx.sqrt() * g4);
                let (lp, lq) = (log_p(y, x), log_q(y, x));
                let g = lq - log_m(lp, lq);
                acc[0] += f;
                acc[1] += f * f;
                acc[2] += g;
                acc[3] += g * g;
            }
            acc
        })
        .collect();
    let tot = sums.iter().fold([0.0; 4], |mut t, s| {
        for i in 0..4 {
            t[i] += s[i];
        }
        t
    });
    let nf = n as f64;
    let (m1, m2) = (tot[0] / nf, tot[2] / nf);
    let v1 = (tot[1] / nf - m1 * m1) * nf / (nf - 1.0);
    let v2 = (tot[3] / nf - m2 * m2) * nf / (nf - 1.0);
    let mc = al * m1 + (1.0 - al) * m2;
    let se = ((al * al * v1 + (1.0 - al) * (1.0 - al) * v2) / nf).sqrt();
    let rule = QuadratureRule::gauss_hermite(order)?;
    let quad = gaussian_js_term(spec, a, &rule)?;
    Ok(JsMcEstimate { quadrature: quad, monte_carlo: mc, standard_error: se })
}

/// Passes when the quadrature value lies within 3 standard errors of the
/// Monte Carlo estimate.
pub fn js_quadrature_vs_mc(
    spec: &GaussianChainSpec,
    a: AlphaOrder,
    n: usize,
    seed: u64,
    order: usize,
    label: &str,
) -> Result<OracleReport> {
    let est = js_mc_estimate(spec, a, n, seed, order)?;
    let diff = (est.quadrature - est.monte_carlo).abs();
    let mut c = Check::new(format!("gaussian-js/{label}/alpha={}", a.value()), 3.0);
    c.record(diff / est.standard_error.max(1e-300), diff, diff / est.monte_carlo.abs().max(1e-300));
    Ok(OracleReport { checks: vec![c] })
}

// ---- suite ------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random joints for the limit checks.
    pub limit_count: usize,
    /// Random joints for the tilt identity and route agreement.
    pub identity_count: usize,
    /// Random 2×2 and 3×3 joints (each) for the brute-force comparison.
    pub bruteforce_count: usize,
    /// Random `(joint, h)` pairs for the decoupling inequalities.
    pub decoupling_count: usize,
    /// Monte Carlo samples for the Gaussian JS cross-check.
    pub mc_samples: usize,
    pub quad_order: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 7,
            limit_count: 100,
            identity_count: 200,
            bruteforce_count: 10,
            decoupling_count: 1000,
            mc_samples: 10_000_000,
            quad_order: crate::gaussian::DEFAULT_QUAD_ORDER,
        }
    }
}

pub const SUITE_GROUPS: [&str; 4] = ["limits", "sibson", "decoupling", "gaussian-js"];

const UNIT_ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Runs the named groups (all of them when `only` is empty).
pub fn run_suite(opts: &SuiteOptions, only: &[String]) -> Result<OracleReport> {
    if let Some(bad) = only.iter().find(|g| !SUITE_GROUPS.contains(&g.as_str())) {
        return Err(Error::Config(format!("unknown check group '{bad}'; groups: {}", SUITE_GROUPS.join(", "))));
    }
    let wanted = |g: &str| only.is_empty() || only.iter().any(|o| o == g);
    let mut report = OracleReport::default();
    if wanted("limits") {
        report.merge(limit_suite(&RandomJointConfig::new((3, 3), opts.seed, opts.limit_count)?)?);
    }
    if wanted("sibson") {
        report.merge(sibson_identity_check(opts.seed, opts.identity_count, 5, &UNIT_ALPHAS)?);
        let mut joints = RandomJointConfig::new((2, 2), opts.seed, opts.bruteforce_count)?.generate();
        let bf2 = sibson_bruteforce_check(&joints, &[0.25, 0.5, 0.75], 1e-4)?;
        joints = RandomJointConfig::new((3, 3), opts.seed + 1, opts.bruteforce_count)?.generate();
        let bf3 = sibson_bruteforce_check(&joints, &[0.25, 0.5, 0.75], 1e-3)?;
        for (a, b) in bf2.checks.into_iter().zip(bf3.checks) {
            let mut c = a.clone();
            c.record(b.discrepancy, b.max_abs, b.max_rel);
            c.cases = a.cases + b.cases;
            report.merge(OracleReport { checks: vec![c] });
        }
    }
    if wanted("decoupling") {
        report.merge(decoupling_suite(opts.seed, opts.decoupling_count, &UNIT_ALPHAS)?);
    }
    if wanted("gaussian-js") {
        let ex2 = GaussianChainSpec::new(1.0, 1.0, 1.0, crate::gaussian::Direction::ForwardYXZ)?;
        let ex3 = GaussianChainSpec::new(2.0, 39.0, 1.0, crate::gaussian::Direction::ReverseZXY)?;
        for al in [0.1, 0.5, 0.9] {
            report.merge(js_quadrature_vs_mc(&ex2, AlphaOrder::unit(al)?, opts.mc_samples, opts.seed, opts.quad_order, "example2")?);
        }
        report.merge(js_quadrature_vs_mc(&ex3, AlphaOrder::unit(0.3)?, opts.mc_samples, opts.seed, opts.quad_order, "example3")?);
    }
    Ok(report)
}
