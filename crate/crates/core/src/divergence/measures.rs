//! KL, Rényi and α-Jensen-Shannon divergences on finite alphabets, their
//! `P_U`-averaged conditional forms, and the two information functionals
//! built from a joint and the product of its marginals.
//!
//! All values are in nats. `f64::INFINITY` is returned where the divergence
//! is genuinely infinite (support violations); it is never used as a stand-in
//! for "large".

use super::types::{AlphaOrder, ConditionalKernel, JointPmf, Pmf};
use crate::error::{Error, Result};

/// `log Σ exp(x_i)`, shifted by the maximum. An empty or all `-inf` input gives `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    log_sum_exp_slice(&terms)
}

pub fn log_sum_exp_slice(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

fn same_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        acc += pi * (pi.ln() - qi.ln());
    }
    acc.max(0.0)
}

pub(crate) fn renyi_raw(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let mut logs = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if alpha > 1.0 {
                return f64::INFINITY;
            }
            continue;
        }
        logs.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    let lse = log_sum_exp_slice(&logs);
    if lse == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    (lse / (alpha - 1.0)).max(0.0)
}

pub(crate) fn js_raw(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let beta = 1.0 - alpha;
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        // equal masses sit exactly on the mixture and contribute nothing
        if pi == qi {
            continue;
        }
        let mi = alpha * pi + beta * qi;
        if mi == 0.0 {
            continue;
        }
        let lm = mi.ln();
        if pi > 0.0 {
            acc += alpha * pi * (pi.ln() - lm);
        }
        if qi > 0.0 {
            acc += beta * qi * (qi.ln() - lm);
        }
    }
    acc.max(0.0)
}

/// `D_KL(p ‖ q) = Σ p_i log(p_i / q_i)`, infinite when `p` charges a zero of `q`.
pub fn kl(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_len(p.probs(), q.probs())?;
    Ok(kl_raw(p.probs(), q.probs()))
}

/// Rényi divergence of order α, evaluated as `(1/(α-1)) log Σ p^α q^(1-α)`
/// with the inner sum taken in the log domain.
///
/// For α < 1 the result is infinite only when the supports are disjoint; for
/// α > 1 it is infinite as soon as `p` is not absolutely continuous w.r.t. `q`.
pub fn renyi(p: &Pmf, q: &Pmf, a: AlphaOrder) -> Result<f64> {
    same_len(p.probs(), q.probs())?;
    Ok(renyi_raw(p.probs(), q.probs(), a.value()))
}

/// `α·KL(p ‖ m) + (1-α)·KL(q ‖ m)` with `m = αp + (1-α)q`. Always finite and at most `H_b(α)`.
pub fn js_alpha(p: &Pmf, q: &Pmf, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    same_len(p.probs(), q.probs())?;
    Ok(js_raw(p.probs(), q.probs(), a.value()))
}

fn check_kernels(p: &ConditionalKernel, q: &ConditionalKernel) -> Result<()> {
    if p.len() != q.len() || p.width() != q.width() {
        return Err(Error::Dimension(format!(
            "kernels of shape {}x{} and {}x{}",
            p.len(),
            p.width(),
            q.len(),
            q.width()
        )));
    }
    let drift = p
        .weight()
        .probs()
        .iter()
        .zip(q.weight().probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > 1e-12 {
        return Err(Error::Dimension("kernels are weighted by different laws".into()));
    }
    Ok(())
}

fn weighted_rows<F>(p: &ConditionalKernel, q: &ConditionalKernel, per_row: F) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    check_kernels(p, q)?;
    let mut acc = 0.0;
    for (u, &w) in p.weight().probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        acc += w * per_row(p.row(u).probs(), q.row(u).probs());
    }
    Ok(acc)
}

/// `E_{P_U}[D_α(P_{V|U} ‖ Q_{V|U})]`: the average of per-row divergences, not
/// the divergence between the lifted joints.
pub fn cond_renyi(p: &ConditionalKernel, q: &ConditionalKernel, a: AlphaOrder) -> Result<f64> {
    weighted_rows(p, q, |pr, qr| renyi_raw(pr, qr, a.value()))
}

/// `E_{P_U}[JS_α(P_{V|U} ‖ Q_{V|U})]`.
pub fn cond_js(p: &ConditionalKernel, q: &ConditionalKernel, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    weighted_rows(p, q, |pr, qr| js_raw(pr, qr, a.value()))
}

/// `I(U;V) = D_KL(P_{UV} ‖ P_U P_V)`.
pub fn mutual_information(j: &JointPmf) -> f64 {
    kl_raw(j.flat(), j.marginal_product().flat())
}

/// Lautum information `L(U;V) = D_KL(P_U P_V ‖ P_{UV})`.
pub fn lautum(j: &JointPmf) -> f64 {
    kl_raw(j.marginal_product().flat(), j.flat())
}
