//! Sibson's α-mutual information and the tilted joint built from its minimizer.
//!
//! For a joint `P_{UV}` the minimizer of `Q_U ↦ D_α(P_{UV} ‖ Q_U P_V)` is
//!
//! ```text
//! p*(u) ∝ p_U(u) · ( Σ_v p_{V|U}(v|u)^α p_V(v)^(1-α) )^(1/α)
//! ```
//!
//! and the minimum has the closed form
//! `(α/(α-1)) log Σ_u p_U(u) (Σ_v p_{V|U}(v|u)^α p_V(v)^(1-α))^(1/α)`.
//! Both share the per-row inner sum, computed once in the log domain.

use serde::Serialize;

use super::measures::{log_sum_exp_slice, renyi_raw};
use super::types::{AlphaOrder, JointPmf, Pmf};
use crate::error::{Error, Result};

/// Absolute agreement required between the closed-form and minimizer routes.
pub const ROUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SibsonMinimizer {
    pub pmf: Pmf,
    /// Rows of the joint with no mass; they receive minimizer mass 0.
    pub zero_rows: Vec<usize>,
}

/// Per-row `log p_U(u) + (1/α) log Σ_v p_{V|U}(v|u)^α p_V(v)^(1-α)`, or `-inf` for empty rows.
fn log_row_scores(j: &JointPmf, alpha: f64) -> Vec<f64> {
    let pv = j.marginal_v();
    let log_pv: Vec<f64> = pv.probs().iter().map(|p| p.ln()).collect();
    let mut terms = Vec::with_capacity(j.cols());
    (0..j.rows())
        .map(|u| {
            let row = j.row(u);
            let pu: f64 = row.iter().sum();
            if pu == 0.0 {
                return f64::NEG_INFINITY;
            }
            let log_pu = pu.ln();
            terms.clear();
            for (&puv, &lv) in row.iter().zip(&log_pv) {
                if puv > 0.0 {
                    terms.push(alpha * (puv.ln() - log_pu) + (1.0 - alpha) * lv);
                }
            }
            log_pu + log_sum_exp_slice(&terms) / alpha
        })
        .collect()
}

/// Closed-form minimizer of `D_α(P_{UV} ‖ Q_U P_V)` over `Q_U`.
pub fn sibson_minimizer(j: &JointPmf, a: AlphaOrder) -> Result<SibsonMinimizer> {
    let scores = log_row_scores(j, a.value());
    let norm = log_sum_exp_slice(&scores);
    if !norm.is_finite() {
        return Err(Error::Numerical(format!("minimizer normalizer is {norm}")));
    }
    let zero_rows = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == f64::NEG_INFINITY)
        .map(|(u, _)| u)
        .collect();
    let weights = scores.iter().map(|s| (s - norm).exp()).collect();
    Ok(SibsonMinimizer { pmf: Pmf::renormalize(weights)?, zero_rows })
}

fn closed_form(j: &JointPmf, alpha: f64) -> f64 {
    let lse = log_sum_exp_slice(&log_row_scores(j, alpha));
    (alpha / (alpha - 1.0) * lse).max(0.0)
}

/// Both evaluation routes: `(closed form, D_α(P_{UV} ‖ P_{U*} P_V))`.
pub fn sibson_mi_routes(j: &JointPmf, a: AlphaOrder) -> Result<(f64, f64)> {
    let closed = closed_form(j, a.value());
    let star = sibson_minimizer(j, a)?;
    let reference = JointPmf::product(&star.pmf, &j.marginal_v());
    let via_minimizer = renyi_raw(j.flat(), reference.flat(), a.value());
    Ok((closed, via_minimizer))
}

/// Sibson mutual information `I_α^S(U;V)` in nats.
///
/// Debug builds evaluate both routes and fail with [`Error::Consistency`] if
/// they disagree by more than [`ROUTE_TOL`]; release builds use the closed form.
pub fn sibson_mi(j: &JointPmf, a: AlphaOrder) -> Result<f64> {
    if cfg!(debug_assertions) {
        let (closed, via_minimizer) = sibson_mi_routes(j, a)?;
        if (closed - via_minimizer).abs() > ROUTE_TOL {
            return Err(Error::Consistency(format!(
                "sibson routes disagree at alpha={}: closed form {closed}, minimizer {via_minimizer}",
                a.value()
            )));
        }
        Ok(closed)
    } else {
        Ok(closed_form(j, a.value()))
    }
}

/// The α-geometric tilt `∝ P_{UV}^α (Q_U P_V)^(1-α)` with `Q_U = u_star`.
pub fn tilted_joint(j: &JointPmf, u_star: &Pmf, a: AlphaOrder) -> Result<JointPmf> {
    a.require_unit()?;
    if u_star.len() != j.rows() {
        return Err(Error::Dimension(format!(
            "u_star has length {} but the joint has {} rows",
            u_star.len(),
            j.rows()
        )));
    }
    let alpha = a.value();
    let pv = j.marginal_v();
    let mut logs = Vec::with_capacity(j.rows() * j.cols());
    for u in 0..j.rows() {
        for (v, &pvv) in pv.probs().iter().enumerate() {
            let puv = j.get(u, v);
            let r = u_star.probs()[u] * pvv;
            logs.push(if puv > 0.0 && r > 0.0 {
                alpha * puv.ln() + (1.0 - alpha) * r.ln()
            } else {
                f64::NEG_INFINITY
            });
        }
    }
    let norm = log_sum_exp_slice(&logs);
    if norm == f64::NEG_INFINITY {
        return Err(Error::Degenerate(
            "tilted numerator vanishes everywhere (joint and reference have disjoint supports)".into(),
        ));
    }
    let weights = logs.into_iter().map(|l| (l - norm).exp()).collect();
    JointPmf::renormalize(j.rows(), j.cols(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{kl, mutual_information};

    fn alpha(a: f64) -> AlphaOrder {
        AlphaOrder::new(a).unwrap()
    }

    fn joint(rows: &[Vec<f64>]) -> JointPmf {
        JointPmf::from_rows(rows).unwrap()
    }

    /// Brute-force minimum of `D_α(j ‖ (t,1-t) ⊗ P_V)` over a grid in `t`.
    fn grid_min_2row(j: &JointPmf, a: f64, step: f64) -> (f64, f64) {
        let pv = j.marginal_v();
        let mut best = (f64::INFINITY, 0.0);
        let n = (1.0 / step).round() as usize;
        for k in 1..n {
            let t = k as f64 * step;
            let mut s = 0.0;
            for u in 0..2 {
                let qu = if u == 0 { t } else { 1.0 - t };
                for v in 0..j.cols() {
                    let p = j.get(u, v);
                    if p > 0.0 {
                        s += p.powf(a) * (qu * pv.probs()[v]).powf(1.0 - a);
                    }
                }
            }
            let d = s.ln() / (a - 1.0);
            if d < best.0 {
                best = (d, t);
            }
        }
        best
    }

    #[test]
    fn product_joint_minimizer_is_marginal() {
        let pu = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let pv = Pmf::new(vec![0.6, 0.4]).unwrap();
        let j = JointPmf::product(&pu, &pv);
        for a in [0.3, 0.7, 2.0] {
            let star = sibson_minimizer(&j, alpha(a)).unwrap();
            for (x, y) in star.pmf.probs().iter().zip(pu.probs()) {
                assert!((x - y).abs() < 1e-14);
            }
            assert!(sibson_mi(&j, alpha(a)).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_joint_gives_uniform_minimizer() {
        let j = joint(&[vec![0.4, 0.1], vec![0.1, 0.4]]);
        for a in [0.1, 0.5, 0.9, 3.0] {
            let star = sibson_minimizer(&j, alpha(a)).unwrap();
            assert!((star.pmf.probs()[0] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn asymmetric_minimizer_matches_grid_search() {
        let j = joint(&[vec![0.5, 0.2], vec![0.1, 0.2]]);
        let (min, t) = grid_min_2row(&j, 0.5, 1e-4);
        let star = sibson_minimizer(&j, alpha(0.5)).unwrap();
        assert!((star.pmf.probs()[0] - t).abs() < 1e-3);
        assert!((sibson_mi(&j, alpha(0.5)).unwrap() - min).abs() < 1e-7);
    }

    #[test]
    fn diagonal_joint_is_log_two() {
        let j = joint(&[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let (min, t) = grid_min_2row(&j, 0.5, 1e-4);
        let got = sibson_mi(&j, alpha(0.5)).unwrap();
        assert!((got - 2f64.ln()).abs() < 1e-12);
        assert!((got - min).abs() < 1e-6);
        assert!((t - 0.5).abs() < 1e-3);
    }

    #[test]
    fn near_one_recovers_shannon() {
        let j = joint(&[vec![0.3, 0.05, 0.05], vec![0.1, 0.2, 0.3]]);
        let mi = mutual_information(&j);
        for a in [0.999, 1.001] {
            assert!((sibson_mi(&j, alpha(a)).unwrap() - mi).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_row_gets_no_mass() {
        let j = joint(&[vec![0.3, 0.2], vec![0.0, 0.0], vec![0.1, 0.4]]);
        let star = sibson_minimizer(&j, alpha(0.5)).unwrap();
        assert_eq!(star.zero_rows, vec![1]);
        assert_eq!(star.pmf.probs()[1], 0.0);
        let (c, m) = sibson_mi_routes(&j, alpha(0.5)).unwrap();
        assert!((c - m).abs() < 1e-12);
    }

    #[test]
    fn tilt_of_product_by_its_marginal_is_identity() {
        let pu = Pmf::new(vec![0.25, 0.75]).unwrap();
        let pv = Pmf::new(vec![0.1, 0.2, 0.7]).unwrap();
        let j = JointPmf::product(&pu, &pv);
        let t = tilted_joint(&j, &pu, alpha(0.35)).unwrap();
        for (x, y) in t.flat().iter().zip(j.flat()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn tilt_matches_elementwise_formula() {
        let j = joint(&[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let u = Pmf::uniform(2).unwrap();
        let t = tilted_joint(&j, &u, alpha(0.5)).unwrap();
        // elementwise: sqrt(0.5) * sqrt(0.25) on the diagonal, zero off it
        let w = (0.5f64).sqrt() * 0.25f64.sqrt();
        let total = 2.0 * w;
        assert!((t.get(0, 0) - w / total).abs() < 1e-15);
        assert_eq!(t.get(0, 1), 0.0);

        let skew = joint(&[vec![0.5, 0.2], vec![0.1, 0.2]]);
        let star = Pmf::new(vec![0.6, 0.4]).unwrap();
        let t = tilted_joint(&skew, &star, alpha(0.3)).unwrap();
        let pv = skew.marginal_v();
        let raw: Vec<f64> = (0..2)
            .flat_map(|u| (0..2).map(move |v| (u, v)))
            .map(|(u, v)| skew.get(u, v).powf(0.3) * (star.probs()[u] * pv.probs()[v]).powf(0.7))
            .collect();
        let z: f64 = raw.iter().sum();
        for (x, r) in t.flat().iter().zip(&raw) {
            assert!((x - r / z).abs() < 1e-14);
        }
    }

    #[test]
    fn tilt_rejects_disjoint_reference() {
        let j = joint(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let u = Pmf::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(tilted_joint(&j, &u, alpha(0.5)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn tilt_identity_holds() {
        let j = joint(&[vec![0.05, 0.2, 0.1], vec![0.3, 0.05, 0.3]]);
        for a in [0.1, 0.5, 0.9] {
            let a = alpha(a);
            let star = sibson_minimizer(&j, a).unwrap().pmf;
            let t = tilted_joint(&j, &star, a).unwrap();
            let flat = |x: &JointPmf| Pmf::new(x.flat().to_vec()).unwrap();
            let reference = JointPmf::product(&star, &j.marginal_v());
            let lhs = a.value() * kl(&flat(&t), &flat(&j)).unwrap()
                + (1.0 - a.value()) * kl(&flat(&t), &flat(&reference)).unwrap();
            let rhs = (1.0 - a.value()) * sibson_mi(&j, a).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
    }
}
