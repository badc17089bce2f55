//! Jointly Gaussian additive-noise chains with the clamped absolute loss.
//!
//! Both directions are handled through the 3×3 covariance of `(Y, X, Z)`;
//! every conditional law used below is read off it by Schur complements.

mod montecarlo;
mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::divergence::{binary_entropy, AlphaOrder};
use crate::error::{Error, Result};

pub use montecarlo::{clamped_abs_risk, mc_excess_risk_clamped, McEstimate};
pub use quadrature::{QuadratureRule, MAX_ORDER};

/// Smallest quadrature order accepted for the α-JS term.
pub const MIN_JS_ORDER: usize = 8;
pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `Y ~ N(0,σ̂²)`, `X = Y + W₁`, `Z = X + W₂`.
    #[serde(rename = "forward", alias = "forward_y_x_z")]
    ForwardYXZ,
    /// `Z ~ N(0,σ̂²)`, `X = Z + W₁`, `Y = X + W₂`.
    #[serde(rename = "reverse", alias = "reverse_z_x_y")]
    ReverseZXY,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChainSpec {
    pub var_input: f64,
    pub var_n1: f64,
    pub var_n2: f64,
    pub direction: Direction,
}

impl GaussianChainSpec {
    pub fn new(var_input: f64, var_n1: f64, var_n2: f64, direction: Direction) -> Result<Self> {
        for (name, v) in [("var_input", var_input), ("var_n1", var_n1), ("var_n2", var_n2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} = {v} must be a positive finite variance")));
            }
        }
        Ok(GaussianChainSpec { var_input, var_n1, var_n2, direction })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.var_input, self.var_n1, self.var_n2, self.direction).map(|_| ())
    }
}

/// `l(y, a) = min(|y - a|, |y - c|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampedAbsLoss {
    pub c: f64,
}

impl ClampedAbsLoss {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("loss anchor c = {c} must be positive")));
        }
        Ok(ClampedAbsLoss { c })
    }

    pub fn eval(&self, y: f64, a: f64) -> f64 {
        (y - a).abs().min((y - self.c).abs())
    }
}

/// Covariance of `(Y, X, Z)` in that order.
pub fn chain_covariance(spec: &GaussianChainSpec) -> [[f64; 3]; 3] {
    let (s, v1, v2) = (spec.var_input, spec.var_n1, spec.var_n2);
    match spec.direction {
        Direction::ForwardYXZ => [[s, s, s], [s, s + v1, s + v1], [s, s + v1, s + v1 + v2]],
        Direction::ReverseZXY => {
            let vx = s + v1;
            [[vx + v2, vx, s], [vx, vx, s], [s, s, s]]
        }
    }
}

const Y: usize = 0;
const X: usize = 1;
const Z: usize = 2;

fn mi_from_cov(c: &[[f64; 3]; 3], a: usize, b: usize) -> f64 {
    let rho2 = c[a][b] * c[a][b] / (c[a][a] * c[b][b]);
    -0.5 * (1.0 - rho2).ln()
}

/// `Var(X | Z)` and `Var(X | Y, Z)`.
fn conditional_variances(c: &[[f64; 3]; 3]) -> (f64, f64) {
    let v2 = c[X][X] - c[X][Z] * c[X][Z] / c[Z][Z];
    let det_yz = c[Y][Y] * c[Z][Z] - c[Y][Z] * c[Y][Z];
    // c_x·(Σ_yz)^{-1}·c_x with c_x = (Cov(X,Y), Cov(X,Z))
    let quad = (c[X][Y] * c[X][Y] * c[Z][Z] - 2.0 * c[X][Y] * c[X][Z] * c[Y][Z] + c[X][Z] * c[X][Z] * c[Y][Y])
        / det_yz;
    let v1 = c[X][X] - quad;
    (v2, v1)
}

/// `I(X;Y) - I(Z;Y)` from pairwise correlations.
pub fn gaussian_mi_gap(spec: &GaussianChainSpec) -> f64 {
    let c = chain_covariance(spec);
    (mi_from_cov(&c, X, Y) - mi_from_cov(&c, Z, Y)).max(0.0)
}

/// Lautum information of a bivariate Gaussian with correlation `rho`.
fn lautum_from_rho2(rho2: f64) -> f64 {
    (rho2 / (1.0 - rho2) + 0.5 * (1.0 - rho2).ln()).max(0.0)
}

/// `L(X;Y) - L(Z;Y)` from pairwise correlations.
pub fn gaussian_lautum_gap(spec: &GaussianChainSpec) -> f64 {
    let c = chain_covariance(spec);
    let r2 = |a: usize, b: usize| c[a][b] * c[a][b] / (c[a][a] * c[b][b]);
    lautum_from_rho2(r2(X, Y)) - lautum_from_rho2(r2(Z, Y))
}

/// `E_Z D_KL(P_{Y|Z} P_{X|Z} ‖ P_{Y,X|Z})`, the same for every `z`.
pub fn gaussian_cond_lautum(spec: &GaussianChainSpec) -> f64 {
    lautum_from_rho2(conditional_correlation(spec).powi(2))
}

/// `E[σ²(Y)]` for `σ²(y) = (|y| + c)²/4` and `Y ~ N(0, var_y)`.
pub fn expected_sigma2(loss: &ClampedAbsLoss, var_y: f64) -> f64 {
    let c = loss.c;
    (var_y + c * c + 2.0 * c * (2.0 * var_y / PI).sqrt()) / 4.0
}

/// `E[σ²(Y)]` for the chain's own `Var(Y)`.
pub fn chain_expected_sigma2(spec: &GaussianChainSpec, loss: &ClampedAbsLoss) -> f64 {
    expected_sigma2(loss, chain_covariance(spec)[Y][Y])
}

/// `E_{Y,Z} D_α(P_{X|Y,Z} ‖ P_{X|Z})` in closed form.
///
/// Both conditionals are Gaussian with fixed variances `v₁ < v₂` and a mean gap
/// that is linear in `(y, z)` with second moment `v₂ - v₁`.
pub fn gaussian_renyi_term(spec: &GaussianChainSpec, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    let (v2, v1) = conditional_variances(&chain_covariance(spec));
    let al = a.value();
    let va = al * v2 + (1.0 - al) * v1;
    if !(va > 0.0 && v1 > 0.0) {
        return Err(Error::Numerical(format!("non-positive conditional variance (v1={v1}, v_alpha={va})")));
    }
    let mean_part = al * (v2 - v1) / (2.0 * va);
    let var_part = (va.ln() - al * v2.ln() - (1.0 - al) * v1.ln()) / (2.0 * (1.0 - al));
    Ok((mean_part + var_part).max(0.0))
}

/// Mean and covariance of `(Y, X)` given `Z = z`.
fn yx_given_z(c: &[[f64; 3]; 3], z: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let k = [c[Y][Z] / c[Z][Z], c[X][Z] / c[Z][Z]];
    let mean = [k[0] * z, k[1] * z];
    let cov = [
        [c[Y][Y] - k[0] * c[Y][Z], c[Y][X] - k[0] * c[X][Z]],
        [c[X][Y] - k[1] * c[Y][Z], c[X][X] - k[1] * c[X][Z]],
    ];
    (mean, cov)
}

/// `JS_α(P_{Y,X|Z=z} ‖ P_{Y|Z=z} P_{X|Z=z})` evaluated at a specific `z`.
///
/// The pair is standardised by the conditional means and marginal standard
/// deviations, then rotated onto the eigen-axes of the correlation matrix so
/// that `P` is standard normal. Both densities are evaluated at every node from
/// their full expressions, so nothing here assumes the result is free of `z`.
pub fn gaussian_js_term_at(spec: &GaussianChainSpec, z: f64, a: AlphaOrder, rule: &QuadratureRule) -> Result<f64> {
    a.require_unit()?;
    if rule.order() < MIN_JS_ORDER {
        return Err(Error::Domain(format!(
            "quadrature order {} is below the minimum {MIN_JS_ORDER}",
            rule.order()
        )));
    }
    spec.validate()?;
    let (mean, cov) = yx_given_z(&chain_covariance(spec), z);
    let (sy, sx) = (cov[0][0].sqrt(), cov[1][1].sqrt());
    let rho = cov[0][1] / (sy * sx);
    if !(rho.abs() < 1.0) {
        return Err(Error::Numerical(format!("conditional correlation {rho} is degenerate")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let al = a.value();
    let kappa = al / (1.0 - al);
    let det = 1.0 - rho * rho;
    let (cp, cm) = (((1.0 + rho) / 2.0).sqrt(), ((1.0 - rho) / 2.0).sqrt());

    let mut kl_pm = 0.0;
    let mut kl_qm_tail = 0.0;
    for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
        for (&t, &wt) in rule.nodes().iter().zip(rule.weights()) {
            // point in the original (y, x) coordinates
            let u = cp * s + cm * t;
            let v = cp * s - cm * t;
            let (y, x) = (mean[0] + sy * u, mean[1] + sx * v);
            // log p - log q; the shared normalising constants cancel except for det
            let du = (y - mean[0]) / sy;
            let dv = (x - mean[1]) / sx;
            let log_p = -0.5 * (du * du - 2.0 * rho * du * dv + dv * dv) / det - 0.5 * det.ln();
            let log_q = -0.5 * (du * du + dv * dv);
            let log_r = log_p - log_q;
            let w = ws * wt;
            // -log(α + (1-α)/r)
            kl_pm += w * -(al + (1.0 - al) * (-log_r).exp()).ln();
            // log(1 + κr)/r, written to stay finite for huge or tiny r
            let tail = if log_r > 0.0 {
                let inv = (-log_r).exp();
                (log_r + (inv + kappa).ln()) * inv
            } else {
                let r = log_r.exp();
                (kappa * r).ln_1p() / r
            };
            kl_qm_tail += w * tail;
        }
    }
    let kl_qm = -(1.0 - al).ln() - kl_qm_tail;
    let js = al * kl_pm + (1.0 - al) * kl_qm;
    let hb = binary_entropy(al);
    if js > hb + 1e-9 || js < -1e-9 {
        return Err(Error::Numerical(format!(
            "quadrature produced JS {js} outside [0, H_b(α)={hb}]; raise the order"
        )));
    }
    Ok(js.clamp(0.0, hb))
}

/// `E_Z JS_α(P_{Y,X|Z} ‖ P_{Y|Z} P_{X|Z})`.
///
/// Conditioning on `Z` only shifts the common mean of both arguments, so the
/// outer expectation collapses to the value at `z = 0`.
pub fn gaussian_js_term(spec: &GaussianChainSpec, a: AlphaOrder, rule: &QuadratureRule) -> Result<f64> {
    gaussian_js_term_at(spec, 0.0, a, rule)
}

/// Correlation of `(Y, X)` given `Z`.
pub fn conditional_correlation(spec: &GaussianChainSpec) -> f64 {
    let (_, cov) = yx_given_z(&chain_covariance(spec), 0.0);
    cov[0][1] / (cov[0][0] * cov[1][1]).sqrt()
}
