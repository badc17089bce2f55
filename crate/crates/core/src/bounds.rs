//! Excess-risk bounds assembled from divergence terms and sub-Gaussian
//! parameters, and α sweeps over whole models.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::{chain_joint, excess_risk_01, ConditionedChain, MarkovChainSpec};
use crate::divergence::{binary_entropy, AlphaOrder};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_cond_lautum, gaussian_js_term, gaussian_mi_gap, gaussian_renyi_term, GaussianChainSpec, QuadratureRule,
    DEFAULT_QUAD_ORDER,
};

const JS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubGaussKind {
    Constant { sigma2: f64 },
    Expected { e_sigma2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubGaussProfile {
    pub kind: SubGaussKind,
    pub linf: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive and finite")))
    }
}

impl SubGaussProfile {
    /// Loss bounded by `linf`: Hoeffding gives `σ² = linf²/4`.
    pub fn bounded(linf: f64) -> Result<Self> {
        let linf = positive("linf", linf)?;
        Ok(SubGaussProfile { kind: SubGaussKind::Constant { sigma2: linf * linf / 4.0 }, linf: Some(linf) })
    }

    pub fn constant(sigma2: f64) -> Result<Self> {
        Ok(SubGaussProfile { kind: SubGaussKind::Constant { sigma2: positive("sigma2", sigma2)? }, linf: None })
    }

    pub fn expected(e_sigma2: f64) -> Result<Self> {
        Ok(SubGaussProfile { kind: SubGaussKind::Expected { e_sigma2: positive("e_sigma2", e_sigma2)? }, linf: None })
    }

    /// `E[σ²(Y)]`; for a constant profile this is the constant itself.
    pub fn e_sigma2(&self) -> f64 {
        match self.kind {
            SubGaussKind::Constant { sigma2 } => sigma2,
            SubGaussKind::Expected { e_sigma2 } => e_sigma2,
        }
    }
}

fn check_term(term: f64) -> Result<()> {
    if term.is_nan() || term < 0.0 {
        return Err(Error::Domain(format!("divergence term {term} must be nonnegative")));
    }
    Ok(())
}

/// `√(2·E[σ²]·D/α)`.
pub fn renyi_bound(e_sigma2: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    check_term(term)?;
    Ok((2.0 * e_sigma2 * term / a.value()).sqrt())
}

/// `(linf/√2)·√(D/α)`.
pub fn renyi_bound_bounded(linf: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    renyi_bound(linf * linf / 4.0, term, a)
}

/// `√(2·E[σ²]·JS/(α(1-α)))`. A term above `H_b(α)` is an upstream bug.
pub fn js_bound(e_sigma2: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    check_term(term)?;
    let al = a.value();
    let hb = binary_entropy(al);
    if term > hb + JS_SLACK {
        return Err(Error::Consistency(format!("JS term {term} exceeds H_b({al}) = {hb}")));
    }
    Ok((2.0 * e_sigma2 * term / (al * (1.0 - al))).sqrt())
}

pub fn js_bound_bounded(linf: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    js_bound(linf * linf / 4.0, term, a)
}

/// `(linf/√2)·√((4-3α)·I/α)`.
pub fn sibson_bound_bounded(linf: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    check_term(term)?;
    let al = a.value();
    Ok(linf / std::f64::consts::SQRT_2 * ((4.0 - 3.0 * al) * term / al).sqrt())
}

/// `√(2((1-α)σ² + α·Φ)·I/α)` with the log-MGF term `phi_term` supplied by the caller.
pub fn sibson_bound_general(sigma2: f64, phi_term: f64, term: f64, a: AlphaOrder) -> Result<f64> {
    a.require_unit()?;
    check_term(term)?;
    if sigma2 < 0.0 || phi_term < 0.0 || sigma2.is_nan() || phi_term.is_nan() {
        return Err(Error::Domain(format!("sigma2 {sigma2} and phi_term {phi_term} must be nonnegative")));
    }
    let al = a.value();
    Ok((2.0 * ((1.0 - al) * sigma2 + al * phi_term) * term / al).sqrt())
}

/// `√(2·E[σ²]·gap)`.
pub fn mi_bound(e_sigma2: f64, gap: f64) -> Result<f64> {
    check_term(gap)?;
    Ok((2.0 * e_sigma2 * gap).sqrt())
}

/// `(linf/√2)·√gap`.
pub fn mi_bound_bounded(linf: f64, gap: f64) -> Result<f64> {
    mi_bound(linf * linf / 4.0, gap)
}

/// `√(2·E[σ²]·L)`; `+∞` propagates.
pub fn lautum_bound(e_sigma2: f64, lautum: f64) -> Result<f64> {
    mi_bound(e_sigma2, lautum)
}

/// α-dependent bound families plus the two α-free references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Renyi,
    Js,
    Sibson,
    Mi,
    Lautum,
}

impl Method {
    /// Canonical column order.
    pub const ALL: [Method; 5] = [Method::Renyi, Method::Js, Method::Sibson, Method::Mi, Method::Lautum];

    pub fn name(self) -> &'static str {
        match self {
            Method::Renyi => "renyi",
            Method::Js => "js",
            Method::Sibson => "sibson",
            Method::Mi => "mi",
            Method::Lautum => "lautum",
        }
    }

    pub fn depends_on_alpha(self) -> bool {
        matches!(self, Method::Renyi | Method::Js | Method::Sibson)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}' (expected one of renyi, js, sibson, mi, lautum)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Model {
    Discrete(MarkovChainSpec),
    Gaussian(GaussianChainSpec),
}

impl Model {
    pub fn supported_methods(&self) -> &'static [Method] {
        match self {
            Model::Discrete(_) => &Method::ALL,
            Model::Gaussian(_) => &[Method::Renyi, Method::Js, Method::Mi, Method::Lautum],
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Model::Discrete(_) => "discrete",
            Model::Gaussian(_) => "gaussian",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Discrete(s) => format!(
                "discrete chain |Y|={} |X|={} |Z|={}",
                s.prior.len(),
                s.w1.cols(),
                s.w2.cols()
            ),
            Model::Gaussian(s) => format!(
                "gaussian chain {:?} var_input={} var_n1={} var_n2={}",
                s.direction, s.var_input, s.var_n1, s.var_n2
            ),
        }
    }
}

/// Evenly spaced grid of `count` orders from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Config("alpha grid needs at least one point".into()));
    }
    let grid: Vec<f64> = if count == 1 {
        vec![start]
    } else {
        (0..count)
            .map(|i| {
                // snap to 12 significant digits so 0.01-step grids print cleanly
                let v = start + (stop - start) * i as f64 / (count - 1) as f64;
                format!("{v:.11e}").parse().unwrap_or(v)
            })
            .collect()
    };
    validate_grid(&grid)?;
    Ok(grid)
}

/// The default 99-point grid `0.01, 0.02, …, 0.99`.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("alpha grid is empty".into()));
    }
    if let Some(a) = grid.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::Config(format!("alpha grid value {a} lies outside the open interval (0,1)")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("alpha grid must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMeta {
    pub model: String,
    pub profile: SubGaussProfile,
    pub e_sigma2: f64,
    pub quad_order: Option<usize>,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub alphas: Vec<f64>,
    /// One `(method, values)` pair per enabled α-dependent method, canonical order.
    pub curves: Vec<(Method, Vec<f64>)>,
    pub mi: f64,
    pub lautum: f64,
    pub true_excess: Option<f64>,
    /// Raw divergence terms behind the references.
    pub mi_gap: f64,
    pub lautum_term: f64,
    pub meta: CurveMeta,
}

impl BoundCurve {
    pub fn curve(&self, m: Method) -> Option<&[f64]> {
        self.curves.iter().find(|(k, _)| *k == m).map(|(_, v)| v.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub quad_order: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { quad_order: DEFAULT_QUAD_ORDER }
    }
}

enum Terms<'a> {
    Discrete(&'a ConditionedChain),
    Gaussian(&'a GaussianChainSpec, &'a QuadratureRule),
}

impl Terms<'_> {
    fn term(&self, m: Method, a: AlphaOrder) -> Result<f64> {
        match (self, m) {
            (Terms::Discrete(c), Method::Renyi) => Ok(c.renyi_term(a)),
            (Terms::Discrete(c), Method::Js) => c.js_term(a),
            (Terms::Discrete(c), Method::Sibson) => c.sibson_term(a),
            (Terms::Gaussian(s, _), Method::Renyi) => gaussian_renyi_term(s, a),
            (Terms::Gaussian(s, r), Method::Js) => gaussian_js_term(s, a, r),
            _ => Err(Error::Config(format!("no α-dependent term for {m}"))),
        }
    }
}

fn bound_for(m: Method, profile: &SubGaussProfile, term: f64, a: AlphaOrder) -> Result<f64> {
    let e = profile.e_sigma2();
    match (m, profile.linf) {
        (Method::Renyi, Some(l)) => renyi_bound_bounded(l, term, a),
        (Method::Renyi, None) => renyi_bound(e, term, a),
        (Method::Js, Some(l)) => js_bound_bounded(l, term, a),
        (Method::Js, None) => js_bound(e, term, a),
        (Method::Sibson, Some(l)) => sibson_bound_bounded(l, term, a),
        (Method::Sibson, None) => Err(Error::Config(
            "the sibson bound needs a bounded loss (set linf in the sub-Gaussian profile)".into(),
        )),
        _ => unreachable!("references are not swept"),
    }
}

/// Evaluates every requested bound at every grid point, plus the α-free
/// references (MI and Lautum bounds) and, for discrete models, the exact
/// excess risk. The Lautum reference uses the conditional Lautum information
/// `E_Z D_KL(P_{Y|Z} P_{X|Z} ‖ P_{Y,X|Z})`, the α → 1 limit of the JS bound.
pub fn sweep(
    model: &Model,
    methods: &[Method],
    grid: &[f64],
    profile: &SubGaussProfile,
    opts: &SweepOptions,
) -> Result<BoundCurve> {
    if methods.is_empty() {
        return Err(Error::Config("no bound methods selected".into()));
    }
    let supported = model.supported_methods();
    if let Some(m) = methods.iter().find(|m| !supported.contains(m)) {
        let list: Vec<_> = supported.iter().map(|m| m.name()).collect();
        return Err(Error::Config(format!(
            "method {m} is not available for {} models; supported: {}",
            model.kind_name(),
            list.join(", ")
        )));
    }
    validate_grid(grid)?;
    let mut enabled: Vec<Method> =
        Method::ALL.into_iter().filter(|m| m.depends_on_alpha() && methods.contains(m)).collect();
    enabled.dedup();
    if enabled.contains(&Method::Sibson) && profile.linf.is_none() {
        return Err(Error::Config(
            "the sibson bound needs a bounded loss (set linf in the sub-Gaussian profile)".into(),
        ));
    }

    let chain;
    let rule;
    let (terms, mi_gap, lautum_term, true_excess, quad_order) = match model {
        Model::Discrete(spec) => {
            let t = chain_joint(spec)?;
            chain = ConditionedChain::new(&t)?;
            let excess = excess_risk_01(&t)?;
            (Terms::Discrete(&chain), chain.mi_gap(), chain.cond_lautum(), Some(excess), None)
        }
        Model::Gaussian(spec) => {
            spec.validate()?;
            rule = QuadratureRule::gauss_hermite(opts.quad_order)?;
            (
                Terms::Gaussian(spec, &rule),
                gaussian_mi_gap(spec),
                gaussian_cond_lautum(spec),
                None,
                Some(opts.quad_order),
            )
        }
    };

    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&al| {
            let a = AlphaOrder::unit(al)?;
            enabled.iter().map(|&m| bound_for(m, profile, terms.term(m, a)?, a)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let curves = enabled
        .iter()
        .enumerate()
        .map(|(k, &m)| (m, rows.iter().map(|r| r[k]).collect()))
        .collect();

    let e = profile.e_sigma2();
    let (mi, lautum) = match profile.linf {
        Some(l) => (mi_bound_bounded(l, mi_gap)?, lautum_bound(l * l / 4.0, lautum_term)?),
        None => (mi_bound(e, mi_gap)?, lautum_bound(e, lautum_term)?),
    };
    Ok(BoundCurve {
        alphas: grid.to_vec(),
        curves,
        mi,
        lautum,
        true_excess,
        mi_gap,
        lautum_term,
        meta: CurveMeta {
            model: model.describe(),
            profile: *profile,
            e_sigma2: e,
            quad_order,
            version: env!("CARGO_PKG_VERSION"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{bound_terms_discrete, chain_joint, ChannelMatrix};
    use crate::divergence::Pmf;
    use crate::gaussian::{chain_expected_sigma2, ClampedAbsLoss, Direction};

    fn alpha(a: f64) -> AlphaOrder {
        AlphaOrder::unit(a).unwrap()
    }

    fn q2() -> MarkovChainSpec {
        MarkovChainSpec::qsc(Pmf::new(vec![0.3, 0.7]).unwrap(), 0.15, 0.05).unwrap()
    }

    #[test]
    fn formula_arithmetic() {
        assert_eq!(renyi_bound(1.0, 0.0, alpha(0.3)).unwrap(), 0.0);
        for a in [0.1, 0.5, 0.9] {
            assert!((renyi_bound(0.5, a, alpha(a)).unwrap() - 1.0).abs() < 1e-15);
            assert_eq!(renyi_bound_bounded(2.0, 0.3, alpha(a)).unwrap(), renyi_bound(1.0, 0.3, alpha(a)).unwrap());
            assert_eq!(js_bound_bounded(2.0, 0.1, alpha(a)).unwrap(), js_bound(1.0, 0.1, alpha(a)).unwrap());
        }
        assert!((js_bound(1.0, 0.125, alpha(0.5)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(js_bound(1.0, 0.0, alpha(0.5)).unwrap(), 0.0);
        assert!(matches!(js_bound(1.0, 0.7, alpha(0.5)), Err(Error::Consistency(_))));
        assert!(renyi_bound(1.0, 0.1, AlphaOrder::new(1.5).unwrap()).is_err());
        assert_eq!(renyi_bound(1.0, f64::INFINITY, alpha(0.5)).unwrap(), f64::INFINITY);
        assert_eq!(lautum_bound(1.0, f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(lautum_bound(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(mi_bound(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(sibson_bound_bounded(1.0, 0.0, alpha(0.4)).unwrap(), 0.0);
        assert!(renyi_bound(1.0, -0.1, alpha(0.5)).is_err());
    }

    #[test]
    fn sibson_general_reduces_to_bounded() {
        for k in 1..=9 {
            let a = alpha(k as f64 / 10.0);
            for linf in [1.0, 2.5] {
                let s2 = linf * linf / 4.0;
                let g = sibson_bound_general(s2, s2, 0.37, a).unwrap();
                // general form with σ² = Φ = linf²/4 against (linf/√2)√(I/α)
                let direct = linf / std::f64::consts::SQRT_2 * (0.37 / a.value()).sqrt();
                assert!((g - direct).abs() < 1e-14);
                // the (4-3α) corollary form is the looser of the two
                assert!(sibson_bound_bounded(linf, 0.37, a).unwrap() >= g - 1e-15);
            }
        }
        let near_one = sibson_bound_general(0.8, 0.8, 0.2, alpha(0.999_999)).unwrap();
        assert!((near_one - (2.0f64 * 0.8 * 0.2).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn reference_values() {
        let t = chain_joint(&q2()).unwrap();
        let terms = bound_terms_discrete(&t, alpha(0.5)).unwrap();
        let mi = mi_bound_bounded(1.0, terms.mi_gap).unwrap();
        assert!((mi - 0.156).abs() < 0.01);
        assert!((mi - (0.5 * terms.mi_gap).sqrt()).abs() < 1e-15);
        let r = renyi_bound_bounded(1.0, terms.renyi, alpha(0.5)).unwrap();
        assert!((r - (terms.renyi / 0.5).sqrt() / std::f64::consts::SQRT_2).abs() < 1e-15);

        let ex2 = GaussianChainSpec::new(1.0, 1.0, 1.0, Direction::ForwardYXZ).unwrap();
        let e = chain_expected_sigma2(&ex2, &ClampedAbsLoss::new(1.0).unwrap());
        let mi = mi_bound(e, gaussian_mi_gap(&ex2)).unwrap();
        assert!((mi - 0.5086).abs() < 1e-3);
        let r = renyi_bound(e, gaussian_renyi_term(&ex2, alpha(0.999)).unwrap(), alpha(0.999)).unwrap();
        assert!((r - mi).abs() < 1e-3);
    }

    #[test]
    fn sweep_discrete_q2() {
        let profile = SubGaussProfile::bounded(1.0).unwrap();
        let curve = sweep(&Model::Discrete(q2()), &Method::ALL, &default_grid(), &profile, &SweepOptions::default())
            .unwrap();
        assert_eq!(curve.alphas.len(), 99);
        assert_eq!(curve.curves.len(), 3);
        assert!((curve.true_excess.unwrap() - 0.035).abs() < 1e-12);
        let js = curve.curve(Method::Js).unwrap();
        assert!(js.iter().any(|&v| v < curve.mi));
        for (_, values) in &curve.curves {
            assert!(values.iter().all(|&v| v >= 0.035));
        }
        assert!(curve.mi >= 0.035 && curve.lautum >= 0.035);
        let again =
            sweep(&Model::Discrete(q2()), &Method::ALL, &default_grid(), &profile, &SweepOptions::default()).unwrap();
        assert_eq!(curve, again);
    }

    #[test]
    fn sweep_identity_channel_is_zero() {
        let spec = MarkovChainSpec::new(
            Pmf::new(vec![0.3, 0.7]).unwrap(),
            crate::discrete::qsc_matrix(2, 0.15).unwrap(),
            ChannelMatrix::identity(2).unwrap(),
        )
        .unwrap();
        let profile = SubGaussProfile::bounded(1.0).unwrap();
        let c = sweep(&Model::Discrete(spec), &Method::ALL, &default_grid(), &profile, &SweepOptions::default())
            .unwrap();
        assert!(c.curves.iter().all(|(_, v)| v.iter().all(|&x| x == 0.0)));
        assert_eq!((c.mi, c.lautum, c.true_excess), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn sweep_rejects_bad_requests() {
        let g = Model::Gaussian(GaussianChainSpec::new(1.0, 1.0, 1.0, Direction::ForwardYXZ).unwrap());
        let p = SubGaussProfile::expected(0.9).unwrap();
        let err = sweep(&g, &[Method::Sibson], &default_grid(), &p, &SweepOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("renyi, js, mi, lautum"), "{msg}");
        assert!(sweep(&g, &[], &default_grid(), &p, &SweepOptions::default()).is_err());
        assert!(sweep(&g, &[Method::Js], &[0.5, 1.0], &p, &SweepOptions::default()).is_err());
        assert!(sweep(&g, &[Method::Js], &[0.5, 0.4], &p, &SweepOptions::default()).is_err());
        let d = Model::Discrete(q2());
        assert!(sweep(&d, &[Method::Sibson], &default_grid(), &p, &SweepOptions::default()).is_err());
        assert!("bogus".parse::<Method>().is_err());
        assert_eq!("js".parse::<Method>().unwrap(), Method::Js);
    }

    #[test]
    fn sweep_limits() {
        let profile = SubGaussProfile::bounded(1.0).unwrap();
        let grid = [1e-4, 0.9999];
        let c = sweep(&Model::Discrete(q2()), &Method::ALL, &grid, &profile, &SweepOptions::default()).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(c.curve(Method::Renyi).unwrap()[1], c.mi) < 1e-3);
        assert!(rel(c.curve(Method::Js).unwrap()[0], c.mi) < 1e-2);
        assert!(rel(c.curve(Method::Js).unwrap()[1], c.lautum) < 1e-3);
        assert!(rel(c.curve(Method::Sibson).unwrap()[1], c.mi) < 1e-3);
    }

    #[test]
    fn grids() {
        let g = linear_grid(0.01, 0.99, 99).unwrap();
        assert_eq!(g, default_grid());
        assert!(linear_grid(0.0, 0.5, 3).is_err());
        assert!(linear_grid(0.2, 0.8, 0).is_err());
    }
}
