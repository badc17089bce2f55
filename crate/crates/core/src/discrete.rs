//! Discrete Markov chains `Y → X → Z` built from channel matrices, their exact
//! 0-1 Bayes risks, and the conditional divergence terms that feed the bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::divergence::{js_raw, kl_raw, renyi_raw, sibson_mi, AlphaOrder, JointPmf, Pmf};
use crate::error::{Error, Result};

const ROW_TOL: f64 = 1e-12;
const TENSOR_TOL: f64 = 1e-11;

/// Row-stochastic matrix: row `i` is the output law given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "channel of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, row) in data.chunks(cols).enumerate() {
            if let Some(j) = row.iter().position(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {i} has invalid entry {} at column {j}",
                    row[j]
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {i} sums to {sum:.15}, not 1"
                )));
            }
        }
        Ok(ChannelMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "channel row {i} has {} entries, expected {cols}",
                rows[i].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(q: usize) -> Result<Self> {
        qsc_matrix(q, 0.0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }
}

impl Serialize for ChannelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChannelMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        ChannelMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// q-ary symmetric channel: keep the symbol with probability `1-ε`, otherwise
/// move to one of the other `q-1` symbols uniformly.
///
/// `ε = 0` (the noiseless channel) is accepted; `ε` must be below 1.
pub fn qsc_matrix(q: usize, eps: f64) -> Result<ChannelMatrix> {
    if q < 2 {
        return Err(Error::Domain(format!("alphabet size {q} must be at least 2")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("crossover {eps} must lie in [0,1)")));
    }
    let off = eps / (q - 1) as f64;
    let mut data = vec![off; q * q];
    for i in 0..q {
        data[i * q + i] = 1.0 - eps;
    }
    ChannelMatrix::new(q, q, data)
}

/// Cascade `w1` then `w2` (matrix product).
pub fn compose_channels(w1: &ChannelMatrix, w2: &ChannelMatrix) -> Result<ChannelMatrix> {
    if w1.cols != w2.rows {
        return Err(Error::Dimension(format!(
            "cannot cascade {}x{} into {}x{}",
            w1.rows, w1.cols, w2.rows, w2.cols
        )));
    }
    let mut data = vec![0.0; w1.rows * w2.cols];
    for i in 0..w1.rows {
        for k in 0..w1.cols {
            let a = w1.get(i, k);
            if a == 0.0 {
                continue;
            }
            for j in 0..w2.cols {
                data[i * w2.cols + j] += a * w2.get(k, j);
            }
        }
    }
    ChannelMatrix::new(w1.rows, w2.cols, data)
}

/// Prior on `Y` plus the channels `Y → X` and `X → Z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovChainSpec {
    pub prior: Pmf,
    pub w1: ChannelMatrix,
    pub w2: ChannelMatrix,
}

impl MarkovChainSpec {
    pub fn new(prior: Pmf, w1: ChannelMatrix, w2: ChannelMatrix) -> Result<Self> {
        if prior.len() != w1.rows() {
            return Err(Error::Dimension(format!(
                "prior has {} symbols but the first channel has {} inputs",
                prior.len(),
                w1.rows()
            )));
        }
        if w1.cols() != w2.rows() {
            return Err(Error::Dimension(format!(
                "first channel has {} outputs but the second has {} inputs",
                w1.cols(),
                w2.rows()
            )));
        }
        Ok(MarkovChainSpec { prior, w1, w2 })
    }

    /// Two cascaded q-ary symmetric channels driven by `prior`.
    pub fn qsc(prior: Pmf, eps1: f64, eps2: f64) -> Result<Self> {
        let q = prior.len();
        Self::new(prior, qsc_matrix(q, eps1)?, qsc_matrix(q, eps2)?)
    }
}

impl<'de> Deserialize<'de> for MarkovChainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            prior: Pmf,
            w1: ChannelMatrix,
            w2: ChannelMatrix,
        }
        let r = Raw::deserialize(d)?;
        MarkovChainSpec::new(r.prior, r.w1, r.w2).map_err(serde::de::Error::custom)
    }
}

/// Neumaier summation; naive sums over q³ entries drift past the tensor tolerance.
fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// `P_{Y,X,Z}` stored as `[y][x][z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTensor3 {
    qy: usize,
    qx: usize,
    qz: usize,
    probs: Vec<f64>,
}

impl JointTensor3 {
    pub fn new(qy: usize, qx: usize, qz: usize, probs: Vec<f64>) -> Result<Self> {
        if qy * qx * qz == 0 || probs.len() != qy * qx * qz {
            return Err(Error::Dimension(format!(
                "tensor of shape {qy}x{qx}x{qz} needs {} entries, got {}",
                qy * qx * qz,
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("tensor has negative or non-finite entries".into()));
        }
        let total = compensated_sum(&probs);
        if (total - 1.0).abs() > TENSOR_TOL {
            return Err(Error::InvalidDistribution(format!("tensor sums to {total}, not 1")));
        }
        Ok(JointTensor3 { qy, qx, qz, probs })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.qy, self.qx, self.qz)
    }

    pub fn get(&self, y: usize, x: usize, z: usize) -> f64 {
        self.probs[(y * self.qx + x) * self.qz + z]
    }

    fn pair(&self, f: impl Fn(usize, usize, usize) -> (usize, usize), rows: usize, cols: usize) -> JointPmf {
        let mut out = vec![0.0; rows * cols];
        for y in 0..self.qy {
            for x in 0..self.qx {
                for z in 0..self.qz {
                    let (r, c) = f(y, x, z);
                    out[r * cols + c] += self.get(y, x, z);
                }
            }
        }
        JointPmf::renormalize(rows, cols, out).expect("a valid tensor has unit mass")
    }

    /// `P_{Y,X}`, rows indexed by `y`.
    pub fn marginal_yx(&self) -> JointPmf {
        self.pair(|y, x, _| (y, x), self.qy, self.qx)
    }

    /// `P_{Y,Z}`, rows indexed by `y`.
    pub fn marginal_yz(&self) -> JointPmf {
        self.pair(|y, _, z| (y, z), self.qy, self.qz)
    }

    /// `P_{X,Z}`, rows indexed by `x`.
    pub fn marginal_xz(&self) -> JointPmf {
        self.pair(|_, x, z| (x, z), self.qx, self.qz)
    }

    /// Relabels the three alphabets; `py[i]` is the new label of `y = i`, etc.
    pub fn permuted(&self, py: &[usize], px: &[usize], pz: &[usize]) -> Result<Self> {
        if py.len() != self.qy || px.len() != self.qx || pz.len() != self.qz {
            return Err(Error::Dimension("permutation lengths do not match tensor shape".into()));
        }
        let mut probs = vec![0.0; self.probs.len()];
        for y in 0..self.qy {
            for x in 0..self.qx {
                for z in 0..self.qz {
                    probs[(py[y] * self.qx + px[x]) * self.qz + pz[z]] = self.get(y, x, z);
                }
            }
        }
        Ok(JointTensor3 { probs, ..*self })
    }
}

/// `P(y,x,z) = prior(y)·w1(y,x)·w2(x,z)`.
pub fn chain_joint(spec: &MarkovChainSpec) -> Result<JointTensor3> {
    let spec = MarkovChainSpec::new(spec.prior.clone(), spec.w1.clone(), spec.w2.clone())?;
    let (qy, qx, qz) = (spec.prior.len(), spec.w1.cols(), spec.w2.cols());
    let mut probs = Vec::with_capacity(qy * qx * qz);
    for (y, &py) in spec.prior.probs().iter().enumerate() {
        for x in 0..qx {
            let pyx = py * spec.w1.get(y, x);
            probs.extend(spec.w2.row(x).iter().map(|&w| pyx * w));
        }
    }
    JointTensor3::new(qy, qx, qz, probs)
}

/// Minimum 0-1 risk of guessing the row label from the column observation:
/// `1 - Σ_obs max_label P(label, obs)`.
pub fn bayes_risk_01(joint: &JointPmf) -> f64 {
    let hit: f64 = (0..joint.cols())
        .map(|c| (0..joint.rows()).map(|r| joint.get(r, c)).fold(0.0, f64::max))
        .sum();
    (1.0 - hit).max(0.0)
}

/// `L*(Y|Z) - L*(Y|X)` under 0-1 loss.
pub fn excess_risk_01(t: &JointTensor3) -> Result<f64> {
    let d = bayes_risk_01(&t.marginal_yz()) - bayes_risk_01(&t.marginal_yx());
    if d < -1e-12 {
        return Err(Error::Consistency(format!(
            "negative excess risk {d}: the tensor violates data processing"
        )));
    }
    Ok(d.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletConfig {
    pub q: usize,
    pub concentration: f64,
    pub seed: u64,
}

/// Draws a prior from the symmetric Dirichlet by normalising independent
/// `Gamma(concentration, 1)` variates from a ChaCha8 stream seeded with `cfg.seed`.
pub fn dirichlet_prior(cfg: &DirichletConfig) -> Result<Pmf> {
    if cfg.q < 2 {
        return Err(Error::Domain(format!("alphabet size {} must be at least 2", cfg.q)));
    }
    if !(cfg.concentration > 0.0 && cfg.concentration.is_finite()) {
        return Err(Error::Domain(format!("concentration {} must be positive", cfg.concentration)));
    }
    let gamma = Gamma::new(cfg.concentration, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<f64> = (0..cfg.q).map(|_| gamma.sample(&mut rng)).collect();
    Pmf::renormalize(draws)
}

/// The divergence terms each bound needs at a single order α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteBoundTerms {
    /// `Σ_{y,z} P(y,z) D_α(P_{X|y,z} ‖ P_{X|z})`
    pub renyi: f64,
    /// `Σ_z P(z) JS_α(P_{Y,X|z} ‖ P_{Y|z} P_{X|z})`
    pub js: f64,
    /// `Σ_z P(z) I_α^S(P_{Y,X|z})`
    pub sibson: f64,
    /// `I(X;Y) - I(Z;Y)`
    pub mi_gap: f64,
    /// `L(X;Y) - L(Z;Y)`; may be `inf`
    pub lautum_gap: f64,
    /// `Σ_z P(z) D_KL(P_{Y|z} P_{X|z} ‖ P_{Y,X|z})`; may be `inf`
    pub cond_lautum: f64,
}

struct ZSlice {
    pz: f64,
    /// `P_{Y,X|z}` row-major, rows `y`.
    joint: Vec<f64>,
    /// `P_{Y|z} ⊗ P_{X|z}`, same layout.
    product: Vec<f64>,
    /// A point-mass marginal makes the conditional joint a product law.
    independent: bool,
}

/// A chain tensor with every conditional law used by the bound terms
/// precomputed, so that α sweeps only pay for the divergence sums.
pub struct ConditionedChain {
    qy: usize,
    qx: usize,
    yx: JointPmf,
    yz: JointPmf,
    /// `(P(y,z), P_{X|y,z}, z)` for every pair with positive mass.
    x_given_yz: Vec<(f64, Vec<f64>, usize)>,
    slices: Vec<ZSlice>,
    x_given_z: Vec<Vec<f64>>,
}

fn is_point_mass(p: &[f64]) -> bool {
    p.iter().filter(|&&v| v > 0.0).count() == 1
}

impl ConditionedChain {
    pub fn new(t: &JointTensor3) -> Result<Self> {
        let (qy, qx, qz) = t.shape();
        let mut pyz = vec![0.0; qy * qz];
        let mut pxz = vec![0.0; qx * qz];
        for y in 0..qy {
            for x in 0..qx {
                for z in 0..qz {
                    let p = t.get(y, x, z);
                    pyz[y * qz + z] += p;
                    pxz[x * qz + z] += p;
                }
            }
        }
        let pz: Vec<f64> = (0..qz).map(|z| (0..qx).map(|x| pxz[x * qz + z]).sum()).collect();
        if pz.iter().all(|&p| p == 0.0) {
            return Err(Error::Degenerate("no observation z carries positive mass".into()));
        }

        let mut x_given_z = vec![Vec::new(); qz];
        let mut slices = Vec::new();
        for z in 0..qz {
            if pz[z] == 0.0 {
                continue;
            }
            let px: Vec<f64> = (0..qx).map(|x| pxz[x * qz + z] / pz[z]).collect();
            let py: Vec<f64> = (0..qy).map(|y| pyz[y * qz + z] / pz[z]).collect();
            let mut joint = Vec::with_capacity(qy * qx);
            let mut product = Vec::with_capacity(qy * qx);
            for (y, &pyv) in py.iter().enumerate() {
                for (x, &pxv) in px.iter().enumerate() {
                    joint.push(t.get(y, x, z) / pz[z]);
                    product.push(pyv * pxv);
                }
            }
            let independent = is_point_mass(&px) || is_point_mass(&py);
            slices.push(ZSlice { pz: pz[z], joint, product, independent });
            x_given_z[z] = px;
        }

        let mut x_given_yz = Vec::new();
        for y in 0..qy {
            for z in 0..qz {
                let w = pyz[y * qz + z];
                if w == 0.0 {
                    continue;
                }
                let row = (0..qx).map(|x| t.get(y, x, z) / w).collect();
                x_given_yz.push((w, row, z));
            }
        }

        Ok(ConditionedChain {
            qy,
            qx,
            yx: t.marginal_yx(),
            yz: t.marginal_yz(),
            x_given_yz,
            slices,
            x_given_z,
        })
    }

    pub fn renyi_term(&self, a: AlphaOrder) -> f64 {
        self.x_given_yz
            .iter()
            .map(|(w, row, z)| w * renyi_raw(row, &self.x_given_z[*z], a.value()))
            .sum()
    }

    pub fn js_term(&self, a: AlphaOrder) -> Result<f64> {
        a.require_unit()?;
        Ok(self
            .slices
            .iter()
            .filter(|s| !s.independent)
            .map(|s| s.pz * js_raw(&s.joint, &s.product, a.value()))
            .sum())
    }

    pub fn sibson_term(&self, a: AlphaOrder) -> Result<f64> {
        let mut acc = 0.0;
        for s in self.slices.iter().filter(|s| !s.independent) {
            let j = JointPmf::renormalize(self.qy, self.qx, s.joint.clone())?;
            acc += s.pz * sibson_mi(&j, a)?;
        }
        Ok(acc)
    }

    /// `I(X;Y) - I(Z;Y)`.
    pub fn mi_gap(&self) -> f64 {
        let gap = crate::divergence::mutual_information(&self.yx) - crate::divergence::mutual_information(&self.yz);
        gap.max(0.0)
    }

    /// `L(X;Y) - L(Z;Y)`; `inf` when `L(X;Y)` is infinite, `nan` if both are.
    pub fn lautum_gap(&self) -> f64 {
        crate::divergence::lautum(&self.yx) - crate::divergence::lautum(&self.yz)
    }

    pub fn cond_lautum(&self) -> f64 {
        self.slices
            .iter()
            .filter(|s| !s.independent)
            .map(|s| s.pz * kl_raw(&s.product, &s.joint))
            .sum()
    }

    /// The chain-rule form of the MI gap: `Σ P(y,z) KL(P_{X|y,z} ‖ P_{X|z})`.
    pub fn cond_kl(&self) -> f64 {
        self.x_given_yz
            .iter()
            .map(|(w, row, z)| w * kl_raw(row, &self.x_given_z[*z]))
            .sum()
    }
}

/// All five divergence terms (plus the conditional Lautum) at order α.
pub fn bound_terms_discrete(t: &JointTensor3, a: AlphaOrder) -> Result<DiscreteBoundTerms> {
    a.require_unit()?;
    let c = ConditionedChain::new(t)?;
    Ok(DiscreteBoundTerms {
        renyi: c.renyi_term(a),
        js: c.js_term(a)?,
        sibson: c.sibson_term(a)?,
        mi_gap: c.mi_gap(),
        lautum_gap: c.lautum_gap(),
        cond_lautum: c.cond_lautum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::binary_entropy;

    fn alpha(a: f64) -> AlphaOrder {
        AlphaOrder::unit(a).unwrap()
    }

    fn reference_q2() -> JointTensor3 {
        let spec = MarkovChainSpec::qsc(Pmf::new(vec![0.3, 0.7]).unwrap(), 0.15, 0.05).unwrap();
        chain_joint(&spec).unwrap()
    }

    #[test]
    fn qsc_shapes() {
        let id = qsc_matrix(2, 0.0).unwrap();
        assert_eq!(id.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let w = qsc_matrix(3, 0.3).unwrap();
        for i in 0..3 {
            let mut row = w.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            assert!((row[0] - 0.15).abs() < 1e-15 && (row[1] - 0.15).abs() < 1e-15);
            assert!((w.get(i, i) - 0.7).abs() < 1e-15);
        }
        let b = qsc_matrix(2, 0.15).unwrap();
        assert_eq!(b.to_rows(), vec![vec![0.85, 0.15], vec![0.15, 0.85]]);
        assert!(matches!(qsc_matrix(2, 1.0), Err(Error::Domain(_))));
        assert!(matches!(qsc_matrix(2, -0.1), Err(Error::Domain(_))));
        assert!(matches!(qsc_matrix(1, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn channel_validation_names_row() {
        let err = ChannelMatrix::from_rows(&[vec![0.5, 0.5], vec![0.6, 0.6]]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("1.2"), "{msg}");
    }

    #[test]
    fn composition() {
        let w = qsc_matrix(4, 0.2).unwrap();
        assert_eq!(compose_channels(&w, &ChannelMatrix::identity(4).unwrap()).unwrap(), w);
        // 2x2 product by hand: crossover 0.15*0.95 + 0.05*0.85
        let c = compose_channels(&qsc_matrix(2, 0.15).unwrap(), &qsc_matrix(2, 0.05).unwrap()).unwrap();
        assert!((c.get(0, 1) - 0.185).abs() < 1e-15);
        assert!((c.get(1, 0) - 0.185).abs() < 1e-15);
        // cascaded q-ary symmetric channels stay q-ary symmetric
        let c = compose_channels(&qsc_matrix(5, 0.15).unwrap(), &qsc_matrix(5, 0.05).unwrap()).unwrap();
        let off = c.get(0, 1);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!((c.get(i, j) - off).abs() < 1e-15);
                }
            }
        }
        assert!(compose_channels(&qsc_matrix(2, 0.1).unwrap(), &qsc_matrix(3, 0.1).unwrap()).is_err());
    }

    #[test]
    fn chain_joint_marginals() {
        let t = reference_q2();
        let yx = t.marginal_yx();
        let expected = [[0.255, 0.045], [0.105, 0.595]];
        for y in 0..2 {
            for x in 0..2 {
                assert!((yx.get(y, x) - expected[y][x]).abs() < 1e-15);
            }
        }
        let py = yx.marginal_u();
        assert!((py.probs()[0] - 0.3).abs() < 1e-15);

        let spec = MarkovChainSpec::new(
            Pmf::point_mass(3, 2).unwrap(),
            ChannelMatrix::identity(3).unwrap(),
            ChannelMatrix::identity(3).unwrap(),
        )
        .unwrap();
        let t = chain_joint(&spec).unwrap();
        assert_eq!(t.get(2, 2, 2), 1.0);
    }

    #[test]
    fn chain_dimension_errors() {
        let prior = Pmf::uniform(3).unwrap();
        assert!(MarkovChainSpec::new(prior.clone(), qsc_matrix(2, 0.1).unwrap(), qsc_matrix(2, 0.1).unwrap())
            .is_err());
        let w1 = ChannelMatrix::new(3, 2, vec![0.5; 6]).unwrap();
        assert!(MarkovChainSpec::new(prior, w1, qsc_matrix(3, 0.1).unwrap()).is_err());
    }

    #[test]
    fn bayes_risks() {
        let indep = JointPmf::product(&Pmf::uniform(2).unwrap(), &Pmf::new(vec![0.3, 0.7]).unwrap());
        assert!((bayes_risk_01(&indep) - 0.5).abs() < 1e-15);
        let bij = JointPmf::from_rows(&[vec![0.0, 0.4], vec![0.6, 0.0]]).unwrap();
        assert_eq!(bayes_risk_01(&bij), 0.0);
        let t = reference_q2();
        // column maxima 0.255 and 0.595
        assert!((bayes_risk_01(&t.marginal_yx()) - 0.15).abs() < 1e-12);
        assert!((excess_risk_01(&t).unwrap() - 0.035).abs() < 1e-12);
    }

    #[test]
    fn identity_second_channel_zeroes_everything() {
        let spec = MarkovChainSpec::new(
            Pmf::new(vec![0.2, 0.5, 0.3]).unwrap(),
            qsc_matrix(3, 0.2).unwrap(),
            ChannelMatrix::identity(3).unwrap(),
        )
        .unwrap();
        let t = chain_joint(&spec).unwrap();
        let terms = bound_terms_discrete(&t, alpha(0.4)).unwrap();
        assert_eq!(terms.renyi, 0.0);
        assert_eq!(terms.js, 0.0);
        assert_eq!(terms.sibson, 0.0);
        assert_eq!(terms.mi_gap, 0.0);
        assert_eq!(terms.lautum_gap, 0.0);
        assert_eq!(terms.cond_lautum, 0.0);
        assert_eq!(excess_risk_01(&t).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_target_zeroes_alpha_terms() {
        let spec = MarkovChainSpec::qsc(Pmf::point_mass(3, 1).unwrap(), 0.15, 0.05).unwrap();
        let t = chain_joint(&spec).unwrap();
        let terms = bound_terms_discrete(&t, alpha(0.6)).unwrap();
        assert_eq!(terms.renyi, 0.0);
        assert_eq!(terms.js, 0.0);
        assert_eq!(terms.sibson, 0.0);
        assert_eq!(terms.mi_gap, 0.0);
    }

    #[test]
    fn q2_mi_gap_matches_entropy_identity() {
        let t = reference_q2();
        let terms = bound_terms_discrete(&t, alpha(0.5)).unwrap();
        // I(X;Y) = H_b(0.3*0.85 + 0.7*0.15 ... ) computed through p ⋆ ε
        let conv = |p: f64, e: f64| p * (1.0 - e) + (1.0 - p) * e;
        let oracle = (binary_entropy(conv(0.3, 0.15)) - binary_entropy(0.15))
            - (binary_entropy(conv(0.3, 0.185)) - binary_entropy(0.185));
        assert!((terms.mi_gap - oracle).abs() < 1e-12);
        assert!((terms.mi_gap - 0.0486).abs() < 5e-3);
    }

    #[test]
    fn mi_gap_chain_rule_and_renyi_limit() {
        let spec = MarkovChainSpec::qsc(Pmf::new(vec![0.25, 0.1, 0.4, 0.15, 0.1]).unwrap(), 0.15, 0.05).unwrap();
        let t = chain_joint(&spec).unwrap();
        let c = ConditionedChain::new(&t).unwrap();
        assert!((c.mi_gap() - c.cond_kl()).abs() < 1e-10);
        let r = c.renyi_term(alpha(0.9999));
        assert!((r - c.mi_gap()).abs() < 1e-3 * c.mi_gap());
    }

    #[test]
    fn js_term_respects_binary_entropy() {
        let t = reference_q2();
        let c = ConditionedChain::new(&t).unwrap();
        for a in [1e-4, 0.01, 0.5, 0.99, 1.0 - 1e-4] {
            let js = c.js_term(alpha(a)).unwrap();
            assert!(js >= 0.0 && js <= binary_entropy(a));
        }
        assert!(c.js_term(alpha(1e-6)).unwrap() < 1e-5);
    }

    #[test]
    fn terms_invariant_under_relabeling() {
        let spec = MarkovChainSpec::qsc(Pmf::new(vec![0.4, 0.2, 0.4]).unwrap(), 0.15, 0.05).unwrap();
        let t = chain_joint(&spec).unwrap();
        let p = t.permuted(&[2, 0, 1], &[1, 2, 0], &[0, 2, 1]).unwrap();
        let a = bound_terms_discrete(&t, alpha(0.3)).unwrap();
        let b = bound_terms_discrete(&p, alpha(0.3)).unwrap();
        for (x, y) in [
            (a.renyi, b.renyi),
            (a.js, b.js),
            (a.sibson, b.sibson),
            (a.mi_gap, b.mi_gap),
            (a.cond_lautum, b.cond_lautum),
        ] {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_behaviour() {
        let cfg = DirichletConfig { q: 10, concentration: 2.0, seed: 42 };
        let a = dirichlet_prior(&cfg).unwrap();
        assert_eq!(a, dirichlet_prior(&cfg).unwrap());
        assert!((a.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let flat = dirichlet_prior(&DirichletConfig { q: 10, concentration: 1e4, seed: 3 }).unwrap();
        assert!(flat.probs().iter().all(|p| (p - 0.1).abs() < 0.1));
        assert!(dirichlet_prior(&DirichletConfig { q: 10, concentration: 0.0, seed: 1 }).is_err());
    }

    #[test]
    fn dirichlet_golden_vector() {
        let golden = [
            0.09245298686450411,
            0.055126551763814854,
            0.04261164037144085,
            0.02655124195247837,
            0.24178883157648381,
            0.06680586670918452,
            0.2311324468789729,
            0.09865755946412741,
            0.08087378828779744,
            0.0639990861311958,
        ];
        let p = dirichlet_prior(&DirichletConfig { q: 10, concentration: 2.0, seed: 42 }).unwrap();
        assert_eq!(p.probs(), &golden);
    }

    #[test]
    fn chain_sums_over_z_recover_first_link() {
        let spec = MarkovChainSpec::qsc(Pmf::new(vec![0.25, 0.1, 0.4, 0.15, 0.1]).unwrap(), 0.15, 0.05).unwrap();
        let t = chain_joint(&spec).unwrap();
        for y in 0..5 {
            for x in 0..5 {
                let s: f64 = (0..5).map(|z| t.get(y, x, z)).sum();
                assert!((s - spec.prior.probs()[y] * spec.w1.get(y, x)).abs() < 1e-14);
            }
        }
    }
}
