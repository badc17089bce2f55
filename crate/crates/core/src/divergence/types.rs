use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-12;

fn check_entries(probs: &[f64], what: &str) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what} entry {i} is {p}; entries must be finite and nonnegative"
            )));
        }
        total += p;
    }
    Ok(total)
}

/// A probability mass function over a finite alphabet `{0, .., q-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Validates `probs` without touching it. Vectors whose mass is off by more
    /// than [`NORMALIZATION_TOL`] are rejected; use [`Pmf::renormalize`] to rescale.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total = check_entries(&probs, "pmf")?;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "pmf sums to {total:.17}, not 1 (tolerance {NORMALIZATION_TOL:e})"
            )));
        }
        Ok(Pmf(probs))
    }

    /// Divides nonnegative weights by their total.
    pub fn renormalize(weights: Vec<f64>) -> Result<Self> {
        let total = check_entries(&weights, "weight vector")?;
        if total <= 0.0 {
            return Err(Error::Degenerate("weight vector has zero total mass".into()));
        }
        Ok(Pmf(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidDistribution("alphabet size must be at least 1".into()));
        }
        Ok(Pmf(vec![1.0 / q as f64; q]))
    }

    pub fn point_mass(q: usize, at: usize) -> Result<Self> {
        if at >= q {
            return Err(Error::Dimension(format!("point mass at {at} outside alphabet of size {q}")));
        }
        let mut probs = vec![0.0; q];
        probs[at] = 1.0;
        Ok(Pmf(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        Pmf::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Joint pmf over `U x V`, stored row-major with rows indexed by `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "joint of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                probs.len()
            )));
        }
        let total = check_entries(&probs, "joint pmf")?;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint pmf sums to {total:.17}, not 1 (tolerance {NORMALIZATION_TOL:e})"
            )));
        }
        Ok(JointPmf { rows, cols, probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged joint pmf rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Rescales nonnegative weights of the given shape to unit mass.
    pub fn renormalize(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || weights.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "joint of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                weights.len()
            )));
        }
        let p = Pmf::renormalize(weights)?;
        Ok(JointPmf { rows, cols, probs: p.into_vec() })
    }

    /// The product measure `a ⊗ b`.
    pub fn product(a: &Pmf, b: &Pmf) -> Self {
        let probs = a
            .probs()
            .iter()
            .flat_map(|&pa| b.probs().iter().map(move |&pb| pa * pb))
            .collect();
        JointPmf { rows: a.len(), cols: b.len(), probs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.probs[u * self.cols + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.probs[u * self.cols..(u + 1) * self.cols]
    }

    /// Row-major flattening, usable wherever a plain pmf over `U x V` is wanted.
    pub fn flat(&self) -> &[f64] {
        &self.probs
    }

    pub fn marginal_u(&self) -> Pmf {
        Pmf(self.probs.chunks(self.cols).map(|r| r.iter().sum()).collect())
    }

    pub fn marginal_v(&self) -> Pmf {
        let mut out = vec![0.0; self.cols];
        for r in self.probs.chunks(self.cols) {
            for (o, &p) in out.iter_mut().zip(r) {
                *o += p;
            }
        }
        Pmf(out)
    }

    /// Product of this joint's own marginals.
    pub fn marginal_product(&self) -> JointPmf {
        JointPmf::product(&self.marginal_u(), &self.marginal_v())
    }

    /// Applies the same permutations to both alphabets; `perm_u[i]` is the new index of row `i`.
    pub fn permuted(&self, perm_u: &[usize], perm_v: &[usize]) -> Result<JointPmf> {
        if perm_u.len() != self.rows || perm_v.len() != self.cols {
            return Err(Error::Dimension("permutation length does not match joint shape".into()));
        }
        let mut probs = vec![0.0; self.probs.len()];
        for u in 0..self.rows {
            for v in 0..self.cols {
                probs[perm_u[u] * self.cols + perm_v[v]] = self.get(u, v);
            }
        }
        Ok(JointPmf { rows: self.rows, cols: self.cols, probs })
    }
}

/// A conditional law `P_{V|U}` together with the weighting law `P_U`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalKernel {
    rows: Vec<Pmf>,
    weight: Pmf,
}

impl ConditionalKernel {
    pub fn new(rows: Vec<Pmf>, weight: Pmf) -> Result<Self> {
        if rows.len() != weight.len() {
            return Err(Error::Dimension(format!(
                "kernel has {} rows but weight has length {}",
                rows.len(),
                weight.len()
            )));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Dimension("kernel rows have different lengths".into()));
        }
        Ok(ConditionalKernel { rows, weight })
    }

    /// Splits a joint into `P_{V|U}` and `P_U`. Rows with zero mass become
    /// uniform placeholders; they carry zero weight and never contribute.
    pub fn from_joint(j: &JointPmf) -> Self {
        let weight = j.marginal_u();
        let rows = (0..j.rows())
            .map(|u| {
                Pmf::renormalize(j.row(u).to_vec())
                    .unwrap_or_else(|_| Pmf(vec![1.0 / j.cols() as f64; j.cols()]))
            })
            .collect();
        ConditionalKernel { rows, weight }
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    pub fn row(&self, u: usize) -> &Pmf {
        &self.rows[u]
    }

    pub fn weight(&self) -> &Pmf {
        &self.weight
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }
}

/// Order parameter of the Rényi, α-JS and Sibson families.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AlphaOrder(f64);

impl AlphaOrder {
    /// Any order in `(0, 1) ∪ (1, ∞)`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
            return Err(Error::Domain(format!("order {alpha} must lie in (0,1) or (1,inf)")));
        }
        Ok(AlphaOrder(alpha))
    }

    /// An order strictly inside `(0, 1)`, as every bound formula requires.
    pub fn unit(alpha: f64) -> Result<Self> {
        let a = Self::new(alpha)?;
        a.require_unit()?;
        Ok(a)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_unit(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    pub fn require_unit(self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::Domain(format!("order {} must lie strictly inside (0,1)", self.0)))
        }
    }
}

/// Binary entropy `H_b(α)` in nats.
pub fn binary_entropy(alpha: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(alpha) + term(1.0 - alpha)
}
