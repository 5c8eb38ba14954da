//! Matrices between lattice spaces.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, LatticeError, Result};
use crate::lattice::{LatticeSpace, LatticeVector, RawSpace};

/// An `m × n` real matrix from `domain` (dim `n`) to `codomain` (dim `m`).
/// Column `i` is the image of the atom `δ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOperator {
    domain: LatticeSpace,
    codomain: LatticeSpace,
    data: Vec<f64>,
}

impl LatticeOperator {
    pub fn new(domain: LatticeSpace, codomain: LatticeSpace, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(codomain.dim(), rows.len())?;
        let mut data = Vec::with_capacity(domain.dim() * codomain.dim());
        for row in rows {
            check_dim(domain.dim(), row.len())?;
            data.extend(row);
        }
        Self::from_row_major(domain, codomain, data)
    }

    pub fn from_row_major(domain: LatticeSpace, codomain: LatticeSpace, data: Vec<f64>) -> Result<Self> {
        check_dim(domain.dim() * codomain.dim(), data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(LatticeError::NonFinite(i));
        }
        Ok(Self { domain, codomain, data })
    }

    pub fn from_columns(domain: LatticeSpace, codomain: LatticeSpace, columns: &[Vec<f64>]) -> Result<Self> {
        check_dim(domain.dim(), columns.len())?;
        let (n, m) = (domain.dim(), codomain.dim());
        let mut data = vec![0.0; n * m];
        for (i, c) in columns.iter().enumerate() {
            check_dim(m, c.len())?;
            for t in 0..m {
                data[t * n + i] = c[t];
            }
        }
        Self::from_row_major(domain, codomain, data)
    }

    pub fn identity(space: LatticeSpace) -> Self {
        let n = space.dim();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { domain: space.clone(), codomain: space, data }
    }

    pub fn domain(&self) -> &LatticeSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &LatticeSpace {
        &self.codomain
    }

    /// Domain dimension.
    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    /// Codomain dimension.
    pub fn m(&self) -> usize {
        self.codomain.dim()
    }

    pub fn entry(&self, t: usize, i: usize) -> f64 {
        self.data[t * self.n() + i]
    }

    /// Row-major entries.
    pub fn matrix(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let n = self.n();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.m()).map(|t| self.row(t).to_vec()).collect()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.m()).map(|t| self.entry(t, i)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.column(i)).collect()
    }

    pub fn apply(&self, x: &LatticeVector) -> Result<LatticeVector> {
        check_dim(self.n(), x.dim())?;
        LatticeVector::new(self.apply_slice(x))
    }

    pub(crate) fn apply_slice(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        self.data.chunks_exact(n).map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub(crate) fn apply_transpose_slice(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for (r, &yt) in self.data.chunks_exact(n).zip(y) {
            for (o, a) in out.iter_mut().zip(r) {
                *o += a * yt;
            }
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    /// Entrywise absolute value; this is `|T|` for coordinatewise lattices.
    pub fn modulus(&self) -> LatticeOperator {
        self.map_entries(f64::abs)
    }

    pub fn scale(&self, lambda: f64) -> LatticeOperator {
        self.map_entries(|v| lambda * v)
    }

    pub(crate) fn map_entries(&self, f: impl Fn(f64) -> f64) -> LatticeOperator {
        LatticeOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sub(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        check_dim(self.n(), other.n())?;
        check_dim(self.m(), other.m())?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(LatticeOperator { domain: self.domain.clone(), codomain: self.codomain.clone(), data })
    }

    /// Same matrix, new spaces of the same dimensions.
    pub fn with_spaces(&self, domain: LatticeSpace, codomain: LatticeSpace) -> Result<LatticeOperator> {
        check_dim(self.n(), domain.dim())?;
        check_dim(self.m(), codomain.dim())?;
        Ok(LatticeOperator { domain, codomain, data: self.data.clone() })
    }

    /// Column supports: `supports[i]` lists the rows where column `i` is nonzero.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|i| (0..self.m()).filter(|&t| self.entry(t, i) != 0.0).collect()).collect()
    }

    /// Every row has at most one nonzero entry, i.e. the columns are disjointly supported.
    pub fn has_disjoint_columns(&self) -> bool {
        (0..self.m()).all(|t| self.row(t).iter().filter(|v| **v != 0.0).count() <= 1)
    }

    /// `0 ≤ self ≤ other` entrywise.
    pub fn is_dominated_by(&self, other: &LatticeOperator) -> bool {
        self.data.len() == other.data.len() && self.data.iter().zip(&other.data).all(|(&s, &t)| s >= 0.0 && s <= t)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawOperator = serde_json::from_str(s).map_err(|e| LatticeError::Parse(e.to_string()))?;
        Self::try_from(raw)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let raw: RawOperator = serde_json::from_value(v).map_err(|e| LatticeError::Parse(e.to_string()))?;
        Self::try_from(raw)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("operator serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawOperator {
    domain: RawSpace,
    codomain: RawSpace,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawOperator> for LatticeOperator {
    type Error = LatticeError;
    fn try_from(raw: RawOperator) -> Result<Self> {
        let domain = LatticeSpace::try_from(raw.domain)?;
        let codomain = LatticeSpace::try_from(raw.codomain)?;
        LatticeOperator::new(domain, codomain, raw.matrix)
    }
}

impl From<LatticeOperator> for RawOperator {
    fn from(op: LatticeOperator) -> RawOperator {
        let matrix = op.rows();
        RawOperator { domain: op.domain.into(), codomain: op.codomain.into(), matrix }
    }
}

impl Serialize for LatticeOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawOperator::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawOperator::deserialize(d)?;
        LatticeOperator::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// Entrywise `|T|`.
pub fn modulus(t: &LatticeOperator) -> LatticeOperator {
    t.modulus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l2(n: usize) -> LatticeSpace {
        LatticeSpace::lp(n, 2.0).unwrap()
    }

    #[test]
    fn columns_are_images_of_atoms() {
        let t = LatticeOperator::new(l2(2), l2(3), vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        for i in 0..2 {
            let img = t.apply(&LatticeVector::atom(2, i).unwrap()).unwrap();
            assert_eq!(img.as_slice(), t.column(i).as_slice());
        }
        assert_eq!(t.apply_transpose_slice(&[1.0, 0.0, 1.0]), vec![6.0, 8.0]);
    }

    #[test]
    fn modulus_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = LatticeOperator::new(l2(2), l2(2), vec![vec![s, -s], vec![-s, s]]).unwrap();
        let m = t.modulus();
        assert!(m.matrix().iter().all(|&v| v == s));
        assert!(m.is_positive());
        assert_eq!(m.modulus(), m);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            LatticeOperator::new(l2(2), l2(1), vec![vec![1.0]]),
            Err(LatticeError::DimensionMismatch { .. })
        ));
        let bad = r#"{"domain":{"dim":2,"norm":{"kind":"lp","p":2}},"codomain":{"dim":1,"norm":{"kind":"sup"}},"matrix":[[1,2,3]]}"#;
        assert!(matches!(LatticeOperator::from_json_str(bad), Err(LatticeError::DimensionMismatch { .. })));
        assert!(matches!(LatticeOperator::from_json_str("{"), Err(LatticeError::Parse(_))));
    }

    #[test]
    fn json_round_trip_and_meta_is_ignored() {
        let txt = r#"{"domain":{"dim":2,"norm":{"kind":"lp","p":"inf"}},"codomain":{"dim":1,"norm":{"kind":"weighted_lp","p":1,"weights":[0.5]}},"matrix":[[1,2]],"meta":{"kind":"x"}}"#;
        let t = LatticeOperator::from_json_str(txt).unwrap();
        let again = LatticeOperator::from_json_value(t.to_json_value()).unwrap();
        assert_eq!(t, again);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

        #[test]
        fn modulus_dominates_images(entries in proptest::collection::vec(-3.0f64..3.0, 12), x in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let t = LatticeOperator::from_row_major(l2(4), l2(3), entries).unwrap();
            let x = LatticeVector::new(x).unwrap();
            let lhs = t.apply(&x).unwrap().abs();
            let rhs = t.modulus().apply(&x.abs()).unwrap();
            for (a, b) in lhs.iter().zip(rhs.iter()) {
                prop_assert!(*a <= *b + 1e-12);
            }
        }
    }
}
