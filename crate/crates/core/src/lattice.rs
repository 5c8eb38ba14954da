//! Coordinatewise lattices on ℝⁿ: vectors, exponents, lattice norms and their duals.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, LatticeError, Result};

/// A finite real vector with the coordinatewise order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatticeVector(Vec<f64>);

impl LatticeVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LatticeError::Empty);
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LatticeError::NonFinite(i));
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// The atom `δ_i` of a `dim`-dimensional space.
    pub fn atom(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(LatticeError::DimensionMismatch { expected: dim, found: i + 1 });
        }
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn abs(&self) -> Self {
        Self(self.0.iter().map(|v| v.abs()).collect())
    }

    pub fn pos_part(&self) -> Self {
        Self(self.0.iter().map(|v| v.max(0.0)).collect())
    }

    pub fn neg_part(&self) -> Self {
        Self(self.0.iter().map(|v| (-v).max(0.0)).collect())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self(self.0.iter().map(|v| lambda * v).collect())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// `|x| ∧ |y| = 0`, i.e. the supports do not meet.
    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        check_dim(self.dim(), other.dim())?;
        Ok(disjoint_slices(&self.0, &other.0))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect()))
    }
}

pub(crate) fn disjoint_slices(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).all(|(a, b)| *a == 0.0 || *b == 0.0)
}

impl Deref for LatticeVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for LatticeVector {
    type Error = LatticeError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LatticeVector> for Vec<f64> {
    fn from(v: LatticeVector) -> Vec<f64> {
        v.0
    }
}

/// Coordinatewise `|x|`, `x ∧ y`, `x ∨ y`, `x⁺`, `x⁻`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOps {
    pub abs: LatticeVector,
    pub meet: LatticeVector,
    pub join: LatticeVector,
    pub pos_part: LatticeVector,
    pub neg_part: LatticeVector,
}

pub fn lattice_ops(x: &LatticeVector, y: &LatticeVector) -> Result<LatticeOps> {
    Ok(LatticeOps {
        abs: x.abs(),
        meet: x.meet(y)?,
        join: x.join(y)?,
        pos_part: x.pos_part(),
        neg_part: x.neg_part(),
    })
}

/// A norm exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(LatticeError::InvalidExponent(p))
        }
    }

    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t.parse().map_err(|_| LatticeError::Parse(format!("bad exponent '{t}'")))?;
                Exponent::new(p)
            }
        }
    }
}

/// A monotone norm on ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    Lp(Exponent),
    /// `(Σ w_i |x_i|^p)^{1/p}` with `p < ∞`.
    WeightedLp { p: f64, weights: Vec<f64> },
    Sup,
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<Self> {
        Ok(NormSpec::Lp(Exponent::new(p)?))
    }

    pub fn weighted(p: f64, weights: Vec<f64>) -> Result<Self> {
        match Exponent::new(p)? {
            Exponent::Infinity => Err(LatticeError::InvalidExponent(p)),
            Exponent::Finite(_) => {
                if weights.is_empty() {
                    return Err(LatticeError::InvalidWeights("empty".into()));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(LatticeError::InvalidWeights(format!("weight {w} is not positive")));
                }
                Ok(NormSpec::WeightedLp { p, weights })
            }
        }
    }

    /// The exponent; `Sup` reports `∞`.
    pub fn exponent(&self) -> Exponent {
        match self {
            NormSpec::Lp(e) => *e,
            NormSpec::WeightedLp { p, .. } => Exponent::Finite(*p),
            NormSpec::Sup => Exponent::Infinity,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            NormSpec::WeightedLp { weights, .. } => Some(weights),
            _ => None,
        }
    }

    /// True for `L1` and weighted `L1`.
    pub fn is_l1_type(&self) -> bool {
        self.exponent() == Exponent::Finite(1.0)
    }

    pub fn is_sup_type(&self) -> bool {
        self.exponent() == Exponent::Infinity
    }
}

impl FromStr for NormSpec {
    type Err = LatticeError;
    /// Accepts `sup`, `lp:<p>` and `lp:inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "sup" {
            return Ok(NormSpec::Sup);
        }
        match s.strip_prefix("lp:") {
            Some(p) => Ok(NormSpec::Lp(p.parse()?)),
            None => Err(LatticeError::Parse(format!("unknown norm '{s}'"))),
        }
    }
}

/// One-coordinate contribution rule of a norm: power sums or maxima.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Kernel<'a> {
    /// `(Σ c_i |x_i|^p)^{1/p}` with `c_i = w_i^e`.
    Power { p: f64, weights: Option<&'a [f64]>, weight_exp: f64 },
    /// `max |x_i| / w_i`.
    Max { weights: Option<&'a [f64]> },
}

#[inline]
pub(crate) fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v.abs()
    } else if p == 2.0 {
        v * v
    } else {
        v.abs().powf(p)
    }
}

impl Kernel<'_> {
    #[inline]
    pub(crate) fn term(&self, i: usize, v: f64) -> f64 {
        match *self {
            Kernel::Power { p, weights, weight_exp } => match weights {
                None => pow_abs(v, p),
                Some(w) if weight_exp == 1.0 => w[i] * pow_abs(v, p),
                Some(w) => w[i].powf(weight_exp) * pow_abs(v, p),
            },
            Kernel::Max { weights } => match weights {
                None => v.abs(),
                Some(w) => v.abs() / w[i],
            },
        }
    }

    #[inline]
    pub(crate) fn fold(&self, acc: f64, term: f64) -> f64 {
        match self {
            Kernel::Power { .. } => acc + term,
            Kernel::Max { .. } => acc.max(term),
        }
    }

    #[inline]
    pub(crate) fn finish(&self, acc: f64) -> f64 {
        match *self {
            Kernel::Power { p, .. } => {
                if p == 1.0 {
                    acc
                } else if p == 2.0 {
                    acc.sqrt()
                } else {
                    acc.powf(1.0 / p)
                }
            }
            Kernel::Max { .. } => acc,
        }
    }

    #[inline]
    pub(crate) fn accumulate(&self, acc: f64, i: usize, v: f64) -> f64 {
        self.fold(acc, self.term(i, v))
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, &v) in x.iter().enumerate() {
            acc = self.accumulate(acc, i, v);
        }
        self.finish(acc)
    }
}

/// A dimension together with a lattice norm.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpace {
    dim: usize,
    norm: NormSpec,
}

impl LatticeSpace {
    pub fn new(dim: usize, norm: NormSpec) -> Result<Self> {
        if dim == 0 {
            return Err(LatticeError::Empty);
        }
        match &norm {
            NormSpec::WeightedLp { p, weights } => {
                check_dim(dim, weights.len())?;
                NormSpec::weighted(*p, weights.clone())?;
            }
            NormSpec::Lp(Exponent::Finite(p)) => {
                Exponent::new(*p)?;
            }
            _ => {}
        }
        Ok(Self { dim, norm })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, NormSpec::lp(p)?)
    }

    pub fn sup(dim: usize) -> Result<Self> {
        Self::new(dim, NormSpec::Sup)
    }

    pub fn weighted(p: f64, weights: Vec<f64>) -> Result<Self> {
        let dim = weights.len();
        Self::new(dim, NormSpec::weighted(p, weights)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm
    }

    pub(crate) fn kernel(&self) -> Kernel<'_> {
        match &self.norm {
            NormSpec::Lp(Exponent::Finite(p)) => Kernel::Power { p: *p, weights: None, weight_exp: 1.0 },
            NormSpec::WeightedLp { p, weights } => Kernel::Power { p: *p, weights: Some(weights), weight_exp: 1.0 },
            NormSpec::Lp(Exponent::Infinity) | NormSpec::Sup => Kernel::Max { weights: None },
        }
    }

    pub(crate) fn dual_kernel(&self) -> Kernel<'_> {
        match &self.norm {
            NormSpec::Lp(Exponent::Infinity) | NormSpec::Sup => Kernel::Power { p: 1.0, weights: None, weight_exp: 1.0 },
            NormSpec::Lp(Exponent::Finite(p)) => {
                if *p == 1.0 {
                    Kernel::Max { weights: None }
                } else {
                    Kernel::Power { p: *p / (*p - 1.0), weights: None, weight_exp: 1.0 }
                }
            }
            NormSpec::WeightedLp { p, weights } => {
                if *p == 1.0 {
                    Kernel::Max { weights: Some(weights) }
                } else {
                    let q = *p / (*p - 1.0);
                    Kernel::Power { p: q, weights: Some(weights), weight_exp: 1.0 - q }
                }
            }
        }
    }

    /// The dual space, when it is expressible as a `NormSpec`
    /// (weighted `L1` has the dual norm `max |f_i|/w_i`, which is not).
    pub fn dual_space(&self) -> Option<LatticeSpace> {
        let norm = match &self.norm {
            NormSpec::Lp(e) => NormSpec::Lp(e.conjugate()),
            NormSpec::Sup => NormSpec::Lp(Exponent::Finite(1.0)),
            NormSpec::WeightedLp { p, weights } => {
                if *p == 1.0 {
                    return None;
                }
                let q = *p / (*p - 1.0);
                NormSpec::WeightedLp { p: q, weights: weights.iter().map(|w| w.powf(1.0 - q)).collect() }
            }
        };
        Some(LatticeSpace { dim: self.dim, norm })
    }

    pub fn norm(&self, x: &LatticeVector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.norm_slice(x))
    }

    pub fn dual_norm(&self, f: &LatticeVector) -> Result<f64> {
        check_dim(self.dim, f.dim())?;
        Ok(self.dual_norm_slice(f))
    }

    pub(crate) fn norm_slice(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.kernel().eval(x)
    }

    pub(crate) fn dual_norm_slice(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.dim);
        self.dual_kernel().eval(f)
    }

    /// `‖1_S‖` for the coordinate set `S`.
    pub(crate) fn indicator_norm(&self, idx: &[usize]) -> f64 {
        let k = self.kernel();
        let mut acc = 0.0;
        for &i in idx {
            acc = k.accumulate(acc, i, 1.0);
        }
        k.finish(acc)
    }

    /// A functional `z*` with `dual_norm(z*) = 1` and `⟨z*, x⟩ = ‖x‖`.
    pub fn norming_functional(&self, x: &LatticeVector) -> Result<LatticeVector> {
        check_dim(self.dim, x.dim())?;
        if x.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        let z = match &self.norm {
            NormSpec::Lp(Exponent::Infinity) | NormSpec::Sup => {
                let k = first_argmax(x.iter().map(|v| v.abs()));
                let mut z = vec![0.0; self.dim];
                z[k] = x[k].signum();
                z
            }
            _ => {
                let p = self.norm.exponent().as_f64();
                let w = self.norm.weights();
                let weight = |i: usize| w.map_or(1.0, |w| w[i]);
                if p == 1.0 {
                    x.iter().enumerate().map(|(i, &v)| if v == 0.0 { 0.0 } else { weight(i) * v.signum() }).collect()
                } else {
                    let nx = self.norm_slice(x);
                    x.iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            let r = v / nx;
                            weight(i) * r.signum() * r.abs().powf(p - 1.0)
                        })
                        .collect()
                }
            }
        };
        LatticeVector::new(z)
    }

    /// A unit vector `z` of this space with `⟨f, z⟩ = ‖f‖_*`, i.e. the
    /// norming vector of `f` viewed as a functional. For `f = 0` the
    /// normalized all-ones vector is returned.
    pub fn predual_norming_vector(&self, f: &LatticeVector) -> Result<LatticeVector> {
        check_dim(self.dim, f.dim())?;
        LatticeVector::new(self.predual_on(f, None))
    }

    /// Predual norming vector of `f·1_M`, supported in the mask `M`.
    pub(crate) fn predual_on(&self, f: &[f64], mask: Option<&[bool]>) -> Vec<f64> {
        let inside = |i: usize| mask.map_or(true, |m| m[i]);
        let mut z = vec![0.0; self.dim];
        let zero = (0..self.dim).all(|i| !inside(i) || f[i] == 0.0);
        if zero {
            let idx: Vec<usize> = (0..self.dim).filter(|&i| inside(i)).collect();
            if idx.is_empty() {
                return z;
            }
            let c = 1.0 / self.indicator_norm(&idx);
            for i in idx {
                z[i] = c;
            }
            return z;
        }
        let sgn = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
        match &self.norm {
            NormSpec::Lp(Exponent::Infinity) | NormSpec::Sup => {
                for i in 0..self.dim {
                    if inside(i) {
                        z[i] = sgn(f[i]);
                    }
                }
            }
            _ => {
                let p = self.norm.exponent().as_f64();
                let w = self.norm.weights();
                let weight = |i: usize| w.map_or(1.0, |w| w[i]);
                if p == 1.0 {
                    let k = first_argmax((0..self.dim).map(|i| if inside(i) { f[i].abs() / weight(i) } else { -1.0 }));
                    z[k] = sgn(f[k]) / weight(k);
                } else {
                    let q = p / (p - 1.0);
                    let dk = self.dual_kernel();
                    let mut acc = 0.0;
                    for i in 0..self.dim {
                        if inside(i) {
                            acc = dk.accumulate(acc, i, f[i]);
                        }
                    }
                    let s = dk.finish(acc);
                    for i in 0..self.dim {
                        if inside(i) && f[i] != 0.0 {
                            let v = w.map_or(1.0, |w| w[i].powf(1.0 - q));
                            z[i] = v * sgn(f[i]) * (f[i].abs() / s).powf(q - 1.0);
                        }
                    }
                }
            }
        }
        z
    }
}

/// Index of the first maximal element.
pub(crate) fn first_argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Coordinatewise `(|x_i|^p + |y_i|^p)^{1/p}`, or `max(|x_i|, |y_i|)` for `p = ∞`.
pub fn p_sum(x: &LatticeVector, y: &LatticeVector, p: Exponent) -> Result<LatticeVector> {
    check_dim(x.dim(), y.dim())?;
    let v = x
        .iter()
        .zip(y.iter())
        .map(|(&a, &b)| match p {
            Exponent::Infinity => a.abs().max(b.abs()),
            Exponent::Finite(p) if p == 1.0 => a.abs() + b.abs(),
            Exponent::Finite(p) => {
                let m = a.abs().max(b.abs());
                if m == 0.0 {
                    0.0
                } else {
                    m * ((a / m).abs().powf(p) + (b / m).abs().powf(p)).powf(1.0 / p)
                }
            }
        })
        .collect();
    LatticeVector::new(v)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawExponent {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct RawNorm {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<RawExponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawSpace {
    dim: usize,
    norm: RawNorm,
}

impl TryFrom<RawSpace> for LatticeSpace {
    type Error = LatticeError;
    fn try_from(raw: RawSpace) -> Result<Self> {
        let exponent = |p: Option<RawExponent>| -> Result<Exponent> {
            match p {
                None => Err(LatticeError::Parse("missing exponent 'p'".into())),
                Some(RawExponent::Num(v)) => Exponent::new(v),
                Some(RawExponent::Text(t)) => t.parse(),
            }
        };
        let norm = match raw.norm.kind.as_str() {
            "lp" => NormSpec::Lp(exponent(raw.norm.p)?),
            "sup" => NormSpec::Sup,
            "weighted_lp" => {
                let p = match exponent(raw.norm.p)? {
                    Exponent::Finite(p) => p,
                    Exponent::Infinity => return Err(LatticeError::InvalidExponent(f64::INFINITY)),
                };
                let weights = raw.norm.weights.ok_or_else(|| LatticeError::Parse("missing 'weights'".into()))?;
                check_dim(raw.dim, weights.len())?;
                NormSpec::weighted(p, weights)?
            }
            k => return Err(LatticeError::Parse(format!("unknown norm kind '{k}'"))),
        };
        LatticeSpace::new(raw.dim, norm)
    }
}

impl From<LatticeSpace> for RawSpace {
    fn from(s: LatticeSpace) -> RawSpace {
        let norm = match s.norm {
            NormSpec::Lp(Exponent::Finite(p)) => RawNorm { kind: "lp".into(), p: Some(RawExponent::Num(p)), weights: None },
            NormSpec::Lp(Exponent::Infinity) => {
                RawNorm { kind: "lp".into(), p: Some(RawExponent::Text("inf".into())), weights: None }
            }
            NormSpec::WeightedLp { p, weights } => {
                RawNorm { kind: "weighted_lp".into(), p: Some(RawExponent::Num(p)), weights: Some(weights) }
            }
            NormSpec::Sup => RawNorm { kind: "sup".into(), p: None, weights: None },
        };
        RawSpace { dim: s.dim, norm }
    }
}

impl Serialize for LatticeSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpace::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpace::deserialize(d)?;
        LatticeSpace::try_from(raw).map_err(serde::de::Error::custom)
    }
}
