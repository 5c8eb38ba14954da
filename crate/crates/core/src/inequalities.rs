//! The subset-expectation inequality and its consequences, checked exactly
//! by enumeration, plus the sphere net behind the `p`-sum estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, LatticeError, Result};
use crate::lattice::{disjoint_slices, pow_abs, Exponent, LatticeSpace, LatticeVector, NormSpec};
use crate::operator::LatticeOperator;

/// Largest input length handled by exact enumeration.
pub const EXACT_SPLIT_LIMIT: usize = 25;
/// The constant `2^8`.
pub const SPLIT_CONSTANT: f64 = 256.0;
const SLACK: f64 = 1e-12;

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

fn check_nonnegative(b: &[f64]) -> Result<()> {
    if let Some(i) = b.iter().position(|v| !v.is_finite()) {
        return Err(LatticeError::NonFinite(i));
    }
    if let Some(i) = b.iter().position(|v| *v < 0.0) {
        return Err(LatticeError::NegativeEntry(i));
    }
    Ok(())
}

/// Subset sums of `b` indexed by bitmask; each entry adds its elements in index order.
fn subset_sums(b: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; 1 << b.len()];
    for mask in 1usize..t.len() {
        let low = mask.trailing_zeros() as usize;
        t[mask] = t[mask & (mask - 1)] + b[low];
    }
    t
}

/// `2^{−n} Σ_S min(Σ_{i∈S} b_i, Σ_{i∉S} b_i)` over all subsets, exactly.
/// The subsets are split into two halves whose sum tables are combined.
pub fn expected_min_split(b: &[f64]) -> Result<f64> {
    if b.is_empty() {
        return Err(LatticeError::Empty);
    }
    check_nonnegative(b)?;
    if b.len() > EXACT_SPLIT_LIMIT {
        return Err(LatticeError::TooLarge(format!("length {} exceeds {EXACT_SPLIT_LIMIT}", b.len())));
    }
    let h = b.len() / 2;
    let (hi, lo) = b.split_at(h);
    let (hs, ls) = (subset_sums(hi), subset_sums(lo));
    let (hfull, lfull) = (hs[hs.len() - 1], ls[ls.len() - 1]);
    let partial: Vec<f64> = hs
        .par_iter()
        .map(|&a| {
            let ac = hfull - a;
            let mut acc = Neumaier::default();
            for &l in &ls {
                acc.add((a + l).min(ac + (lfull - l)));
            }
            acc.value()
        })
        .collect();
    let mut total = Neumaier::default();
    partial.into_iter().for_each(|v| total.add(v));
    Ok(total.value() / (1u64 << b.len()) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
    pub exact: bool,
}

/// Sampled version of [`expected_min_split`] for long inputs.
pub fn expected_min_split_sampled(b: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if b.is_empty() {
        return Err(LatticeError::Empty);
    }
    check_nonnegative(b)?;
    let total: f64 = b.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
    for _ in 0..samples {
        let mut s = 0.0;
        for &v in b {
            if rng.gen::<bool>() {
                s += v;
            }
        }
        let x = s.min(total - s);
        s1.add(x);
        s2.add(x * x);
    }
    let k = samples.max(1) as f64;
    let mean = s1.value() / k;
    let var = (s2.value() / k - mean * mean).max(0.0);
    Ok(MonteCarloEstimate { mean, std_err: (var / k).sqrt(), samples, exact: false })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `mid / lhs`, or `None` when `lhs = 0`.
    pub ratio: Option<f64>,
}

/// `E ≤ Σb − max b ≤ 2^8·E` with `E` = [`expected_min_split`].
pub fn maxmin_sandwich_check(b: &[f64]) -> Result<SandwichReport> {
    let lhs = expected_min_split(b)?;
    let sum: f64 = b.iter().sum();
    let max = b.iter().fold(0.0f64, |a, v| a.max(*v));
    let mid = sum - max;
    let rhs = SPLIT_CONSTANT * lhs;
    let tol = SLACK * sum.max(1.0);
    let holds = lhs <= mid + tol && mid <= rhs + tol;
    Ok(SandwichReport { lhs, mid, rhs, holds, ratio: (lhs > 0.0).then(|| mid / lhs) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorSplitReport {
    /// Coordinatewise `E_S min(Σ_S f, Σ_{S^c} f)`.
    pub expected_min: Vec<f64>,
    /// Coordinatewise `Σf − ∨f`.
    pub excess: Vec<f64>,
    pub coordinatewise_holds: bool,
    pub norm_lhs: f64,
    pub norm_rhs: f64,
    pub norm_holds: bool,
    pub holds: bool,
}

/// Checks `E_S min(Σ_S f_i, Σ_{S^c} f_i) ≥ 2^{−8}(Σf_i − ∨f_i)` coordinatewise and
/// `E_S ‖min(…)‖ ≥ 2^{−8}‖Σf_i − ∨f_i‖`, enumerating every subset (`n ≤ 20`).
pub fn vector_split_check(fs: &[LatticeVector], space: &LatticeSpace) -> Result<VectorSplitReport> {
    let n = fs.len();
    if n == 0 {
        return Err(LatticeError::Empty);
    }
    if n > 20 {
        return Err(LatticeError::TooLarge(format!("family size {n} exceeds 20")));
    }
    let d = space.dim();
    for f in fs {
        check_dim(d, f.dim())?;
        check_nonnegative(f)?;
    }
    let mut expected_min = Vec::with_capacity(d);
    let mut excess = Vec::with_capacity(d);
    for t in 0..d {
        let b: Vec<f64> = fs.iter().map(|f| f[t]).collect();
        expected_min.push(expected_min_split(&b)?);
        excess.push(b.iter().sum::<f64>() - b.iter().fold(0.0f64, |a, v| a.max(*v)));
    }
    let coordinatewise_holds = expected_min
        .iter()
        .zip(&excess)
        .all(|(e, x)| *e >= x / SPLIT_CONSTANT - SLACK * x.max(1.0));
    let total: Vec<f64> = (0..d).map(|t| fs.iter().map(|f| f[t]).sum()).collect();
    let partial: Vec<f64> = (0u64..1 << n)
        .into_par_iter()
        .map(|mask| {
            let mut s = vec![0.0; d];
            for (i, f) in fs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.iter_mut().zip(f.iter()).for_each(|(a, b)| *a += b);
                }
            }
            let m: Vec<f64> = s.iter().zip(&total).map(|(a, tt)| a.min(tt - a)).collect();
            space.norm_slice(&m)
        })
        .collect();
    let mut acc = Neumaier::default();
    partial.into_iter().for_each(|v| acc.add(v));
    let norm_lhs = acc.value() / (1u64 << n) as f64;
    let norm_rhs = space.norm_slice(&excess) / SPLIT_CONSTANT;
    let norm_holds = norm_lhs >= norm_rhs - SLACK * norm_rhs.max(1.0);
    Ok(VectorSplitReport {
        expected_min,
        excess,
        coordinatewise_holds,
        norm_lhs,
        norm_rhs,
        norm_holds,
        holds: coordinatewise_holds && norm_holds,
    })
}

fn require_positive(t: &LatticeOperator) -> Result<()> {
    if t.is_positive() {
        Ok(())
    } else {
        Err(LatticeError::NotPositive)
    }
}

fn check_family(t: &LatticeOperator, xs: &[LatticeVector]) -> Result<()> {
    if xs.is_empty() {
        return Err(LatticeError::Empty);
    }
    xs.iter().try_for_each(|x| check_dim(t.n(), x.dim()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArbNumberReport {
    /// `‖Σ|Tx_i| − ∨|Tx_i|‖`
    pub sum_minus_join: f64,
    /// `‖(Σ|Tx_i|^p)^{1/p} − T(Σ|x_i|^p)^{1/p}‖`
    pub p_sum_gap: f64,
    /// `256·eps·‖Σx_i‖`
    pub rhs: f64,
    pub holds: bool,
}

fn coordinate_p_sum(vs: &[Vec<f64>], p: Exponent) -> Vec<f64> {
    let d = vs[0].len();
    (0..d)
        .map(|k| match p {
            Exponent::Infinity => vs.iter().fold(0.0f64, |a, v| a.max(v[k].abs())),
            Exponent::Finite(p) => vs.iter().map(|v| pow_abs(v[k], p)).sum::<f64>().powf(1.0 / p),
        })
        .collect()
}

/// For positive `T` with DP defect at most `eps` and a disjoint family `x_i`.
pub fn arb_number_check(t: &LatticeOperator, family: &[LatticeVector], p: f64, eps: f64) -> Result<ArbNumberReport> {
    require_positive(t)?;
    check_family(t, family)?;
    let p = Exponent::new(p)?;
    for i in 0..family.len() {
        for j in 0..i {
            if !disjoint_slices(&family[i], &family[j]) {
                return Err(LatticeError::NotDisjoint);
            }
        }
    }
    let imgs: Vec<Vec<f64>> = family.iter().map(|x| t.apply_slice(x)).collect();
    let m = t.m();
    let smj: Vec<f64> = (0..m)
        .map(|k| imgs.iter().map(|v| v[k].abs()).sum::<f64>() - imgs.iter().fold(0.0f64, |a, v| a.max(v[k].abs())))
        .collect();
    let xs: Vec<Vec<f64>> = family.iter().map(|x| x.to_vec()).collect();
    let img_p = coordinate_p_sum(&imgs, p);
    let t_of_p = t.apply_slice(&coordinate_p_sum(&xs, p));
    let gap: Vec<f64> = img_p.iter().zip(&t_of_p).map(|(a, b)| a - b).collect();
    let sum_x: Vec<f64> = (0..t.n()).map(|k| xs.iter().map(|x| x[k]).sum()).collect();
    let rhs = SPLIT_CONSTANT * eps * t.domain().norm_slice(&sum_x);
    let (a, b) = (t.codomain().norm_slice(&smj), t.codomain().norm_slice(&gap));
    let tol = SLACK * rhs.max(1.0);
    Ok(ArbNumberReport { sum_minus_join: a, p_sum_gap: b, rhs, holds: a <= rhs + tol && b <= rhs + tol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxMinReport {
    /// `‖T(∨x_i) − ∨Tx_i‖`
    pub join_gap: f64,
    /// `‖∧Tx_i − T(∧x_i)‖`
    pub meet_gap: f64,
    /// `256·eps·‖∨x_i‖`
    pub rhs: f64,
    pub holds: bool,
}

fn join_of(vs: &[Vec<f64>]) -> Vec<f64> {
    (0..vs[0].len()).map(|k| vs.iter().fold(f64::NEG_INFINITY, |a, v| a.max(v[k]))).collect()
}

fn meet_of(vs: &[Vec<f64>]) -> Vec<f64> {
    (0..vs[0].len()).map(|k| vs.iter().fold(f64::INFINITY, |a, v| a.min(v[k]))).collect()
}

fn check_positive_family(xs: &[LatticeVector]) -> Result<()> {
    xs.iter().try_for_each(|x| check_nonnegative(x))
}

/// `max{‖T(∨x_i) − ∨Tx_i‖, ‖∧Tx_i − T(∧x_i)‖} ≤ 256·eps·‖∨x_i‖` for positive `x_i`.
pub fn maxmin_operator_check(t: &LatticeOperator, xs: &[LatticeVector], eps: f64) -> Result<MaxMinReport> {
    require_positive(t)?;
    check_family(t, xs)?;
    check_positive_family(xs)?;
    let vs: Vec<Vec<f64>> = xs.iter().map(|x| x.to_vec()).collect();
    let imgs: Vec<Vec<f64>> = vs.iter().map(|x| t.apply_slice(x)).collect();
    let (jx, mx) = (join_of(&vs), meet_of(&vs));
    let tj = t.apply_slice(&jx);
    let jt = join_of(&imgs);
    let join_gap = t.codomain().norm_slice(&tj.iter().zip(&jt).map(|(a, b)| a - b).collect::<Vec<_>>());
    let tm = t.apply_slice(&mx);
    let mt = meet_of(&imgs);
    let meet_gap = t.codomain().norm_slice(&mt.iter().zip(&tm).map(|(a, b)| a - b).collect::<Vec<_>>());
    let rhs = SPLIT_CONSTANT * eps * t.domain().norm_slice(&jx);
    let tol = SLACK * rhs.max(1.0);
    Ok(MaxMinReport { join_gap, meet_gap, rhs, holds: join_gap.max(meet_gap) <= rhs + tol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IteratedJoinReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖T(∨x_i) − ∨Tx_i‖ ≤ eps_mp·⌈log₂ n⌉·n` for positive `x_i` in the unit ball.
pub fn iterated_join_check(t: &LatticeOperator, xs: &[LatticeVector], eps_mp: f64) -> Result<IteratedJoinReport> {
    require_positive(t)?;
    check_family(t, xs)?;
    check_positive_family(xs)?;
    let vs: Vec<Vec<f64>> = xs.iter().map(|x| x.to_vec()).collect();
    let imgs: Vec<Vec<f64>> = vs.iter().map(|x| t.apply_slice(x)).collect();
    let tj = t.apply_slice(&join_of(&vs));
    let jt = join_of(&imgs);
    let lhs = t.codomain().norm_slice(&tj.iter().zip(&jt).map(|(a, b)| a - b).collect::<Vec<_>>());
    let n = xs.len();
    let log = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() };
    let rhs = eps_mp * log as f64 * n as f64;
    Ok(IteratedJoinReport { lhs, rhs, holds: lhs <= rhs + SLACK * rhs.max(1.0) })
}

/// Points on `{x^q + y^q = 1, x, y ≥ 0}` from `(1, 0)` to `(0, 1)` at equal arclength.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereNet {
    pub q: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub points: Vec<(f64, f64)>,
    /// Arclength of the curve; this is the covering constant `C_q ≤ 2`.
    pub arclength: f64,
}

fn curve_point(q: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c.max(0.0).powf(2.0 / q), s.max(0.0).powf(2.0 / q))
}

/// Fine polyline in `θ`, with `x = cos^{2/q}θ`, `y = sin^{2/q}θ`, and its cumulative arclength.
fn fine_curve(q: f64, samples: usize) -> (Vec<f64>, Vec<f64>) {
    let h = std::f64::consts::FRAC_PI_2 / samples as f64;
    let mut thetas = Vec::with_capacity(samples + 1);
    let mut cum = Vec::with_capacity(samples + 1);
    let mut prev = curve_point(q, 0.0);
    let mut len = 0.0;
    for k in 0..=samples {
        let th = k as f64 * h;
        let p = curve_point(q, th);
        len += (p.0 - prev.0).hypot(p.1 - prev.1);
        thetas.push(th);
        cum.push(len);
        prev = p;
    }
    (thetas, cum)
}

fn theta_at(thetas: &[f64], cum: &[f64], s: f64) -> f64 {
    let k = cum.partition_point(|&c| c < s).clamp(1, cum.len() - 1);
    let (a, b) = (cum[k - 1], cum[k]);
    let w = if b > a { ((s - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
    thetas[k - 1] + w * (thetas[k] - thetas[k - 1])
}

/// `N + 1` points at arclength `j·L/N`. Nets for `N` and `2N` are nested.
pub fn sphere_net(q: f64, n: usize) -> Result<SphereNet> {
    if !(q.is_finite() && q > 1.0) {
        return Err(LatticeError::InvalidExponent(q));
    }
    if n == 0 {
        return Err(LatticeError::ConstraintViolated("N must be positive".into()));
    }
    let (thetas, cum) = fine_curve(q, (1usize << 20).max(512 * n));
    let len = *cum.last().expect("nonempty");
    let mut points = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let p = if j == 0 {
            (1.0, 0.0)
        } else if j == n {
            (0.0, 1.0)
        } else {
            curve_point(q, theta_at(&thetas, &cum, j as f64 / n as f64 * len))
        };
        points.push(p);
    }
    Ok(SphereNet { q, n, points, arclength: len })
}

impl SphereNet {
    /// Largest distance, in the max metric, from `10·N + 1` probe points on the
    /// curve to the net.
    pub fn covering_gap(&self) -> f64 {
        let probes = 10 * self.n;
        (0..=probes)
            .map(|k| {
                let th = k as f64 / probes as f64 * std::f64::consts::FRAC_PI_2;
                let (a, b) = curve_point(self.q, th);
                self.points.iter().map(|(x, y)| (a - x).abs().max((b - y).abs())).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetEstimateReport {
    pub error: f64,
    pub bound: f64,
    pub dominated: bool,
    pub holds: bool,
}

/// `‖(|u|^p + |v|^p)^{1/p} − ∨_j(x_j|u| + y_j|v|)‖ ≤ (2/N)(‖u‖ + ‖v‖)`, together
/// with the coordinatewise `∨_j(x_j|u| + y_j|v|) ≤ (|u|^p + |v|^p)^{1/p}`.
pub fn net_estimate_check(space: &LatticeSpace, u: &LatticeVector, v: &LatticeVector, p: f64, net: &SphereNet) -> Result<NetEstimateReport> {
    check_dim(space.dim(), u.dim())?;
    check_dim(space.dim(), v.dim())?;
    if !(p.is_finite() && p > 1.0) {
        return Err(LatticeError::InvalidExponent(p));
    }
    let q = p / (p - 1.0);
    if (q - net.q).abs() > 1e-12 * q {
        return Err(LatticeError::IncompatibleNorm(format!("net is for q = {}, conjugate of p is {q}", net.q)));
    }
    let ps = crate::lattice::p_sum(u, v, Exponent::Finite(p))?;
    let mut dominated = true;
    let diff: Vec<f64> = (0..space.dim())
        .map(|k| {
            let (a, b) = (u[k].abs(), v[k].abs());
            let best = net.points.iter().map(|(x, y)| x * a + y * b).fold(0.0, f64::max);
            if best > ps[k] * (1.0 + SLACK) + f64::MIN_POSITIVE {
                dominated = false;
            }
            ps[k] - best
        })
        .collect();
    let error = space.norm_slice(&diff);
    let bound = 2.0 / net.n as f64 * (space.norm_slice(u) + space.norm_slice(v));
    Ok(NetEstimateReport { error, bound, dominated, holds: dominated && error <= bound * (1.0 + SLACK) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementRow {
    pub n: usize,
    /// `256·eps + C_q·‖T‖·n^{1/q − 1/p}`
    pub bound: f64,
    /// `‖Tx‖` for `x = 1`, when an operator is supplied.
    pub measured: Option<f64>,
    /// `‖(Σ_k |Tx_k|^q)^{1/q}‖` over the `n` equal pieces `x_k` of `x`.
    pub measured_split: Option<f64>,
}

/// Bound chain for the `L_p` domain refinement. With an operator on a
/// weighted `L_p` domain (cells of equal measure), each level `n` dividing
/// the dimension also reports measured norms for the equal split of `1`.
pub fn refinement_norm_demo(
    p: f64,
    q: f64,
    eps: f64,
    norm_t: f64,
    cq: f64,
    levels: &[usize],
    op: Option<&LatticeOperator>,
) -> Result<Vec<RefinementRow>> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(LatticeError::InvalidExponent(p));
    }
    if !(q.is_finite() && q > p) {
        return Err(LatticeError::InvalidExponent(q));
    }
    if let Some(t) = op {
        match t.domain().norm_spec() {
            NormSpec::WeightedLp { p: dp, .. } | NormSpec::Lp(Exponent::Finite(dp)) if *dp == p => {}
            _ => return Err(LatticeError::IncompatibleNorm(format!("operator domain must be an L{p} space"))),
        }
    }
    levels
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(LatticeError::ConstraintViolated("levels must be positive".into()));
            }
            let bound = SPLIT_CONSTANT * eps + cq * norm_t * (n as f64).powf(1.0 / q - 1.0 / p);
            let (mut measured, mut measured_split) = (None, None);
            if let Some(t) = op {
                let d = t.n();
                if d % n == 0 {
                    let x = vec![1.0; d];
                    measured = Some(t.codomain().norm_slice(&t.apply_slice(&x)));
                    let w = d / n;
                    let pieces: Vec<Vec<f64>> = (0..n)
                        .map(|k| t.apply_slice(&(0..d).map(|i| if i / w == k { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
                        .collect();
                    measured_split = Some(t.codomain().norm_slice(&coordinate_p_sum(&pieces, Exponent::Finite(q))));
                }
            }
            Ok(RefinementRow { n, bound, measured, measured_split })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    fn v(x: &[f64]) -> LatticeVector {
        LatticeVector::new(x.to_vec()).unwrap()
    }

    /// Direct enumeration in plain order.
    fn naive_split(b: &[f64]) -> f64 {
        let n = b.len();
        let total: f64 = b.iter().sum();
        let mut acc = 0.0;
        for mask in 0u64..1 << n {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).sum();
            acc += s.min(total - s);
        }
        acc / (1u64 << n) as f64
    }

    #[test]
    fn split_examples() {
        assert_eq!(expected_min_split(&[1.0]).unwrap(), 0.0);
        assert_eq!(expected_min_split(&[1.0, 1.0]).unwrap(), 0.5);
        assert_eq!(expected_min_split(&[1.0; 4]).unwrap(), 1.25);
        assert!(matches!(expected_min_split(&[1.0, -1.0]), Err(LatticeError::NegativeEntry(1))));
        assert!(matches!(expected_min_split(&[1.0; 26]), Err(LatticeError::TooLarge(_))));
        assert!(matches!(expected_min_split(&[]), Err(LatticeError::Empty)));
    }

    #[test]
    fn split_matches_binomial_formula() {
        // all-ones: 2^{-n} Σ_k C(n,k) min(k, n-k)
        for n in 1..=20u64 {
            let mut c = 1u64;
            let mut acc = 0u64;
            for k in 0..=n {
                acc += c * k.min(n - k);
                c = c * (n - k) / (k + 1);
            }
            let exact = acc as f64 / (1u64 << n) as f64;
            assert!((expected_min_split(&vec![1.0; n as usize]).unwrap() - exact).abs() <= 1e-12 * exact.max(1.0));
        }
    }

    #[test]
    fn sampled_estimate_is_close() {
        let b = [0.5, 1.0, 2.0, 0.1, 0.7, 1.3];
        let exact = expected_min_split(&b).unwrap();
        let mc = expected_min_split_sampled(&b, 200_000, 3).unwrap();
        assert!(!mc.exact);
        assert!((mc.mean - exact).abs() <= 5.0 * mc.std_err);
    }

    #[test]
    fn sandwich_examples() {
        let r = maxmin_sandwich_check(&[1.0; 4]).unwrap();
        assert_eq!((r.lhs, r.mid, r.rhs, r.holds), (1.25, 3.0, 320.0, true));
        let r = maxmin_sandwich_check(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!((r.lhs, r.mid, r.rhs, r.holds, r.ratio), (0.0, 0.0, 0.0, true, None));
    }

    #[test]
    fn vector_split_examples() {
        let sp = LatticeSpace::lp(3, 2.0).unwrap();
        let r = vector_split_check(&[v(&[1.0, 2.0, 0.0])], &sp).unwrap();
        assert_eq!((r.norm_lhs, r.norm_rhs, r.holds), (0.0, 0.0, true));
        let fam = [v(&[2.0, 0.0, 0.0]), v(&[0.0, 3.0, 0.0]), v(&[0.0, 0.0, 1.0])];
        let r = vector_split_check(&fam, &sp).unwrap();
        assert_eq!(r.expected_min, vec![0.0; 3]);
        assert!(r.holds);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam: Vec<LatticeVector> = (0..6).map(|_| v(&(0..3).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())).collect();
        let r = vector_split_check(&fam, &sp).unwrap();
        for t in 0..3 {
            let b: Vec<f64> = fam.iter().map(|f| f[t]).collect();
            assert!((r.expected_min[t] - naive_split(&b)).abs() <= 1e-12);
        }
        assert!(r.holds);
        assert!(vector_split_check(&[v(&[-1.0, 0.0, 0.0])], &sp).is_err());
    }

    fn positive_op(seed: u64, n: usize, m: usize) -> LatticeOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * m).map(|_| rng.gen::<f64>()).collect();
        LatticeOperator::from_row_major(LatticeSpace::lp(n, 1.0).unwrap(), LatticeSpace::lp(m, 2.0).unwrap(), data).unwrap()
    }

    #[test]
    fn operator_checks_trivial_cases() {
        let dp = LatticeOperator::from_columns(LatticeSpace::lp(2, 1.0).unwrap(), LatticeSpace::lp(2, 1.0).unwrap(), &[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = arb_number_check(&dp, &[v(&[1.0, 0.0]), v(&[0.0, 0.5])], 2.0, 0.0).unwrap();
        assert_eq!((r.sum_minus_join, r.p_sum_gap, r.holds), (0.0, 0.0, true));
        let t = positive_op(1, 3, 3);
        let r = arb_number_check(&t, &[v(&[0.3, 0.0, 0.2])], 2.0, 0.0).unwrap();
        assert_eq!(r.sum_minus_join, 0.0);
        assert!(r.p_sum_gap <= 1e-15);
        assert!(matches!(arb_number_check(&t, &[v(&[1.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0])], 2.0, 0.1), Err(LatticeError::NotDisjoint)));
        let r = maxmin_operator_check(&t, &[v(&[0.3, 0.1, 0.2])], 0.0).unwrap();
        assert!(r.holds && r.join_gap == 0.0 && r.meet_gap == 0.0);
        assert!(maxmin_operator_check(&t, &[v(&[-0.3, 0.1, 0.2])], 0.0).is_err());
        let r = iterated_join_check(&t, &[v(&[0.3, 0.1, 0.2])], 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
        let r = iterated_join_check(&t, &[v(&[0.3, 0.0, 0.2]), v(&[0.0, 0.4, 0.0])], 1.0).unwrap();
        assert_eq!(r.rhs, 2.0);
    }

    #[test]
    fn disjoint_join_gap_is_sum_minus_join() {
        let t = positive_op(2, 4, 3);
        let xs = [v(&[0.5, 0.0, 0.0, 0.2]), v(&[0.0, 0.7, 0.0, 0.0]), v(&[0.0, 0.0, 0.1, 0.0])];
        let mm = maxmin_operator_check(&t, &xs, 1.0).unwrap();
        let an = arb_number_check(&t, &xs, 2.0, 1.0).unwrap();
        assert!((mm.join_gap - an.sum_minus_join).abs() <= 1e-12);
    }

    #[test]
    fn sphere_net_examples() {
        let net = sphere_net(2.0, 1).unwrap();
        assert_eq!(net.points, vec![(1.0, 0.0), (0.0, 1.0)]);
        assert!(net.covering_gap() <= 2.0);
        let net = sphere_net(2.0, 16).unwrap();
        assert!((net.arclength - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(net.covering_gap() <= 2.0 / 16.0);
        for q in [1.5, 2.0, 3.0, 7.0] {
            for n in [1, 4, 16, 64] {
                let net = sphere_net(q, n).unwrap();
                assert!(net.arclength <= 2.0);
                assert!(net.covering_gap() <= net.arclength / n as f64 + 1e-9);
                for w in net.points.windows(2) {
                    assert!(w[1].0 < w[0].0 && w[1].1 > w[0].1);
                }
                for (x, y) in &net.points {
                    assert!((x.powf(q) + y.powf(q) - 1.0).abs() < 1e-12);
                }
            }
        }
        let (a, b) = (sphere_net(3.0, 8).unwrap(), sphere_net(3.0, 16).unwrap());
        for j in 0..=8 {
            assert_eq!(a.points[j], b.points[2 * j]);
        }
        assert!(sphere_net(1.0, 4).is_err());
    }

    #[test]
    fn net_estimate_examples() {
        let sp = LatticeSpace::lp(3, 2.0).unwrap();
        let net = sphere_net(2.0, 8).unwrap();
        let u = v(&[1.0, -2.0, 0.5]);
        let r = net_estimate_check(&sp, &u, &v(&[0.0; 3]), 2.0, &net).unwrap();
        assert!(r.error <= 1e-15 && r.holds);
        let net64 = sphere_net(2.0, 64).unwrap();
        let w = v(&[1.0, 2.0, 0.5]);
        let r = net_estimate_check(&sp, &w, &w, 2.0, &net64).unwrap();
        assert!(r.holds && r.error <= 2.0 / 64.0 * 2.0 * sp.norm_slice(&w));
        assert!(matches!(net_estimate_check(&sp, &u, &w, 3.0, &net), Err(LatticeError::IncompatibleNorm(_))));
    }

    #[test]
    fn net_error_is_monotone_under_doubling() {
        let sp = LatticeSpace::lp(6, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let nets: Vec<SphereNet> = [4, 8, 16, 32, 64].iter().map(|&n| sphere_net(2.0, n).unwrap()).collect();
        for _ in 0..20 {
            let u = v(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
            let w = v(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
            let errs: Vec<f64> = nets.iter().map(|n| net_estimate_check(&sp, &u, &w, 2.0, n).unwrap().error).collect();
            for k in 1..errs.len() {
                assert!(errs[k] <= errs[k - 1] + 1e-12);
            }
        }
    }

    #[test]
    fn refinement_examples() {
        let rows = refinement_norm_demo(1.0, 2.0, 0.01, 1.0, 1.0, &[1, 256], None).unwrap();
        assert!((rows[0].bound - 3.56).abs() < 1e-12);
        assert!((rows[1].bound - 2.6225).abs() < 1e-12);
        let rows = refinement_norm_demo(1.0, 2.0, 0.0, 1.0, 1.0, &[1, 4, 16, 64], None).unwrap();
        assert!(rows.windows(2).all(|w| w[1].bound < w[0].bound));
        assert!(refinement_norm_demo(2.0, 2.0, 0.0, 1.0, 1.0, &[1], None).is_err());
        let d = 16;
        let dom = LatticeSpace::weighted(1.0, vec![1.0 / d as f64; d]).unwrap();
        let t = LatticeOperator::from_columns(dom, LatticeSpace::lp(1, 2.0).unwrap(), &vec![vec![1.0 / d as f64]; d]).unwrap();
        let rows = refinement_norm_demo(1.0, 2.0, 0.0, 1.0, 1.0, &[1, 4, 16, 3], Some(&t)).unwrap();
        assert!((rows[0].measured.unwrap() - 1.0).abs() < 1e-12);
        assert!((rows[1].measured_split.unwrap() - 0.5).abs() < 1e-12);
        assert!((rows[2].measured_split.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(rows[3].measured, None);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

        #[test]
        fn split_oracle_and_symmetries(b in proptest::collection::vec(0.0f64..10.0, 1..12), lambda in 0.0f64..5.0, rot in 0usize..12) {
            let e = expected_min_split(&b).unwrap();
            prop_assert!((e - naive_split(&b)).abs() <= 1e-12 * e.max(1.0));
            let mut r = b.clone();
            let k = rot % b.len();
            r.rotate_left(k);
            r.reverse();
            prop_assert!((expected_min_split(&r).unwrap() - e).abs() <= 1e-12 * e.max(1.0));
            let s: Vec<f64> = b.iter().map(|x| x * lambda).collect();
            prop_assert!((expected_min_split(&s).unwrap() - lambda * e).abs() <= 1e-12 * (lambda * e).max(1.0));
            let rep = maxmin_sandwich_check(&b).unwrap();
            prop_assert!(rep.holds);
        }
    }
}
