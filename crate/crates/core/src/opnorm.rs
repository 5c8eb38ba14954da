//! Operator norms: closed forms where they exist, search-based lower bounds otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LatticeError, Result};
use crate::lattice::{Exponent, LatticeSpace, NormSpec};
use crate::operator::LatticeOperator;

/// How an operator norm value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    L1Domain,
    SupCodomain,
    PositiveSupDomain,
    PositiveL1Codomain,
    PowerIteration,
    Interpolation,
    Search,
}

/// `lower ≤ ‖T‖ ≤ upper`; `upper` is absent when no closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorNormEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    pub method: NormMethod,
}

impl OperatorNormEstimate {
    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }
}

/// Rewrites `T` between unweighted `Lp`/`Sup` spaces via the isometries
/// `x ↦ (w_i^{1/p} x_i)`.
pub(crate) fn unweighted(t: &LatticeOperator) -> LatticeOperator {
    let plain = |s: &LatticeSpace| -> (LatticeSpace, Vec<f64>) {
        match s.norm_spec() {
            NormSpec::WeightedLp { p, weights } => (
                LatticeSpace::new(s.dim(), NormSpec::Lp(Exponent::Finite(*p))).expect("valid space"),
                weights.iter().map(|w| w.powf(1.0 / p)).collect(),
            ),
            NormSpec::Sup => (LatticeSpace::new(s.dim(), NormSpec::Lp(Exponent::Infinity)).expect("valid space"), vec![1.0; s.dim()]),
            _ => (s.clone(), vec![1.0; s.dim()]),
        }
    };
    let (dom, d) = plain(t.domain());
    let (cod, c) = plain(t.codomain());
    let n = t.n();
    let data = t.matrix().iter().enumerate().map(|(k, &a)| c[k / n] * a / d[k % n]).collect();
    LatticeOperator::from_row_major(dom, cod, data).expect("same shape")
}

fn exponent(s: &LatticeSpace) -> Exponent {
    s.norm_spec().exponent()
}

fn max_col_sum(r: &LatticeOperator) -> f64 {
    (0..r.n()).map(|i| (0..r.m()).map(|t| r.entry(t, i).abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn max_row_sum(r: &LatticeOperator) -> f64 {
    (0..r.m()).map(|t| r.row(t).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `‖T‖_{1→1}^{1/q} ‖T‖_{∞→∞}^{1/q′}` for positive `T` into an `Lq` space with
/// domain exponent `p ≤ q` (the formal identity `ℓp → ℓq` is contractive).
pub fn interpolation_upper_bound(t: &LatticeOperator) -> Result<f64> {
    if !t.is_positive() {
        return Err(LatticeError::NotPositive);
    }
    let r = unweighted(t);
    let (p, q) = match (exponent(r.domain()), exponent(r.codomain())) {
        (Exponent::Finite(p), Exponent::Finite(q)) if p <= q => (p, q),
        _ => return Err(LatticeError::IncompatibleNorm("interpolation needs Lp -> Lq with p <= q < inf".into())),
    };
    let _ = p;
    let a = max_col_sum(&r);
    let b = max_row_sum(&r);
    Ok(a.powf(1.0 / q) * b.powf(1.0 - 1.0 / q))
}

/// `‖(‖Tδ_i‖)_i‖_{E*}`, a valid upper bound for every operator by the triangle inequality.
pub fn column_norm_upper_bound(t: &LatticeOperator) -> f64 {
    let norms: Vec<f64> = (0..t.n()).map(|i| t.codomain().norm_slice(&t.column(i))).collect();
    t.domain().dual_norm_slice(&norms)
}

/// The closed-form upper bound when available, else the column-norm bound.
pub fn certified_upper_bound(t: &LatticeOperator) -> f64 {
    operator_norm(t, 200, 0).upper.unwrap_or_else(|| column_norm_upper_bound(t))
}

/// Estimates `‖T‖`. Exact closed forms: `L1` domain, `Sup` codomain, positive
/// `T` with `Sup` domain or `L1` codomain, and `L2 → L2` (power iteration).
/// Positive `Lp → Lq` with `p ≤ q < ∞` gets the interpolation upper bound.
/// The lower bound always includes a nonlinear power-method search.
pub fn operator_norm(t: &LatticeOperator, budget: usize, seed: u64) -> OperatorNormEstimate {
    let r = unweighted(t);
    let (p, q) = (exponent(r.domain()), exponent(r.codomain()));
    let positive = r.is_positive();
    let exact = |v: f64, method| OperatorNormEstimate { lower: v, upper: Some(v), method };

    if p == Exponent::Finite(1.0) {
        let v = (0..r.n()).map(|i| r.codomain().norm_slice(&r.column(i))).fold(0.0, f64::max);
        return exact(v, NormMethod::L1Domain);
    }
    if q == Exponent::Infinity {
        let v = (0..r.m()).map(|t| r.domain().dual_norm_slice(r.row(t))).fold(0.0, f64::max);
        return exact(v, NormMethod::SupCodomain);
    }
    if positive && p == Exponent::Infinity {
        let v = r.codomain().norm_slice(&r.apply_slice(&vec![1.0; r.n()]));
        return exact(v, NormMethod::PositiveSupDomain);
    }
    if positive && q == Exponent::Finite(1.0) {
        let sums: Vec<f64> = (0..r.n()).map(|i| (0..r.m()).map(|t| r.entry(t, i)).sum()).collect();
        return exact(r.domain().dual_norm_slice(&sums), NormMethod::PositiveL1Codomain);
    }
    if p == Exponent::Finite(2.0) && q == Exponent::Finite(2.0) {
        return exact(power_iteration(&r, budget.max(2000), seed), NormMethod::PowerIteration);
    }
    let lower = boyd_search(&r, budget, seed);
    if positive {
        if let (Exponent::Finite(pp), Exponent::Finite(qq)) = (p, q) {
            if pp <= qq {
                let up = interpolation_upper_bound(&r).expect("positive, p <= q");
                return OperatorNormEstimate { lower: lower.min(up), upper: Some(up), method: NormMethod::Interpolation };
            }
        }
    }
    OperatorNormEstimate { lower, upper: None, method: NormMethod::Search }
}

/// Largest singular value of the matrix.
pub(crate) fn power_iteration(r: &LatticeOperator, iters: usize, seed: u64) -> f64 {
    let n = r.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_9a11);
    let mut x: Vec<f64> = (0..n).map(|_| 1.0 + 0.1 * rng.gen::<f64>()).collect();
    let mut sigma = 0.0;
    let mut stable = 0;
    for _ in 0..iters {
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = r.apply_slice(&x);
        let s = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (s - sigma).abs() <= 1e-15 * s {
            stable += 1;
            if stable >= 5 {
                return s.max(sigma);
            }
        } else {
            stable = 0;
        }
        sigma = sigma.max(s);
        x = r.apply_transpose_slice(&y);
    }
    sigma
}

/// Nonlinear power method `x ← J_E^{-1}(Tᵀ J_F(Tx))` from several starts.
fn boyd_search(r: &LatticeOperator, budget: usize, seed: u64) -> f64 {
    let (dom, cod) = (r.domain(), r.codomain());
    let n = r.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positive = r.is_positive();
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let mut order: Vec<usize> = (0..n).collect();
    let cn: Vec<f64> = (0..n).map(|i| cod.norm_slice(&r.column(i))).collect();
    order.sort_by(|a, b| cn[*b].total_cmp(&cn[*a]));
    for &i in order.iter().take(8) {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        starts.push(e);
    }
    for _ in 0..4 {
        starts.push((0..n).map(|_| if positive { rng.gen::<f64>() } else { rng.gen_range(-1.0..1.0) }).collect());
    }
    let mut best = 0.0f64;
    for mut x in starts {
        for _ in 0..budget.max(1) {
            let nx = dom.norm_slice(&x);
            if nx == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = r.apply_slice(&x);
            let val = cod.norm_slice(&y);
            let improved = val > best * (1.0 + 1e-14);
            best = best.max(val);
            if val == 0.0 {
                break;
            }
            let g = cod.norming_functional(&crate::lattice::LatticeVector::new(y).expect("finite")).expect("nonzero");
            let s = r.apply_transpose_slice(&g);
            let next = dom.predual_on(&s, None);
            if !improved && next == x {
                break;
            }
            x = next;
        }
    }
    best
}
