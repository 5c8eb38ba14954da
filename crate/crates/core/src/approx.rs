//! Disjointness-preserving approximants.
//!
//! Every construction returns an operator `S` with pairwise disjoint column
//! supports, the distance `‖T − S‖` and a guaranteed upper bound for it.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::defects::{dp_defect_search, SearchOptions};
use crate::error::{check_dim, LatticeError, Result};
use crate::lattice::{LatticeSpace, NormSpec};
use crate::operator::LatticeOperator;
use crate::opnorm::{certified_upper_bound, column_norm_upper_bound, operator_norm};
use crate::search::mix_seed;

/// Largest `(n+1)^m` accepted by [`optimal_assignment_bruteforce`].
pub const BRUTEFORCE_LIMIT: f64 = 1e7;
/// Largest `(n+1)^m` for which [`approximate_l1_target`] runs the exact search.
pub const PIPELINE_BRUTEFORCE_LIMIT: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxMethod {
    PhiN,
    Truncation,
    Threshold,
    Assignment,
    PowerPipeline,
}

/// Which coordinates each column keeps: `owner[t] = i` gives row `t` to
/// column `i` (1-based), `0` drops it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportAssignment {
    pub owner: Vec<u32>,
}

impl SupportAssignment {
    pub fn new(owner: Vec<u32>) -> Self {
        Self { owner }
    }

    pub fn dropped(m: usize) -> Self {
        Self { owner: vec![0; m] }
    }

    /// `A_i` for the 1-based column `i`.
    pub fn set(&self, i: u32) -> Vec<usize> {
        (0..self.owner.len()).filter(|&t| self.owner[t] == i).collect()
    }

    fn check(&self, t: &LatticeOperator) -> Result<()> {
        check_dim(t.m(), self.owner.len())?;
        if let Some(&o) = self.owner.iter().find(|&&o| o as usize > t.n()) {
            return Err(LatticeError::ConstraintViolated(format!("owner {o} exceeds the number of columns {}", t.n())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    #[serde(rename = "S")]
    pub s: LatticeOperator,
    pub distance: f64,
    pub bound: f64,
    pub eps_used: Option<f64>,
    pub method: ApproxMethod,
    pub dominated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<SupportAssignment>,
    #[serde(skip_serializing_if = "Map::is_empty", serialize_with = "ser_notes")]
    pub notes: Map<String, Value>,
}

fn ser_notes<S: Serializer>(m: &Map<String, Value>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.serialize(s)
}

impl ApproxResult {
    fn finish(
        t: &LatticeOperator,
        s: LatticeOperator,
        distance: f64,
        bound: f64,
        eps_used: Option<f64>,
        method: ApproxMethod,
    ) -> Result<Self> {
        // tiny slack for the floating point evaluation of both sides
        if eps_used.is_some() && distance > bound * (1.0 + 1e-12) + 1e-15 {
            return Err(LatticeError::BoundViolated { distance, bound });
        }
        let dominated = s.is_dominated_by(t);
        Ok(Self { s, distance, bound, eps_used, method, dominated, assignment: None, notes: Map::new() })
    }

    fn note(mut self, key: &str, v: Value) -> Self {
        self.notes.insert(key.into(), v);
        self
    }
}

/// `true` when the columns of `s` have pairwise disjoint supports.
pub fn is_disjointness_preserving(s: &LatticeOperator) -> bool {
    s.has_disjoint_columns()
}

fn check_eps(eps: Option<f64>) -> Result<()> {
    match eps {
        Some(e) if !(e.is_finite() && e >= 0.0) => Err(LatticeError::ConstraintViolated(format!("eps must be a nonnegative number, got {e}"))),
        _ => Ok(()),
    }
}

/// `‖R‖` from a closed form, else a certified upper bound.
fn norm_upper(r: &LatticeOperator) -> f64 {
    operator_norm(r, 200, 0).upper.unwrap_or_else(|| column_norm_upper_bound(r))
}

/// `0` if `t₁ ≤ h`, `2(t₁ − h)` if `h ≤ t₁ ≤ 2h`, `t₁` if `t₁ > 2h`, where `h = max_{i≥2} |t_i|`.
pub fn phi_n(t: &[f64]) -> Result<f64> {
    let (&t1, rest) = t.split_first().ok_or(LatticeError::Empty)?;
    let h = rest.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(phi_with(t1, h))
}

#[inline]
fn phi_with(t1: f64, h: f64) -> f64 {
    if t1 <= h {
        0.0
    } else if t1 <= 2.0 * h {
        2.0 * (t1 - h)
    } else {
        t1
    }
}

/// Positive `T` on a sup-norm domain. Column `i` of `S` is `φ_n(f_i, f_{i+1}, …, f_{i−1})`
/// coordinatewise. Without `eps` the bound is `2‖Σf_i − ∨f_i‖`, which always holds;
/// with `eps` (a valid DP defect of `T`) it is `256·eps`.
pub fn construct_dp_linfty(t: &LatticeOperator, eps: Option<f64>) -> Result<ApproxResult> {
    check_eps(eps)?;
    if !t.is_positive() {
        return Err(LatticeError::NotPositive);
    }
    if !t.domain().norm_spec().is_sup_type() {
        return Err(LatticeError::IncompatibleNorm("domain must be sup-normed".into()));
    }
    let (n, m) = (t.n(), t.m());
    let mut data = vec![0.0; n * m];
    let mut args = vec![0.0; n];
    for r in 0..m {
        let row = t.row(r);
        for i in 0..n {
            for (k, a) in args.iter_mut().enumerate() {
                *a = row[(i + k) % n];
            }
            data[r * n + i] = phi_n(&args)?;
        }
    }
    let s = LatticeOperator::from_row_major(t.domain().clone(), t.codomain().clone(), data)?;
    let diff = t.sub(&s)?;
    let distance = t.codomain().norm_slice(&diff.apply_slice(&vec![1.0; n]));
    let excess: Vec<f64> = (0..m)
        .map(|r| {
            let row = t.row(r);
            row.iter().sum::<f64>() - row.iter().fold(0.0f64, |a, b| a.max(*b))
        })
        .collect();
    let smp = 2.0 * t.codomain().norm_slice(&excess);
    let bound = eps.map_or(smp, |e| 256.0 * e);
    Ok(ApproxResult::finish(t, s, distance, bound, eps, ApproxMethod::PhiN)?.note("sum_minus_max_bound", json!(smp)))
}

/// Sup-norm codomain, any sign. Entry `g_i(t)` keeps `f_i(t)` when it is at least
/// twice `h_i(t) = max_{j≠i} |f_j(t)|`, vanishes below `h_i(t)` and is linear between.
///
/// `eps` is read as the DP defect of `T/‖T‖`, giving the bound `257·eps·‖T‖`.
/// Without `eps` the bound is `min(‖T‖, 257·d)` with `d` the exact DP defect
/// of `T` when `n ≤ 20`, and `‖T‖` otherwise.
pub fn construct_dp_supnorm_target(t: &LatticeOperator, eps: Option<f64>) -> Result<ApproxResult> {
    check_eps(eps)?;
    if !t.codomain().norm_spec().is_sup_type() {
        return Err(LatticeError::IncompatibleNorm("codomain must be sup-normed".into()));
    }
    let (n, m) = (t.n(), t.m());
    let mut data = vec![0.0; n * m];
    for r in 0..m {
        let row = t.row(r);
        for i in 0..n {
            let h = row.iter().enumerate().filter(|(j, _)| *j != i).fold(0.0f64, |a, (_, v)| a.max(v.abs()));
            let f = row[i];
            data[r * n + i] = f.signum() * phi_with(f.abs(), h);
        }
    }
    let s = LatticeOperator::from_row_major(t.domain().clone(), t.codomain().clone(), data)?;
    let norm_t = norm_upper(t);
    let distance = norm_upper(&t.sub(&s)?);
    let mut defect = None;
    let bound = match eps {
        Some(e) => 257.0 * e * norm_t,
        None => {
            if n <= 20 {
                let d = dp_defect_search(t, &SearchOptions::default()).lower_bound;
                defect = Some(d);
                norm_t.min(257.0 * d)
            } else {
                norm_t
            }
        }
    };
    let mut res = ApproxResult::finish(t, s, distance, bound, eps, ApproxMethod::Truncation)?.note("norm_t", json!(norm_t));
    if let Some(d) = defect {
        res = res.note("dp_defect", json!(d));
    }
    Ok(res)
}

/// Sup-norm codomain. Every entry goes through the scalar cut
/// `0` for `|v| ≤ eps`, `v` for `|v| ≥ 2eps`, `2(|v| − eps)·sign v` between.
/// Requires at most one entry of modulus above `eps` in each row. The bound
/// `257·eps` is enforced only when `T` is a contraction.
pub fn construct_dp_threshold(t: &LatticeOperator, eps: f64) -> Result<ApproxResult> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(LatticeError::ConstraintViolated(format!("eps must be positive, got {eps}")));
    }
    if !t.codomain().norm_spec().is_sup_type() {
        return Err(LatticeError::IncompatibleNorm("codomain must be sup-normed".into()));
    }
    for r in 0..t.m() {
        let large = t.row(r).iter().filter(|v| v.abs() > eps).count();
        if large > 1 {
            return Err(LatticeError::ConstraintViolated(format!("row {r} has {large} entries above eps")));
        }
    }
    let s = t.map_entries(|v| v.signum() * phi_with(v.abs(), eps));
    let norm_t = norm_upper(t);
    let distance = norm_upper(&t.sub(&s)?);
    let bound = 257.0 * eps;
    let asserted = if norm_t <= 1.0 + 1e-12 { Some(eps) } else { None };
    let mut res = ApproxResult::finish(t, s, distance, bound, asserted, ApproxMethod::Threshold)?;
    res.eps_used = Some(eps);
    Ok(res.note("norm_t", json!(norm_t)))
}

fn require_l1_codomain(t: &LatticeOperator) -> Result<()> {
    if t.codomain().norm_spec().is_l1_type() {
        Ok(())
    } else {
        Err(LatticeError::IncompatibleNorm("codomain must be an L1 space".into()))
    }
}

/// Residual column norms `β_i = ‖f_i 1_{A_i^c}‖`, accumulated in row order.
fn residuals(t: &LatticeOperator, a: &SupportAssignment) -> Vec<f64> {
    let k = t.codomain().kernel();
    let mut beta = vec![0.0; t.n()];
    for r in 0..t.m() {
        let row = t.row(r);
        let o = a.owner[r] as usize;
        for (i, b) in beta.iter_mut().enumerate() {
            if o != i + 1 {
                *b = k.accumulate(*b, r, row[i]);
            }
        }
    }
    beta
}

/// `F(A) = ‖(‖f_i 1_{A_i^c}‖)_i‖_{E*}`; for positive `T` into an `L1` space
/// this is `‖T − S_A‖`.
pub fn assignment_objective(t: &LatticeOperator, a: &SupportAssignment) -> Result<f64> {
    require_l1_codomain(t)?;
    a.check(t)?;
    Ok(t.domain().dual_norm_slice(&residuals(t, a)))
}

struct Dfs<'a> {
    t: &'a LatticeOperator,
    terms: Vec<Vec<f64>>,
    global: &'a AtomicU64,
    best: f64,
    best_owner: Option<Vec<u32>>,
    owner: Vec<u32>,
}

impl Dfs<'_> {
    fn run(&mut self, r: usize, beta: &mut [f64]) {
        let dk = self.t.domain().dual_kernel();
        let partial = dk.eval(beta);
        if partial >= self.best || partial > f64::from_bits(self.global.load(Ordering::Relaxed)) {
            return;
        }
        let m = self.t.m();
        if r == m {
            self.best = partial;
            self.best_owner = Some(self.owner.clone());
            self.global.fetch_min_f64(partial);
            return;
        }
        let n = self.t.n();
        let row = self.t.row(r);
        for o in 0..=n {
            if o > 0 && row[o - 1] == 0.0 {
                continue;
            }
            let saved: Vec<f64> = beta.to_vec();
            for i in 0..n {
                if o != i + 1 {
                    beta[i] += self.terms[r][i];
                }
            }
            self.owner[r] = o as u32;
            self.run(r + 1, beta);
            beta.copy_from_slice(&saved);
        }
        self.owner[r] = 0;
    }
}

trait FetchMinF64 {
    fn fetch_min_f64(&self, v: f64);
}

impl FetchMinF64 for AtomicU64 {
    fn fetch_min_f64(&self, v: f64) {
        // nonnegative floats order like their bit patterns
        self.fetch_min(v.to_bits(), Ordering::Relaxed);
    }
}

fn search_space(t: &LatticeOperator) -> f64 {
    (t.n() as f64 + 1.0).powi(t.m() as i32)
}

/// Exact minimizer of [`assignment_objective`] by pruned enumeration; the
/// lexicographically smallest owner list wins ties. Requires `(n+1)^m ≤ 10⁷`.
pub fn optimal_assignment_bruteforce(t: &LatticeOperator) -> Result<(SupportAssignment, f64)> {
    require_l1_codomain(t)?;
    let size = search_space(t);
    if size > BRUTEFORCE_LIMIT {
        return Err(LatticeError::TooLarge(format!("(n+1)^m = {size:.3e} exceeds {BRUTEFORCE_LIMIT:.0e}")));
    }
    Ok(bruteforce_unchecked(t))
}

fn bruteforce_unchecked(t: &LatticeOperator) -> (SupportAssignment, f64) {
    let (n, m) = (t.n(), t.m());
    let k = t.codomain().kernel();
    // the L1 kernel accumulates by plain addition, so these terms reproduce `residuals` exactly
    let terms: Vec<Vec<f64>> = (0..m).map(|r| (0..n).map(|i| k.term(r, t.entry(r, i))).collect()).collect();
    let global = AtomicU64::new(f64::INFINITY.to_bits());
    let options = |r: usize| -> Vec<u32> {
        (0..=n as u32).filter(|&o| o == 0 || t.entry(r, o as usize - 1) != 0.0).collect()
    };
    let depth = m.min(2);
    let mut prefixes: Vec<Vec<u32>> = vec![vec![]];
    for r in 0..depth {
        prefixes = prefixes.into_iter().flat_map(|p| options(r).into_iter().map(move |o| [p.clone(), vec![o]].concat())).collect();
    }
    let results: Vec<(f64, Vec<u32>)> = prefixes
        .par_iter()
        .filter_map(|pre| {
            let mut beta = vec![0.0; n];
            let mut owner = vec![0u32; m];
            for (r, &o) in pre.iter().enumerate() {
                owner[r] = o;
                for i in 0..n {
                    if o as usize != i + 1 {
                        beta[i] += terms[r][i];
                    }
                }
            }
            let mut dfs = Dfs { t, terms: terms.clone(), global: &global, best: f64::INFINITY, best_owner: None, owner };
            dfs.run(pre.len(), &mut beta);
            dfs.best_owner.map(|o| (dfs.best, o))
        })
        .collect();
    let (value, owner) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("the all-dropped assignment is always reachable");
    let a = SupportAssignment::new(owner);
    let exact = t.domain().dual_norm_slice(&residuals(t, &a));
    debug_assert_eq!(exact.to_bits(), value.to_bits());
    (a, exact)
}

/// Alternates between `owner[t] = argmax_i α_i f_i(t)` and `α` = the positive
/// norming vector of the residual norms. Starts from the normalized constant
/// vector plus four random positive vectors; returns the best assignment seen.
pub fn alternating_assignment(t: &LatticeOperator, max_iters: usize, seed: u64) -> Result<(SupportAssignment, f64)> {
    require_l1_codomain(t)?;
    let (n, m) = (t.n(), t.m());
    let dom = t.domain();
    let ones: Vec<usize> = (0..n).collect();
    let mut starts = vec![vec![1.0 / dom.indicator_norm(&ones); n]];
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xa1));
    for _ in 0..4 {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s = dom.norm_slice(&v);
        starts.push(v.into_iter().map(|x| x / s).collect());
    }
    let mut best: Option<(f64, Vec<u32>)> = None;
    for alpha0 in starts {
        let mut alpha = alpha0;
        let mut seen: Vec<Vec<u32>> = Vec::new();
        for _ in 0..max_iters.max(1) {
            let owner: Vec<u32> = (0..m)
                .map(|r| {
                    let row = t.row(r);
                    let mut o = 0u32;
                    let mut top = 0.0;
                    for i in 0..n {
                        let v = alpha[i] * row[i].abs();
                        if v > top {
                            top = v;
                            o = i as u32 + 1;
                        }
                    }
                    o
                })
                .collect();
            if seen.contains(&owner) {
                break;
            }
            let a = SupportAssignment::new(owner.clone());
            let beta = residuals(t, &a);
            let val = dom.dual_norm_slice(&beta);
            let better = best.as_ref().map_or(true, |(bv, bo)| val < *bv || (val == *bv && owner < *bo));
            if better {
                best = Some((val, owner.clone()));
            }
            seen.push(owner);
            if val == 0.0 {
                break;
            }
            alpha = dom.predual_on(&beta, None).iter().map(|v| v.abs()).collect();
        }
    }
    let (val, owner) = best.expect("at least one iteration");
    Ok((SupportAssignment::new(owner), val))
}

/// Column `i` of `S` is `f_i` restricted to `A_i`; columns with
/// `‖f_i‖ < drop_threshold` are zeroed.
pub fn build_dp_from_assignment(t: &LatticeOperator, a: &SupportAssignment, drop_threshold: f64) -> Result<LatticeOperator> {
    a.check(t)?;
    let n = t.n();
    let keep: Vec<bool> = (0..n).map(|i| t.codomain().norm_slice(&t.column(i)) >= drop_threshold).collect();
    let mut data = vec![0.0; n * t.m()];
    for (r, &o) in a.owner.iter().enumerate() {
        if o > 0 && keep[o as usize - 1] {
            data[r * n + o as usize - 1] = t.entry(r, o as usize - 1);
        }
    }
    LatticeOperator::from_row_major(t.domain().clone(), t.codomain().clone(), data)
}

/// Positive `T` into an `L1` space. The assignment is exact when
/// `(n+1)^m ≤ 10⁶` and alternating otherwise; the distance is exact.
///
/// With `eps`, the bound is `256·eps`. For an unweighted `ℓ1` domain and
/// `c = 2√(2·eps·‖T‖/3) ≤ 256·eps`, the bound is `c`: columns with
/// `‖f_i‖ < c` are dropped unless keeping them is closer. Without `eps` the bound is `‖T‖`.
pub fn approximate_l1_target(t: &LatticeOperator, eps: Option<f64>) -> Result<ApproxResult> {
    check_eps(eps)?;
    require_l1_codomain(t)?;
    if !t.is_positive() {
        return Err(LatticeError::NotPositive);
    }
    let norm_t = certified_upper_bound(t);
    let exact = search_space(t) <= PIPELINE_BRUTEFORCE_LIMIT;
    let (mut a, _) = if exact { bruteforce_unchecked(t) } else { alternating_assignment(t, 100, 0)? };
    let plain_l1_domain = matches!(t.domain().norm_spec(), NormSpec::Lp(e) if e.as_f64() == 1.0);
    let mut drop = None;
    let bound = match eps {
        None => norm_t,
        Some(e) => {
            let c = 2.0 * (2.0 * e * norm_t / 3.0).sqrt();
            if plain_l1_domain && c <= 256.0 * e {
                drop = Some(c);
                c
            } else {
                256.0 * e
            }
        }
    };
    let mut distance = assignment_objective(t, &a)?;
    let mut dropped = false;
    if let Some(c) = drop {
        let mut ad = a.clone();
        for o in ad.owner.iter_mut() {
            if *o > 0 && t.codomain().norm_slice(&t.column(*o as usize - 1)) < c {
                *o = 0;
            }
        }
        // keep whichever is closer; the dropped one is within `c`
        let dd = assignment_objective(t, &ad)?;
        if dd < distance {
            (a, distance, dropped) = (ad, dd, true);
        }
    }
    let s = build_dp_from_assignment(t, &a, if dropped { drop.unwrap_or(0.0) } else { 0.0 })?;
    let mut res = ApproxResult::finish(t, s, distance, bound, eps, ApproxMethod::Assignment)?
        .note("norm_t", json!(norm_t))
        .note("search", json!(if exact { "exhaustive" } else { "alternating" }));
    if let Some(c) = drop {
        res = res.note("drop_threshold", json!(c)).note("dropped", json!(dropped));
    }
    res.assignment = Some(a);
    Ok(res)
}

fn transfer_space(s: &LatticeSpace, q: f64) -> Result<LatticeSpace> {
    let p = s.norm_spec().exponent();
    if p.as_f64() != q {
        return Err(LatticeError::IncompatibleNorm(format!("expected an L{q} space, found exponent {p}")));
    }
    match s.norm_spec() {
        NormSpec::WeightedLp { weights, .. } => LatticeSpace::weighted(1.0, weights.clone()),
        _ => LatticeSpace::lp(s.dim(), 1.0),
    }
}

fn back_space(s: &LatticeSpace, q: f64) -> Result<LatticeSpace> {
    match s.norm_spec() {
        NormSpec::WeightedLp { weights, .. } => LatticeSpace::weighted(q, weights.clone()),
        _ => LatticeSpace::lp(s.dim(), q),
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(LatticeError::InvalidExponent(q))
    }
}

/// Entrywise `q`-th powers, moving `Lq`-type domain and codomain to `L1`.
pub fn power_transfer(t: &LatticeOperator, q: f64) -> Result<LatticeOperator> {
    check_q(q)?;
    if !t.is_positive() {
        return Err(LatticeError::NotPositive);
    }
    let (d, c) = (transfer_space(t.domain(), q)?, transfer_space(t.codomain(), q)?);
    t.map_entries(|v| v.powf(q)).with_spaces(d, c)
}

/// Entrywise `q`-th roots, moving `L1`-type spaces back to `Lq`.
pub fn root_transfer(s: &LatticeOperator, q: f64) -> Result<LatticeOperator> {
    check_q(q)?;
    if !s.is_positive() {
        return Err(LatticeError::NotPositive);
    }
    let (d, c) = (transfer_space(s.domain(), 1.0)?, transfer_space(s.codomain(), 1.0)?);
    let (d, c) = (back_space(&d, q)?, back_space(&c, q)?);
    s.map_entries(|v| v.powf(1.0 / q)).with_spaces(d, c)
}

/// Positive `T` between `Lq` spaces (weights allowed): `q`-th powers, the
/// `L1` pipeline with `eps^q`, then `q`-th roots. The bound is
/// `256·eps + max_i ‖(T−S)δ_i‖/‖δ_i‖`; without `eps`, `‖T‖`.
pub fn approximate_lq_target(t: &LatticeOperator, q: f64, eps: Option<f64>) -> Result<ApproxResult> {
    check_eps(eps)?;
    let tp = power_transfer(t, q)?;
    let inner = approximate_l1_target(&tp, eps.map(|e| e.powf(q)))?;
    let s = root_transfer(&inner.s, q)?;
    let diff = t.sub(&s)?;
    let distance = norm_upper(&diff);
    let col_max = (0..t.n())
        .map(|i| {
            let atom = t.domain().indicator_norm(&[i]);
            t.codomain().norm_slice(&diff.column(i)) / atom
        })
        .fold(0.0, f64::max);
    let bound = match eps {
        Some(e) => 256.0 * e + col_max,
        None => certified_upper_bound(t),
    };
    let mut res = ApproxResult::finish(t, s, distance, bound, eps, ApproxMethod::PowerPipeline)?
        .note("transferred_distance", json!(inner.distance))
        .note("column_residual_max", json!(col_max));
    res.assignment = inner.assignment;
    Ok(res)
}
