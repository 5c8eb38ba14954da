//! Coordinate ascent over disjointly supported coefficient pairs.
//!
//! A pair is `x = Σ_{k∈P} a_k δ_k`, `y = Σ_{k∈Q} b_k δ_k` with `P ∩ Q = ∅`.
//! The objective is `c · ‖|Tx| ∧ |Ty|‖ / D(x, y)` where `D` is either
//! `max(‖x‖, ‖y‖)` or `‖|x| + |y|‖`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Kernel, LatticeSpace};
use crate::operator::LatticeOperator;

/// Column-major copy of a matrix.
pub(crate) struct ColMajor {
    m: usize,
    data: Vec<f64>,
}

impl ColMajor {
    pub(crate) fn new(op: &LatticeOperator) -> Self {
        let (n, m) = (op.n(), op.m());
        let mut data = vec![0.0; n * m];
        for t in 0..m {
            for i in 0..n {
                data[i * m + t] = op.entry(t, i);
            }
        }
        Self { m, data }
    }

    #[inline]
    pub(crate) fn col(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Denominator {
    /// `max(‖x‖, ‖y‖)`
    Max,
    /// `‖|x| + |y|‖`
    Sum,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AscentConfig {
    pub max_sweeps: usize,
    pub tol: f64,
}

pub(crate) struct PairProblem<'a> {
    pub cols: &'a ColMajor,
    pub dom: Kernel<'a>,
    pub cod: Kernel<'a>,
    pub p: &'a [usize],
    pub q: &'a [usize],
    pub denom: Denominator,
    pub scale: f64,
    pub signed: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct PairResult {
    pub value: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

enum Move {
    Coord { side: usize, k: usize, new: f64 },
    Scale { side: usize, factor: f64 },
}

impl<'a> PairProblem<'a> {
    pub(crate) fn new(
        op_cols: &'a ColMajor,
        domain: &'a LatticeSpace,
        codomain: &'a LatticeSpace,
        p: &'a [usize],
        q: &'a [usize],
        denom: Denominator,
        scale: f64,
        signed: bool,
    ) -> Self {
        Self { cols: op_cols, dom: domain.kernel(), cod: codomain.kernel(), p, q, denom, scale, signed }
    }

    fn idx(&self, side: usize) -> &'a [usize] {
        if side == 0 {
            self.p
        } else {
            self.q
        }
    }

    fn image(&self, side: usize, coeffs: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.cols.m];
        for (&i, &c) in self.idx(side).iter().zip(coeffs) {
            if c != 0.0 {
                for (ut, ct) in u.iter_mut().zip(self.cols.col(i)) {
                    *ut += c * ct;
                }
            }
        }
        u
    }

    fn dom_acc(&self, side: usize, coeffs: &[f64], replace: Option<(usize, f64)>, factor: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (&i, &c)) in self.idx(side).iter().zip(coeffs).enumerate() {
            let c = match replace {
                Some((kk, v)) if kk == k => v,
                _ => c * factor,
            };
            acc = self.dom.accumulate(acc, i, c);
        }
        acc
    }

    fn denominator(&self, acc_p: f64, acc_q: f64) -> f64 {
        match self.denom {
            Denominator::Max => self.dom.finish(acc_p).max(self.dom.finish(acc_q)),
            Denominator::Sum => self.dom.finish(self.dom.fold(acc_p, acc_q)),
        }
    }

    fn meet_norm(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (t, (a, b)) in u.iter().zip(v).enumerate() {
            acc = self.cod.accumulate(acc, t, a.abs().min(b.abs()));
        }
        self.cod.finish(acc)
    }

    /// Objective value of a pair (both sides must be nonzero).
    pub(crate) fn value(&self, a: &[f64], b: &[f64]) -> f64 {
        let (u, v) = (self.image(0, a), self.image(1, b));
        let d = self.denominator(self.dom_acc(0, a, None, 1.0), self.dom_acc(1, b, None, 1.0));
        if d == 0.0 {
            return 0.0;
        }
        self.scale * self.meet_norm(&u, &v) / d
    }

    /// For `Max`, the value with both sides normalized. It dominates
    /// [`Self::value`] and has no ridge along `‖x‖ = ‖y‖`.
    fn normalized_value(&self, u: &[f64], v: &[f64], acc_u: f64, acc_v: f64) -> f64 {
        let (nu, nv) = (self.dom.finish(acc_u), self.dom.finish(acc_v));
        if nu == 0.0 || nv == 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.0;
        for (t, (a, b)) in u.iter().zip(v).enumerate() {
            acc = self.cod.accumulate(acc, t, (a.abs() / nu).min(b.abs() / nv));
        }
        self.scale * self.cod.finish(acc)
    }

    fn trial(&self, mv: &Move, coeffs: [&[f64]; 2], imgs: [&[f64]; 2], accs: [f64; 2]) -> f64 {
        let (side, new_acc) = match *mv {
            Move::Coord { side, k, new } => (side, self.dom_acc(side, coeffs[side], Some((k, new)), 1.0)),
            Move::Scale { side, factor } => (side, self.dom_acc(side, coeffs[side], None, factor)),
        };
        let mut acc_pair = accs;
        acc_pair[side] = new_acc;
        let own = imgs[side];
        let other = imgs[1 - side];
        if self.denom == Denominator::Max {
            let moved: Vec<f64> = match *mv {
                Move::Coord { side, k, new } => {
                    let delta = new - coeffs[side][k];
                    let col = self.cols.col(self.idx(side)[k]);
                    own.iter().zip(col).map(|(u, c)| u + delta * c).collect()
                }
                Move::Scale { .. } => return f64::NEG_INFINITY,
            };
            return self.normalized_value(&moved, other, new_acc, acc_pair[1 - side]);
        }
        let d = self.denominator(acc_pair[0], acc_pair[1]);
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.0;
        match *mv {
            Move::Coord { side, k, new } => {
                let delta = new - coeffs[side][k];
                let col = self.cols.col(self.idx(side)[k]);
                for t in 0..own.len() {
                    let ut = own[t] + delta * col[t];
                    acc = self.cod.accumulate(acc, t, ut.abs().min(other[t].abs()));
                }
            }
            Move::Scale { factor, .. } => {
                for t in 0..own.len() {
                    acc = self.cod.accumulate(acc, t, (own[t] * factor).abs().min(other[t].abs()));
                }
            }
        }
        self.scale * self.cod.finish(acc) / d
    }

    /// Coordinate ascent with multiplicative moves, zeroing/reviving,
    /// sign flips (when signed) and whole-side rescaling.
    pub(crate) fn ascend(&self, a0: Vec<f64>, b0: Vec<f64>, cfg: AscentConfig) -> PairResult {
        let mut c = [a0, b0];
        if self.denom == Denominator::Max {
            self.normalize(&mut c);
        }
        let mut val = self.value(&c[0], &c[1]);
        let mut s = 0.5f64;
        for _ in 0..cfg.max_sweeps {
            let mut improved = false;
            let mut imgs = [self.image(0, &c[0]), self.image(1, &c[1])];
            let mut accs = [self.dom_acc(0, &c[0], None, 1.0), self.dom_acc(1, &c[1], None, 1.0)];
            for side in 0..2 {
                for k in 0..c[side].len() {
                    let cur = c[side][k];
                    let nonzero = c[side].iter().filter(|v| **v != 0.0).count();
                    let mut cands: Vec<f64> = Vec::with_capacity(4);
                    if cur != 0.0 {
                        cands.push(cur * (1.0 + s));
                        cands.push(cur / (1.0 + s));
                        if nonzero > 1 {
                            cands.push(0.0);
                        }
                        if self.signed {
                            cands.push(-cur);
                        }
                    } else {
                        let mag = c[side].iter().fold(0.0f64, |m, v| m.max(v.abs())) * s;
                        cands.push(mag);
                        if self.signed {
                            cands.push(-mag);
                        }
                    }
                    let mut best: Option<(f64, f64)> = None;
                    for new in cands {
                        let mv = Move::Coord { side, k, new };
                        let tv = self.trial(&mv, [&c[0], &c[1]], [&imgs[0], &imgs[1]], accs);
                        if better(tv, best.map_or(val, |b| b.0)) {
                            best = Some((tv, new));
                        }
                    }
                    if let Some((tv, new)) = best {
                        let delta = new - c[side][k];
                        let col = self.cols.col(self.idx(side)[k]);
                        for (ut, ct) in imgs[side].iter_mut().zip(col) {
                            *ut += delta * ct;
                        }
                        c[side][k] = new;
                        accs[side] = self.dom_acc(side, &c[side], None, 1.0);
                        val = tv;
                        improved = true;
                    }
                }
            }
            for side in 0..2 {
                for factor in [1.0 + s, 1.0 / (1.0 + s)] {
                    let mv = Move::Scale { side, factor };
                    let tv = self.trial(&mv, [&c[0], &c[1]], [&imgs[0], &imgs[1]], accs);
                    if better(tv, val) {
                        c[side].iter_mut().for_each(|v| *v *= factor);
                        imgs[side].iter_mut().for_each(|v| *v *= factor);
                        accs[side] = self.dom_acc(side, &c[side], None, 1.0);
                        val = tv;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                s *= 0.5;
                if s < cfg.tol {
                    break;
                }
            }
        }
        if self.denom == Denominator::Max {
            self.normalize(&mut c);
        }
        let [a, b] = c;
        let value = self.value(&a, &b);
        PairResult { value, a, b }
    }

    fn normalize(&self, c: &mut [Vec<f64>; 2]) {
        for (side, coeffs) in c.iter_mut().enumerate() {
            let n = self.dom.finish(self.dom_acc(side, coeffs, None, 1.0));
            if n > 0.0 {
                coeffs.iter_mut().for_each(|v| *v /= n);
            }
        }
    }
}

#[inline]
fn better(candidate: f64, current: f64) -> bool {
    if current <= 0.0 {
        candidate > current && candidate > 0.0
    } else {
        candidate > current * (1.0 + 1e-13)
    }
}

/// Random coefficients on `len` coordinates, at least one nonzero.
pub(crate) fn random_coeffs(rng: &mut ChaCha8Rng, len: usize, signed: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen::<f64>() < 0.25 {
                0.0
            } else {
                let mag = rng.gen_range(0.05..1.0);
                if signed && rng.gen::<bool>() {
                    -mag
                } else {
                    mag
                }
            }
        })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        let k = rng.gen_range(0..len);
        v[k] = rng.gen_range(0.05..1.0);
    }
    v
}

/// SplitMix64 finalizer used to derive per-task seeds.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Lexicographic comparison of float slices by total order.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
