//! Seeded verification suites. Every report is a pure function of
//! `(suite, seed, trials)`, so re-running with the same arguments reproduces
//! the JSON byte for byte.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::defects::SearchOptions;
use crate::error::{LatticeError, Result};
use crate::inequalities::{
    arb_number_check, iterated_join_check, maxmin_operator_check, maxmin_sandwich_check, net_estimate_check,
    sphere_net, vector_split_check,
};
use crate::instances::{graph_operator, graph_verify, perturbed_dp_instance, walsh_operator, walsh_verify};
use crate::lattice::{LatticeSpace, LatticeVector, NormSpec};
use crate::search::mix_seed;

/// Rows are capped at this many failing instances per suite.
const MAX_FAILURE_ROWS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Maxmin,
    Vector,
    Net,
    Graph,
    Walsh,
    Arbnumber,
    Joins,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Maxmin, Suite::Vector, Suite::Net, Suite::Graph, Suite::Walsh, Suite::Arbnumber, Suite::Joins];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Maxmin => "maxmin",
            Suite::Vector => "vector",
            Suite::Net => "net",
            Suite::Graph => "graph",
            Suite::Walsh => "walsh",
            Suite::Arbnumber => "arbnumber",
            Suite::Joins => "joins",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Maxmin => 10_000,
            Suite::Vector | Suite::Net => 100,
            Suite::Arbnumber | Suite::Joins => 50,
            Suite::Graph | Suite::Walsh => 1,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| LatticeError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub rows: Vec<Map<String, Value>>,
    pub passed: bool,
}

/// Hex SHA-256 of the compact JSON encoding of `v`.
pub fn digest<T: Serialize + ?Sized>(v: &T) -> String {
    let bytes = serde_json::to_vec(v).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

fn row(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("rows are objects"),
    }
}

fn merge(mut base: Map<String, Value>, extra: impl Serialize) -> Map<String, Value> {
    if let Value::Object(m) = serde_json::to_value(extra).expect("serializable") {
        base.extend(m);
    }
    base
}

/// Runs `suite`; `trials = None` uses [`Suite::default_trials`].
pub fn run_suite(suite: Suite, seed: u64, trials: Option<usize>) -> Result<SuiteReport> {
    let trials = trials.unwrap_or(suite.default_trials());
    let (rows, passed) = match suite {
        Suite::Maxmin => maxmin(seed, trials)?,
        Suite::Vector => vector(seed, trials)?,
        Suite::Net => net(seed, trials)?,
        Suite::Graph => graph(seed)?,
        Suite::Walsh => walsh(seed)?,
        Suite::Arbnumber => arbnumber(seed, trials)?,
        Suite::Joins => joins(seed, trials)?,
    };
    Ok(SuiteReport { suite, seed, trials, rows, passed })
}

fn random_nonnegative(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    match rng.gen_range(0..4) {
        0 => (0..len).map(|_| rng.gen::<f64>()).collect(),
        1 => (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect(),
        2 => (0..len).map(|_| if rng.gen::<bool>() { rng.gen::<f64>() } else { 0.0 }).collect(),
        _ => (0..len).map(|_| rng.gen::<f64>().max(1e-3).powi(-2)).collect(),
    }
}

fn maxmin_edge_cases() -> Vec<(String, Vec<f64>)> {
    let mut out = Vec::new();
    for len in [1, 2, 3, 4, 8, 12] {
        out.push((format!("all_equal_{len}"), vec![1.0; len]));
        let mut one = vec![0.0; len];
        one[0] = 1.0;
        out.push((format!("one_hot_{len}"), one));
    }
    for ratio in [0.5f64, 0.9] {
        out.push((format!("geometric_{ratio}_12"), (0..12).map(|k| ratio.powi(k)).collect()));
    }
    out
}

fn maxmin(seed: u64, trials: usize) -> Result<(Vec<Map<String, Value>>, bool)> {
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (name, b) in maxmin_edge_cases() {
        let r = maxmin_sandwich_check(&b)?;
        failures += usize::from(!r.holds);
        let slack = r.rhs - r.mid;
        rows.push(merge(row(json!({"instance": name, "inputs_digest": digest(&b)})), &r).into_iter().chain([("slack".into(), json!(slack))]).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(trials);
    let (mut worst_ratio, mut min_slack) = (0.0f64, f64::INFINITY);
    let mut failing = Vec::new();
    for k in 0..trials {
        let len = rng.gen_range(1..=12);
        let b = random_nonnegative(&mut rng, len);
        let r = maxmin_sandwich_check(&b)?;
        if let Some(q) = r.ratio {
            worst_ratio = worst_ratio.max(q);
        }
        min_slack = min_slack.min(r.rhs - r.mid);
        if !r.holds {
            failures += 1;
            if failing.len() < MAX_FAILURE_ROWS {
                failing.push(merge(row(json!({"instance": format!("trial_{k}"), "inputs_digest": digest(&b), "b": b})), &r));
            }
        }
        inputs.push(b);
    }
    rows.push(row(json!({
        "instance": "random",
        "inputs_digest": digest(&inputs),
        "trials": trials,
        "failures": failures,
        "worst_ratio": worst_ratio,
        "min_slack": if min_slack.is_finite() { json!(min_slack) } else { Value::Null },
        "holds": failures == 0,
    })));
    rows.extend(failing);
    Ok((rows, failures == 0))
}

fn vector(seed: u64, trials: usize) -> Result<(Vec<Map<String, Value>>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut failing = Vec::new();
    let qs = [1.0, 2.0, 3.0];
    let mut stats = [(0usize, 0usize, f64::INFINITY); 3];
    let mut inputs = Vec::with_capacity(trials);
    for k in 0..trials {
        let qi = k % 3;
        let dim = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=10);
        let space = LatticeSpace::lp(dim, qs[qi])?;
        let fam: Vec<Vec<f64>> = (0..n).map(|_| random_nonnegative(&mut rng, dim)).collect();
        let fs = fam.iter().map(|f| LatticeVector::new(f.clone())).collect::<Result<Vec<_>>>()?;
        let r = vector_split_check(&fs, &space)?;
        let s = &mut stats[qi];
        s.0 += 1;
        s.2 = s.2.min(r.norm_lhs - r.norm_rhs);
        if !r.holds {
            s.1 += 1;
            if failing.len() < MAX_FAILURE_ROWS {
                failing.push(merge(row(json!({"instance": format!("trial_{k}"), "q": qs[qi], "inputs_digest": digest(&fam), "family": fam})), &r));
            }
        }
        inputs.push((qs[qi], fam));
    }
    let mut failures = 0;
    for (qi, (count, fail, slack)) in stats.iter().enumerate() {
        failures += fail;
        rows.push(row(json!({
            "instance": format!("q_{}", qs[qi]),
            "inputs_digest": digest(&inputs.iter().filter(|(q, _)| *q == qs[qi]).collect::<Vec<_>>()),
            "trials": count,
            "failures": fail,
            "min_slack": if slack.is_finite() { json!(slack) } else { Value::Null },
            "holds": *fail == 0,
        })));
    }
    rows.extend(failing);
    Ok((rows, failures == 0))
}

fn net(seed: u64, trials: usize) -> Result<(Vec<Map<String, Value>>, bool)> {
    let ns = [4usize, 16, 64];
    let mut rows = Vec::new();
    let mut passed = true;
    for (pi, p) in [2.0, 1.5].into_iter().enumerate() {
        let q = p / (p - 1.0);
        let nets = ns.iter().map(|&n| sphere_net(q, n)).collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, pi as u64));
        let mut errors = vec![vec![0.0; trials]; ns.len()];
        let mut fails = vec![0usize; ns.len()];
        let mut worst = vec![0.0f64; ns.len()];
        let mut monotone_failures = 0usize;
        let mut inputs = Vec::with_capacity(trials);
        for k in 0..trials {
            let dim = rng.gen_range(1..=8);
            let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let space = LatticeSpace::lp(dim, p)?;
            let (uu, vv) = (LatticeVector::new(u.clone())?, LatticeVector::new(v.clone())?);
            for (j, net) in nets.iter().enumerate() {
                let r = net_estimate_check(&space, &uu, &vv, p, net)?;
                errors[j][k] = r.error;
                fails[j] += usize::from(!r.holds);
                if r.bound > 0.0 {
                    worst[j] = worst[j].max(r.error / r.bound);
                }
                if j > 0 && r.error > errors[j - 1][k] + 1e-12 {
                    monotone_failures += 1;
                }
            }
            inputs.push((u, v));
        }
        let digest_in = digest(&inputs);
        let means: Vec<f64> = errors.iter().map(|e| e.iter().sum::<f64>() / trials.max(1) as f64).collect();
        for (j, &n) in ns.iter().enumerate() {
            let ok = fails[j] == 0;
            passed &= ok;
            rows.push(row(json!({
                "instance": format!("p_{p}_N_{n}"),
                "inputs_digest": digest_in,
                "p": p,
                "N": n,
                "covering_gap": nets[j].covering_gap(),
                "C_q": nets[j].arclength,
                "mean_error": means[j],
                "worst_error_over_bound": worst[j],
                "failures": fails[j],
                "holds": ok,
            })));
        }
        let ratios: Vec<Value> = means
            .windows(2)
            .map(|w| if w[1] > 0.0 { json!(w[0] / w[1]) } else { Value::Null })
            .collect();
        let scaling_ok = means.windows(2).all(|w| w[1] == 0.0 || w[0] / w[1] >= 3.0);
        let ok = scaling_ok && monotone_failures == 0;
        passed &= ok;
        rows.push(row(json!({
            "instance": format!("p_{p}_scaling"),
            "inputs_digest": digest_in,
            "p": p,
            "reduction_per_4x": ratios,
            "monotone_failures": monotone_failures,
            "holds": ok,
        })));
    }
    Ok((rows, passed))
}

/// The graph instances checked by default, as `(N, p, q)`.
pub const GRAPH_DEFAULTS: [(usize, f64, f64); 5] = [(2, 1.0, 2.0), (3, 1.0, 2.0), (4, 1.0, 2.0), (16, 1.0, 2.0), (4, 2.0, 3.0)];

fn graph(seed: u64) -> Result<(Vec<Map<String, Value>>, bool)> {
    let mut rows = Vec::new();
    let mut passed = true;
    for (k, &(n, p, q)) in GRAPH_DEFAULTS.iter().enumerate() {
        let inst = graph_operator(n, p, q)?;
        let r = graph_verify(&inst, &SearchOptions::with_seed(mix_seed(seed, k as u64), 8))?;
        passed &= r.passed;
        let slack = r.distance_lower - r.distance_target;
        rows.push(
            merge(row(json!({"instance": format!("graph_{n}_{p}_{q}"), "inputs_digest": digest(&inst.op)})), &r)
                .into_iter()
                .chain([("holds".into(), json!(r.passed)), ("slack".into(), json!(slack))])
                .collect(),
        );
    }
    Ok((rows, passed))
}

fn walsh(seed: u64) -> Result<(Vec<Map<String, Value>>, bool)> {
    let inst = walsh_operator(3, 6)?;
    let r = walsh_verify(&inst, None, seed, 256)?;
    let mut rows = Vec::new();
    let d = digest(&inst.op);
    for l in &r.levels {
        rows.push(merge(row(json!({"instance": "walsh_level", "inputs_digest": d})), l));
    }
    rows.push(row(json!({
        "instance": "walsh_3_6",
        "inputs_digest": d,
        "eps_target": r.eps_target,
        "perturbation_norm": r.perturbation_norm,
        "perturbation_ok": r.perturbation_ok,
        "modulus_target": r.modulus_target,
        "column_bound": r.column_bound.value,
        "column_bound_certified": r.column_bound.certified,
        "column_bound_level": r.column_bound_level,
        "candidates": r.candidates,
        "modulus_ok": r.modulus_ok,
        "holds": r.passed,
        "slack": r.column_bound.value - r.modulus_target,
    })));
    Ok((rows, r.passed))
}

const DOMAINS: [(&str, Option<f64>); 3] = [("l1", Some(1.0)), ("l2", Some(2.0)), ("sup", None)];

fn spec_of(p: Option<f64>) -> Result<NormSpec> {
    match p {
        Some(p) => NormSpec::lp(p),
        None => Ok(NormSpec::Sup),
    }
}

struct Perturbed {
    op: crate::operator::LatticeOperator,
    eps: f64,
    label: String,
}

fn perturbed(seed: u64, k: usize, rng: &mut ChaCha8Rng) -> Result<Perturbed> {
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(n..=2 * n);
    let eta = [1e-3, 1e-2, 1e-1][rng.gen_range(0..3)];
    let (dname, dp) = DOMAINS[k % 3];
    let (cname, cp) = DOMAINS[(k / 3) % 3];
    let iseed = mix_seed(seed, k as u64);
    let (op, eps) = perturbed_dp_instance(n, m, eta, iseed, &spec_of(dp)?, &spec_of(cp)?)?;
    Ok(Perturbed { op, eps, label: format!("perturbed_{n}x{m}_eta_{eta}_{dname}_{cname}_seed_{iseed}") })
}

fn arbnumber(seed: u64, trials: usize) -> Result<(Vec<Map<String, Value>>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut checks) = (0usize, 0usize);
    let mut worst = 0.0f64;
    let mut failing = Vec::new();
    let mut digests = Vec::with_capacity(trials);
    for k in 0..trials {
        let inst = perturbed(seed, k, &mut rng)?;
        let n = inst.op.n();
        let parts = rng.gen_range(1..=n);
        let mut owner: Vec<usize> = (0..n).map(|i| i % parts).collect();
        owner.shuffle(&mut rng);
        let family: Vec<Vec<f64>> = (0..parts)
            .map(|j| owner.iter().map(|&o| if o == j { rng.gen_range(0.0..1.0) } else { 0.0 }).collect())
            .collect();
        let xs: Vec<Vec<f64>> = (0..rng.gen_range(1..=4)).map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let p = [1.5, 2.0, 3.0][k % 3];
        let fam = family.iter().map(|f| LatticeVector::new(f.clone())).collect::<Result<Vec<_>>>()?;
        let xv = xs.iter().map(|f| LatticeVector::new(f.clone())).collect::<Result<Vec<_>>>()?;
        let a = arb_number_check(&inst.op, &fam, p, inst.eps)?;
        let b = maxmin_operator_check(&inst.op, &xv, inst.eps)?;
        checks += 2;
        if a.rhs > 0.0 {
            worst = worst.max(a.sum_minus_join.max(a.p_sum_gap) / a.rhs);
        }
        if b.rhs > 0.0 {
            worst = worst.max(b.join_gap.max(b.meet_gap) / b.rhs);
        }
        let d = digest(&(&inst.op, &family, &xs, p));
        if !(a.holds && b.holds) {
            failures += 1;
            if failing.len() < MAX_FAILURE_ROWS {
                failing.push(row(json!({
                    "instance": inst.label,
                    "inputs_digest": d,
                    "eps": inst.eps,
                    "arb_number": a,
                    "maxmin": b,
                    "holds": false,
                })));
            }
        }
        digests.push(d);
    }
    let mut rows = vec![row(json!({
        "instance": "perturbed",
        "inputs_digest": digest(&digests),
        "trials": trials,
        "checks": checks,
        "failures": failures,
        "worst_lhs_over_rhs": worst,
        "holds": failures == 0,
    }))];
    rows.extend(failing);
    Ok((rows, failures == 0))
}

fn joins(seed: u64, trials: usize) -> Result<(Vec<Map<String, Value>>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    let mut failing = Vec::new();
    let mut digests = Vec::with_capacity(trials);
    for k in 0..trials {
        let inst = perturbed(seed, k, &mut rng)?;
        let n = inst.op.n();
        let count = rng.gen_range(1..=8);
        let mut xs = Vec::with_capacity(count);
        for _ in 0..count {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let norm = inst.op.domain().norm_slice(&raw);
            let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
            xs.push(raw.into_iter().map(|v| v * scale).collect::<Vec<f64>>());
        }
        let xv = xs.iter().map(|f| LatticeVector::new(f.clone())).collect::<Result<Vec<_>>>()?;
        let r = iterated_join_check(&inst.op, &xv, inst.eps)?;
        if r.rhs > 0.0 {
            worst = worst.max(r.lhs / r.rhs);
        }
        let d = digest(&(&inst.op, &xs));
        if !r.holds {
            failures += 1;
            if failing.len() < MAX_FAILURE_ROWS {
                failing.push(merge(row(json!({"instance": inst.label, "inputs_digest": d, "eps_mp": inst.eps})), &r));
            }
        }
        digests.push(d);
    }
    let mut rows = vec![row(json!({
        "instance": "perturbed",
        "inputs_digest": digest(&digests),
        "trials": trials,
        "failures": failures,
        "worst_lhs_over_rhs": worst,
        "holds": failures == 0,
    }))];
    rows.extend(failing);
    Ok((rows, failures == 0))
}
