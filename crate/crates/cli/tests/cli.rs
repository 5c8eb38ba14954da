use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-dp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn space(dim: usize, norm: Value) -> Value {
    json!({"dim": dim, "norm": norm})
}

fn lp(p: f64) -> Value {
    json!({"kind": "lp", "p": p})
}

fn sup() -> Value {
    json!({"kind": "sup"})
}

fn op(domain: Value, codomain: Value, matrix: Value) -> Value {
    json!({"domain": domain, "codomain": codomain, "matrix": matrix})
}

fn identity(n: usize, dom: Value, cod: Value) -> Value {
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    op(space(n, dom), space(n, cod), json!(rows))
}

fn p(s: &Path) -> &str {
    s.to_str().unwrap()
}

#[test]
fn defect_identity_indicator_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", &identity(3, lp(2.0), lp(2.0)));
    for mode in ["indicator", "search", "sdp", "lh"] {
        let r = report(&run(&["defect", p(&f), "--mode", mode]));
        assert_eq!(r["command"], "defect");
        assert_eq!(r["rows"][0]["lower_bound"], 0.0, "{mode}");
    }
}

#[test]
fn defect_two_equal_columns_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "eq.json", &op(space(2, lp(2.0)), space(2, lp(2.0)), json!([[1.0, 1.0], [0.0, 0.0]])));
    for mode in ["indicator", "search", "mp"] {
        let r = report(&run(&["defect", p(&f), "--mode", mode]));
        let v = r["rows"][0]["lower_bound"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{mode}: {v}");
    }
}

#[test]
fn defect_graph_search_is_within_analytic_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    report(&run(&["example", "--kind", "graph", "--N", "16", "--p", "1", "--q", "2", "--out", p(&g)]));
    let r = report(&run(&["defect", p(&g), "--mode", "search", "--seed", "1", "--restarts", "2"]));
    assert!(r["rows"][0]["lower_bound"].as_f64().unwrap() <= 0.25 + 1e-12);
}

#[test]
fn defect_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["defect", p(&bad)])), 2);
    assert_eq!(code(&run(&["defect", p(&dir.path().join("missing.json"))])), 2);
    let mism = write(dir.path(), "mism.json", &op(space(2, lp(2.0)), space(3, lp(2.0)), json!([[1.0, 0.0], [0.0, 1.0]])));
    assert_eq!(code(&run(&["defect", p(&mism)])), 3);
    let neg = write(dir.path(), "neg.json", &op(space(2, lp(2.0)), space(2, lp(2.0)), json!([[1.0, -1.0], [0.0, 1.0]])));
    assert_eq!(code(&run(&["defect", p(&neg), "--mode", "mp"])), 4);
    assert_eq!(code(&run(&["defect", p(&neg), "--mode", "bogus"])), 2);
}

#[test]
fn approx_fixes_dp_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("phi", identity(3, sup(), lp(2.0))),
        ("truncate", identity(3, lp(2.0), sup())),
        ("threshold", identity(3, lp(2.0), sup())),
        ("l1", identity(3, lp(1.0), lp(1.0))),
        ("lq", identity(3, lp(2.0), lp(2.0))),
    ];
    for (method, o) in cases {
        let f = write(dir.path(), &format!("{method}.json"), &o);
        let out = dir.path().join(format!("{method}.out.json"));
        let r = report(&run(&["approx", p(&f), "--method", method, "--eps", "0.5", "--out", p(&out)]));
        assert_eq!(r["rows"][0]["distance"], 0.0, "{method}");
        let full: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(full["S"], o, "{method}");
    }
}

#[test]
fn approx_perturbed_with_meta_eps_is_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("pert.json");
    let ex = report(&run(&["example", "--kind", "perturbed", "--n", "4", "--m", "8", "--eta", "0.001", "--seed", "7", "--out", p(&inst)]));
    let eps = ex["rows"][0]["meta"]["eps_analytic"].as_f64().unwrap();
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(saved["meta"]["eps_analytic"].as_f64().unwrap(), eps);
    let out = dir.path().join("s.json");
    let r = report(&run(&["approx", p(&inst), "--method", "l1", "--eps", &eps.to_string(), "--out", p(&out)]));
    let row = &r["rows"][0];
    assert!(row["distance"].as_f64().unwrap() <= row["bound"].as_f64().unwrap());
    assert_eq!(row["dominated"], true);
}

#[test]
fn approx_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let l2 = write(dir.path(), "l2.json", &op(space(2, lp(2.0)), space(2, lp(2.0)), json!([[1.0, 1.0], [0.0, 1.0]])));
    // phi needs a sup-normed domain
    assert_eq!(code(&run(&["approx", p(&l2), "--method", "phi"])), 4);
    // threshold without eps
    let supc = write(dir.path(), "supc.json", &op(space(2, lp(2.0)), space(2, sup()), json!([[0.9, 0.8], [0.0, 0.1]])));
    assert_eq!(code(&run(&["approx", p(&supc), "--method", "threshold"])), 2);
    // row 0 has two entries above eps
    let o = run(&["approx", p(&supc), "--method", "threshold", "--eps", "0.1"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 0"));
    // a claimed eps smaller than the true defect violates the bound
    let supd = write(dir.path(), "supd.json", &op(space(2, sup()), space(2, lp(2.0)), json!([[1.0, 1.0], [0.0, 1.0]])));
    assert_eq!(code(&run(&["approx", p(&supd), "--method", "phi", "--eps", "0"])), 1);
    assert_eq!(code(&run(&["approx", p(&supd), "--method", "phi", "--eps", "-1"])), 2);
}

#[test]
fn verify_suites_pass_and_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    for (suite, trials) in [("maxmin", "500"), ("vector", "20"), ("net", "10"), ("arbnumber", "10"), ("joins", "10"), ("walsh", "1")] {
        let args = ["verify", "--suite", suite, "--seed", "11", "--trials", trials];
        let a = report(&run(&args));
        let b = report(&run(&args));
        assert_eq!(a["rows"][0]["passed"], true, "{suite}");
        assert_eq!(strip(a), strip(b), "{suite}");
    }
}

#[test]
fn verify_graph_default_passes() {
    let r = report(&run(&["verify", "--suite", "graph"]));
    assert_eq!(r["rows"][0]["passed"], true);
    let ns: Vec<u64> = r["rows"].as_array().unwrap()[1..].iter().map(|row| row["N"].as_u64().unwrap()).collect();
    assert_eq!(ns, vec![2, 3, 4, 16, 4]);
}

#[test]
fn verify_rejects_unknown_suite() {
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 2);
}

#[test]
fn example_shapes() {
    let r = report(&run(&["example", "--kind", "graph", "--N", "2", "--p", "1", "--q", "2"]));
    let row = &r["rows"][0];
    assert_eq!((row["domain_dim"].as_u64(), row["codomain_dim"].as_u64()), (Some(3), Some(3)));
    assert_eq!(row["instance"]["meta"], json!({"kind": "graph", "N": 2, "p": 1.0, "q": 2.0}));
    let r = report(&run(&["example", "--kind", "walsh", "--kmin", "3", "--kmax", "4"]));
    assert_eq!(r["rows"][0]["domain_dim"], 24);
    assert_eq!(r["rows"][0]["instance"]["meta"]["kind"], "walsh");
    let r = report(&run(&["example", "--kind", "perturbed", "--n", "4", "--m", "8", "--eta", "0.001", "--seed", "7", "--domain", "sup", "--codomain", "l2"]));
    assert!(r["rows"][0]["meta"]["eps_analytic"].as_f64().unwrap() > 0.0);
    assert_eq!(r["rows"][0]["instance"]["domain"]["norm"]["kind"], "sup");
}

#[test]
fn example_invalid_params() {
    assert_eq!(code(&run(&["example", "--kind", "graph", "--N", "1"])), 2);
    assert_eq!(code(&run(&["example", "--kind", "graph", "--N", "3", "--p", "2", "--q", "2"])), 2);
    assert_eq!(code(&run(&["example", "--kind", "walsh", "--kmin", "0", "--kmax", "2"])), 2);
    assert_eq!(code(&run(&["example", "--kind", "perturbed", "--n", "5", "--m", "3"])), 2);
    assert_eq!(code(&run(&["example", "--kind", "perturbed", "--domain", "l0.5"])), 2);
    assert_eq!(code(&run(&["example", "--kind", "triangle"])), 2);
}

#[test]
fn example_output_round_trips_through_defect() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    report(&run(&["example", "--kind", "walsh", "--kmin", "3", "--kmax", "3", "--out", p(&w)]));
    let r = report(&run(&["defect", p(&w), "--mode", "indicator"]));
    assert!(r["rows"][0]["lower_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn csv_format_is_flat() {
    let o = run(&["--format", "csv", "verify", "--suite", "maxmin", "--trials", "10"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("command,inputs_digest,suite,seed,trials,passed"));
    assert!(lines.all(|l| l.starts_with("verify,")));
}

#[test]
fn thread_cap_env() {
    let o = bin().env("LATTICE_DP_THREADS", "1").args(["verify", "--suite", "maxmin", "--trials", "50"]).output().unwrap();
    assert_eq!(code(&o), 0);
    let o = bin().env("LATTICE_DP_THREADS", "zero").args(["verify", "--suite", "maxmin", "--trials", "5"]).output().unwrap();
    assert_eq!(code(&o), 2);
}
