//! `lattice-dp`: defects, approximants, verification suites and example
//! instances from the command line.
//!
//! Exit codes: 0 ok, 1 verification failure or bound violation, 2 input or
//! parameter error, 3 dimension mismatch, 4 method/norm incompatibility.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lattice_dp::{
    approximate_l1_target, approximate_lq_target, construct_dp_linfty, construct_dp_supnorm_target,
    construct_dp_threshold, digest, dp_defect_search, graph_operator, indicator_split_defect, instance_json,
    lh_defect_search, mp_defect_search, perturbed_dp_instance, run_suite, sdp_atom_defect, walsh_operator,
    ApproxResult, Exponent, IndicatorOptions, InstanceMeta, LatticeError, LatticeOperator, NormSpec, SearchOptions,
    Suite,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "lattice-dp", version, about = "Disjointness-preservation defects and approximants")]
struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefectMode {
    Indicator,
    Search,
    Mp,
    Lh,
    Sdp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Phi,
    Truncate,
    Threshold,
    L1,
    Lq,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Maxmin,
    Vector,
    Net,
    Graph,
    Walsh,
    Arbnumber,
    Joins,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Graph,
    Walsh,
    Perturbed,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a defect of an operator read from a JSON file.
    Defect {
        op_file: PathBuf,
        #[arg(long, value_enum, default_value_t = DefectMode::Search)]
        mode: DefectMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Build a disjointness-preserving approximant.
    Approx {
        op_file: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        eps: Option<f64>,
        /// Where to write the full result JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Write an example instance.
    Example {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "N", default_value_t = 2)]
        big_n: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 3)]
        kmin: u32,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 1e-3)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Domain norm of a perturbed instance: `sup`, `l<p>` or a bare exponent.
        #[arg(long, default_value = "l1")]
        domain: String,
        #[arg(long, default_value = "l1")]
        codomain: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    rows: Vec<Map<String, Value>>,
    timing: f64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        let code = match e {
            LatticeError::BoundViolated { .. } => 1,
            LatticeError::DimensionMismatch { .. } => 3,
            LatticeError::IncompatibleNorm(_) | LatticeError::ConstraintViolated(_) | LatticeError::NotPositive => 4,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

/// Result of a command: the report plus whether its checks passed.
struct Outcome {
    report: RunReport,
    passed: bool,
}

fn as_row(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("report rows serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn load_operator(path: &Path) -> Result<(LatticeOperator, Value), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let op = LatticeOperator::from_json_value(value.clone())?;
    Ok((op, value))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("json");
    std::fs::write(path, text + "\n").map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn parse_norm(s: &str) -> Result<NormSpec, Failure> {
    let t = s.trim().to_ascii_lowercase();
    if t == "sup" || t == "linf" || t == "inf" {
        return Ok(NormSpec::Sup);
    }
    let num = t.strip_prefix('l').unwrap_or(&t);
    let p: f64 = num.parse().map_err(|_| Failure::new(2, format!("unrecognized norm {s:?}")))?;
    Ok(NormSpec::lp(p)?)
}

fn cmd_defect(op_file: &Path, mode: DefectMode, seed: u64, restarts: usize) -> Result<Outcome, Failure> {
    let (op, value) = load_operator(op_file)?;
    let opts = SearchOptions::with_seed(seed, restarts);
    let (name, est) = match mode {
        DefectMode::Indicator => ("indicator", indicator_split_defect(&op, &IndicatorOptions { seed, ..Default::default() })),
        DefectMode::Search => ("search", dp_defect_search(&op, &opts)),
        DefectMode::Mp => {
            if !op.is_positive() {
                return Err(LatticeError::NotPositive.into());
            }
            ("mp", mp_defect_search(&op, &opts))
        }
        DefectMode::Lh => ("lh", lh_defect_search(&op, &opts)),
        DefectMode::Sdp => ("sdp", sdp_atom_defect(&op)),
    };
    let mut row = Map::new();
    row.insert("mode".into(), json!(name));
    row.extend(as_row(&est));
    Ok(Outcome {
        report: RunReport {
            command: "defect".into(),
            inputs_digest: digest(&json!({"operator": value, "mode": name, "seed": seed, "restarts": restarts})),
            rows: vec![row],
            timing: 0.0,
        },
        passed: true,
    })
}

fn cmd_approx(op_file: &Path, method: Method, eps: Option<f64>, out: Option<&Path>) -> Result<Outcome, Failure> {
    if let Some(e) = eps {
        if !(e.is_finite() && e >= 0.0) {
            return Err(Failure::new(2, format!("--eps must be a nonnegative number, got {e}")));
        }
    }
    let (op, value) = load_operator(op_file)?;
    let (name, res): (&str, ApproxResult) = match method {
        Method::Phi => ("phi", construct_dp_linfty(&op, eps)?),
        Method::Truncate => ("truncate", construct_dp_supnorm_target(&op, eps)?),
        Method::Threshold => {
            let e = eps.filter(|e| *e > 0.0).ok_or_else(|| Failure::new(2, "--method threshold requires a positive --eps"))?;
            ("threshold", construct_dp_threshold(&op, e)?)
        }
        Method::L1 => ("l1", approximate_l1_target(&op, eps)?),
        Method::Lq => {
            let q = match op.domain().norm_spec().exponent() {
                Exponent::Finite(q) if q > 1.0 => q,
                _ => return Err(Failure::new(4, "--method lq needs an L_q domain with 1 < q < infinity")),
            };
            ("lq", approximate_lq_target(&op, q, eps)?)
        }
    };
    let full = serde_json::to_value(&res).expect("approx result serializes");
    if let Some(path) = out {
        write_json(path, &full)?;
    }
    let row = as_row(json!({
        "method": name,
        "distance": res.distance,
        "bound": res.bound,
        "eps_used": res.eps_used,
        "dominated": res.dominated,
        "construction": res.method,
        "notes": res.notes,
    }));
    Ok(Outcome {
        report: RunReport {
            command: "approx".into(),
            inputs_digest: digest(&json!({"operator": value, "method": name, "eps": eps})),
            rows: vec![row],
            timing: 0.0,
        },
        passed: true,
    })
}

fn cmd_verify(suite: SuiteArg, seed: u64, trials: Option<usize>) -> Result<Outcome, Failure> {
    let suite = match suite {
        SuiteArg::Maxmin => Suite::Maxmin,
        SuiteArg::Vector => Suite::Vector,
        SuiteArg::Net => Suite::Net,
        SuiteArg::Graph => Suite::Graph,
        SuiteArg::Walsh => Suite::Walsh,
        SuiteArg::Arbnumber => Suite::Arbnumber,
        SuiteArg::Joins => Suite::Joins,
    };
    let rep = run_suite(suite, seed, trials)?;
    let mut rows = vec![as_row(json!({"suite": rep.suite, "seed": rep.seed, "trials": rep.trials, "passed": rep.passed}))];
    rows.extend(rep.rows);
    Ok(Outcome {
        report: RunReport {
            command: "verify".into(),
            inputs_digest: digest(&json!({"suite": suite, "seed": seed, "trials": rep.trials})),
            rows,
            timing: 0.0,
        },
        passed: rep.passed,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_example(
    kind: Kind,
    big_n: usize,
    p: f64,
    q: f64,
    kmin: u32,
    kmax: u32,
    n: usize,
    m: usize,
    eta: f64,
    seed: u64,
    domain: &str,
    codomain: &str,
    out: Option<&Path>,
) -> Result<Outcome, Failure> {
    let invalid = |e: LatticeError| Failure::new(2, e.to_string());
    let (op, meta, params) = match kind {
        Kind::Graph => {
            let g = graph_operator(big_n, p, q).map_err(invalid)?;
            let meta = g.meta();
            (g.op, meta, json!({"kind": "graph", "N": big_n, "p": p, "q": q}))
        }
        Kind::Walsh => {
            let w = walsh_operator(kmin, kmax).map_err(invalid)?;
            let meta = w.meta();
            (w.op, meta, json!({"kind": "walsh", "kmin": kmin, "kmax": kmax}))
        }
        Kind::Perturbed => {
            let (d, c) = (parse_norm(domain)?, parse_norm(codomain)?);
            let (op, eps) = perturbed_dp_instance(n, m, eta, seed, &d, &c).map_err(invalid)?;
            let meta = InstanceMeta::Perturbed { n, m, eta, seed, eps_analytic: eps };
            let params = json!({"kind": "perturbed", "n": n, "m": m, "eta": eta, "seed": seed, "domain": domain, "codomain": codomain});
            (op, meta, params)
        }
    };
    let inst = instance_json(&op, &meta);
    let mut row = as_row(json!({"domain_dim": op.n(), "codomain_dim": op.m(), "meta": meta}));
    match out {
        Some(path) => {
            write_json(path, &inst)?;
            row.insert("out".into(), json!(path.display().to_string()));
        }
        None => {
            row.insert("instance".into(), inst);
        }
    }
    Ok(Outcome {
        report: RunReport { command: "example".into(), inputs_digest: digest(&params), rows: vec![row], timing: 0.0 },
        passed: true,
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_csv(rep: &RunReport) -> Result<String, Failure> {
    let mut cols: Vec<String> = vec!["command".into(), "inputs_digest".into()];
    for row in &rep.rows {
        for k in row.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::new(2, e.to_string());
    w.write_record(&cols).map_err(io)?;
    for row in &rep.rows {
        let rec: Vec<String> = cols
            .iter()
            .map(|c| match c.as_str() {
                "command" if !row.contains_key(c) => rep.command.clone(),
                "inputs_digest" if !row.contains_key(c) => rep.inputs_digest.clone(),
                _ => row.get(c).map(cell).unwrap_or_default(),
            })
            .collect();
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::new(2, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("LATTICE_DP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::new(2, format!("LATTICE_DP_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::new(2, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(RunReport, bool), Failure> {
    configure_threads()?;
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Defect { op_file, mode, seed, restarts } => cmd_defect(&op_file, mode, seed, restarts)?,
        Command::Approx { op_file, method, eps, out } => cmd_approx(&op_file, method, eps, out.as_deref())?,
        Command::Verify { suite, seed, trials } => cmd_verify(suite, seed, trials)?,
        Command::Example { kind, big_n, p, q, kmin, kmax, n, m, eta, seed, domain, codomain, out } => {
            cmd_example(kind, big_n, p, q, kmin, kmax, n, m, eta, seed, &domain, &codomain, out.as_deref())?
        }
    };
    let mut report = outcome.report;
    report.timing = start.elapsed().as_secs_f64();
    Ok((report, outcome.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok((report, passed)) => {
            let text = match format {
                Format::Json => Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
                Format::Csv => render_csv(&report),
            };
            match text {
                Ok(t) => print!("{t}"),
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    return ExitCode::from(f.code);
                }
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
