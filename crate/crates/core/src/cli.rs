//! Command-line front end. [`dispatch`] parses arguments, runs one job and
//! returns the process exit code: 0 on success, 1 for usage and input errors,
//! 2 for numerical failures.
//!
//! The primary artifact goes to stdout (thresholds print just the value) and,
//! with `--output`, to a file in the chosen format. The resolved configuration
//! is logged to stderr as one JSON line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{strong_bound, weak_bound, ExponentSearchConfig};
use crate::conditions::{certify, ConditionMode, ConditionTarget, SearchBudget, SupportPattern};
use crate::error::{Error, Result};
use crate::experiments::{
    run_concentration_check, run_example1, run_phase_transition, run_strong_vs_weak, run_weak_threshold_probe,
    ConcentrationSpec, Example1Spec, ExperimentReport, PhaseDiagramSpec, StrongVsWeakSpec, WeakProbeSpec,
};
use crate::io;
use crate::limits::{sectional_limit_threshold, strong_limit_threshold, weak_limit_threshold};
use crate::linalg::RngSeed;
use crate::quadrature::QuadratureConfig;
use crate::solvers::{solve_l0_exhaustive, solve_l1, solve_lp_irls, IrlsConfig};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LP_RECOVERY_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "lp-recovery",
    version,
    about = "Sparse-recovery thresholds, null-space certificates and l0/lp/l1 solvers for Gaussian measurements",
    after_help = "Exit codes: 0 success, 1 usage or input error, 2 numerical failure.\n\
                  LP_RECOVERY_THREADS caps the worker threads used by sweeps."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OutputArgs {
    /// Also write the result to this file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Format of the written result.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Recovery thresholds, limiting and finite-alpha.
    #[command(subcommand)]
    Threshold(ThresholdCommand),
    /// Solve one recovery instance read from a JSON job file.
    #[command(after_help = "Job file: {\"matrix\": \"a.csv\", \"y\": \"y.csv\", \"x_true\": \"x.csv\", \"p\": 0.5}\n\
                            Paths are relative to the job file; give `y`, `x_true`, or both.\n\
                            Recovery is declared when ||x_hat - x_true||_2 <= 1e-4.")]
    Solve(SolveArgs),
    /// Test a null-space recovery condition on a basis read from CSV.
    #[command(after_help = "Exact for a one-column basis; otherwise `holds` means no violating z was found.\n\
                            Support indices are one-based. A pattern file looks like\n\
                            {\"support\": [1, 2, 3], \"signs\": [1, -1, 1]}; missing signs mean all positive.")]
    Certify(CertifyArgs),
    /// Run an experiment described by a JSON spec file.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Args, Serialize)]
struct ExponentArg {
    /// Exponent p of the l_p quasinorm.
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    /// Undersampling ratio m/n, in (0, 1).
    #[arg(long)]
    alpha: f64,
    /// Exponent p, in (0, 1].
    #[arg(long)]
    p: f64,
    /// Number of log-spaced net radii in the gamma grid.
    #[arg(long)]
    gamma_points: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ThresholdCommand {
    /// Limiting strong threshold rho*(p) = 1 - F(z*) as m/n -> 1, where z* splits E|X|^p in half.
    StrongLimit(ExponentArg),
    /// Limiting weak threshold: 2/3 for p < 1 and 1 for p = 1.
    WeakLimit(ExponentArg),
    /// Limiting sectional threshold, 1/2 for every p.
    SectionalLimit(ExponentArg),
    /// Finite-alpha lower bound on the strong threshold from the Chernoff/net argument.
    StrongBound(BoundArgs),
    /// Finite-alpha lower bound on the weak threshold from the Chernoff/net argument.
    WeakBound(BoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    L0,
    L1,
    Lp,
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    /// JSON job file.
    #[arg(long)]
    instance: PathBuf,
    /// l0: exhaustive search; l1: linear program; lp: iteratively reweighted least squares.
    #[arg(long, value_enum)]
    method: Method,
    /// Largest support tried by the l0 search (default: m, or 4 when n > 24).
    #[arg(long)]
    max_support: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
enum ModeArg {
    Strong,
    WeakL1,
    WeakLp,
    WeakL0,
    Sectional,
}

impl From<ModeArg> for ConditionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strong => ConditionMode::Strong,
            ModeArg::WeakL1 => ConditionMode::WeakL1,
            ModeArg::WeakLp => ConditionMode::WeakLp,
            ModeArg::WeakL0 => ConditionMode::WeakL0,
            ModeArg::Sectional => ConditionMode::Sectional,
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["rho", "sparsity", "pattern", "support"]))]
struct CertifyArgs {
    /// Null-space basis B as CSV, n rows by n - m columns.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Exponent p (ignored by weak_l1 and weak_l0).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Sparsity ratio; the support size is floor(rho n), and weak/sectional modes use T = {1..floor(rho n)}.
    #[arg(long)]
    rho: Option<f64>,
    /// Support size for strong mode.
    #[arg(long)]
    sparsity: Option<usize>,
    /// Support pattern JSON file.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Comma-separated one-based support, e.g. 1,2 (all signs positive).
    #[arg(long)]
    support: Option<String>,
    /// Random unit directions sampled by the falsification search.
    #[arg(long)]
    samples: Option<usize>,
    /// Pattern-search refinement steps.
    #[arg(long)]
    refine_steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a violating z here (one value per line) when the condition fails.
    #[arg(long)]
    witness_csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct SpecArg {
    /// JSON spec file.
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentCommand {
    /// Exact checks on the 6k-dimensional kernel construction where l1 beats l0.5 on a fixed support.
    #[command(after_help = "Spec: {\"k\": 4, \"p\": 0.5}")]
    Example1(SpecArg),
    /// IRLS (or l1 when p = 1) phase transition over a sparsity grid.
    #[command(after_help = "Spec: {\"n\": 60, \"m\": 30, \"p_list\": [0.5], \"rho_grid\": [0.1, 0.3],\n\
                            \"trials_per_point\": 50, \"amplitude_model\": \"standard_normal\", \"seed\": 1}")]
    Phase(SpecArg),
    /// Strong versus weak recovery with the 0 / +-1000 amplitude mixture.
    #[command(after_help = "Spec: {\"n\": 50, \"m\": 48, \"p_list\": [0.5, 1.0], \"rho_grid\": [0.2, 0.8],\n\
                            \"matrices\": 20, \"vectors_per_point\": 20, \"seed\": 5}")]
    StrongVsWeak(SpecArg),
    /// Falsification frequency of the weak condition around the 2/3 threshold.
    #[command(after_help = "Spec: {\"n\": 600, \"codim\": 6, \"p\": 0.5, \"rho_list\": [0.5, 0.8], \"trials\": 50,\n\
                            \"budget\": {\"sphere_samples\": 2000, \"refine_steps\": 200, \"step_shrink\": 0.5, \"seed\": 0}}")]
    WeakProbe(SpecArg),
    /// Concentration of top-rho sums of |X_i|^p and of the sign-split sums.
    #[command(after_help = "Spec: {\"n\": 20000, \"p\": 1.0, \"trials\": 100, \"seed\": 11}; rho defaults to rho*(p).")]
    Concentration(SpecArg),
}

/// Result of one command: the JSON record, its CSV rendering, and an optional
/// short line printed instead of the record.
struct Artifact {
    json: Value,
    csv: String,
    summary: Option<String>,
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn threshold_artifact(quantity: &str, p: f64, alpha: Option<f64>, value: f64, record: Value) -> Result<Artifact> {
    let csv = csv_text(
        &["quantity", "p", "alpha", "value"],
        vec![vec![quantity.into(), num(p), alpha.map(num).unwrap_or_default(), num(value)]],
    )?;
    Ok(Artifact {
        json: record,
        csv,
        summary: Some(format!("{value:.6}")),
    })
}

fn report_artifact(report: &ExperimentReport) -> Result<Artifact> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    Ok(Artifact {
        json: serde_json::to_value(report)?,
        csv: String::from_utf8(buf).expect("csv output is utf-8"),
        summary: None,
    })
}

fn bound_config(gamma_points: Option<usize>) -> Result<ExponentSearchConfig> {
    let mut cfg = ExponentSearchConfig::default();
    if let Some(k) = gamma_points {
        if k < 2 {
            return Err(Error::InvalidArgument("--gamma-points must be at least 2".into()));
        }
        let (lo, hi) = (cfg.gamma_grid[0], cfg.gamma_grid[cfg.gamma_grid.len() - 1]);
        cfg.gamma_grid = crate::bounds::log_spaced(k, lo, hi);
    }
    Ok(cfg)
}

fn run_threshold(cmd: &ThresholdCommand, log: &mut Value) -> Result<Artifact> {
    let quad = QuadratureConfig::default();
    match cmd {
        ThresholdCommand::StrongLimit(a) => {
            log["quadrature"] = serde_json::to_value(quad)?;
            if a.p == 0.0 {
                return threshold_artifact(
                    "strong_limit",
                    0.0,
                    None,
                    0.5,
                    json!({"quantity": "strong_limit", "p": 0.0, "rho_star": 0.5, "note": "limit as p -> 0"}),
                );
            }
            let t = strong_limit_threshold(a.p, &quad)?;
            let mut record = serde_json::to_value(t)?;
            record["quantity"] = json!("strong_limit");
            threshold_artifact("strong_limit", a.p, None, t.rho_star, record)
        }
        ThresholdCommand::WeakLimit(a) => {
            let v = weak_limit_threshold(a.p)?;
            threshold_artifact("weak_limit", a.p, None, v, json!({"quantity": "weak_limit", "p": a.p, "value": v}))
        }
        ThresholdCommand::SectionalLimit(a) => {
            let v = sectional_limit_threshold(a.p)?;
            threshold_artifact(
                "sectional_limit",
                a.p,
                None,
                v,
                json!({"quantity": "sectional_limit", "p": a.p, "value": v}),
            )
        }
        ThresholdCommand::StrongBound(a) | ThresholdCommand::WeakBound(a) => {
            let cfg = bound_config(a.gamma_points)?;
            log["search"] = serde_json::to_value(&cfg)?;
            let strong = matches!(cmd, ThresholdCommand::StrongBound(_));
            let b = if strong {
                strong_bound(a.alpha, a.p, &cfg)?
            } else {
                weak_bound(a.alpha, a.p, &cfg)?
            };
            let name = if strong { "strong_bound" } else { "weak_bound" };
            threshold_artifact(name, a.p, Some(a.alpha), b.rho_bound, serde_json::to_value(&b)?)
        }
    }
}

fn run_solve(a: &SolveArgs, log: &mut Value) -> Result<Artifact> {
    let inst = io::load_instance(&a.instance)?;
    let (m, n) = (inst.a.rows(), inst.a.cols());
    let result = match a.method {
        Method::L1 => solve_l1(&inst)?,
        Method::Lp => {
            let cfg = IrlsConfig::default();
            log["irls"] = serde_json::to_value(&cfg)?;
            solve_lp_irls(&inst, &cfg)?
        }
        Method::L0 => {
            let max_support = a.max_support.unwrap_or(if n > 24 { m.min(4) } else { m });
            log["max_support"] = json!(max_support);
            solve_l0_exhaustive(&inst, max_support)?
        }
    };
    log["instance_shape"] = json!({"m": m, "n": n, "p": inst.p});
    let rows = result
        .x_hat
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), num(*v)])
        .collect();
    Ok(Artifact {
        json: serde_json::to_value(&result)?,
        csv: csv_text(&["index", "x_hat"], rows)?,
        summary: None,
    })
}

fn prefix_support(rho: f64, n: usize) -> Result<usize> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidArgument(format!("--rho must lie in (0, 1], got {rho}")));
    }
    Ok((rho * n as f64 + 1e-9).floor() as usize)
}

fn run_certify(a: &CertifyArgs, log: &mut Value) -> Result<Artifact> {
    let b = io::read_matrix_csv(&a.matrix)?;
    let n = b.rows();
    let mode = ConditionMode::from(a.mode);
    let pattern_from_prefix = |s: usize| SupportPattern::nonnegative((0..s).collect());
    let target = match (a.rho, a.sparsity, &a.pattern, &a.support) {
        (_, _, Some(path), _) => {
            let pat = io::read_pattern_json(path)?;
            match mode {
                ConditionMode::Strong => ConditionTarget::Sparsity(pat.support().len()),
                ConditionMode::Sectional => ConditionTarget::Support(pat.support().to_vec()),
                _ => ConditionTarget::Pattern(pat),
            }
        }
        (_, _, _, Some(list)) => {
            let support = io::parse_index_list(list)?;
            match mode {
                ConditionMode::Strong => ConditionTarget::Sparsity(support.len()),
                ConditionMode::Sectional => ConditionTarget::Support(support),
                _ => ConditionTarget::Pattern(SupportPattern::nonnegative(support)?),
            }
        }
        (rho, sparsity, None, None) => {
            let s = match (rho, sparsity) {
                (Some(r), _) => prefix_support(r, n)?,
                (None, Some(s)) => s,
                (None, None) => unreachable!("clap requires one target"),
            };
            match mode {
                ConditionMode::Strong => ConditionTarget::Sparsity(s),
                ConditionMode::Sectional => ConditionTarget::Support((0..s).collect()),
                _ => ConditionTarget::Pattern(pattern_from_prefix(s)?),
            }
        }
    };
    let mut budget = SearchBudget {
        seed: RngSeed(a.seed),
        ..SearchBudget::default()
    };
    if let Some(s) = a.samples {
        budget.sphere_samples = s;
    }
    if let Some(r) = a.refine_steps {
        budget.refine_steps = r;
    }
    log["budget"] = serde_json::to_value(&budget)?;
    log["target"] = serde_json::to_value(&target)?;
    log["basis_shape"] = json!({"n": n, "codim": b.cols()});

    let verdict = certify(&b, mode, a.p, &target, &budget)?;
    let mut record = serde_json::to_value(&verdict)?;
    if let Some(w) = record.get_mut("witness") {
        for key in ["support", "t_minus"] {
            if let Some(Value::Array(idx)) = w.get_mut(key) {
                for i in idx.iter_mut() {
                    *i = json!(i.as_u64().unwrap_or_default() + 1);
                }
            }
        }
    }
    if let (Some(w), Some(path)) = (&verdict.witness, &a.witness_csv) {
        io::write_vector_csv(path, &w.z)?;
        record["witness_csv"] = json!(path);
    }
    let (lhs, rhs) = verdict
        .witness
        .as_ref()
        .map_or((String::new(), String::new()), |w| (num(w.lhs), num(w.rhs)));
    let csv = csv_text(
        &["mode", "p", "holds", "certificate_exact", "worst_margin", "lhs", "rhs"],
        vec![vec![
            record["mode"].as_str().unwrap_or_default().to_string(),
            num(verdict.p),
            verdict.holds.to_string(),
            verdict.certificate_exact.to_string(),
            num(verdict.worst_margin),
            lhs,
            rhs,
        ]],
    )?;
    Ok(Artifact {
        json: record,
        csv,
        summary: None,
    })
}

fn run_experiment(cmd: &ExperimentCommand, log: &mut Value) -> Result<Artifact> {
    match cmd {
        ExperimentCommand::Example1(a) => {
            let spec: Example1Spec = io::read_json(&a.spec)?;
            log["spec"] = serde_json::to_value(&spec)?;
            let r = run_example1(spec.k, spec.p)?;
            let rows = r
                .claims
                .iter()
                .map(|c| vec![c.name.clone(), c.expected.clone(), c.observed.clone(), c.matches_expected.to_string()])
                .collect();
            Ok(Artifact {
                json: serde_json::to_value(&r)?,
                csv: csv_text(&["claim", "expected", "observed", "matches_expected"], rows)?,
                summary: None,
            })
        }
        ExperimentCommand::Phase(a) => {
            let spec: PhaseDiagramSpec = io::read_json(&a.spec)?;
            log["spec"] = serde_json::to_value(&spec)?;
            report_artifact(&run_phase_transition(&spec)?)
        }
        ExperimentCommand::StrongVsWeak(a) => {
            let spec: StrongVsWeakSpec = io::read_json(&a.spec)?;
            log["spec"] = serde_json::to_value(&spec)?;
            report_artifact(&run_strong_vs_weak(&spec)?)
        }
        ExperimentCommand::WeakProbe(a) => {
            let spec: WeakProbeSpec = io::read_json(&a.spec)?;
            log["spec"] = serde_json::to_value(&spec)?;
            report_artifact(&run_weak_threshold_probe(&spec)?)
        }
        ExperimentCommand::Concentration(a) => {
            let spec: ConcentrationSpec = io::read_json(&a.spec)?;
            log["spec"] = serde_json::to_value(&spec)?;
            let r = run_concentration_check(&spec)?;
            let rows = r
                .trials
                .iter()
                .map(|t| vec![t.seed.0.to_string(), num(t.ratio), num(t.deviation), num(t.t_minus_mean), num(t.t_c_mean)])
                .collect();
            Ok(Artifact {
                json: serde_json::to_value(&r)?,
                csv: csv_text(&["seed", "ratio", "deviation", "t_minus_mean", "t_c_mean"], rows)?,
                summary: None,
            })
        }
    }
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Threshold(
            ThresholdCommand::StrongLimit(a) | ThresholdCommand::WeakLimit(a) | ThresholdCommand::SectionalLimit(a),
        ) => &a.out,
        Command::Threshold(ThresholdCommand::StrongBound(a) | ThresholdCommand::WeakBound(a)) => &a.out,
        Command::Solve(a) => &a.out,
        Command::Certify(a) => &a.out,
        Command::Experiment(
            ExperimentCommand::Example1(a)
            | ExperimentCommand::Phase(a)
            | ExperimentCommand::StrongVsWeak(a)
            | ExperimentCommand::WeakProbe(a)
            | ExperimentCommand::Concentration(a),
        ) => &a.out,
    }
}

fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool built by an earlier call in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(Some(threads))
}

fn render(artifact: &Artifact, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&artifact.json)?;
            text.push('\n');
            text
        }
        Format::Csv => artifact.csv.clone(),
    })
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    let threads = configure_threads()?;
    let out = output_args(&cli.command).clone();
    let mut log = json!({
        "command": serde_json::to_value(&cli.command)?,
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
    });
    let artifact = match &cli.command {
        Command::Threshold(t) => run_threshold(t, &mut log)?,
        Command::Solve(a) => run_solve(a, &mut log)?,
        Command::Certify(a) => run_certify(a, &mut log)?,
        Command::Experiment(e) => run_experiment(e, &mut log)?,
    };
    eprintln!("config: {}", serde_json::to_string(&log)?);
    let text = render(&artifact, out.format)?;
    match &artifact.summary {
        Some(line) => println!("{line}"),
        None => print!("{text}"),
    }
    if let Some(path) = &out.output {
        write_output(path, &text)?;
    }
    Ok(())
}

/// Exit code for a library error: 1 for bad input, 2 for numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::Domain(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => 1,
        Error::Quadrature { .. }
        | Error::RootNotBracketed { .. }
        | Error::Unbounded(_)
        | Error::Infeasible(_)
        | Error::RankDeficient { .. }
        | Error::IllConditioned { .. }
        | Error::IterationLimit(_)
        | Error::Budget(_)
        | Error::Monotonicity(_) => 2,
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
