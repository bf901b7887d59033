//! Command-line front end.
//!
//! ```text
//! ddopt run      --experiment market|pricing|one-dim [--algorithm rcm|rda] [--set k=v]...
//!                [--iters N] [--eta X|auto] [--seed S] [--output PATH] [--format csv|json]
//! ddopt analyze  --experiment ... [--set k=v]... [--bound] [--grid N]
//! ddopt sweep    --experiment ... --grid-param k=v1,v2,... [--grid-param ...] --out-dir DIR
//! ddopt gen-parking --n N --seed S [--a A] [--nominal P] --output PATH
//! ddopt estimate-a  --input PATH [--delimiter C] [--nominal P]
//! ```
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
//!
//! `analyze` prints `{"constants": {...}, "bound": {...}}`. Constants keys:
//! `gamma beta_x beta_z L_z eps eps_g g_norm lam_min_gram L_xstar gamma_d L_d
//! rho1..rho4 a1 a2 a3 b1 b2 b3 alpha_bar_sqrt alpha s1 s1_upper s2 eta_mid
//! kappa_mid window_lower window_upper rcm_rate rcm_condition rda_condition_9
//! rda_condition_10 rda_fixed_obj_condition`. Bound keys: `x_s x_o
//! lambda_s_star measured_distance bound_value resolution bound_holds`, or
//! `inapplicable` with a reason. Infinite values are the string `"inf"`,
//! undefined ones `null`.
//!
//! Parameter keys for `--set`:
//!
//! - market: `a1 a2 a3 a4 zeta_l1 zeta_r1 zeta_l2 zeta_r2 e1 v1_lower v2_lower eps eps_g
//!   sensitivity_rule(exact|paper) box_lower box_upper x0(comma list)`
//! - pricing: `v t c1 c2 eta x0 x_bar a eps n_records data(path)`
//! - one-dim: `theta x0`

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::algorithms::{measured_contraction, rcm, rda, RcmConfig, RdaConfig, Trace};
use crate::analysis::{
    compute_constants, equilibrium_oracle, json_number, optimality_gap_bound, ConstantsReport,
    Equilibrium,
};
use crate::error::Error;
use crate::experiments::{
    estimate_a, generate_synthetic_parking, load_parking_csv, market_problem, one_dim_example,
    pricing_problem_from_records, write_parking_csv, MarketParams, PricingParams, SensitivityRule,
};
use crate::problem::PerformativeProblem;
use crate::trace_io::TraceTable;

/// Equilibrium references are computed to this tolerance.
pub const REFERENCE_TOLERANCE: f64 = 1e-10;
/// Records generated for the pricing experiment when no data file is given.
pub const DEFAULT_PARKING_RECORDS: usize = 10224;

#[derive(Parser, Debug)]
#[command(
    name = "ddopt",
    version,
    about = "Constrained optimization with decision-dependent distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one algorithm and write its trace.
    Run(RunArgs),
    /// Print every convergence constant and condition flag.
    Analyze(AnalyzeArgs),
    /// Run a cartesian grid of parameter overrides.
    Sweep(SweepArgs),
    /// Write a synthetic parking data set.
    GenParking(GenParkingArgs),
    /// Estimate the occupancy sensitivity A from a parking CSV.
    EstimateA(EstimateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Market,
    Pricing,
    OneDim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Rcm,
    Rda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "rcm")]
    pub algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// RDA step size: a number or `auto`.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(clap::Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Also run both oracles and evaluate the optimality-gap bound.
    #[arg(long)]
    pub bound: bool,
    /// Grid points per dimension for the optimal-point oracle.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Grid axis `key=v1,v2,...`; repeatable.
    #[arg(long = "grid-param", value_name = "KEY=V1,V2", required = true)]
    pub grid: Vec<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(clap::Args, Debug, Clone)]
pub struct GenParkingArgs {
    #[arg(long, default_value_t = DEFAULT_PARKING_RECORDS)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.157)]
    pub a: f64,
    #[arg(long, default_value_t = 3.0)]
    pub nominal: f64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(clap::Args, Debug, Clone)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long, default_value_t = 3.0)]
    pub nominal: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Runtime(Error::Config(_)) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A problem instance ready to run.
pub struct Built {
    pub problem: PerformativeProblem<f64>,
    pub x0: Vec<f64>,
    /// Step size used by RDA when `--eta` is absent.
    pub default_eta: Option<f64>,
}

fn parse_overrides(raw: &[String]) -> CliResult<Vec<(String, String)>> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .filter(|(k, _)| !k.is_empty())
                .ok_or_else(|| usage(format!("override {s:?} is not key=value")))
        })
        .collect()
}

fn num(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| usage(format!("{key}: {v:?} is not a finite number")))
}

fn num_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

/// Builds the experiment's problem from `key=value` overrides.
pub fn build_experiment(
    experiment: Experiment,
    overrides: &[(String, String)],
    seed: u64,
) -> CliResult<Built> {
    match experiment {
        Experiment::Market => {
            let mut m = MarketParams::default();
            for (k, v) in overrides {
                let slot = match k.as_str() {
                    "a1" => &mut m.a1,
                    "a2" => &mut m.a2,
                    "a3" => &mut m.a3,
                    "a4" => &mut m.a4,
                    "zeta_l1" => &mut m.zeta_l1,
                    "zeta_r1" => &mut m.zeta_r1,
                    "zeta_l2" => &mut m.zeta_l2,
                    "zeta_r2" => &mut m.zeta_r2,
                    "e1" => &mut m.e1,
                    "v1_lower" => &mut m.v1_lower,
                    "v2_lower" => &mut m.v2_lower,
                    "eps" => &mut m.eps,
                    "eps_g" => &mut m.eps_g,
                    "box_lower" => &mut m.box_lower,
                    "box_upper" => &mut m.box_upper,
                    "sensitivity_rule" => {
                        m.sensitivity_rule = match v.as_str() {
                            "exact" => SensitivityRule::Exact,
                            "paper" => SensitivityRule::Paper,
                            _ => {
                                return Err(usage(format!(
                                    "sensitivity_rule must be exact or paper, got {v:?}"
                                )))
                            }
                        };
                        continue;
                    }
                    "x0" => {
                        let xs = num_list(k, v)?;
                        m.x0 = xs
                            .try_into()
                            .map_err(|_| usage("market x0 needs two comma-separated values"))?;
                        continue;
                    }
                    _ => return Err(usage(format!("unknown market parameter {k:?}"))),
                };
                *slot = num(k, v)?;
            }
            Ok(Built {
                problem: market_problem(&m)?,
                x0: m.x0.to_vec(),
                default_eta: None,
            })
        }
        Experiment::Pricing => {
            let mut p = PricingParams::default();
            let mut n_records = DEFAULT_PARKING_RECORDS;
            let mut data: Option<PathBuf> = None;
            for (k, v) in overrides {
                let slot = match k.as_str() {
                    "v" => &mut p.v,
                    "t" => &mut p.t,
                    "c1" => &mut p.c1,
                    "c2" => &mut p.c2,
                    "eta" => &mut p.eta,
                    "x0" => &mut p.x0,
                    "x_bar" => &mut p.x_bar,
                    "a" => &mut p.a,
                    "eps" => &mut p.eps,
                    "n_records" => {
                        n_records = v.parse().ok().filter(|&n: &usize| n > 0).ok_or_else(|| {
                            usage(format!("n_records: {v:?} is not a positive integer"))
                        })?;
                        continue;
                    }
                    "data" => {
                        data = Some(PathBuf::from(v));
                        continue;
                    }
                    _ => return Err(usage(format!("unknown pricing parameter {k:?}"))),
                };
                *slot = num(k, v)?;
            }
            let records = match data {
                Some(path) => load_parking_csv(path, b',')?.records,
                None => generate_synthetic_parking(n_records, seed, p.a, p.x_bar)?,
            };
            Ok(Built {
                problem: pricing_problem_from_records(&p, &records)?,
                x0: vec![p.x0],
                default_eta: Some(p.eta),
            })
        }
        Experiment::OneDim => {
            let mut theta = 0.5;
            let mut x0 = 1.0;
            for (k, v) in overrides {
                match k.as_str() {
                    "theta" => theta = num(k, v)?,
                    "x0" => x0 = num(k, v)?,
                    _ => return Err(usage(format!("unknown one-dim parameter {k:?}"))),
                }
            }
            Ok(Built {
                problem: one_dim_example(theta)?,
                x0: vec![x0],
                default_eta: None,
            })
        }
    }
}

/// Midpoint of the step-size window where the Lyapunov rate is below one.
pub fn auto_eta(r: &ConstantsReport<f64>) -> CliResult<f64> {
    match r.effective_window() {
        Some((lo, hi)) if hi.is_finite() => Ok(0.5 * (lo + hi)),
        _ => Err(CliError::Runtime(Error::Config(format!(
            "--eta auto: step-size window is empty (s1 = {:?}, s1' = {:?}, s2 = {:?}, conditions 9/10 = {}/{})",
            r.s1, r.s1_upper, r.s2, r.rda_condition_9, r.rda_condition_10
        )))),
    }
}

fn resolve_eta(arg: Option<&str>, built: &Built, report: &ConstantsReport<f64>) -> CliResult<f64> {
    match arg {
        Some("auto") => auto_eta(report),
        Some(s) => {
            let eta = num("eta", s)?;
            if eta > 0.0 {
                Ok(eta)
            } else {
                Err(usage("eta must be positive"))
            }
        }
        None => match built.default_eta {
            Some(e) => Ok(e),
            None => auto_eta(report),
        },
    }
}

/// Result of one `run`.
pub struct RunOutcome {
    pub trace: Trace<f64>,
    pub reference: Option<Equilibrium<f64>>,
    pub eta: Option<f64>,
}

impl RunOutcome {
    pub fn final_distance(&self) -> Option<f64> {
        self.trace.last().dist_to_reference
    }

    pub fn max_contraction(&self) -> Option<f64> {
        let r = self.reference.as_ref()?;
        measured_contraction(&self.trace, &r.x)
            .ok()
            .map(|v| v.into_iter().fold(0.0, f64::max))
    }

    pub fn summary(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |d| format!("{d:e}"));
        let eta = self.eta.map_or(String::new(), |e| format!(" eta={e}"));
        format!(
            "{} status={} iterations={}{} final_dist_to_xs={} max_contraction={}",
            self.trace.algorithm.name(),
            self.trace.status.name(),
            self.trace.records.len() - 1,
            eta,
            fmt(self.final_distance()),
            fmt(self.max_contraction()),
        )
    }
}

/// Builds the problem, runs the algorithm and attaches the equilibrium
/// reference when the RCM condition certifies one.
pub fn execute_run(
    experiment: Experiment,
    overrides: &[(String, String)],
    algorithm: AlgorithmArg,
    iters: usize,
    eta: Option<&str>,
    seed: u64,
) -> CliResult<RunOutcome> {
    if iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let built = build_experiment(experiment, overrides, seed)?;
    let p = &built.problem;
    let report = compute_constants(p)?;
    let (mut trace, eta) = match algorithm {
        AlgorithmArg::Rcm => {
            let cfg = RcmConfig {
                max_iterations: iters,
                ..RcmConfig::default()
            };
            (rcm(p, &built.x0, &cfg)?, None)
        }
        AlgorithmArg::Rda => {
            let eta = resolve_eta(eta, &built, &report)?;
            let cfg = RdaConfig {
                max_iterations: iters,
                ..RdaConfig::new(eta)
            };
            (rda(p, &built.x0, &cfg)?, Some(eta))
        }
    };
    let reference = if report.rcm_condition {
        equilibrium_oracle(p, &built.x0, REFERENCE_TOLERANCE).ok()
    } else {
        None
    };
    if let Some(r) = &reference {
        trace.attach_reference(&r.x);
    }
    Ok(RunOutcome {
        trace,
        reference,
        eta,
    })
}

pub fn render_trace(trace: &Trace<f64>, format: Format) -> CliResult<String> {
    let table = TraceTable::from_trace(trace);
    Ok(match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Runtime(Error::Io(e)))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let overrides = parse_overrides(&args.problem.overrides)?;
    let outcome = execute_run(
        args.problem.experiment,
        &overrides,
        args.algorithm,
        args.iters,
        args.eta.as_deref(),
        args.problem.seed,
    )?;
    let text = render_trace(&outcome.trace, args.format)?;
    match &args.output {
        Some(path) => {
            write_text(path, &text)?;
            writeln!(out, "{}", outcome.summary()).map_err(Error::Io)?;
        }
        None => {
            out.write_all(text.as_bytes()).map_err(Error::Io)?;
            writeln!(err, "{}", outcome.summary()).map_err(Error::Io)?;
        }
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CliResult<()> {
    let overrides = parse_overrides(&args.problem.overrides)?;
    let built = build_experiment(args.problem.experiment, &overrides, args.problem.seed)?;
    let report = compute_constants(&built.problem)?;
    let mut root = Map::new();
    root.insert("constants".into(), report.to_json_value());
    if args.bound {
        let bound = equilibrium_oracle(&built.problem, &built.x0, REFERENCE_TOLERANCE)
            .and_then(|eq| optimality_gap_bound(&built.problem, &eq.x, &eq.lambda, args.grid));
        let value = match bound {
            Ok(b) => b.to_json_value(),
            Err(e @ (Error::BoundInapplicable(_) | Error::NoEquilibriumCertificate(_))) => {
                let mut m = Map::new();
                m.insert("inapplicable".into(), Value::from(e.to_string()));
                Value::Object(m)
            }
            Err(e) => return Err(e.into()),
        };
        root.insert("bound".into(), value);
    }
    let text = serde_json::to_string_pretty(&Value::Object(root)).map_err(Error::Json)?;
    writeln!(out, "{text}").map_err(Error::Io)?;
    Ok(())
}

fn parse_grid(raw: &[String]) -> CliResult<Vec<(String, Vec<String>)>> {
    raw.iter()
        .map(|s| {
            let (k, vs) = s
                .split_once('=')
                .ok_or_else(|| usage(format!("grid axis {s:?} is not key=v1,v2,...")))?;
            let values: Vec<String> = vs
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if values.is_empty() {
                return Err(usage(format!("grid axis {k:?} has no values")));
            }
            Ok((k.trim().to_string(), values))
        })
        .collect()
}

/// Cartesian product; the first axis varies slowest.
fn grid_cells(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    axes.iter().fold(vec![Vec::new()], |cells, (k, values)| {
        cells
            .iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((k.clone(), v.clone()));
                    c
                })
            })
            .collect()
    })
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let base = parse_overrides(&args.run.problem.overrides)?;
    let axes = parse_grid(&args.grid)?;
    let cells = grid_cells(&axes);
    let run = &args.run;
    // surface unknown keys as usage errors before running anything
    for cell in &cells {
        let mut all = base.clone();
        all.extend(cell.iter().cloned());
        if let Err(e @ CliError::Usage(_)) =
            build_experiment(run.problem.experiment, &all, run.problem.seed)
        {
            return Err(e);
        }
    }
    fs::create_dir_all(&args.out_dir).map_err(Error::Io)?;
    let ext = run.format.extension();
    let entries: Vec<Value> = cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut all = base.clone();
            all.extend(cell.iter().cloned());
            let file = format!("cell_{i:03}.{ext}");
            let mut entry = Map::new();
            entry.insert("cell".into(), Value::from(i));
            let params: Map<String, Value> = cell
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(v.clone())))
                .collect();
            entry.insert("params".into(), Value::Object(params));
            let seed = run.problem.seed.wrapping_add(i as u64);
            let result = execute_run(
                run.problem.experiment,
                &all,
                run.algorithm,
                run.iters,
                run.eta.as_deref(),
                seed,
            )
            .and_then(|o| {
                let text = render_trace(&o.trace, run.format)?;
                write_text(&args.out_dir.join(&file), &text)?;
                Ok(o)
            });
            match result {
                Ok(o) => {
                    entry.insert("file".into(), Value::from(file));
                    entry.insert("status".into(), Value::from(o.trace.status.name()));
                    entry.insert("iterations".into(), Value::from(o.trace.records.len() - 1));
                    entry.insert(
                        "final_distance".into(),
                        o.final_distance().map_or(Value::Null, json_number),
                    );
                }
                Err(e) => {
                    entry.insert("status".into(), Value::from("failed"));
                    entry.insert("error".into(), Value::from(e.to_string()));
                }
            }
            Value::Object(entry)
        })
        .collect();
    let failed = entries.iter().filter(|e| e["status"] == "failed").count();
    let mut index = Map::new();
    index.insert(
        "experiment".into(),
        Value::from(format!("{:?}", run.problem.experiment).to_lowercase()),
    );
    index.insert(
        "algorithm".into(),
        Value::from(format!("{:?}", run.algorithm).to_lowercase()),
    );
    index.insert("cells".into(), Value::Array(entries));
    let mut text = serde_json::to_string_pretty(&Value::Object(index)).map_err(Error::Json)?;
    text.push('\n');
    write_text(&args.out_dir.join("index.json"), &text)?;
    writeln!(
        out,
        "sweep: {} cells, {} failed, index at {}",
        cells.len(),
        failed,
        args.out_dir.join("index.json").display()
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn cmd_gen_parking(args: &GenParkingArgs, out: &mut dyn Write) -> CliResult<()> {
    let recs = generate_synthetic_parking(args.n, args.seed, args.a, args.nominal)?;
    write_parking_csv(&args.output, &recs, b',')?;
    writeln!(
        out,
        "wrote {} records to {}",
        recs.len(),
        args.output.display()
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn cmd_estimate_a(args: &EstimateArgs, out: &mut dyn Write) -> CliResult<()> {
    if !args.delimiter.is_ascii() {
        return Err(usage("delimiter must be a single ASCII character"));
    }
    let load = load_parking_csv(&args.input, args.delimiter as u8)?;
    let a = estimate_a(&load.records, args.nominal)?;
    let mut m = BTreeMap::new();
    m.insert("records", Value::from(load.records.len()));
    m.insert("rejected", Value::from(load.rejected));
    m.insert("a", json_number(a));
    writeln!(out, "{}", serde_json::to_string(&m).map_err(Error::Json)?).map_err(Error::Io)?;
    Ok(())
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::GenParking(a) => cmd_gen_parking(a, out),
        Command::EstimateA(a) => cmd_estimate_a(a, out),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Runtime(inner) = &e {
                let mut src = std::error::Error::source(inner);
                while let Some(s) = src {
                    let _ = writeln!(err, "  caused by: {s}");
                    src = s.source();
                }
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_product_order() {
        let axes = vec![
            ("a".to_string(), vec!["1".to_string(), "2".to_string()]),
            ("b".to_string(), vec!["x".to_string(), "y".to_string()]),
        ];
        let cells = grid_cells(&axes);
        assert_eq!(cells.len(), 4);
        assert_eq!(
            cells[1],
            vec![("a".into(), "1".into()), ("b".into(), "y".into())]
        );
    }

    #[test]
    fn unknown_key_is_usage_error() {
        let e = build_experiment(Experiment::OneDim, &[("phi".into(), "1".into())], 0)
            .err()
            .unwrap();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_experiment_exits_2() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_from(["ddopt", "run", "--experiment", "nope"], &mut out, &mut err);
        assert_eq!(code, 2);
        assert!(String::from_utf8(err).unwrap().contains("invalid value"));
    }
}
