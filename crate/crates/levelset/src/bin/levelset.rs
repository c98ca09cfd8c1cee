//! Command-line front end: parse function specs and configs, dispatch
//! experiments, and emit CSV/JSON reports.
//!
//! Exit codes: 0 = all verdicts pass, 1 = a verdict failed, 2 = usage or
//! configuration error.

use clap::{Parser, Subcommand};
use levelset::acceptance;
use levelset::config::RunConfig;
use levelset::experiments::{
    corollary_forms, default_lambda_schedule, envelope_check, gy_reduction, limit_report,
    sandwich_check, truncation_study, verify_heart, Report, SweepResult,
};
use levelset::measure::{exact_single_measure, LevelSetQuery};
use levelset::montecarlo::estimate_measure;
use levelset::report::{write_report_json, write_sweep_csv};
use levelset::weaknorm::{default_lambda_grid, weak_quasinorm_p_power};
use levelset::TestFunction;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "levelset",
    about = "Level-set measures of |u(x)+v(y)| >= lambda |x-y|^{N/p} and the \
             weak-Lp identities they verify",
    version
)]
struct Cli {
    /// TOML config file; explicit flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// first function, in the catalog grammar (see `catalog`)
    #[arg(long, global = true)]
    u: Option<String>,

    /// second function, in the catalog grammar
    #[arg(long, global = true)]
    v: Option<String>,

    /// integrability exponent p >= 1
    #[arg(long, global = true)]
    p: Option<f64>,

    /// single threshold lambda
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// decreasing comma-separated lambda list
    #[arg(long, global = true, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,

    /// enclosing support radius for the envelope check
    #[arg(long, global = true)]
    radius: Option<f64>,

    /// increasing comma-separated truncation radii
    #[arg(long, global = true, value_delimiter = ',')]
    r_schedule: Option<Vec<f64>>,

    /// Monte Carlo samples per estimate
    #[arg(long, global = true)]
    samples: Option<u64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// relative tolerance for limit comparisons
    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    /// write the JSON report here (atomic)
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,

    /// write the sweep CSV here (atomic)
    #[arg(long, global = true)]
    csv_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the function-spec grammar and the built-in catalog
    Catalog,
    /// Estimate the measure at one lambda
    Measure,
    /// Sweep decreasing lambdas and extrapolate to the limit
    Sweep,
    /// Estimate the weak quasinorm sup over lambda
    Weaknorm,
    /// Check the exact single-function identity at each lambda
    VerifyHeart,
    /// Check the two-sided envelope at each lambda
    Envelope,
    /// Check the odd-pair limit (v = -u)
    Gy,
    /// Check the two-sided quasinorm sandwich
    Sandwich,
    /// Check the rearranged-form comparison chain
    Corollary,
    /// Truncation stability study over increasing radii
    Truncation,
    /// Run the full acceptance suite
    All,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Catalog => "catalog",
            Command::Measure => "measure",
            Command::Sweep => "sweep",
            Command::Weaknorm => "weaknorm",
            Command::VerifyHeart => "verify-heart",
            Command::Envelope => "envelope",
            Command::Gy => "gy",
            Command::Sandwich => "sandwich",
            Command::Corollary => "corollary",
            Command::Truncation => "truncation",
            Command::All => "all",
        }
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn effective_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    cfg.command = cli.command.name().to_string();
    if cli.u.is_some() {
        cfg.u = cli.u.clone();
    }
    if cli.v.is_some() {
        cfg.v = cli.v.clone();
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if cli.lambda.is_some() {
        cfg.lambda = cli.lambda;
    }
    if cli.lambdas.is_some() {
        cfg.lambdas = cli.lambdas.clone();
    }
    if cli.radius.is_some() {
        cfg.radius = cli.radius;
    }
    if cli.r_schedule.is_some() {
        cfg.r_schedule = cli.r_schedule.clone();
    }
    if let Some(n) = cli.samples {
        cfg.n_samples = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.rel_tol {
        cfg.rel_tol = t;
    }
    if cli.json_out.is_some() {
        cfg.json_out = cli.json_out.clone();
    }
    if cli.csv_out.is_some() {
        cfg.csv_out = cli.csv_out.clone();
    }
    Ok(cfg)
}

fn require<T>(x: Option<T>, what: &str) -> Result<T, String> {
    x.ok_or_else(|| format!("{what} is required for this subcommand"))
}

/// Print the report, attach the effective config, write artifacts, and turn
/// the verdicts into an exit code.
fn finish(
    mut report: Report,
    sweep: Option<&SweepResult>,
    cfg: &RunConfig,
) -> Result<ExitCode, String> {
    if let Some(obj) = report.inputs.as_object_mut() {
        obj.insert("effective_config".into(), json!(cfg.to_toml_string()));
    }
    for v in &report.verdicts {
        println!(
            "{}: {} (measured {:.6e}, target {:.6e}, tolerance {:.2e})",
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            v.measured,
            v.target,
            v.tolerance
        );
    }
    if let Some(path) = &cfg.json_out {
        write_report_json(&report, path).map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &cfg.csv_out {
        let sweep = sweep.ok_or("this subcommand produces no sweep CSV")?;
        write_sweep_csv(sweep, path).map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_catalog() {
    println!(
        "\
function spec grammar:
  ball a=<amp> r=<radius> n=<dim>        amplitude a on the ball of that radius
  gauss n=<dim>                          exp(-|x|^2)
  power alpha=<a> r=<radius> n=<dim>     |x|^-alpha cut off at the radius
  step n=<dim> edges=<r1,..> values=<v1,..>  radial step function
  witness n=<dim> p=<p0>                 borderline weak-Lp profile
  zero n=<dim>                           identically zero
wrappers:
  abs(<expr>)           pointwise absolute value
  neg(<expr>)           negation
  scale c=<f> (<expr>)  scalar multiple
  shift by=<d1,..> (<expr>)  translate
  trunc r=<radius> (<expr>)  restrict to the ball of that radius

examples:
  ball a=1 r=1 n=1
  neg(shift by=0.5 (ball a=1 r=0.5 n=1))
  trunc r=4 (gauss n=1)"
    );
}

fn dispatch(cfg: &RunConfig) -> Result<ExitCode, String> {
    let validated = cfg.validate().map_err(|e| e.to_string())?;
    let (u, v) = (validated.u, validated.v);
    let p = cfg.p;
    let n = cfg.n_samples;
    let seed = cfg.seed;
    let lambdas = cfg.lambdas.clone().unwrap_or_else(default_lambda_schedule);
    let zero_like =
        |f: &TestFunction| TestFunction::zero(f.dimension()).map_err(|e| e.to_string());
    let run = |r: Result<Report, levelset::measure::MeasureError>| r.map_err(|e| e.to_string());

    match cfg.command.as_str() {
        "catalog" => {
            print_catalog();
            Ok(ExitCode::SUCCESS)
        }
        "measure" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let lambda = require(cfg.lambda, "--lambda")?;
            let q = LevelSetQuery::new(u, v, p, lambda).map_err(|e| e.to_string())?;
            let est = estimate_measure(&q, n, seed).map_err(|e| e.to_string())?;
            let mut out = json!({
                "lambda": lambda,
                "measure": est.value,
                "stderr": est.stderr,
                "lambda_p_measure": lambda.powf(p) * est.value,
                "samples": est.samples,
                "seed": est.seed,
            });
            if q.v.is_zero() {
                let exact = exact_single_measure(&q).map_err(|e| e.to_string())?;
                out["exact_measure"] = json!(exact.measure);
            }
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        "sweep" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let (report, sweep) = limit_report(&u, &v, p, &lambdas, n, seed, cfg.rel_tol)
                .map_err(|e| e.to_string())?;
            finish(report, Some(&sweep), cfg)
        }
        "weaknorm" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let grid = cfg.lambdas.clone().unwrap_or_else(default_lambda_grid);
            let est = weak_quasinorm_p_power(&u, &v, p, &grid, n, seed, 2)
                .map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&est).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        "verify-heart" => {
            let u = require(u, "--u")?;
            let list = cfg.lambdas.clone().unwrap_or_else(|| vec![10.0, 1.0, 0.1]);
            let report = run(verify_heart(&u, p, &list, n, seed))?;
            finish(report, None, cfg)
        }
        "envelope" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let radius = require(cfg.radius, "--radius")?;
            let report = run(envelope_check(&u, &v, p, radius, &lambdas, n, seed))?;
            finish(report, None, cfg)
        }
        "gy" => {
            let u = require(u, "--u")?;
            let (report, sweep) =
                gy_reduction(&u, p, &lambdas, n, seed).map_err(|e| e.to_string())?;
            finish(report, Some(&sweep), cfg)
        }
        "sandwich" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let report = run(sandwich_check(&u, &v, p, n, seed))?;
            finish(report, None, cfg)
        }
        "corollary" => {
            let u = require(u, "--u")?;
            let report = run(corollary_forms(&u, p, n, seed))?;
            finish(report, None, cfg)
        }
        "truncation" => {
            let u = require(u, "--u")?;
            let v = match v {
                Some(v) => v,
                None => zero_like(&u)?,
            };
            let schedule = cfg.r_schedule.clone().unwrap_or_else(|| vec![2.0, 3.0, 4.0]);
            let report = run(truncation_study(&u, &v, p, &schedule, n, seed))?;
            finish(report, None, cfg)
        }
        "all" => {
            let outcomes = acceptance::run_all();
            let mut all_pass = true;
            for o in &outcomes {
                println!(
                    "criterion {:2} ({}): {} [{:.1}s] {}",
                    o.index,
                    o.name,
                    if o.pass { "PASS" } else { "FAIL" },
                    o.seconds,
                    o.detail
                );
                all_pass &= o.pass;
            }
            println!(
                "{}/{} criteria pass",
                outcomes.iter().filter(|o| o.pass).count(),
                outcomes.len()
            );
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        other => Err(format!("unknown command {other:?}")),
    }
}

fn main() -> ExitCode {
    if let Ok(s) = std::env::var("LEVELSET_THREADS") {
        match s.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .ok();
            }
            _ => return usage_error(format!("LEVELSET_THREADS must be a positive integer, got {s:?}")),
        }
    }
    let cli = Cli::parse();
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(e),
    };
    match dispatch(&cfg) {
        Ok(code) => code,
        Err(e) => usage_error(e),
    }
}
