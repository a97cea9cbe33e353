//! `gptt`: scenario runner for polytopic probabilistic models.
//!
//! Exit codes: 0 success, 1 failed assertions or failed replay,
//! 2 parse errors, 3 validation errors while building the scenario.

mod report;
mod runner;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gptt_core::error::Error;
use gptt_core::scalar::{Approx, Scalar, DEFAULT_TOL};
use gptt_core::space::{make_model, parse_model_kind, ModelKind, StateSpace};
use num_rational::BigRational;

use report::{AssertResult, Report};
use runner::{describe_model, replay_certificates, run_tasks, Env};
use scenario::parse_scenario;

#[derive(Parser)]
#[command(name = "gptt", about = "verification and synthesis for teleportation protocols over polytopic state spaces", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Rational,
    F64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print a report.
    Run {
        path: PathBuf,
        /// Scalar backend; overrides the scenario header.
        #[arg(long)]
        backend: Option<BackendArg>,
        /// Zero-test tolerance (f64 backend only).
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for randomized checks; overrides the scenario header.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Number of parallel task workers.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Replay the certificates embedded in a machine-format report.
    Verify { path: PathBuf },
    /// List the built-in model families.
    ListModels,
    /// Describe a model such as `polygon(4)` or `classical(3)`.
    Describe { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        _ => 3,
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run {
            path,
            backend,
            tol,
            seed,
            format,
            jobs,
        } => {
            let source = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let mut scenario = parse_scenario(&source)?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            if let Some(tol) = tol {
                scenario.tol = Some(tol);
            }
            let backend = match backend {
                Some(BackendArg::Rational) => "rational".to_string(),
                Some(BackendArg::F64) => "f64".to_string(),
                None => scenario.backend.clone().unwrap_or_else(|| "rational".into()),
            };
            let report = match backend.as_str() {
                "rational" => run_scenario::<BigRational>(&scenario, &path, &backend, jobs)?,
                "f64" => {
                    // the tolerance is carried per value; scenario inputs are
                    // parsed with the chosen tolerance
                    run_scenario_f64(&scenario, &path, &backend, jobs)?
                }
                other => return Err(Error::Parse(format!("unknown backend `{other}`"))),
            };
            match format {
                FormatArg::Text => print!("{}", report.to_text()),
                FormatArg::Machine => print!("{}", report.to_machine()),
            }
            Ok(if report.all_asserts_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let report = Report::parse_machine(&text)?;
            let source = std::fs::read_to_string(&report.scenario_path).map_err(|e| {
                Error::Parse(format!("cannot read {}: {e}", report.scenario_path))
            })?;
            let scenario = parse_scenario(&source)?;
            let results = match report.backend.as_str() {
                "rational" => {
                    let env: Env<BigRational> = Env::build(&scenario)?;
                    replay_certificates(&env, &report)?
                }
                "f64" => {
                    let env: Env<Approx> = Env::build(&scenario)?;
                    replay_certificates(&env, &report)?
                }
                other => return Err(Error::Parse(format!("unknown backend `{other}`"))),
            };
            let mut ok = true;
            if results.is_empty() {
                println!("no certificates to replay");
            }
            for (name, pass) in &results {
                println!("{name}: {}", if *pass { "verified" } else { "FAILED" });
                ok &= pass;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ListModels => {
            println!("classical(n)       n-outcome simplex, n >= 1");
            println!("polygon(n)         regular n-gon in R^3, n >= 3 (exact backend: n = 3, 4)");
            println!("hypercube(d)       2^d vertices in R^(d+1), d >= 1");
            println!("cross_polytope(d)  2d vertices in R^(d+1), d >= 1");
            Ok(ExitCode::SUCCESS)
        }
        Command::Describe { name } => {
            let kind = parse_model_kind(&name)?;
            let lines = match describe_by_kind(&kind) {
                Ok(lines) => lines,
                Err(err) => return Err(err),
            };
            println!("{name}");
            for (k, v) in lines {
                println!("  {k:<18} {v}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn describe_by_kind(kind: &ModelKind) -> Result<Vec<(String, String)>, Error> {
    // exact backend when representable, float otherwise
    match make_model::<BigRational>(kind) {
        Ok(space) => Ok(describe_model(&space)),
        Err(Error::BackendMismatch(_)) => {
            let space: StateSpace<Approx> = make_model(kind)?;
            Ok(describe_model(&space))
        }
        Err(err) => Err(err),
    }
}

fn run_scenario<S: Scalar>(
    scenario: &scenario::ScenarioFile,
    path: &PathBuf,
    backend: &str,
    jobs: usize,
) -> Result<Report, Error> {
    let env: Env<S> = Env::build(scenario)?;
    let records = run_tasks(&env, &scenario.tasks, jobs)?;
    let mut asserts = Vec::new();
    for a in &scenario.asserts {
        let record = records.iter().find(|r| r.name == a.task).ok_or_else(|| {
            Error::Parse(format!("assert references unknown task `{}`", a.task))
        })?;
        let actual = record.get(&a.key).unwrap_or("<missing>").to_string();
        asserts.push(AssertResult {
            task: a.task.clone(),
            key: a.key.clone(),
            expected: a.expected.clone(),
            pass: actual == a.expected,
            actual,
        });
    }
    let mut certs = Vec::new();
    for r in &records {
        certs.extend(r.certs.iter().cloned());
    }
    Ok(Report {
        scenario_path: path.display().to_string(),
        backend: backend.to_string(),
        seed: scenario.seed,
        tol: scenario.tol,
        records,
        certs,
        asserts,
    })
}

fn run_scenario_f64(
    scenario: &scenario::ScenarioFile,
    path: &PathBuf,
    backend: &str,
    jobs: usize,
) -> Result<Report, Error> {
    // parsed inputs carry the scenario tolerance; values built internally
    // fall back to it through the ambient default
    gptt_core::scalar::set_ambient_tol(scenario.tol.unwrap_or(DEFAULT_TOL));
    let report = run_scenario::<Approx>(scenario, path, backend, jobs);
    gptt_core::scalar::set_ambient_tol(DEFAULT_TOL);
    report
}
