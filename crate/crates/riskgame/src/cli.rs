//! `riskgame` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 the iterative method did not
//! converge, 3 a budget was exceeded or verification found a mismatch,
//! 4 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use riskgame_core::analysis::{extract_thresholds, format_fractions};
use riskgame_core::exact::approx;
use riskgame_core::interval::{Solution, DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS};
use riskgame_core::simulation::{exact_pair_value, PolicyPair};
use riskgame_core::IntervalError;

use crate::document::{to_canonical_json, PolicyDocument};
use crate::server::{self, AppState};
use crate::simulate::{estimate, write_traces};
use crate::solver::{solve, Method, SolveFailure, SolveOptions};
use crate::table::{render, TableFormat};
use crate::verify::{check_document, load_solution, run_fixtures};

#[derive(Debug, Parser)]
#[command(
    name = "riskgame",
    version,
    about = "Exact optimal play for a two-player coin-tossing race"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one target and write the policy document.
    Solve(SolveArgs),
    /// Print how many heads to collect before banking, by points needed.
    Table(TableArgs),
    /// Check known values and method agreement, or audit a policy file.
    Verify(VerifyArgs),
    /// Estimate the first player's chance by seeded simulation.
    Simulate(SimulateArgs),
    /// Serve policies and position advice over HTTP.
    Serve(ServeArgs),
    /// Print exact first-player chances for n = 2..N as `n numerator denominator`.
    Oeis(OeisArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    #[arg(long, value_enum, default_value_t = Method::Iterative)]
    pub method: Method,
    /// Interval width below which a cell counts as converged.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: u32,
    /// Strategy evaluations the analytic method may spend.
    #[arg(long, default_value_t = riskgame_core::analytic::DEFAULT_BUDGET)]
    pub budget: u64,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            method: self.method,
            epsilon: self.epsilon,
            max_sweeps: self.max_sweeps,
            budget: self.budget,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Points needed to win.
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = TableFormat::Ascii)]
    pub format: TableFormat,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest target for the cross-method comparison.
    #[arg(long, default_value_t = 5)]
    pub n: u32,
    /// Audit this policy document instead of running the fixture suite.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimulateFormat {
    /// One summary report.
    Json,
    /// One line per move of every game.
    Ndjson,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Target to solve; ignored when `--policy` is given.
    #[arg(long, required_unless_present = "policy")]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Play this policy document (both players) instead of solving.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SimulateFormat::Json)]
    pub format: SimulateFormat,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Targets to solve at startup.
    #[arg(long, value_delimiter = ',', default_values_t = (2..=12).collect::<Vec<u32>>())]
    pub n: Vec<u32>,
    /// Policy documents to serve as well; they replace solved targets with the same n.
    #[arg(long)]
    pub policy: Vec<PathBuf>,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct OeisArgs {
    #[arg(long, default_value_t = 15)]
    pub n: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure together with its exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Exit {
            code: 1,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Exit {
            code: 3,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Exit {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<SolveFailure> for Exit {
    fn from(f: SolveFailure) -> Self {
        Exit {
            code: f.exit_code(),
            message: f.to_string(),
        }
    }
}

impl From<io::Error> for Exit {
    fn from(e: io::Error) -> Self {
        Exit::internal(format!("i/o error: {e}"))
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(exit) => {
            eprintln!("error: {}", exit.message.trim_end());
            exit.code
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Exit> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Exit::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn read_document(path: &Path) -> Result<PolicyDocument, Exit> {
    let text = fs::read_to_string(path)
        .map_err(|e| Exit::usage(format!("cannot read {}: {e}", path.display())))?;
    PolicyDocument::from_json(&text)
        .map_err(|e| Exit::mismatch(format!("{}: {e:#}", path.display())))
}

fn load_policy_file(path: &Path) -> Result<Solution, Exit> {
    let doc = read_document(path)?;
    load_solution(&doc).map_err(|report| {
        Exit::mismatch(format!(
            "{} failed verification\n{}",
            path.display(),
            report.render()
        ))
    })
}

pub fn execute(cli: Cli) -> Result<(), Exit> {
    match cli.command {
        Command::Solve(args) => {
            let solution = solve(args.n, &args.solver.options())?;
            log::info!(
                "n = {}: {} sweeps, {} corrections, {} ties",
                args.n,
                solution.sweeps,
                solution.corrections.len(),
                solution.ties.len()
            );
            let doc = PolicyDocument::from_solution(&solution);
            emit(args.out.as_deref(), &doc.to_canonical_json())
        }
        Command::Table(args) => {
            let solution = solve(args.n, &args.solver.options())?;
            let table = extract_thresholds(&solution);
            for v in table.violations() {
                log::warn!(
                    "row r = {}, s = {} is not a threshold rule: {v:?}",
                    v.r,
                    v.s
                );
            }
            emit(args.out.as_deref(), &render(&table, args.format))
        }
        Command::Verify(args) => {
            let report = match &args.policy {
                Some(path) => check_document(&read_document(path)?),
                None => {
                    if args.n < 2 {
                        return Err(Exit::usage("--n must be at least 2"));
                    }
                    run_fixtures(args.n, &args.solver.options())?
                }
            };
            let text = report.render();
            if report.passed() {
                emit(None, &text)
            } else {
                Err(Exit::mismatch(text))
            }
        }
        Command::Simulate(args) => {
            let solution = match (&args.policy, args.n) {
                (Some(path), _) => load_policy_file(path)?,
                (None, Some(n)) => solve(n, &args.solver.options())?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            if args.trials == 0 {
                return Err(Exit::usage("--trials must be at least 1"));
            }
            let pair = PolicyPair::symmetric(solution.policy.clone());
            match args.format {
                SimulateFormat::Json => {
                    let report = estimate(&pair, args.trials, args.seed);
                    let exact =
                        exact_pair_value(&pair).map_err(|e| Exit::internal(e.to_string()))?;
                    log::info!(
                        "estimate {:.6} vs exact {:.6}: {:.2} standard errors",
                        report.estimate,
                        approx(&exact),
                        report.z_score(approx(&exact))
                    );
                    emit(args.out.as_deref(), &to_canonical_json(&report))
                }
                SimulateFormat::Ndjson => {
                    let mut buf = Vec::new();
                    write_traces(&mut buf, &pair, args.trials, args.seed)?;
                    emit(
                        args.out.as_deref(),
                        &String::from_utf8(buf).expect("JSON is UTF-8"),
                    )
                }
            }
        }
        Command::Serve(args) => {
            let options = args.solver.options();
            let mut solutions: Vec<Solution> = args
                .n
                .par_iter()
                .map(|&n| solve(n, &options))
                .collect::<Result<_, _>>()?;
            for path in &args.policy {
                let loaded = load_policy_file(path)?;
                solutions.retain(|s| s.n() != loaded.n());
                solutions.push(loaded);
            }
            let state = AppState::new(solutions);
            let targets: Vec<u32> = state.targets().collect();
            log::info!("serving targets {targets:?}");
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(state, SocketAddr::new(args.host, args.port)))?;
            Ok(())
        }
        Command::Oeis(args) => {
            if args.n < 2 {
                return Err(Exit::usage("--n must be at least 2"));
            }
            let rows = riskgame_core::analysis::oeis_export(args.n).map_err(|e| match e {
                IntervalError::NotConverged { .. } => SolveFailure::NotConverged(e),
                e => SolveFailure::Internal(e.to_string()),
            })?;
            emit(args.out.as_deref(), &format_fractions(&rows))
        }
    }
}
