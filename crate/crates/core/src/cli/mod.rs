//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification fails (or output cannot be
//! written), 2 on invalid usage or input.

pub mod density_file;
mod state_spec;

pub use state_spec::StateSpec;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bisep::{survey, VerifyOptions};
use crate::criterion::{evaluate_with, CriterionReport, OffDiagonalMode, Regime};
use crate::dicke::{dicke_state, ElementSource, StateFamily};
use crate::error::{Error, Result};
use crate::measurements::{
    expectation_table_from_state, required_elements, tomography_count, ExpectationTable,
    MeasurementPlan,
};
use crate::thresholds::{
    format_sig12, region_scan_with, scaling_curve, white_noise_threshold, write_scaling_csv,
    GridSpec,
};
use crate::tolerance::Tolerances;

/// Version of every JSON document written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping worker threads (`0` or unset: one per core).
pub const THREADS_ENV: &str = "DICKE_WITNESS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dicke-witness", version, about = "Multipartite entanglement criteria for Dicke states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the criterion on a state.
    Evaluate(EvaluateArgs),
    /// Analytic and bisected white-noise threshold.
    Threshold(ThresholdArgs),
    /// Detection map of p D_2 + q D_3 + noise as CSV.
    Region(RegionArgs),
    /// Threshold curves over n as CSV.
    Scaling(ScalingArgs),
    /// Pauli operators needed to evaluate the criterion.
    Settings(SettingsArgs),
    /// Export the expectation values of a state as CSV.
    Expectations(ExpectationsArgs),
    /// Check the criterion on random biseparable mixtures.
    VerifyBisep(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// dicke | dicke+noise[:p] | mix[:p,q] | file:PATH | table:PATH
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Noise weight (dicke+noise) or D_2 weight (mix) when not given inline.
    #[arg(long)]
    pub p: Option<f64>,
    /// D_3 weight (mix) when not given inline.
    #[arg(long)]
    pub q: Option<f64>,
    /// Use Re O instead of |O|.
    #[arg(long)]
    pub real_part: bool,
    /// Detection tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file (CSV unless --format json).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Excitation numbers, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5])]
    pub m: Vec<usize>,
    /// Largest qubit count.
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SettingsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ExpectationsArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(body: T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { schema: SCHEMA_VERSION, body })?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances> {
    match tol {
        Some(t) if !(t >= 0.0 && t.is_finite()) => {
            Err(Error::domain(format!("tolerance {t} must be a nonnegative number")))
        }
        Some(t) => Ok(Tolerances::DEFAULT.with_detection(t)),
        None => Ok(Tolerances::DEFAULT),
    }
}

/// A state built from `--state`, `--p` and `--q`.
pub enum LoadedState {
    Source(Box<dyn ElementSource>),
    Table(ExpectationTable),
}

pub fn load_state(spec: &StateSpec, n: usize, m: usize, p: Option<f64>, q: Option<f64>) -> Result<LoadedState> {
    let missing = |what: &str| Error::Parse(format!("state needs {what}"));
    let source: Box<dyn ElementSource> = match spec {
        StateSpec::Dicke => {
            if n <= crate::dicke::MAX_STATE_QUBITS {
                Box::new(dicke_state(n, m)?)
            } else {
                Box::new(StateFamily::dicke_with_noise(n, m, 0.0)?)
            }
        }
        StateSpec::DickeNoise(inline) => {
            let p = inline.or(p).ok_or_else(|| missing("a noise weight (dicke+noise:p or --p)"))?;
            Box::new(StateFamily::dicke_with_noise(n, m, p)?)
        }
        StateSpec::Mix(inline) => {
            let (p, q) = match (inline, p, q) {
                (Some(pq), _, _) => *pq,
                (None, Some(p), Some(q)) => (p, q),
                _ => return Err(missing("weights (mix:p,q or --p and --q)")),
            };
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p + q > 1.0 + 1e-12 {
                return Err(Error::domain(format!("mix weights p={p}, q={q} are not a probability split")));
            }
            Box::new(StateFamily::two_three_mixture(n, p, q)?)
        }
        StateSpec::File(path) => Box::new(density_file::load_density(path)?),
        StateSpec::Table(path) => {
            let table = ExpectationTable::read_csv(File::open(path)?)?;
            if table.qubits() != n {
                return Err(Error::domain(format!("table covers {} qubits but --n is {n}", table.qubits())));
            }
            return Ok(LoadedState::Table(table));
        }
    };
    if source.qubits() != n {
        return Err(Error::domain(format!("state has {} qubits but --n is {n}", source.qubits())));
    }
    Ok(LoadedState::Source(source))
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let spec: StateSpec = args.state.parse()?;
    let tol = tolerances(args.tol)?;
    let report: CriterionReport = match load_state(&spec, args.n, args.m, args.p, args.q)? {
        LoadedState::Source(source) => {
            let mode = if args.real_part { OffDiagonalMode::RealPart } else { OffDiagonalMode::Absolute };
            evaluate_with(source.as_ref(), args.n, args.m, mode, &tol)?
        }
        LoadedState::Table(table) => MeasurementPlan::new(args.n, args.m)?.evaluate(&table, &tol)?,
    };
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => format!(
            "n,m,value,o_sum,p_sum,d_sum,n_d,verdict\n{},{},{},{},{},{},{},{}\n",
            report.n,
            report.m,
            format_sig12(report.value),
            format_sig12(report.o_sum),
            format_sig12(report.p_sum),
            format_sig12(report.d_sum),
            report.n_d,
            if report.detected() { "detected" } else { "not_detected" }
        ),
    };
    emit(args.output.out.as_deref(), &text)
}

fn threshold(args: &ThresholdArgs) -> Result<()> {
    let result = white_noise_threshold(args.n, args.m, &tolerances(args.tol)?)?;
    let text = match args.output.format {
        Format::Json => json(result)?,
        Format::Csv => format!(
            "n,m,analytic_p,numeric_p,agreement\n{},{},{},{},{}\n",
            result.n,
            result.m,
            format_sig12(result.analytic_p),
            format_sig12(result.numeric_p),
            format_sig12(result.agreement)
        ),
    };
    emit(args.output.out.as_deref(), &text)
}

fn region(args: &RegionArgs) -> Result<()> {
    let spec = GridSpec { qubits: args.n, p_points: args.grid, q_points: args.grid };
    let grid = region_scan_with(&spec, &tolerances(args.tol)?)?;
    match args.format {
        Format::Csv => grid.write_csv(open_sink(args.out.as_deref())?),
        Format::Json => emit(args.out.as_deref(), &json(&grid)?),
    }
}

fn scaling(args: &ScalingArgs) -> Result<()> {
    let rows = scaling_curve(&args.m, args.n)?;
    match args.format {
        Format::Csv => write_scaling_csv(&rows, open_sink(args.out.as_deref())?),
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [crate::thresholds::ScalingRow],
            }
            emit(args.out.as_deref(), &json(Body { rows: &rows })?)
        }
    }
}

fn settings(args: &SettingsArgs) -> Result<()> {
    let plan = MeasurementPlan::new(args.n, args.m)?;
    let ops: Vec<String> = plan.operators().iter().map(ToString::to_string).collect();
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body {
                n: usize,
                m: usize,
                count: usize,
                tomography_count: u128,
                elements: crate::measurements::ElementCount,
                operators: Vec<String>,
            }
            json(Body {
                n: args.n,
                m: args.m,
                count: ops.len(),
                tomography_count: tomography_count(args.n)?,
                elements: required_elements(args.n, args.m)?,
                operators: ops,
            })?
        }
        Format::Csv => {
            let mut s = String::from("operator\n");
            for op in ops {
                s.push_str(&op);
                s.push('\n');
            }
            s
        }
    };
    emit(args.output.out.as_deref(), &text)
}

fn expectations(args: &ExpectationsArgs) -> Result<()> {
    let spec: StateSpec = args.state.parse()?;
    let table = match load_state(&spec, args.n, args.m, args.p, args.q)? {
        LoadedState::Source(source) => expectation_table_from_state(source.as_ref(), args.n, args.m)?,
        LoadedState::Table(table) => table,
    };
    table.write_csv(open_sink(args.out.as_deref())?)
}

/// Returns whether the run passed.
fn verify_bisep(args: &VerifyArgs) -> Result<bool> {
    let options = VerifyOptions { tolerances: tolerances(args.tol)?, ..VerifyOptions::default() };
    let report = survey(args.samples, args.n, args.m, args.seed, &options)?;
    let passed = report.regime != Regime::Guaranteed || report.violations == 0;
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => format!(
            "n,m,samples,seed,max_value,violations\n{},{},{},{},{},{}\n",
            report.n,
            report.m,
            report.samples,
            report.seed,
            format_sig12(report.max_value),
            report.violations
        ),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(passed)
}

fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(threads) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        Err(_) => log::warn!("ignoring {THREADS_ENV}={raw:?}: not a thread count"),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BoundViolation { .. } | Error::LemmaViolation(_) => 1,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let outcome = match &cli.command {
        Command::Evaluate(a) => evaluate(a).map(|_| true),
        Command::Threshold(a) => threshold(a).map(|_| true),
        Command::Region(a) => region(a).map(|_| true),
        Command::Scaling(a) => scaling(a).map(|_| true),
        Command::Settings(a) => settings(a).map(|_| true),
        Command::Expectations(a) => expectations(a).map(|_| true),
        Command::VerifyBisep(a) => verify_bisep(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: biseparable bound violated; counterexample included in the report");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
