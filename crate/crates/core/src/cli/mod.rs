//! Command-line front end and file formats.
//!
//! Subcommands: `run`, `figure`, `sweep`, `scaling`, `compare-analytic`.
//! Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O failure.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{
    compare_analytic, figure, linear_fit, run, scaling, sweep, AnalyticComparison, Deviation,
    FigureId, LinearFit, RunOutput, RunSummary, ScalingRegressor, ScalingReport, ScalingRow,
    SweepAxis, SweepResult, SweepRow,
};
pub use config::{OutputPaths, Overrides, ParamsConfig, RunConfig, TOL_ENV};
pub use output::{num, trajectory_csv, SPECTRUM_COLUMNS, TRAJECTORY_COLUMNS};

use crate::schedule::ScheduleKind;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    /// Rejected command line, with clap's rendered message.
    #[error("{0}")]
    Args(String),
    #[error(transparent)]
    Numeric(Error),
    #[error("I/O: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Args(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn into_error(self) -> Error {
        match self {
            CliError::Numeric(e) => e,
            CliError::Usage(m) | CliError::Args(m) | CliError::Io(m) => Error::InvalidParameter(m),
        }
    }
}

/// Parameter and configuration problems are the caller's to fix; the rest
/// are failures of the numerics.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::DeskScaleCap { .. }
            | Error::ToleranceUnachievable(_)
            | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nhqa",
    version,
    about = "Non-Hermitian quantum annealing for unstructured search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one configuration; prints a JSON summary, writes the
    /// trajectory CSV to --out.
    Run(RunArgs),
    /// Reproduce one of the captioned figure runs.
    Figure(FigureArgs),
    /// Repeat a run over a grid of values of one parameter.
    Sweep(SweepArgs),
    /// Shortest anneal time reaching a target probability, against N.
    Scaling(ScalingArgs),
    /// Integrator against the closed-form transition probabilities.
    CompareAnalytic(RunArgs),
}

#[derive(Debug, Args)]
struct IntegratorArgs {
    /// Output samples over s = t/tau in [0, 1].
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file mirroring RunConfig; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// linear or nonlinear.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    log2n: Option<u32>,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// fig1_left, fig1_right, fig2 or fig3.
    #[arg(long)]
    figure: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Trajectory CSV path; the summary goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// g, delta, tau or log2n.
    #[arg(long)]
    axis: String,
    /// Comma-separated values, e.g. "0,1e-4,1e-3".
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated log2 N values (at least four).
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 0.9)]
    target_p: f64,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

impl IntegratorArgs {
    fn overrides(&self, o: &mut Overrides) {
        o.samples = self.samples;
        o.rel_tol = self.rel_tol;
        o.abs_tol = self.abs_tol;
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let schedule = self
            .schedule
            .as_deref()
            .map(str::parse::<ScheduleKind>)
            .transpose()?;
        let mut o = Overrides {
            schedule,
            g: self.g,
            delta: self.delta,
            tau: self.tau,
            log2n: self.log2n,
            ..Default::default()
        };
        self.integrator.overrides(&mut o);
        let mut cfg = RunConfig::resolve(self.config.as_deref(), &o)?;
        if let Some(out) = &self.out {
            cfg.outputs.trajectory = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn parse_list<T: std::str::FromStr>(raw: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("cannot parse grid value '{s}'")))
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, contents),
        None => out
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn finish_run(out: &mut dyn Write, cfg: &RunConfig, result: RunOutput) -> Result<(), CliError> {
    if let Some(path) = &cfg.outputs.trajectory {
        write_file(path, &trajectory_csv(&result.trajectory, cfg.emit_spectra))?;
    }
    let summary = to_json(&result.summary);
    if let Some(path) = &cfg.outputs.summary {
        write_file(path, &summary)?;
    }
    emit(out, None, &summary)
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing reports to `out`.
pub fn execute<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return emit(out, None, &e.render().to_string());
        }
        Err(e) => return Err(CliError::Args(e.render().to_string())),
    };

    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let result = run(&cfg)?;
            finish_run(out, &cfg, result)
        }
        Command::Figure(args) => {
            let id: FigureId = args.figure.parse()?;
            let mut o = Overrides::default();
            args.integrator.overrides(&mut o);
            let mut cfg = id.config(&RunConfig::resolve(args.config.as_deref(), &o)?);
            if let Some(path) = &args.out {
                cfg.outputs.trajectory = Some(path.clone());
            }
            let result = run(&cfg)?;
            finish_run(out, &cfg, result)
        }
        Command::Sweep(args) => {
            let axis: SweepAxis = args.axis.parse()?;
            let grid: Vec<f64> = parse_list(&args.grid)?;
            let cfg = args.run.resolve()?;
            let result = sweep(&cfg, axis, &grid, args.parallel)?;
            emit(out, args.run.out.as_deref(), &result.to_csv(true))
        }
        Command::Scaling(args) => {
            let grid: Vec<u32> = parse_list(&args.grid)?;
            let cfg = args.run.resolve()?;
            let report = scaling(&cfg, &grid, args.target_p, args.parallel)?;
            if let Some(path) = &args.run.out {
                write_file(path, &report.to_csv())?;
            }
            emit(out, None, &to_json(&report))
        }
        Command::CompareAnalytic(args) => {
            let cfg = args.resolve()?;
            let report = compare_analytic(&cfg)?;
            emit(out, args.out.as_deref(), &to_json(&report))
        }
    }
}

/// Entry point for the binary: runs [`execute`] on the process arguments
/// and maps the outcome to an exit code.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(std::env::args_os(), &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = lock.flush();
            match &e {
                CliError::Args(m) => eprint!("{m}"),
                _ => eprintln!("nhqa: {e}"),
            }
            e.exit_code()
        }
    }
}
