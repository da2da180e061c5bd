//! Command line front end for the k-out-of-n reliability toolkit.
//!
//! Subcommands wrap the library's analysis routes: `mtdl` for mean time
//! to data loss, `curve` for reliability curves, `sweep` for repair-time
//! sweeps, `simulate` for the Monte Carlo estimator, and `validate` for
//! the cross-method check suite. Reports are CSV or JSON on standard
//! output or a file.
//!
//! Exit statuses: 0 success, 1 validation-suite failure, 2 usage error,
//! 3 numerical error.

mod commands;
mod validate;

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kofn_core::{ErrorClass, RepairDiscipline, Result};

#[derive(Parser)]
#[command(name = "kofn", version, about = "Reliability analysis of k-out-of-n storage arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean time to data loss by the exact, derivative, and approximate routes.
    Mtdl(MtdlArgs),
    /// Data-loss CDF and reliability on a uniform time grid.
    Curve(CurveArgs),
    /// Mean time to data loss swept over log-spaced repair times.
    Sweep(SweepArgs),
    /// Monte Carlo estimate with standard error and z-score against the analytic value.
    Simulate(SimulateArgs),
    /// Cross-method validation suite; exits 1 if any check fails.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ArrayArgs {
    /// Total number of disks.
    #[arg(long)]
    n: u32,
    /// Minimum number of working disks for data availability.
    #[arg(long)]
    k: u32,
    /// Per-disk failure rate, in inverse time units.
    #[arg(long)]
    lambda: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Time unit label echoed into reports; values are never converted.
    #[arg(long, default_value = "year")]
    unit: String,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum DisciplineArg {
    Serial,
    Parallel,
    Both,
}

impl DisciplineArg {
    fn list(self) -> Vec<RepairDiscipline> {
        match self {
            DisciplineArg::Serial => vec![RepairDiscipline::Serial],
            DisciplineArg::Parallel => vec![RepairDiscipline::Parallel],
            DisciplineArg::Both => vec![RepairDiscipline::Serial, RepairDiscipline::Parallel],
        }
    }
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum ModelArg {
    /// Deterministic repair of fixed duration --trep.
    Det,
    /// Exponential repair at rate --mu.
    Exp,
}

#[derive(Args)]
struct MtdlArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Deterministic repair duration; required with --model det.
    #[arg(long)]
    trep: Option<f64>,
    /// Disciplines to report.
    #[arg(long, value_enum, default_value_t = DisciplineArg::Both)]
    discipline: DisciplineArg,
    /// Repair model.
    #[arg(long, value_enum, default_value_t = ModelArg::Det)]
    model: ModelArg,
    /// Exponential repair rate; required with --model exp.
    #[arg(long)]
    mu: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, ValueEnum)]
enum SingleDiscipline {
    Serial,
    Parallel,
}

impl From<SingleDiscipline> for RepairDiscipline {
    fn from(d: SingleDiscipline) -> Self {
        match d {
            SingleDiscipline::Serial => RepairDiscipline::Serial,
            SingleDiscipline::Parallel => RepairDiscipline::Parallel,
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Deterministic repair duration.
    #[arg(long)]
    trep: f64,
    /// Discipline for the single emitted curve.
    #[arg(long, value_enum, default_value_t = SingleDiscipline::Serial)]
    discipline: SingleDiscipline,
    /// End of the time grid.
    #[arg(long)]
    tmax: f64,
    /// Number of grid points over [0, tmax].
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Smallest repair duration in the sweep.
    #[arg(long)]
    trep_min: f64,
    /// Largest repair duration in the sweep.
    #[arg(long)]
    trep_max: f64,
    /// Number of log-spaced repair durations.
    #[arg(long, default_value_t = 25)]
    sweep_points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Deterministic repair duration; required with --model det.
    #[arg(long)]
    trep: Option<f64>,
    /// Disciplines to simulate.
    #[arg(long, value_enum, default_value_t = DisciplineArg::Both)]
    discipline: DisciplineArg,
    /// Repair model.
    #[arg(long, value_enum, default_value_t = ModelArg::Det)]
    model: ModelArg,
    /// Exponential repair rate; required with --model exp.
    #[arg(long)]
    mu: Option<f64>,
    /// Number of independent trials.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Seed for the reproducible trial streams.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Add this array to the checked grid (give all four of --n, --k, --lambda, --trep).
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    trep: Option<f64>,
    /// Flip one kernel entry's sign before the method-agreement check
    /// (suite self-test; the check must then fail).
    #[arg(long)]
    inject_fault: bool,
    /// Output path for the summary; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Mtdl(args) => commands::mtdl(args).map(|()| 0),
        Command::Curve(args) => commands::curve(args).map(|()| 0),
        Command::Sweep(args) => commands::sweep(args).map(|()| 0),
        Command::Simulate(args) => commands::simulate(args).map(|()| 0),
        Command::Validate(args) => commands::validate(args),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            process::exit(match err.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Numerical => 3,
            });
        }
    }
}
