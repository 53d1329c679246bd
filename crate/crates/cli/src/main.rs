//! `swcons`: certify sampling periods, simulate switched consensus runs and
//! generate random switching schedules.
//!
//! Exit status: 0 success, 1 input error, 2 violated hypothesis, 3
//! numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use switched_consensus::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "swcons", version, about = "Consensus under CT/DT switching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute admissible sampling periods and decay certificates.
    Certify(CertifyArgs),
    /// Run the hybrid system and judge consensus.
    Simulate(SimulateArgs),
    /// Write a seeded random switching schedule.
    RandomSchedule(RandomScheduleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Linear,
    Nonlinear,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Topology as `<id>=<path>`; repeat for a switching set.
    #[arg(long = "topology", value_name = "ID=PATH", required = true)]
    topologies: Vec<String>,

    #[arg(long, value_enum, default_value = "linear")]
    protocol: ProtocolArg,

    /// Sampling period, or `auto` for 0.9 times the certified bound.
    #[arg(long, default_value = "auto")]
    h: String,

    /// Lower sector constant of the nonlinear coupling.
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,

    /// Upper sector constant of the nonlinear coupling.
    #[arg(long, default_value_t = 2.0)]
    gamma2: f64,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Directory for the report files; reports go to stdout regardless.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleShape {
    /// Number of segments.
    #[arg(long, default_value_t = 10)]
    segments: usize,

    /// Shortest CT segment duration.
    #[arg(long, default_value_t = 1.0)]
    ct_min: f64,

    /// Longest CT segment duration.
    #[arg(long, default_value_t = 5.0)]
    ct_max: f64,

    /// Fewest steps in a DT segment.
    #[arg(long, default_value_t = 10)]
    dt_min: u64,

    /// Most steps in a DT segment.
    #[arg(long, default_value_t = 40)]
    dt_max: u64,

    /// Probability that a segment is CT.
    #[arg(long, default_value_t = 0.5)]
    ct_probability: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Schedule file; without it a random schedule is drawn from `--seed`.
    #[arg(long)]
    schedule: Option<PathBuf>,

    /// Seed of the random schedule.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    shape: ScheduleShape,

    /// Initial state as a comma-separated list, or `seed:<u64>`.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,

    /// Range `lo,hi` for seeded initial states.
    #[arg(long, default_value = "-5,5", allow_hyphen_values = true)]
    x0_range: String,

    /// Consensus tolerance on the final spread.
    #[arg(long, default_value_t = switched_consensus::analysis::DEFAULT_TOLERANCE)]
    tol: f64,

    /// Sample spacing inside CT segments.
    #[arg(long, default_value_t = switched_consensus::dynamics::DEFAULT_OUTPUT_RESOLUTION)]
    resolution: f64,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RandomScheduleArgs {
    #[arg(long)]
    seed: u64,

    #[command(flatten)]
    shape: ScheduleShape,

    /// Comma-separated topology ids drawn uniformly per segment.
    #[arg(long, default_value = "0")]
    ids: String,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map(Error::kind);
    match kind {
        Some(ErrorKind::Hypothesis) => 2,
        Some(ErrorKind::Numerical) => 3,
        Some(ErrorKind::Input) | None => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Certify(args) => commands::certify(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::RandomSchedule(args) => commands::random_schedule(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
