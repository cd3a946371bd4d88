//! `mmblock`: blockage analytics, simulation and planning from the command line.

mod commands;
mod context;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use context::Context;

#[derive(Parser, Debug)]
#[command(
    name = "mmblock",
    version,
    about = "mmWave blockage model: analysis, simulation, planning"
)]
struct Cli {
    /// Flat key = value configuration file (CLI units).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// Override a parameter, e.g. `--set blocker_density_lambda_B=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    /// Sweep a parameter: `axis=min:max:count[:log]` or `axis=v1,v2`.
    /// Repeat for a Cartesian product.
    #[arg(long = "sweep", value_name = "SPEC")]
    pub sweeps: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form LOS / NLOS statistics over a parameter grid.
    Analyze {
        /// los, nlos or open-park.
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Random-waypoint Monte-Carlo simulation of the open-park scenario.
    Simulate(commands::simulate::SimulateArgs),
    /// Hexagonal deployment blockage probability.
    Hex(commands::hex::HexArgs),
    /// Minimum BS density for QoS targets, or the height-density tradeoff.
    Plan(commands::plan::PlanArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 3 for numerical failures.
fn exit_code(e: &mmwave_blockage::Error) -> u8 {
    if e.is_validation() || matches!(e, mmwave_blockage::Error::Io(_)) {
        2
    } else {
        3
    }
}

fn run(cli: Cli) -> mmwave_blockage::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(mmwave_blockage::Error::Config(
                "--threads must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| mmwave_blockage::Error::Config(e.to_string()))?;
    }
    let ctx = Context::load(cli.config.as_deref(), cli.seed, cli.out)?;
    match cli.command {
        Command::Analyze { model, params } => {
            commands::analyze::run(&ctx, model.as_deref(), &params)
        }
        Command::Simulate(args) => commands::simulate::run(&ctx, &args),
        Command::Hex(args) => commands::hex::run(&ctx, &args),
        Command::Plan(args) => commands::plan::run(&ctx, &args),
    }
}
