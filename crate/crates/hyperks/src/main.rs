//! Thin command-line front end over the library: parse the config, apply
//! the overrides, dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperks::cli::{execute, EXIT_CONFIG_ERROR, EXIT_IO_ERROR};
use hyperks::config::{parse_config, Command};

#[derive(Parser)]
#[command(
    name = "hyperks",
    version,
    about = "Chemotaxis on the hyperbolic disk: runs, sweeps, bounds, inequality bench"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and emit series.csv + summary.json
    Simulate(Common),
    /// Map the (chi, M, I0) regime diagram into phase_diagram.csv
    Sweep(Common),
    /// Evaluate the closed-form bound report into bounds.json
    Bounds(Common),
    /// Run the inequality battery into inequalities.csv
    Inequalities(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override every seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker-pool size (default: all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    let (expected, common) = match &args.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Bounds(c) => (Command::Bounds, c),
        Cmd::Inequalities(c) => (Command::Inequalities, c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", common.config.display());
            return ExitCode::from(EXIT_IO_ERROR as u8);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    if config.command != expected {
        eprintln!(
            "config declares command {:?} but the {:?} subcommand was invoked",
            config.command, expected
        );
        return ExitCode::from(EXIT_CONFIG_ERROR as u8);
    }
    if let Some(out) = &common.output {
        config.output = out.display().to_string();
    }
    if let Some(seed) = common.seed {
        if let Some(sim) = &mut config.sim {
            sim.seed = seed;
        }
        if let Some(sweep) = &mut config.sweep {
            sweep.seed = seed;
        }
        if let Some(battery) = &mut config.inequalities {
            battery.seed = seed;
        }
    }
    ExitCode::from(execute(&config, common.jobs) as u8)
}
