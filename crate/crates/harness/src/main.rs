// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conformal_pid::control::ControllerMode;
use cpid::emit::emit;
use cpid::{run, sweep, RunConfig};

#[derive(Parser)]
#[command(name = "cpid", version, about = "Backtest online conformal controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a grid of controllers and rate multipliers.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        controllers: Vec<ControllerMode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> cpid::Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> cpid::Result<()> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let cfg = load(&config, out, seed)?;
            let output = run(&cfg)?;
            let written = emit(&output, &cfg.output_dir, &cfg.formats)?;
            let s = &output.summary;
            println!(
                "{}: {} steps, coverage {:.4}, infinite {:.4}, empty {:.4}",
                cfg.name, s.steps, s.marginal_coverage, s.fraction_infinite, s.fraction_empty
            );
            for p in written {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep {
            config,
            rates,
            controllers,
            out,
            seed,
        } => {
            let cfg = load(&config, out, seed)?;
            let cells = sweep(&cfg, &rates, &controllers)?;
            for cell in &cells {
                match &cell.outcome {
                    Ok(s) => println!(
                        "{:<12} {:<8} coverage {:.4} infinite {:.4}",
                        cell.controller.name(),
                        cell.multiplier,
                        s.marginal_coverage,
                        s.fraction_infinite
                    ),
                    Err(e) => println!("{:<12} {:<8} error: {e}", cell.controller.name(), cell.multiplier),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
