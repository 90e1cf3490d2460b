//! Experiment CLI: run a configured Monte Carlo sweep and write a SER table.
//!
//! All the work happens in the library; this binary only parses arguments,
//! applies overrides and reports where the CSV went.

use clap::{Parser, Subcommand};
use declip::harness::{self, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "declip", version, about = "Clipped-OFDM recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment config file (flat key=value text).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count.
    #[arg(long)]
    frames: Option<usize>,
    /// Worker threads (default: one per core). Results are identical for
    /// any thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by the config file.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run with one parameter overridden by a list of values.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to sweep (supported: m).
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
    },
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig, declip::Error> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(frames) = common.frames {
        cfg.frames = frames;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig, common: &CommonArgs) -> Result<(), declip::Error> {
    let run = || -> Result<(), declip::Error> {
        let outcome = harness::run_experiment(cfg)?;
        let stalls: u32 = outcome
            .diagnostics
            .iter()
            .map(|d| d.solver_stalls)
            .sum();
        if stalls > 0 {
            eprintln!("note: {stalls} solver stall diagnostics recorded");
        }
        if let Err(e) = harness::write_csv(&outcome.records, &common.out) {
            // Keep the results available even when the file write fails.
            eprintln!("failed to write {}: {e}", common.out.display());
            print!("{}", harness::records_to_csv(&outcome.records));
            return Err(e);
        }
        println!(
            "wrote {} rows ({} frames each) to {}",
            outcome.records.len(),
            cfg.frames,
            common.out.display()
        );
        Ok(())
    };
    match common.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| declip::Error::InvalidInput(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common } => load_config(common).and_then(|cfg| execute(&cfg, common)),
        Command::Sweep {
            common,
            param,
            values,
        } => load_config(common).and_then(|mut cfg| {
            match param.as_str() {
                "m" => {
                    let parsed: Result<Vec<usize>, _> =
                        values.split(',').map(|v| v.trim().parse()).collect();
                    match parsed {
                        Ok(list) if !list.is_empty() => cfg.m_sweep = list,
                        _ => {
                            return Err(declip::Error::InvalidInput(format!(
                                "bad --values list {values:?}"
                            )))
                        }
                    }
                }
                other => {
                    return Err(declip::Error::InvalidInput(format!(
                        "unsupported sweep parameter {other:?} (supported: m)"
                    )))
                }
            }
            cfg.validate()?;
            execute(&cfg, common)
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
