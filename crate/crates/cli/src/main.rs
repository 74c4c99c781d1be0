//! `noisy-vqe`: runs configured noise experiments and renders their reports.

mod artifacts;
mod config;
mod report;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use report::ReportKind;
use run::RunOptions;

#[derive(Parser)]
#[command(name = "noisy-vqe", version, about = "Noise studies of the variational quantum eigensolver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by a TOML or JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides every seed root in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Parallel sweep cells; all cores when unset.
        #[arg(long, env = "NOISY_VQE_WORKERS")]
        workers: Option<usize>,
        /// Print the ansatz gate list and write circuit.json.
        #[arg(long)]
        dump_circuit: bool,
        /// Progress and per-term estimates on stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Render SVG figures and text tables from a run directory.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ReportKind::NoiseCurve])]
        kinds: Vec<ReportKind>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            output_dir,
            seed,
            workers,
            dump_circuit,
            verbose,
        } => {
            let mut cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                cfg.override_seed(s);
            }
            let Some(output_dir) = output_dir.or_else(|| cfg.output_dir.clone()) else {
                eprintln!("config error: {}:1:1: no output_dir in config and no --output-dir given", config.display());
                return ExitCode::from(2);
            };
            let workers = workers
                .filter(|&w| w > 0)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let opts = RunOptions {
                output_dir,
                workers,
                dump_circuit,
                verbose,
            };
            match run::cmd_run(&cfg, &opts) {
                Ok(files) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Report { run_dir, kinds } => match report::cmd_report(&run_dir, &kinds) {
            Ok(tables) => {
                for t in tables {
                    println!("{t}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
