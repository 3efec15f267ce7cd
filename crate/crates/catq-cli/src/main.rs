//! catq: batch experiment runner for the non-normal Hamiltonian toolkit.
//!
//! Exit codes: 0 all tolerance checks passed, 1 numerical failure (summary
//! still emitted when possible), 2 usage or configuration error.

mod config;
mod experiments;
mod matfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{parse_config, ExperimentConfig, ExperimentKind};
use crate::experiments::{run_experiment, run_verify, write_outputs, ExperimentOutcome, RunError};

#[derive(Parser)]
#[command(
    name = "catq",
    about = "Seeded, reproducible experiments on non-normal Hamiltonians: metric \
             construction, two-sided evolution, overlap maximization and reality checks",
    after_help = "The environment variable CATQ_SEED, when set, overrides the seed \
                  from the configuration file or the --seed flag."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration file.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
    },
    /// Worked 2x2 example: the triangular matrix, its metric and its
    /// Q-Hermitian split.
    Demo {
        /// Directory for summary.json, meta.json and CSV artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reality sweep, bound saturation and the maximization oracle on one
    /// seeded random Hamiltonian.
    Verify {
        /// Matrix dimension.
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Seed for the Hamiltonian, the observables and the oracle restarts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Length of the evolution window.
        #[arg(long = "t", default_value_t = 1.0)]
        window: f64,
        /// Directory for summary.json and meta.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Large grids go through LAPACK routines with recursion that outgrows
    // small default stacks; give the worker room.
    let worker = std::thread::Builder::new()
        .name("catq-worker".into())
        .stack_size(64 * 1024 * 1024)
        .spawn(real_main)
        .expect("failed to spawn worker thread");
    worker.join().unwrap_or(ExitCode::from(1))
}

fn seed_override() -> Result<Option<u64>, String> {
    match std::env::var("CATQ_SEED") {
        Err(_) => Ok(None),
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("CATQ_SEED must be a non-negative integer, got {text:?}")),
    }
}

fn real_main() -> ExitCode {
    let cli = Cli::parse();
    let seed_env = match seed_override() {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    match cli.command {
        Command::Run { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            let mut cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(seed) = seed_env {
                cfg.seed = seed;
            }
            dispatch(&cfg)
        }
        Command::Demo { out } => {
            let mut cfg = demo_config();
            cfg.output_path = out.map(|p| p.display().to_string());
            if let Some(seed) = seed_env {
                cfg.seed = seed;
            }
            dispatch(&cfg)
        }
        Command::Verify {
            dim,
            seed,
            window,
            out,
        } => {
            let seed = seed_env.unwrap_or(seed);
            if !(window > 0.0) {
                eprintln!("error: --t must be positive");
                return ExitCode::from(2);
            }
            if dim < 2 {
                eprintln!("error: --dim must be at least 2");
                return ExitCode::from(2);
            }
            match run_verify(dim, seed, window) {
                Ok((summary, pass)) => {
                    println!("{summary:#}");
                    if let Some(dir) = out {
                        let outcome = ExperimentOutcome {
                            summary,
                            pass,
                            csv_files: Vec::new(),
                        };
                        if let Err(e) = write_outputs(&outcome, &dir) {
                            eprintln!("error: cannot write outputs: {e}");
                            return ExitCode::from(2);
                        }
                    }
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => report_run_error(e),
            }
        }
    }
}

fn demo_config() -> ExperimentConfig {
    ExperimentConfig {
        kind: ExperimentKind::Demo,
        hamiltonian: None,
        t_a: 0.0,
        t_b: 1.0,
        hbar: 1.0,
        seed: 0,
        tolerances: Default::default(),
        params: Default::default(),
        output_path: None,
    }
}

fn dispatch(cfg: &ExperimentConfig) -> ExitCode {
    match run_experiment(cfg) {
        Ok(outcome) => {
            println!("{:#}", outcome.summary);
            if let Some(dir) = &cfg.output_path {
                if let Err(e) = write_outputs(&outcome, std::path::Path::new(dir)) {
                    eprintln!("error: cannot write outputs: {e}");
                    return ExitCode::from(2);
                }
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more tolerance checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => report_run_error(e),
    }
}

fn report_run_error(e: RunError) -> ExitCode {
    match e {
        RunError::Config(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        RunError::Numerical(msg) => {
            // The run failed before producing results; still emit a summary
            // shell so downstream tooling sees a uniform shape.
            let summary = serde_json::json!({
                "pass": false,
                "error": msg,
            });
            println!("{summary:#}");
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
    }
}
