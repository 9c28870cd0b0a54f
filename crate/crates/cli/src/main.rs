//! `fastgrant` command-line harness.
//!
//! ```text
//! fastgrant list
//! fastgrant validate --config scenario.toml
//! fastgrant run table2 --seed 7 --reps 5 --out results
//! ```
//!
//! Exit codes: 0 success, 2 unknown experiment or bad usage, 3 invalid
//! configuration, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use fastgrant::{execute, Error, Experiment, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "fastgrant", version, about = "Fast uplink grant with NOMA pairing: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a named experiment and write its CSV outputs.
    Run {
        experiment: String,
        /// Scenario file (TOML, one `key = value` per line).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads for replications.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Extra `key=value` config overrides, TOML value syntax.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the registered experiments.
    List,
    /// Check a scenario file against every configuration invariant.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn load_config(path: Option<&PathBuf>) -> Result<ScenarioConfig, ExitCode> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => ScenarioConfig::load(p).map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }),
    }
}

fn report_invalid(cfg: &ScenarioConfig) -> Option<ExitCode> {
    let violations = cfg.violations();
    if violations.is_empty() {
        return None;
    }
    eprintln!("invalid configuration:");
    for v in &violations {
        eprintln!("  - {v}");
    }
    Some(ExitCode::from(EXIT_CONFIG))
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<18} {}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            let cfg = match load_config(Some(&config)) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(code) = report_invalid(&cfg) {
                return code;
            }
            println!("{}: ok", config.display());
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            seed,
            reps,
            out,
            jobs,
            overrides,
        } => {
            let exp = match Experiment::from_name(&experiment) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("error: {e}; try `fastgrant list`");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let mut cfg = match load_config(config.as_ref()) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if !overrides.is_empty() {
                cfg = match cfg.with_overrides(&overrides) {
                    Ok(c) => c,
                    Err(msg) => {
                        eprintln!("error: {msg}");
                        return ExitCode::from(EXIT_CONFIG);
                    }
                };
            }
            if let Some(s) = seed {
                cfg.rng_seed = s;
            }
            if let Some(code) = report_invalid(&cfg) {
                return code;
            }
            if reps == 0 {
                eprintln!("error: --reps must be positive");
                return ExitCode::from(EXIT_USAGE);
            }
            eprintln!(
                "running {} ({} devices, {} RBs, {} cycles, {} replication(s), seed {})",
                exp.name(),
                cfg.n_devices,
                cfg.n_rbs,
                cfg.n_cycles,
                reps,
                cfg.rng_seed
            );
            let started = Instant::now();
            match execute(exp, &cfg, reps, jobs, &out) {
                Ok(dir) => {
                    eprintln!("wrote {} in {:.1}s", dir.display(), started.elapsed().as_secs_f64());
                    ExitCode::SUCCESS
                }
                Err(Error::InvalidConfig(v)) => {
                    eprintln!("invalid configuration: {}", v.join("; "));
                    ExitCode::from(EXIT_CONFIG)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
