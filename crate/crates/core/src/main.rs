use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use uniregress::harness::{self, verify, ExperimentConfig, OUT_DIR_ENV};
use uniregress::processes::{make_process, smv_diagnostic, Partition, ProcessKind};
use uniregress::seed::child_rng;
use uniregress::Error;

#[derive(Parser)]
#[command(
    name = "uniregress",
    version,
    about = "Universal online regression simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered scenario and write the regret trace.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV path; defaults to `$UNIREG_OUT_DIR/<scenario>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenario parameter override, `key=value`.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Run an oracle suite.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Distinct parts visited by a process prefix.
    Diag {
        #[arg(long)]
        process: String,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List scenarios and suites.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run {
            scenario,
            horizon,
            replicas,
            seed,
            out,
            params,
        } => {
            let mut config = ExperimentConfig::new(&scenario, horizon, replicas, seed);
            for kv in &params {
                config.push_param(kv)?;
            }
            let path = match out {
                Some(p) => p,
                None => {
                    let dir = std::env::var_os(OUT_DIR_ENV)
                        .map(PathBuf::from)
                        .unwrap_or_else(|| PathBuf::from("."));
                    dir.join(format!("{scenario}.csv"))
                }
            };
            let output = harness::run(&config)?;
            let sidecar = output.write(&path)?;
            eprintln!("wrote {} and {}", path.display(), sidecar.display());
            println!(
                "{}",
                serde_json::to_string_pretty(&output.summary["final"])?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let report = verify::verify(&suite)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Diag {
            process,
            partition,
            horizon,
            seed,
        } => {
            let kind = ProcessKind::parse(&process)?;
            let part = Partition::parse(&partition)?;
            let xs = make_process(kind, child_rng(seed, "process", 0))?.take(horizon);
            let mut horizons: Vec<usize> =
                std::iter::successors(Some(1usize), |h| h.checked_mul(10))
                    .take_while(|h| *h < horizon)
                    .collect();
            horizons.push(horizon);
            let counts = smv_diagnostic(&xs, &part, &horizons);
            let rows: Vec<_> = horizons
                .iter()
                .zip(&counts)
                .map(|(h, c)| json!({"horizon": h, "parts": c}))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "process": process,
                    "partition": partition,
                    "note": "finite-horizon evidence, not a verdict",
                    "visited": rows,
                }))?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::List => {
            for s in harness::scenario_names() {
                println!("scenario {s}");
            }
            for s in verify::SUITES {
                println!("suite {s}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
