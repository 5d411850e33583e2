//! Experiment driver: `resonant-kg <experiment> --config <path> [--out <dir>]
//! [--override key=value]`. Exit code 0 when every threshold passes, 2 on a
//! threshold failure, 1 on usage or configuration errors.

use clap::Parser;
use rkg_cli::{experiment_of, run_experiment};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "resonant-kg",
    about = "Desk-scale experiments on a pair of resonant 2D Klein-Gordon systems",
    version
)]
struct Cli {
    /// experiment to run: cauchy | scatter | resonance | poincare-check | asymptotics
    experiment: String,
    /// JSON configuration
    #[arg(long)]
    config: PathBuf,
    /// output directory for CSV/JSON artifacts (default: alongside the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// dotted-path overrides applied to the config, e.g. time.dt=0.02
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let requested = match experiment_of(&cli.experiment) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(1);
        }
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| {
        cli.config
            .parent()
            .unwrap_or(std::path::Path::new("."))
            .to_path_buf()
    });
    match run_experiment(requested, &cli.config, &out_dir, &cli.overrides) {
        Ok(summary) => {
            summary.print_verdicts();
            println!(
                "{}: wrote {} ({:.1}s)",
                summary.experiment,
                out_dir
                    .join(format!("{}_summary.json", summary.experiment))
                    .display(),
                summary.wall_seconds
            );
            if summary.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more thresholds failed");
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
