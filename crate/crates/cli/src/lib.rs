//! Experiment driver library behind the `resonant-kg` binary; exposed so the
//! configuration and pipelines are integration-testable.

pub mod config;
pub mod experiments;
pub mod summary;

use anyhow::{bail, Context, Result};
use config::{apply_overrides, parse_config, Experiment};
use std::path::Path;
use std::time::Instant;
use summary::RunSummary;

pub fn experiment_of(name: &str) -> Result<Experiment> {
    Ok(match name {
        "cauchy" => Experiment::Cauchy,
        "scatter" => Experiment::Scatter,
        "resonance" => Experiment::Resonance,
        "poincare" | "poincare-check" => Experiment::Poincare,
        "asymptotics" => Experiment::Asymptotics,
        other => bail!(
            "unknown experiment `{other}` (expected cauchy, scatter, resonance, poincare-check or asymptotics)"
        ),
    })
}

/// Load, patch, validate and execute one experiment; artifacts land in
/// `out_dir` and the summary is also returned.
pub fn run_experiment(
    requested: Experiment,
    config_path: &Path,
    out_dir: &Path,
    overrides: &[String],
) -> Result<RunSummary> {
    let raw = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let patched = apply_overrides(&raw, overrides)?;
    let cfg = parse_config(&patched)?;
    if cfg.experiment != requested {
        bail!(
            "config declares experiment `{}` but `{}` was requested",
            cfg.experiment.name(),
            requested.name()
        );
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let mut summary = RunSummary::new(&cfg);
    let started = Instant::now();
    match requested {
        Experiment::Cauchy => experiments::cauchy::run(&cfg, out_dir, &mut summary)?,
        Experiment::Scatter => experiments::scatter::run(&cfg, out_dir, &mut summary)?,
        Experiment::Resonance => experiments::resonance::run(&cfg, out_dir, &mut summary)?,
        Experiment::Poincare => experiments::poincare::run(&cfg, out_dir, &mut summary)?,
        Experiment::Asymptotics => experiments::asymptotics::run(&cfg, out_dir, &mut summary)?,
    }
    summary.wall_seconds = started.elapsed().as_secs_f64();

    let summary_path = out_dir.join(format!("{}_summary.json", cfg.experiment.name()));
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}
