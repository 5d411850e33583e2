//! Cauchy experiment: evolve catalog data and track the norm ladder and the
//! constraint drift.

use crate::config::{build_data, resolve_thresholds, ExperimentConfig};
use crate::experiments::write_csv;
use crate::summary::RunSummary;
use anyhow::Result;
use rkg_core::dynamics::{integrate, SystemKind};
use rkg_core::field::Sign;
use rkg_core::grid::Grid;
use rkg_core::norms::{e_norm, q_norm};
use rkg_core::state::FieldId;
use std::path::Path;

pub const THRESHOLD_DEFAULTS: &[(&str, f64)] = &[
    ("max_constraint_drift_per_time", 1e-10),
    ("free_component_error", 1e-10),
];

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let thresholds = resolve_thresholds(cfg, THRESHOLD_DEFAULTS)?;
    let grid = Grid::<f64>::new(cfg.grid.n, cfg.grid.length)?;
    let data = build_data(cfg, &grid)?;
    let kind = SystemKind::from(cfg.system);

    let cadence = ((cfg.time.t_max / cfg.time.dt) as usize / cfg.time.samples.max(1)).max(1);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut max_drift_rate: f64 = 0.0;
    let free = kind.free_field();
    let mut free_err: f64 = 0.0;
    let a0 = data.state().clone();
    integrate(
        kind,
        &a0,
        0.0,
        cfg.time.t_max,
        cfg.time.dt,
        cadence,
        |t, a| {
            let drift = a.reality_drift();
            if t > 0.0 {
                max_drift_rate = max_drift_rate.max(drift / t);
            }
            // the uncoupled field must follow the free flow exactly
            let exact = a0
                .comp(free, Sign::Plus)
                .free_propagate(free.mass(cfg.mass), Sign::Plus, t);
            let got = a.comp(free, Sign::Plus);
            let scale = exact.l2_norm().max(1e-300);
            free_err = free_err.max(got.sub(&exact).l2_norm() / scale);
            rows.push(vec![
                t,
                e_norm(a),
                q_norm(a.comp(FieldId::Field1, Sign::Plus), 2),
                drift,
            ]);
        },
    )?;

    write_csv(
        &out_dir.join("cauchy_series.csv"),
        &["t", "e_norm", "q_2", "constraint_drift"],
        rows.into_iter(),
    )?;

    summary.diag("max_constraint_drift_per_time", max_drift_rate);
    summary.diag("free_component_error", free_err);
    summary.check_le(
        "max_constraint_drift_per_time",
        max_drift_rate,
        thresholds["max_constraint_drift_per_time"],
    );
    summary.check_le(
        "free_component_error",
        free_err,
        thresholds["free_component_error"],
    );
    Ok(())
}
