//! Algebra experiment: derived structure table, bracket-closure residual
//! matrix over all generator pairs and catalog data, and the translation
//! intertwining of the wave operator.

use crate::config::{build_data, resolve_thresholds, ExperimentConfig};
use crate::summary::RunSummary;
use anyhow::Result;
use rkg_core::dynamics::SystemKind;
use rkg_core::grid::Grid;
use rkg_core::poincare::{
    bracket_check, intertwine_check, structure_constants, Generator, Translation,
};
use rkg_core::scattering::WaveOpParams;
use serde::Serialize;
use std::fs;
use std::path::Path;

pub const THRESHOLD_DEFAULTS: &[(&str, f64)] = &[
    ("jacobi_max", 1e-12),
    ("linear_bracket_max", 1e-8),
    ("nonlinear_bracket_max", 1e-6),
    ("intertwine_space_max", 1e-4),
    ("intertwine_time_max", 1e-4),
];

#[derive(Serialize)]
struct BracketMatrix {
    generators: Vec<&'static str>,
    /// rows (x, y, linear residual, nonlinear residual), upper triangle
    linear: Vec<(String, String, f64)>,
    nonlinear: Vec<(String, String, f64)>,
    jacobi_residual: f64,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let thresholds = resolve_thresholds(cfg, THRESHOLD_DEFAULTS)?;
    let grid = Grid::<f64>::new(cfg.grid.n, cfg.grid.length)?;
    let data = build_data(cfg, &grid)?;
    let kind = SystemKind::from(cfg.system);
    let table = structure_constants();

    let jacobi = table.jacobi_residual();
    summary.diag("jacobi_residual", jacobi);
    summary.check_le("jacobi_residual", jacobi, thresholds["jacobi_max"]);

    let f = data.state();
    let mut matrix = BracketMatrix {
        generators: Generator::ALL.iter().map(|g| g.label()).collect(),
        linear: Vec::new(),
        nonlinear: Vec::new(),
        jacobi_residual: jacobi,
    };
    let mut worst_linear: f64 = 0.0;
    let mut worst_nonlinear: f64 = 0.0;
    let mut csv = String::from("x,y,linear_residual,nonlinear_residual\n");
    for (i, &x) in Generator::ALL.iter().enumerate() {
        for &y in Generator::ALL.iter().skip(i + 1) {
            let lin = bracket_check(x, y, kind, f, &table, true);
            let non = bracket_check(x, y, kind, f, &table, false);
            worst_linear = worst_linear.max(lin);
            worst_nonlinear = worst_nonlinear.max(non);
            matrix
                .linear
                .push((x.label().to_string(), y.label().to_string(), lin));
            matrix
                .nonlinear
                .push((x.label().to_string(), y.label().to_string(), non));
            csv.push_str(&format!("{},{},{lin},{non}\n", x.label(), y.label()));
        }
    }
    fs::write(out_dir.join("poincare_residuals.csv"), csv)?;
    fs::write(
        out_dir.join("poincare_matrix.json"),
        serde_json::to_string_pretty(&matrix)?,
    )?;

    summary.diag("worst_linear_bracket", worst_linear);
    summary.diag("worst_nonlinear_bracket", worst_nonlinear);
    summary.check_le(
        "linear_bracket",
        worst_linear,
        thresholds["linear_bracket_max"],
    );
    summary.check_le(
        "nonlinear_bracket",
        worst_nonlinear,
        thresholds["nonlinear_bracket_max"],
    );

    if !cfg.poincare.skip_intertwining {
        let params = WaveOpParams {
            t_max: cfg.poincare.intertwine_t_max,
            dt: cfg.time.dt,
            doublings: 1,
        };
        let space = intertwine_check(
            kind,
            &data,
            Translation::Space(cfg.poincare.space_shift),
            &params,
        )?;
        summary.diag("intertwine_space", space);
        summary.check_le("intertwine_space", space, thresholds["intertwine_space_max"]);

        let time = intertwine_check(
            kind,
            &data,
            Translation::Time(cfg.poincare.time_shift),
            &params,
        )?;
        summary.diag("intertwine_time", time);
        summary.check_le("intertwine_time", time, thresholds["intertwine_time_max"]);
    }
    Ok(())
}
