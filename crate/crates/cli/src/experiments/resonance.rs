//! Resonance experiment: decay of the resonant-product residual after
//! subtracting the constructed coefficient sequence.

use crate::config::{resolve_thresholds, CatalogEntry, ExperimentConfig};
use crate::experiments::write_csv;
use crate::summary::RunSummary;
use anyhow::{anyhow, bail, Result};
use num_complex::Complex64 as C64;
use rkg_core::analytic::{AnalyticProfile, GaussianTerm};
use rkg_core::asymptotics::{delta_residual, resonant_coefficients, ResonanceTriple};
use rkg_core::field::Sign;
use rkg_core::fitting::{fit_decay, log_spaced, FitModel};
use rkg_core::grid::Grid;
use std::path::Path;

pub const THRESHOLD_DEFAULTS: &[(&str, f64)] = &[
    ("slope_order0_max", -1.8),
    ("slope_order1_max", -2.7),
];

fn sign_of(v: i8) -> Sign {
    if v >= 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn factor_profile(entries: &[&CatalogEntry]) -> AnalyticProfile<f64> {
    AnalyticProfile::new(
        entries
            .iter()
            .map(|e| GaussianTerm {
                amplitude: C64::new(e.amplitude[0], e.amplitude[1]),
                center: e.center,
                width: e.width,
                power: e.power,
                shift: e.shift,
            })
            .collect(),
    )
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let thresholds = resolve_thresholds(cfg, THRESHOLD_DEFAULTS)?;
    let grid = Grid::<f64>::new(cfg.grid.n, cfg.grid.length)?;
    let rc = &cfg.resonance;
    let rt = ResonanceTriple {
        target: (rc.masses[2], sign_of(rc.signs[2])),
        one: (rc.masses[0], sign_of(rc.signs[0])),
        two: (rc.masses[1], sign_of(rc.signs[1])),
    };
    rt.validate()?;

    // "f1"/"f2" entries name the two product factors here
    let f1_entries: Vec<&CatalogEntry> = cfg
        .catalog
        .iter()
        .filter(|e| e.component == "f1")
        .collect();
    let f2_entries: Vec<&CatalogEntry> = cfg
        .catalog
        .iter()
        .filter(|e| e.component == "f2")
        .collect();
    if f1_entries.is_empty() || f2_entries.is_empty() {
        bail!("catalog: the resonance experiment needs entries for both factors (f1 and f2)");
    }
    let f1 = factor_profile(&f1_entries);
    let f2 = factor_profile(&f2_entries);

    let window = cfg
        .time
        .fit_window
        .ok_or_else(|| anyhow!("time.fit_window: required for the resonance experiment"))?;
    let t_grid = log_spaced(window[0], window[1], cfg.time.samples);

    let coeffs = resonant_coefficients(
        &rt,
        &f1,
        &f2,
        &grid,
        rc.slice_radius,
        rc.slice_resolution,
        rc.order,
    )?;

    let mut all_rows: Vec<Vec<f64>> = t_grid.iter().map(|&t| vec![t]).collect();
    for order in 0..=rc.order {
        let series = delta_residual(&rt, &f1, &f2, &coeffs[..=order], &t_grid, &grid)?;
        for (i, row) in all_rows.iter_mut().enumerate() {
            row.push(series[0].values[i]);
            row.push(series[1].values[i]);
            row.push(series[2].values[i]);
        }
        let fit = fit_decay(&series[0], FitModel::Power, (window[0], window[1]))?;
        summary.fit(&format!("slope_order{order}"), fit.slope);
        summary.fit(&format!("slope_order{order}_r2"), fit.r_squared);
        let key = format!("slope_order{order}_max");
        summary.check_le(&format!("slope_order{order}"), fit.slope, thresholds[&key]);
    }

    let mut header: Vec<String> = vec!["t".to_string()];
    for order in 0..=rc.order {
        for q in 0..3 {
            header.push(format!("qbar{q}_order{order}"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &out_dir.join("resonance_series.csv"),
        &header_refs,
        all_rows.into_iter(),
    )?;
    Ok(())
}
