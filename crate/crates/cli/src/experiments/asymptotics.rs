//! Light-cone experiment: rest-term decay of the cone expansion (cone mode)
//! and the inversion round trip with its residual decay (inverse mode).

use crate::config::{resolve_thresholds, ExperimentConfig};
use crate::experiments::write_csv;
use crate::summary::RunSummary;
use anyhow::{bail, Result};
use num_complex::Complex64 as C64;
use rkg_core::analytic::{AnalyticProfile, GaussianTerm};
use rkg_core::asymptotics::{
    g0_from_profile, inverse_construction, inverse_residual_series, rest_term_norms,
};
use rkg_core::field::Sign;
use rkg_core::fitting::{fit_decay, log_spaced, FitModel};
use rkg_core::grid::Grid;
use std::path::Path;

pub const THRESHOLD_DEFAULTS: &[(&str, f64)] = &[
    ("slope_order1_max", -0.8),
    ("slope_order2_max", -1.8),
    ("round_trip_max", 1e-6),
    ("u0_slope_max", -0.8),
];

fn profile_from_catalog(cfg: &ExperimentConfig) -> Result<AnalyticProfile<f64>> {
    let terms: Vec<GaussianTerm<f64>> = cfg
        .catalog
        .iter()
        .filter(|e| e.component == "f1")
        .map(|e| GaussianTerm {
            amplitude: C64::new(e.amplitude[0], e.amplitude[1]),
            center: e.center,
            width: e.width,
            power: e.power,
            shift: e.shift,
        })
        .collect();
    if terms.is_empty() {
        bail!("catalog: the asymptotics experiment needs at least one f1 entry");
    }
    Ok(AnalyticProfile::new(terms))
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let thresholds = resolve_thresholds(cfg, THRESHOLD_DEFAULTS)?;
    let grid = Grid::<f64>::new(cfg.grid.n, cfg.grid.length)?;
    let ac = &cfg.asymptotics;
    let f = profile_from_catalog(cfg)?;
    let window = cfg.time.fit_window.unwrap_or([5.0, 100.0]);
    let t_grid = log_spaced(window[0], window[1], cfg.time.samples);

    match ac.mode {
        crate::config::AsymptoticsMode::Cone => {
            let mut rows: Vec<Vec<f64>> = t_grid.iter().map(|&t| vec![t]).collect();
            let mut header = vec!["t".to_string()];
            for &n in &ac.orders {
                if !(1..=3).contains(&n) {
                    bail!("asymptotics.orders: cone orders must lie in 1..=3");
                }
                let (l2, wsup) = rest_term_norms(
                    &f,
                    ac.mass,
                    Sign::Plus,
                    n,
                    &t_grid,
                    &grid,
                    ac.slice_radius,
                    ac.slice_resolution,
                )?;
                for (i, row) in rows.iter_mut().enumerate() {
                    row.push(l2.values[i]);
                    row.push(wsup.values[i]);
                }
                header.push(format!("l2_order{n}"));
                header.push(format!("weighted_sup_order{n}"));
                let fit = fit_decay(&l2, FitModel::Power, (window[0], window[1]))?;
                summary.fit(&format!("slope_order{n}"), fit.slope);
                let key = format!("slope_order{n}_max");
                if let Some(&bound) = thresholds.get(&key) {
                    summary.check_le(&format!("slope_order{n}"), fit.slope, bound);
                }
            }
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            write_csv(
                &out_dir.join("asymptotics_series.csv"),
                &header_refs,
                rows.into_iter(),
            )?;
        }
        crate::config::AsymptoticsMode::Inverse => {
            let g = g0_from_profile(&f, ac.mass, Sign::Plus, ac.slice_radius, ac.slice_resolution)?;
            let coeffs = inverse_construction(&g, 0, &grid)?;
            let expected = f.sample(&grid);
            let scale = expected.max_abs().max(1e-300);
            let mut worst = 0.0f64;
            for (a, b) in coeffs[0].coef().iter().zip(expected.coef()) {
                worst = worst.max((a - b).norm() / scale);
            }
            summary.diag("round_trip_error", worst);
            summary.check_le("round_trip_error", worst, thresholds["round_trip_max"]);

            let series = inverse_residual_series(&g, &coeffs, &t_grid, &grid)?;
            let fit = fit_decay(&series, FitModel::Power, (window[0], window[1]))?;
            summary.fit("u0_slope", fit.slope);
            summary.check_le("u0_slope", fit.slope, thresholds["u0_slope_max"]);
            write_csv(
                &out_dir.join("asymptotics_series.csv"),
                &["t", "u0_l2"],
                series
                    .times
                    .iter()
                    .zip(&series.values)
                    .map(|(&t, &v)| vec![t, v]),
            )?;
        }
        crate::config::AsymptoticsMode::Resonance => {
            return crate::experiments::resonance::run(cfg, out_dir, summary);
        }
    }
    Ok(())
}
