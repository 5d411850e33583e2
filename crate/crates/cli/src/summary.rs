//! Machine-readable run summary: config echo, fitted quantities, invariant
//! drifts and one verdict per threshold.

use crate::config::ExperimentConfig;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// comparison direction: "<=" or ">="
    pub direction: &'static str,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub experiment: String,
    pub config: ExperimentConfig,
    /// fitted exponents, coefficients and R^2 values by name
    pub fits: BTreeMap<String, f64>,
    /// invariant-drift maxima and other scalar diagnostics by name
    pub diagnostics: BTreeMap<String, f64>,
    pub criteria: Vec<Verdict>,
    pub pass: bool,
    pub wall_seconds: f64,
}

impl RunSummary {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        RunSummary {
            schema_version: SUMMARY_SCHEMA_VERSION,
            experiment: cfg.experiment.name().to_string(),
            config: cfg.clone(),
            fits: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            criteria: Vec::new(),
            pass: true,
        wall_seconds: 0.0,
        }
    }

    pub fn fit(&mut self, name: &str, value: f64) {
        self.fits.insert(name.to_string(), value);
    }

    pub fn diag(&mut self, name: &str, value: f64) {
        self.diagnostics.insert(name.to_string(), value);
    }

    /// Record a `value <= threshold` verdict.
    pub fn check_le(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value <= threshold;
        self.pass &= pass;
        self.criteria.push(Verdict {
            name: name.to_string(),
            value,
            threshold,
            direction: "<=",
            pass,
        });
    }

    /// Record a `value >= threshold` verdict.
    pub fn check_ge(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value >= threshold;
        self.pass &= pass;
        self.criteria.push(Verdict {
            name: name.to_string(),
            value,
            threshold,
            direction: ">=",
            pass,
        });
    }

    pub fn print_verdicts(&self) {
        for v in &self.criteria {
            println!(
                "[{}] {}: {} {} {}",
                if v.pass { "pass" } else { "FAIL" },
                v.name,
                v.value,
                v.direction,
                v.threshold
            );
        }
    }
}
