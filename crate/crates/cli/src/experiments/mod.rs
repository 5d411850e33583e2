//! The five experiment pipelines.

pub mod asymptotics;
pub mod cauchy;
pub mod poincare;
pub mod resonance;
pub mod scatter;

use anyhow::Result;
use std::fs;
use std::path::Path;

/// Write a CSV table of named columns; all experiments emit both this and
/// the JSON summary.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
