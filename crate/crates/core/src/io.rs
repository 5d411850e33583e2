//! Field serialization: CSV of `(kx_index, ky_index, re, im)` rows with a
//! header recording the grid and the normalization convention.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::scalar::{Real, C};
use std::io::{BufRead, Write};

/// Tag recorded in the header; coefficients are values of the
/// `(2 pi)^-1 Int e^{-ikx}` transform at their modes.
pub const NORMALIZATION_TAG: &str = "continuum-2pi";

pub fn write_field<T: Real, W: Write>(f: &SpectralField<T>, mut out: W) -> std::io::Result<()> {
    let grid = f.grid();
    writeln!(
        out,
        "# n={} L={} norm={}",
        grid.n(),
        grid.length(),
        NORMALIZATION_TAG
    )?;
    writeln!(out, "kx_index,ky_index,re,im")?;
    for iy in 0..grid.n() {
        for ix in 0..grid.n() {
            let c = f.coef()[grid.lin(ix, iy)];
            writeln!(
                out,
                "{},{},{},{}",
                grid.idx_of(ix),
                grid.idx_of(iy),
                c.re,
                c.im
            )?;
        }
    }
    Ok(())
}

pub fn read_field<T: Real, R: BufRead>(mut input: R) -> Result<SpectralField<T>> {
    let mut header = String::new();
    input
        .read_line(&mut header)
        .map_err(|e| Error::Invalid(format!("read header: {e}")))?;
    let header = header.trim();
    if !header.starts_with('#') {
        return Err(Error::Invalid("missing field header".into()));
    }
    let mut n = None;
    let mut length = None;
    let mut norm_ok = false;
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            n = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("L=") {
            length = v.parse::<f64>().ok();
        } else if let Some(v) = token.strip_prefix("norm=") {
            norm_ok = v == NORMALIZATION_TAG;
        }
    }
    let (n, length) = match (n, length) {
        (Some(n), Some(l)) => (n, l),
        _ => return Err(Error::Invalid("header must carry n= and L=".into())),
    };
    if !norm_ok {
        return Err(Error::Invalid(format!(
            "unknown normalization tag, expected {NORMALIZATION_TAG}"
        )));
    }
    let grid = Grid::new(n, T::of(length))?;
    let mut field = SpectralField::zeros(&grid);
    let mut seen = 0usize;
    for line in input.lines() {
        let line = line.map_err(|e| Error::Invalid(format!("read row: {e}")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with("kx_index") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Invalid(format!("bad row: {line}")));
        }
        let mx: i64 = cols[0]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad index: {line}")))?;
        let my: i64 = cols[1]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad index: {line}")))?;
        let re: f64 = cols[2]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad value: {line}")))?;
        let im: f64 = cols[3]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad value: {line}")))?;
        let slot = grid.lin(grid.slot_of(mx), grid.slot_of(my));
        field.coef_mut()[slot] = C::new(T::of(re), T::of(im));
        seen += 1;
    }
    if seen != grid.len() {
        return Err(Error::Invalid(format!(
            "expected {} rows, found {seen}",
            grid.len()
        )));
    }
    Ok(field)
}
