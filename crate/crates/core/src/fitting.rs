//! Decay-law estimation for norm time series: power-law fits on
//! `(ln t, ln v)` and logarithmic-growth fits on `(ln t, v)`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;

/// Time series of a norm, tagged with what was measured.
#[derive(Clone, Debug, Serialize)]
pub struct DecaySeries<T: Real> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    pub norm_tag: String,
}

impl<T: Real> DecaySeries<T> {
    pub fn new(norm_tag: impl Into<String>) -> Self {
        DecaySeries {
            times: Vec::new(),
            values: Vec::new(),
            norm_tag: norm_tag.into(),
        }
    }

    pub fn push(&mut self, t: T, v: T) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.values.push(v);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|&v| v == T::zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitModel {
    /// `v ~ c t^alpha`: least squares on `(ln t, ln v)`
    Power,
    /// `v ~ c0 + c1 ln t`: least squares on `(ln t, v)`
    Log,
}

/// Fitted decay/growth law over a window of the series.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub model: FitModel,
    /// Power exponent `alpha`, or the log-model slope `c1`.
    pub slope: f64,
    /// `ln c` for the power model, `c0` for the log model.
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares fit over samples with `window.0 <= t <= window.1`.
/// Requires at least 10 samples in the window; the power model requires
/// positive values.
pub fn fit_decay<T: Real>(
    series: &DecaySeries<T>,
    model: FitModel,
    window: (T, T),
) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        let t = t.to_f64().unwrap();
        let v = v.to_f64().unwrap();
        match model {
            FitModel::Power => {
                if v <= 0.0 {
                    return Err(Error::NonPositiveSample(v));
                }
                xs.push(t.ln());
                ys.push(v.ln());
            }
            FitModel::Log => {
                xs.push(t.ln());
                ys.push(v);
            }
        }
    }
    if xs.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let p = intercept + slope * x;
            (y - p) * (y - p)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(DecayFit {
        model,
        slope,
        intercept,
        window: (
            window.0.to_f64().unwrap_or(f64::NAN),
            window.1.to_f64().unwrap_or(f64::NAN),
        ),
        r_squared,
        samples: xs.len(),
    })
}

/// Logarithmically spaced sample times in `[a, b]`.
pub fn log_spaced<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            let s = T::of(i as f64) / T::of((count - 1).max(1) as f64);
            (la + (lb - la) * s).exp()
        })
        .collect()
}
