//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid modes per axis must be even, got {0}")]
    OddModes(usize),
    #[error("grid modes per axis must be at least 16, got {0}")]
    TooFewModes(usize),
    #[error("box side must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("fields live on different grids ({0}x{0} vs {1}x{1})")]
    GridMismatch(usize, usize),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("reality constraint violated: relative drift {drift:e} exceeds {tol:e}")]
    RealityViolation { drift: f64, tol: f64 },
    #[error("imaginary residue {residue:e} exceeds {tol:e} in a field expected to be real")]
    ImaginaryResidue { residue: f64, tol: f64 },
    #[error("time step rejected at t = {t}: norm grew by factor {growth}")]
    StepRejected { t: f64, growth: f64 },
    #[error("time span {span} is not an integral multiple of dt = {dt}")]
    NonIntegralSpan { span: f64, dt: f64 },
    #[error("scattering data outside the admissible region: smallness surrogate {gamma} >= 0.5")]
    NotAdmissible { gamma: f64 },
    #[error("wave-operator convergence table is not decreasing: {0:?}")]
    NonMonotoneConvergence(Vec<f64>),
    #[error("non-resonant denominator bound violated: min |1/d| = {min:e} < m/2 = {bound:e}")]
    DenominatorBound { min: f64, bound: f64 },
    #[error("mass/sign triple is not resonant: |eps*M - eps1*M1 - eps2*M2| = {defect:e}")]
    NotResonant { defect: f64 },
    #[error("cone slice support overflows the disk: needs radius {needed} but R = {radius}")]
    SupportOverflow { needed: f64, radius: f64 },
    #[error("cone section of radius {cone} does not fit in the box of half-side {half_box}")]
    ConeOverflow { cone: f64, half_box: f64 },
    #[error("slice interpolation accuracy {err:e} worse than 1e-8")]
    InterpolationAccuracy { err: f64 },
    #[error("decay fit needs at least {needed} samples in the window, found {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("power-law fit requires positive values, found {0}")]
    NonPositiveSample(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<V> = std::result::Result<V, Error>;
