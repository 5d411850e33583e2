//! Numerical laboratory for a pair of resonant two-field Klein-Gordon systems
//! on a periodic 2D grid: pseudospectral evolution, modified asymptotic
//! profiles and wave operators, light-cone asymptotics and the Poincare
//! algebra checks that tie them together.
//!
//! Everything is generic over the scalar type (`f32`/`f64`) through the
//! [`scalar::Real`] trait; the `*64` aliases below are the concrete types the
//! command-line driver uses.

pub mod error;
pub mod scalar;

pub mod analytic;
pub mod asymptotics;
pub mod dynamics;
pub mod field;
pub mod fitting;
pub mod grid;
pub mod io;
pub mod norms;
pub mod poincare;
pub mod profiles;
pub mod scattering;
pub mod state;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete aliases for the scalar type used by the CLI and most tests.
pub type Grid64 = grid::Grid<f64>;
pub type SpectralField64 = field::SpectralField<f64>;
pub type PhysicalField64 = field::PhysicalField<f64>;
pub type PhaseState64 = state::PhaseState<f64>;
pub type AnalyticProfile64 = analytic::AnalyticProfile<f64>;
