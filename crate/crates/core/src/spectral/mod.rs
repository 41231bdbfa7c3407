//! Frequency-domain reference solutions: the continuum solution, the closed
//! forms of the fully discrete and semidiscrete models, propagators and
//! Duhamel integrals.

pub mod data;
pub mod duhamel;
pub mod propagator;
pub mod quadrature;
pub mod synthesis;

use thiserror::Error;

use crate::dispersion::DispersionError;

pub use data::{DataFunction, GaussianBound};
pub use duhamel::{duhamel_solve, Forcing, TimeProfile};
pub use propagator::{propagator, Flavor, PropagatorMatrix};
pub use quadrature::{auto_cutoff, tail_bound, FrequencyQuadrature};
pub use synthesis::ReferenceSolution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("tail-too-large: tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error("no closed-form decay bound for the data; cannot certify the quadrature tail")]
    NoDecayBound,
    #[error("data is not Fourier-representable: {0}")]
    UnsupportedData(&'static str),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error("s-grid-misaligned: {0}")]
    SGridMisaligned(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
