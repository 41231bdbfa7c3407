//! Configuration, error tables, lattice comparisons and the named convergence
//! experiments built on `latwave`.

pub mod compare;
pub mod config;
pub mod experiments;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no-common-points: the compared windows share no lattice points")]
    NoCommonPoints,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed table: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] latwave::lattice::LatticeError),
    #[error(transparent)]
    Leapfrog(#[from] latwave::leapfrog::LeapfrogError),
    #[error(transparent)]
    Spectral(#[from] latwave::spectral::SpectralError),
    #[error(transparent)]
    Ode(#[from] latwave::lagrange_ode::OdeError),
    #[error(transparent)]
    Elliptic(#[from] latwave::elliptic::EllipticError),
    #[error(transparent)]
    Dispersion(#[from] latwave::dispersion::DispersionError),
}

impl HarnessError {
    pub fn io(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub use compare::{compare_on_common_lattice, CommonGrid, Norms, Target, Window};
pub use config::{ExperimentConfig, ExperimentId};
pub use experiments::{run_experiment, Check, Outcome};
pub use table::{ErrorRow, ErrorTable};
