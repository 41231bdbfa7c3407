//! Lattice models of the n-dimensional wave equation.
//!
//! The crate covers CFL-admissible space-time lattices, the explicit
//! three-level scheme and its discrete dispersion relation, Fourier-integral
//! reference solutions (continuum, fully discrete and semidiscrete), the
//! method-of-lines model integrated by Störmer–Verlet or RK4, Duhamel
//! integrals for forced problems, and the elliptic splitting used for
//! variable coefficients.

pub mod dispersion;
pub mod elliptic;
pub mod lagrange_ode;
pub mod lattice;
pub mod leapfrog;
pub mod spectral;
pub mod stencils;

pub use dispersion::{beta, beta_semidiscrete, symbol_g, DispersionBranch, DispersionError};
pub use lattice::{classify, is_admissible, refine_halving, Domain, LatticeClassification, LatticeSpec, ScalarField};
pub use leapfrog::{DiscreteProblem, LeapfrogError, Record};
pub use spectral::{DataFunction, Flavor, Forcing, FrequencyQuadrature, ReferenceSolution};
pub use stencils::GridField;
