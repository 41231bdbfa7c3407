//! Discrete dispersion: the symbol `G(α, β², dx, dt)`, its root branch `β`
//! and the semidiscrete frequency `β₀`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeSpec, LATTICE_TOL};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum DispersionError {
    #[error("cfl-violated: arcsin argument {argument} exceeds 1")]
    CflViolated { argument: f64 },
}

/// `(sin z / z)²` as a function of `z²`, continued to `z² < 0` as `(sinh y / y)²`.
pub fn sinc_sq_of_sq(z2: f64) -> f64 {
    if z2.abs() < 1e-8 {
        // |z| < 1e-4
        1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 45.0 - z2 * z2 * z2 / 315.0
    } else if z2 > 0.0 {
        let z = z2.sqrt();
        let s = z.sin() / z;
        s * s
    } else {
        let y = (-z2).sqrt();
        let s = y.sinh() / y;
        s * s
    }
}

/// `(sin z / z)²`.
pub fn sinc_sq(z: f64) -> f64 {
    sinc_sq_of_sq(z * z)
}

/// `sin z / z` with the removable singularity filled.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

/// `G = −sinc²(βdt/2)·β² + Σ_k sinc²(α_k dx/2)·α_k²`.
pub fn symbol_g(alpha: &[f64], beta_sq: f64, dx: f64, dt: f64) -> f64 {
    let time = sinc_sq_of_sq(beta_sq * dt * dt / 4.0) * beta_sq;
    let mut space = 0.0;
    for &a in alpha {
        space += sinc_sq(a * dx / 2.0) * a * a;
    }
    space - time
}

pub fn symbol_g_spec(alpha: &[f64], beta_sq: f64, spec: &LatticeSpec) -> f64 {
    symbol_g(alpha, beta_sq, spec.dx, spec.dt)
}

/// `β₀ = (2/dx)·√(Σ_k sin²(α_k dx/2))`, computed in sinc form so `dx = 0` gives `|α|`.
pub fn beta_semidiscrete(alpha: &[f64], dx: f64) -> f64 {
    let mut acc = 0.0;
    for &a in alpha {
        acc += sinc_sq(a * dx / 2.0) * a * a;
    }
    acc.sqrt()
}

/// `(dt/dx)·√(Σ_k sin²(α_k dx/2))`, the argument of the arcsin in `β`.
pub fn arcsin_argument(alpha: &[f64], dx: f64, dt: f64) -> f64 {
    0.5 * dt * beta_semidiscrete(alpha, dx)
}

/// `β = (2/dt)·arcsin((dt/dx)·√(Σ_k sin²(α_k dx/2)))`, the branch with `βdt/2 ∈ [0, π/2]`.
///
/// `dt = 0` gives `β₀`; `dx = dt = 0` gives `|α|`.
pub fn beta(alpha: &[f64], dx: f64, dt: f64) -> Result<f64, DispersionError> {
    let b0 = beta_semidiscrete(alpha, dx);
    if dt == 0.0 {
        return Ok(b0);
    }
    let s = 0.5 * dt * b0;
    if s > 1.0 + LATTICE_TOL {
        return Err(DispersionError::CflViolated { argument: s });
    }
    Ok(2.0 / dt * s.min(1.0).asin())
}

pub fn beta_spec(alpha: &[f64], spec: &LatticeSpec) -> Result<f64, DispersionError> {
    beta(alpha, spec.dx, spec.dt)
}

pub fn alpha_norm(alpha: &[f64]) -> f64 {
    alpha.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Evaluator of the three frequency branches for fixed steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionBranch {
    pub dx: f64,
    /// 0 selects the semidiscrete branch.
    pub dt: f64,
}

impl DispersionBranch {
    pub fn new(dx: f64, dt: f64) -> Self {
        Self { dx, dt }
    }

    pub fn from_spec(spec: &LatticeSpec) -> Self {
        Self::new(spec.dx, spec.dt)
    }

    pub fn beta(&self, alpha: &[f64]) -> Result<f64, DispersionError> {
        beta(alpha, self.dx, self.dt)
    }

    pub fn beta0(&self, alpha: &[f64]) -> f64 {
        beta_semidiscrete(alpha, self.dx)
    }

    pub fn continuum(&self, alpha: &[f64]) -> f64 {
        alpha_norm(alpha)
    }

    pub fn symbol(&self, alpha: &[f64], beta_sq: f64) -> f64 {
        symbol_g(alpha, beta_sq, self.dx, self.dt)
    }
}
