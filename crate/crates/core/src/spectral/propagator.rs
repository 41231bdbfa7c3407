//! 2×2 frequency-domain evolution matrices for `(displacement, velocity)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{alpha_norm, beta, beta_semidiscrete, sinc, DispersionError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum Flavor {
    Continuum,
    FullyDiscrete { dx: f64, dt: f64 },
    Semidiscrete { dx: f64 },
}

impl Flavor {
    /// Temporal frequency `|α|`, `β` or `β₀`.
    pub fn frequency(&self, alpha: &[f64]) -> Result<f64, DispersionError> {
        match *self {
            Flavor::Continuum => Ok(alpha_norm(alpha)),
            Flavor::FullyDiscrete { dx, dt } => beta(alpha, dx, dt),
            Flavor::Semidiscrete { dx } => Ok(beta_semidiscrete(alpha, dx)),
        }
    }

    pub fn time_step(&self) -> Option<f64> {
        match *self {
            Flavor::FullyDiscrete { dt, .. } => Some(dt),
            _ => None,
        }
    }

    /// Coefficient multiplying the displacement datum: `cos(ωt)`.
    pub fn f_coefficient(&self, omega: f64, t: f64) -> f64 {
        (omega * t).cos()
    }

    /// Coefficient multiplying the velocity datum: `sin(ωt)/ω`, or `dt·sin(βt)/sin(βdt)` on the lattice.
    pub fn g_coefficient(&self, omega: f64, t: f64) -> f64 {
        match *self {
            Flavor::FullyDiscrete { dt, .. } => discrete_g_coefficient(omega, dt, t),
            _ => t * sinc(omega * t),
        }
    }

    /// `d/dt` of the f-coefficient.
    pub fn f_coefficient_rate(&self, omega: f64, t: f64) -> f64 {
        -omega * (omega * t).sin()
    }

    /// `d/dt` of the g-coefficient.
    pub fn g_coefficient_rate(&self, omega: f64, t: f64) -> f64 {
        match *self {
            Flavor::FullyDiscrete { dt, .. } => (omega * t).cos() / sinc(omega * dt),
            _ => (omega * t).cos(),
        }
    }
}

/// `dt·sin(βt)/sin(βdt)`. Uses the integer-step form when `t/dt` is integral.
pub fn discrete_g_coefficient(beta: f64, dt: f64, t: f64) -> f64 {
    let q = t / dt;
    let p = q.round();
    if (q - p).abs() <= 1e-12 * q.abs().max(1.0) {
        return dt * lattice_ratio(p as i64, beta * dt);
    }
    let theta = beta * dt;
    if theta <= std::f64::consts::FRAC_PI_2 {
        t * sinc(beta * t) / sinc(theta)
    } else if theta.sin().abs() < 1e-8 {
        t * (beta * t).cos() / theta.cos()
    } else {
        dt * (beta * t).sin() / theta.sin()
    }
}

/// `sin(pθ)/sin θ` for `θ ∈ [0, π]`, finite at both ends.
pub fn lattice_ratio(p: i64, theta: f64) -> f64 {
    let pf = p as f64;
    if theta <= std::f64::consts::FRAC_PI_2 {
        pf * sinc(pf * theta) / sinc(theta)
    } else {
        // θ = π − θ', sin(p(π − θ')) = (−1)^{p+1} sin(pθ')
        let tp = std::f64::consts::PI - theta;
        let sign = if p.rem_euclid(2) == 0 { -1.0 } else { 1.0 };
        sign * pf * sinc(pf * tp) / sinc(tp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    pub flavor: Flavor,
    pub entries: [[Complex64; 2]; 2],
}

impl PropagatorMatrix {
    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j].re
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Max entry-wise modulus of the difference.
    pub fn max_abs_diff(&self, other: &PropagatorMatrix) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    /// Applies the matrix to `(û, û_t)` at one frequency.
    pub fn apply(&self, state: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.entries[0][0] * state[0] + self.entries[0][1] * state[1],
            self.entries[1][0] * state[0] + self.entries[1][1] * state[1],
        ]
    }
}

/// Evolution matrix of the given flavor at frequency `α` and time `t`.
///
/// The lower row is the exact time derivative of the upper row.
pub fn propagator(flavor: Flavor, alpha: &[f64], t: f64) -> Result<PropagatorMatrix, DispersionError> {
    let w = flavor.frequency(alpha)?;
    let c = |v: f64| Complex64::new(v, 0.0);
    Ok(PropagatorMatrix {
        flavor,
        entries: [
            [c(flavor.f_coefficient(w, t)), c(flavor.g_coefficient(w, t))],
            [c(flavor.f_coefficient_rate(w, t)), c(flavor.g_coefficient_rate(w, t))],
        ],
    })
}
