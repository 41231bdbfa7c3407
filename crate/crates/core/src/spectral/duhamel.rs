//! Forced problems by variation of constants: `∫₀ᵗ S(t − s)·ŵ(α, s) ds` per frequency.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::data::DataFunction;
use super::propagator::{lattice_ratio, Flavor};
use super::quadrature::FrequencyQuadrature;
use super::synthesis::ReferenceSolution;
use super::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    Constant {
        value: f64,
    },
    /// `A·cos(ωt + φ)`.
    Cosine {
        frequency: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant { value } => value,
            TimeProfile::Cosine {
                frequency,
                amplitude,
                phase,
            } => amplitude * (frequency * t + phase).cos(),
        }
    }
}

/// Forcing term `w(x, t)`. Every kind factors as `D(α)·τ(t)` in frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    Zero,
    /// `p(x)·τ(t)`.
    Separable { space: DataFunction, time: TimeProfile },
    /// `□(p(x)·cos(ωt)) = −(ω²p + Δp)·cos(ωt)`, so that `p(x)·cos(ωt)` solves the forced problem.
    StandingWaveResidual { profile: DataFunction, frequency: f64 },
}

impl Forcing {
    pub fn is_zero(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Separable { space, .. } => space.is_zero(),
            Forcing::StandingWaveResidual { profile, .. } => profile.is_zero(),
        }
    }

    /// Checks that point evaluation is available (the residual kind needs a closed-form Laplacian).
    pub fn validate(&self, n: usize) -> Result<(), SpectralError> {
        if let Forcing::StandingWaveResidual { profile, .. } = self {
            if profile.laplacian(&vec![0.0; n]).is_none() {
                return Err(SpectralError::UnsupportedData("profile has no closed-form Laplacian"));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Separable { space, time } => space.eval(x) * time.eval(t),
            Forcing::StandingWaveResidual { profile, frequency } => {
                let lap = profile.laplacian(x).unwrap_or(f64::NAN);
                -(frequency * frequency * profile.eval(x) + lap) * (frequency * t).cos()
            }
        }
    }

    fn time_factor(&self, t: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Separable { time, .. } => time.eval(t),
            Forcing::StandingWaveResidual { frequency, .. } => (frequency * t).cos(),
        }
    }

    fn space_part(&self) -> Option<&DataFunction> {
        match self {
            Forcing::Zero => None,
            Forcing::Separable { space, .. } => Some(space),
            Forcing::StandingWaveResidual { profile, .. } => Some(profile),
        }
    }

    fn symbol_factor(&self, alpha_sq: f64) -> f64 {
        match self {
            Forcing::StandingWaveResidual { frequency, .. } => alpha_sq - frequency * frequency,
            _ => 1.0,
        }
    }
}

/// `∫₀ᵗ S(t − s)·τ(s) ds` for one frequency.
fn forced_response(forcing: &Forcing, flavor: Flavor, omega: f64, t: f64, s_step: f64) -> Result<f64, SpectralError> {
    match flavor {
        Flavor::FullyDiscrete { dt, .. } => {
            // exact discrete variation of constants for the three-level scheme with the
            // second-order start: trapezoid weights, half weight at s = 0
            let p = t / dt;
            let pr = p.round();
            if (p - pr).abs() > 1e-9 * p.abs().max(1.0) {
                return Err(SpectralError::SGridMisaligned(format!("t = {t} is not a multiple of dt = {dt}")));
            }
            let k = s_step / dt;
            if k < 0.5 || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                return Err(SpectralError::SGridMisaligned(format!(
                    "s-step {s_step} is not a multiple of dt = {dt}"
                )));
            }
            let steps = pr.abs() as i64;
            let sign = if pr < 0.0 { -1.0 } else { 1.0 };
            let theta = omega * dt;
            let mut acc = 0.0;
            for q in 0..steps {
                let c = if q == 0 { 0.5 } else { 1.0 };
                acc += c * lattice_ratio(steps - q, theta) * forcing.time_factor(sign * q as f64 * dt);
            }
            Ok(acc * dt * dt)
        }
        _ => {
            if t == 0.0 {
                return Ok(0.0);
            }
            let mut m = (t.abs() / s_step).ceil().max(2.0) as usize;
            if m % 2 == 1 {
                m += 1;
            }
            let h = t / m as f64;
            let mut acc = 0.0;
            for i in 0..=m {
                let s = i as f64 * h;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * flavor.g_coefficient(omega, t - s) * forcing.time_factor(s);
            }
            Ok(acc * h / 3.0)
        }
    }
}

/// Displacement at `(x, t)` of the forced problem with data `(f, g)`.
///
/// Continuum and semidiscrete flavors integrate in `s` by composite Simpson with
/// step at most `s_step`. The fully discrete flavor uses the exact discrete
/// variation-of-constants sum over time levels and requires `t` and `s_step`
/// to be multiples of `dt`.
#[allow(clippy::too_many_arguments)]
pub fn duhamel_solve(
    f: &DataFunction,
    g: &DataFunction,
    forcing: &Forcing,
    flavor: Flavor,
    x: &[f64],
    t: f64,
    quad: FrequencyQuadrature,
    s_step: f64,
) -> Result<f64, SpectralError> {
    let n = quad.n;
    forcing.validate(n)?;
    let horizon = t.abs().max(1.0);
    let homogeneous = ReferenceSolution::new(f, g, flavor, quad, horizon, f64::INFINITY)?.eval(x, t);
    let Some(space) = forcing.space_part() else {
        return Ok(homogeneous);
    };
    if space.is_zero() {
        // still validate alignment for the discrete flavor
        forced_response(forcing, flavor, 0.0, t, s_step)?;
        return Ok(homogeneous);
    }
    if !space.fourier_supported() {
        return Err(SpectralError::UnsupportedData("affine forcing has no Fourier representation"));
    }
    let mut acc = 0.0;
    if space.has_density() {
        let rule = quad.rule();
        let norm = (2.0 * PI).powf(-(n as f64) / 2.0);
        for j in 0..rule.len() {
            let a = rule.node(j);
            let a2: f64 = a.iter().map(|v| v * v).sum();
            let d = space.density(a) * (norm * rule.weights[j] * forcing.symbol_factor(a2));
            if d == Complex64::new(0.0, 0.0) {
                continue;
            }
            let omega = flavor.frequency(a)?;
            let y = forced_response(forcing, flavor, omega, t, s_step)?;
            let phase: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
            let (s, c) = phase.sin_cos();
            acc += y * (c * d.re - s * d.im);
        }
    }
    for (alpha, coef) in space.lines(n) {
        let a2: f64 = alpha.iter().map(|v| v * v).sum();
        let d = coef * forcing.symbol_factor(a2);
        let omega = flavor.frequency(&alpha)?;
        let y = forced_response(forcing, flavor, omega, t, s_step)?;
        let phase: f64 = alpha.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        let (s, c) = phase.sin_cos();
        acc += y * (c * d.re - s * d.im);
    }
    Ok(homogeneous + acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad1() -> FrequencyQuadrature {
        FrequencyQuadrature::new(1, 16.0, 129)
    }

    #[test]
    fn zero_forcing_is_homogeneous() {
        let f = DataFunction::gaussian(vec![0.0], 0.5);
        let a = duhamel_solve(&f, &DataFunction::Zero, &Forcing::Zero, Flavor::Continuum, &[0.2], 0.7, quad1(), 0.01).unwrap();
        let b = ReferenceSolution::new(&f, &DataFunction::Zero, Flavor::Continuum, quad1(), 1.0, 1.0)
            .unwrap()
            .eval(&[0.2], 0.7);
        assert_eq!(a, b);
    }

    #[test]
    fn single_frequency_closed_form() {
        let w = Forcing::Separable {
            space: DataFunction::PlaneWave {
                alpha: vec![2.0],
                amplitude: 1.0,
            },
            time: TimeProfile::Constant { value: 1.0 },
        };
        let z = DataFunction::Zero;
        let v = duhamel_solve(&z, &z, &w, Flavor::Continuum, &[0.0], 1.0, quad1(), 0.01).unwrap();
        let oracle = (1.0 - 2f64.cos()) / 4.0;
        assert!((v - oracle).abs() < 1e-9);
        assert!((v - 0.354037).abs() < 1e-6);
        // odd in t
        let m = duhamel_solve(&z, &z, &w, Flavor::Continuum, &[0.0], -1.0, quad1(), 0.01).unwrap();
        assert!((m - oracle).abs() < 1e-9);
    }

    #[test]
    fn manufactured_standing_wave() {
        let p = DataFunction::gaussian(vec![0.0], 1.0);
        let w = Forcing::StandingWaveResidual {
            profile: p.clone(),
            frequency: 1.0,
        };
        let z = DataFunction::Zero;
        for (x, t) in [(0.0, 0.5), (0.8, 1.0), (-1.5, 0.9)] {
            let v = duhamel_solve(&p, &z, &w, Flavor::Continuum, &[x], t, quad1(), 0.005).unwrap();
            assert_relative_eq!(v, p.eval(&[x]) * t.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn discrete_flavor_alignment() {
        let w = Forcing::Separable {
            space: DataFunction::PlaneWave {
                alpha: vec![2.0],
                amplitude: 1.0,
            },
            time: TimeProfile::Constant { value: 1.0 },
        };
        let z = DataFunction::Zero;
        let fl = Flavor::FullyDiscrete { dx: 0.1, dt: 0.05 };
        assert!(matches!(
            duhamel_solve(&z, &z, &w, fl, &[0.0], 0.52, quad1(), 0.05),
            Err(SpectralError::SGridMisaligned(_))
        ));
        assert!(matches!(
            duhamel_solve(&z, &z, &w, fl, &[0.0], 0.5, quad1(), 0.03),
            Err(SpectralError::SGridMisaligned(_))
        ));
        // discrete Duhamel converges to the continuum answer
        let fine = Flavor::FullyDiscrete { dx: 0.01, dt: 0.005 };
        let v = duhamel_solve(&z, &z, &w, fine, &[0.0], 1.0, quad1(), 0.005).unwrap();
        assert!((v - (1.0 - 2f64.cos()) / 4.0).abs() < 1e-4);
    }

    #[test]
    fn discrete_sum_matches_recursion() {
        // single mode: y_{p+1} = 2cosθ·y_p − y_{p−1} + dt²τ_p, y_0 = 0, y_1 = dt²τ_0/2
        let (omega, dt) = (3.0, 0.1);
        let forcing = Forcing::Separable {
            space: DataFunction::Constant { value: 1.0 },
            time: TimeProfile::Cosine {
                frequency: 1.7,
                amplitude: 1.0,
                phase: 0.3,
            },
        };
        let fl = Flavor::FullyDiscrete { dx: 0.1, dt };
        let theta = omega * dt;
        let mut y = vec![0.0, 0.5 * dt * dt * forcing.time_factor(0.0)];
        for p in 1..12 {
            let next = 2.0 * theta.cos() * y[p] - y[p - 1] + dt * dt * forcing.time_factor(p as f64 * dt);
            y.push(next);
        }
        for (p, &yp) in y.iter().enumerate() {
            let v = forced_response(&forcing, fl, omega, p as f64 * dt, dt).unwrap();
            assert!((v - yp).abs() < 1e-14);
        }
    }
}
