//! Synthesis of `(2π)^{-n/2} ∫ e^{iα·x} (f̂·C(α,t) + ĝ·S(α,t)) dα` by quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::data::DataFunction;
use super::propagator::Flavor;
use super::quadrature::{auto_cutoff, tail_bound, FrequencyQuadrature};
use super::SpectralError;

/// Default tail tolerance relative to `2 + 2T`.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Line {
    alpha: Vec<f64>,
    f: Complex64,
    g: Complex64,
    omega: f64,
    alpha_sq: f64,
}

/// Reference solution of the homogeneous problem with data `(f, g)` in one flavor.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    n: usize,
    flavor: Flavor,
    quad: Option<FrequencyQuadrature>,
    tail: Option<f64>,
    coords: Vec<f64>,
    // (2π)^{-n/2}·weight folded in
    fhat: Vec<Complex64>,
    ghat: Vec<Complex64>,
    omega: Vec<f64>,
    alpha_sq: Vec<f64>,
    lines: Vec<Line>,
}

impl ReferenceSolution {
    /// Builds the reference with an explicit quadrature; fails when the tail bound exceeds `tol`.
    pub fn new(
        f: &DataFunction,
        g: &DataFunction,
        flavor: Flavor,
        quad: FrequencyQuadrature,
        horizon: f64,
        tol: f64,
    ) -> Result<Self, SpectralError> {
        let n = quad.n;
        for d in [f, g] {
            if !d.fourier_supported() {
                return Err(SpectralError::UnsupportedData("affine data has no Fourier representation"));
            }
            if let Some(m) = d.dim() {
                if m != n {
                    return Err(SpectralError::DimensionMismatch { expected: n, got: m });
                }
            }
        }
        let dense = f.has_density() || g.has_density();
        let tail = if dense {
            tail_bound(f, g, n, horizon, quad.cutoff)
        } else {
            Some(0.0)
        };
        match tail {
            Some(b) if b > tol => return Err(SpectralError::TailTooLarge { bound: b, tol }),
            None if tol.is_finite() => return Err(SpectralError::NoDecayBound),
            _ => {}
        }

        let mut out = Self {
            n,
            flavor,
            quad: dense.then_some(quad),
            tail,
            coords: Vec::new(),
            fhat: Vec::new(),
            ghat: Vec::new(),
            omega: Vec::new(),
            alpha_sq: Vec::new(),
            lines: Vec::new(),
        };
        if dense {
            let rule = quad.rule();
            let norm = (2.0 * PI).powf(-(n as f64) / 2.0);
            let has_f = f.has_density();
            let has_g = g.has_density();
            let zero = Complex64::new(0.0, 0.0);
            for j in 0..rule.len() {
                let a = rule.node(j);
                let w = norm * rule.weights[j];
                let fh = if has_f { f.density(a) * w } else { zero };
                let gh = if has_g { g.density(a) * w } else { zero };
                if fh == zero && gh == zero {
                    continue;
                }
                out.coords.extend_from_slice(a);
                out.fhat.push(fh);
                out.ghat.push(gh);
                out.omega.push(flavor.frequency(a)?);
                out.alpha_sq.push(a.iter().map(|v| v * v).sum());
            }
        }
        for (d, is_f) in [(f, true), (g, false)] {
            for (alpha, c) in d.lines(n) {
                let omega = flavor.frequency(&alpha)?;
                let alpha_sq = alpha.iter().map(|v| v * v).sum();
                let zero = Complex64::new(0.0, 0.0);
                out.lines.push(Line {
                    alpha,
                    f: if is_f { c } else { zero },
                    g: if is_f { zero } else { c },
                    omega,
                    alpha_sq,
                });
            }
        }
        Ok(out)
    }

    /// Chooses the cutoff so the tail bound is below `tol_rel·(2 + 2T)`.
    pub fn auto(
        f: &DataFunction,
        g: &DataFunction,
        flavor: Flavor,
        n: usize,
        horizon: f64,
        tol_rel: f64,
    ) -> Result<Self, SpectralError> {
        let tol = tol_rel * (2.0 + 2.0 * horizon);
        let cutoff = auto_cutoff(f, g, n, horizon, tol).ok_or(SpectralError::NoDecayBound)?;
        let quad = FrequencyQuadrature::new(n, cutoff, FrequencyQuadrature::default_nodes(n));
        Self::new(f, g, flavor, quad, horizon, tol)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn quadrature(&self) -> Option<FrequencyQuadrature> {
        self.quad
    }

    /// Reported tail bound; `None` when no closed-form envelope exists.
    pub fn tail_bound(&self) -> Option<f64> {
        self.tail
    }

    fn amplitude(&self, fh: Complex64, gh: Complex64, omega: f64, t: f64, time_order: u8) -> Complex64 {
        let (c, s) = match time_order {
            0 => (self.flavor.f_coefficient(omega, t), self.flavor.g_coefficient(omega, t)),
            1 => (
                self.flavor.f_coefficient_rate(omega, t),
                self.flavor.g_coefficient_rate(omega, t),
            ),
            _ => {
                let w2 = omega * omega;
                (
                    -w2 * self.flavor.f_coefficient(omega, t),
                    -w2 * self.flavor.g_coefficient(omega, t),
                )
            }
        };
        fh * c + gh * s
    }

    /// Value at `(x, t)`.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        self.eval_derivative(x, t, 0, false)
    }

    /// `∂_t^k` (k ≤ 2) of the solution, optionally followed by the continuum Laplacian in x.
    pub fn eval_derivative(&self, x: &[f64], t: f64, time_order: u8, laplacian: bool) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for j in 0..self.omega.len() {
            let a = &self.coords[j * n..(j + 1) * n];
            let phase: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
            let mut amp = self.amplitude(self.fhat[j], self.ghat[j], self.omega[j], t, time_order);
            if laplacian {
                amp *= -self.alpha_sq[j];
            }
            let (s, c) = phase.sin_cos();
            acc += c * amp.re - s * amp.im;
        }
        acc + self.lines_value(x, t, time_order, laplacian)
    }

    fn lines_value(&self, x: &[f64], t: f64, time_order: u8, laplacian: bool) -> f64 {
        let mut acc = 0.0;
        for l in &self.lines {
            let phase: f64 = l.alpha.iter().zip(x).map(|(a, xi)| a * xi).sum();
            let mut amp = self.amplitude(l.f, l.g, l.omega, t, time_order);
            if laplacian {
                amp *= -l.alpha_sq;
            }
            let (s, c) = phase.sin_cos();
            acc += c * amp.re - s * amp.im;
        }
        acc
    }

    /// Values on the product `xs × ts`; `out[i][k]` is at `(xs[i], ts[k])`.
    ///
    /// Each value is a sequential sum in node order, so results do not depend on the thread count.
    pub fn eval_grid(&self, xs: &[Vec<f64>], ts: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let amps: Vec<Vec<Complex64>> = ts
            .iter()
            .map(|&t| {
                (0..self.omega.len())
                    .map(|j| self.amplitude(self.fhat[j], self.ghat[j], self.omega[j], t, 0))
                    .collect()
            })
            .collect();
        xs.par_iter()
            .map(|x| {
                let mut acc = vec![0.0; ts.len()];
                for j in 0..self.omega.len() {
                    let a = &self.coords[j * n..(j + 1) * n];
                    let phase: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
                    let (s, c) = phase.sin_cos();
                    for (k, slot) in acc.iter_mut().enumerate() {
                        let amp = amps[k][j];
                        *slot += c * amp.re - s * amp.im;
                    }
                }
                for (k, slot) in acc.iter_mut().enumerate() {
                    *slot += self.lines_value(x, ts[k], 0, false);
                }
                acc
            })
            .collect()
    }
}

/// Continuum solution `u(x, t)`.
pub fn continuum_solution_u(
    f: &DataFunction,
    g: &DataFunction,
    x: &[f64],
    t: f64,
    quad: FrequencyQuadrature,
    horizon: f64,
    tol: f64,
) -> Result<f64, SpectralError> {
    Ok(ReferenceSolution::new(f, g, Flavor::Continuum, quad, horizon, tol)?.eval(x, t))
}

/// Closed form of the fully discrete solution at a lattice point.
#[allow(clippy::too_many_arguments)]
pub fn discrete_closed_form_v(
    f: &DataFunction,
    g: &DataFunction,
    dx: f64,
    dt: f64,
    x: &[f64],
    t: f64,
    quad: FrequencyQuadrature,
    horizon: f64,
    tol: f64,
) -> Result<f64, SpectralError> {
    Ok(ReferenceSolution::new(f, g, Flavor::FullyDiscrete { dx, dt }, quad, horizon, tol)?.eval(x, t))
}

/// Closed form of the semidiscrete solution `φ^{dx}(x)(t)`.
#[allow(clippy::too_many_arguments)]
pub fn semidiscrete_closed_form_phi(
    f: &DataFunction,
    g: &DataFunction,
    dx: f64,
    x: &[f64],
    t: f64,
    quad: FrequencyQuadrature,
    horizon: f64,
    tol: f64,
) -> Result<f64, SpectralError> {
    Ok(ReferenceSolution::new(f, g, Flavor::Semidiscrete { dx }, quad, horizon, tol)?.eval(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{beta, beta_semidiscrete};
    use approx::assert_relative_eq;

    fn q(n: usize) -> FrequencyQuadrature {
        FrequencyQuadrature::new(n, 20.0, 129)
    }

    #[test]
    fn separable_cosine_lines() {
        let f = DataFunction::SeparableCosine {
            alpha: vec![1.0, 1.0],
            amplitude: 1.0,
        };
        let u = continuum_solution_u(&f, &DataFunction::Zero, &[0.0, 0.0], 0.5, q(2), 1.0, 1e-10).unwrap();
        assert_relative_eq!(u, (2f64.sqrt() * 0.5).cos(), max_relative = 1e-14);
        assert!((u - 0.760245).abs() < 1e-6);

        let x = [0.3, -0.2];
        let t = 0.8;
        let u = continuum_solution_u(&DataFunction::Zero, &f, &x, t, q(2), 1.0, 1e-10).unwrap();
        let na = 2f64.sqrt();
        let oracle = f.eval(&x) * (na * t).sin() / na;
        assert_relative_eq!(u, oracle, max_relative = 1e-13);
    }

    #[test]
    fn gaussian_initial_condition() {
        let f = DataFunction::gaussian(vec![0.0], 1.0);
        let r = ReferenceSolution::auto(&f, &DataFunction::Zero, Flavor::Continuum, 1, 1.0, DEFAULT_TAIL_TOL).unwrap();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let e = (r.eval(&[x], 0.0) - f.eval(&[x])).abs();
            assert!(e <= r.tail_bound().unwrap() + 1e-13, "x = {x}: {e:e} vs {:e}", r.tail_bound().unwrap());
        }
    }

    #[test]
    fn gaussian_matches_dalembert_formula() {
        // u = (f(x−t) + f(x+t))/2 in 1-D
        let f = DataFunction::gaussian(vec![0.1], 0.5);
        let r = ReferenceSolution::auto(&f, &DataFunction::Zero, Flavor::Continuum, 1, 1.0, DEFAULT_TAIL_TOL).unwrap();
        for (x, t) in [(0.0, 0.5), (0.7, 1.0), (-1.2, 0.3)] {
            let exact = 0.5 * (f.eval(&[x - t]) + f.eval(&[x + t]));
            assert!((r.eval(&[x], t) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_shortcuts() {
        let alpha = vec![3.0];
        let f = DataFunction::PlaneWave {
            alpha: alpha.clone(),
            amplitude: 1.0,
        };
        let (dx, dt) = (0.1, 0.05);
        let b = beta(&alpha, dx, dt).unwrap();
        let v = discrete_closed_form_v(&f, &DataFunction::Zero, dx, dt, &[0.4], 6.0 * dt, q(1), 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, (3.0f64 * 0.4).cos() * (b * 6.0 * dt).cos(), max_relative = 1e-13);

        let b0 = beta_semidiscrete(&alpha, dx);
        let phi = semidiscrete_closed_form_phi(&f, &DataFunction::Zero, dx, &[0.4], 0.37, q(1), 1.0, 1e-10).unwrap();
        assert_relative_eq!(phi, (3.0f64 * 0.4).cos() * (b0 * 0.37).cos(), max_relative = 1e-13);

        // g-only: coefficient dt/sin(βdt)
        let v = discrete_closed_form_v(&DataFunction::Zero, &f, dx, dt, &[0.0], 4.0 * dt, q(1), 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, dt / (b * dt).sin() * (b * 4.0 * dt).sin(), max_relative = 1e-13);
    }

    #[test]
    fn tail_too_large_is_reported() {
        let f = DataFunction::gaussian(vec![0.0], 0.5);
        let small = FrequencyQuadrature::new(1, 2.0, 33);
        assert!(matches!(
            ReferenceSolution::new(&f, &DataFunction::Zero, Flavor::Continuum, small, 1.0, 1e-10),
            Err(SpectralError::TailTooLarge { .. })
        ));
    }

    #[test]
    fn doubling_nodes_is_stable() {
        let f = DataFunction::gaussian(vec![0.0, 0.0], 0.5);
        let g = DataFunction::gaussian(vec![0.2, 0.0], 0.6);
        let a = ReferenceSolution::auto(&f, &g, Flavor::Continuum, 2, 1.0, DEFAULT_TAIL_TOL).unwrap();
        let quad = a.quadrature().unwrap().doubled();
        let b = ReferenceSolution::new(&f, &g, Flavor::Continuum, quad, 1.0, 1.0).unwrap();
        for (x, t) in [([0.0, 0.0], 0.5), ([0.4, -0.3], 1.0)] {
            assert!((a.eval(&x, t) - b.eval(&x, t)).abs() < 1e-11);
        }
    }

    #[test]
    fn grid_eval_matches_pointwise() {
        let f = DataFunction::gaussian(vec![0.0], 0.5);
        let g = DataFunction::PlaneWave {
            alpha: vec![2.0],
            amplitude: 0.3,
        };
        let r = ReferenceSolution::auto(&f, &g, Flavor::FullyDiscrete { dx: 0.1, dt: 0.05 }, 1, 1.0, DEFAULT_TAIL_TOL)
            .unwrap();
        let xs = vec![vec![0.0], vec![0.3], vec![-0.7]];
        let ts = [0.0, 0.05, 0.5];
        let grid = r.eval_grid(&xs, &ts);
        for (i, x) in xs.iter().enumerate() {
            for (k, &t) in ts.iter().enumerate() {
                assert!((grid[i][k] - r.eval(x, t)).abs() < 1e-14);
            }
        }
    }
}
