//! Built-in catalog of smooth data functions and their Fourier transforms.
//!
//! Transforms use the unitary convention
//! `f̂(α) = (2π)^{-n/2} ∫ e^{-iα·x} f(x) dx`, so that
//! `f(x) = (2π)^{-n/2} ∫ e^{iα·x} f̂(α) dα`. Periodic kinds are represented by
//! spectral lines instead: `f(x) = Σ c_j e^{iα_j·x}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::ScalarField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataFunction {
    Zero,
    Constant {
        value: f64,
    },
    /// `offset + slope·x`. Not Fourier-representable; usable as boundary data only.
    Affine {
        offset: f64,
        slope: Vec<f64>,
    },
    /// `A·exp(−|x−c|²/(2w²))`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A·exp(−|x−c|²/(2w²))·cos(k·(x−c))`.
    ModulatedGaussian {
        center: Vec<f64>,
        width: f64,
        carrier: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A·cos(α·x)`.
    PlaneWave {
        alpha: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A·Π_k cos(α_k x_k)`.
    SeparableCosine {
        alpha: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A·exp(1 − 1/(1 − |x−c|²/R²))` inside the ball, 0 outside.
    SmoothBump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Sum {
        terms: Vec<DataFunction>,
    },
}

fn one() -> f64 {
    1.0
}

fn dist_sq(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|f̂(α)| ≤ amplitude·exp(−width²|α|²/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBound {
    pub amplitude: f64,
    pub width: f64,
}

/// Bump transform resolution: Gauss–Legendre nodes per axis over the support.
const BUMP_NODES: usize = 64;

impl DataFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Self {
        DataFunction::Gaussian {
            center,
            width,
            amplitude: 1.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DataFunction::Zero => true,
            DataFunction::Constant { value } => *value == 0.0,
            DataFunction::Gaussian { amplitude, .. }
            | DataFunction::ModulatedGaussian { amplitude, .. }
            | DataFunction::PlaneWave { amplitude, .. }
            | DataFunction::SeparableCosine { amplitude, .. }
            | DataFunction::SmoothBump { amplitude, .. } => *amplitude == 0.0,
            DataFunction::Affine { offset, slope } => *offset == 0.0 && slope.iter().all(|s| *s == 0.0),
            DataFunction::Sum { terms } => terms.iter().all(DataFunction::is_zero),
        }
    }

    /// Spatial dimension implied by the parameters, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DataFunction::Zero | DataFunction::Constant { .. } => None,
            DataFunction::Affine { slope, .. } => Some(slope.len()),
            DataFunction::Gaussian { center, .. }
            | DataFunction::ModulatedGaussian { center, .. }
            | DataFunction::SmoothBump { center, .. } => Some(center.len()),
            DataFunction::PlaneWave { alpha, .. } | DataFunction::SeparableCosine { alpha, .. } => Some(alpha.len()),
            DataFunction::Sum { terms } => terms.iter().find_map(DataFunction::dim),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DataFunction::Zero => 0.0,
            DataFunction::Constant { value } => *value,
            DataFunction::Affine { offset, slope } => offset + dot(slope, x),
            DataFunction::Gaussian {
                center,
                width,
                amplitude,
            } => amplitude * (-dist_sq(x, center) / (2.0 * width * width)).exp(),
            DataFunction::ModulatedGaussian {
                center,
                width,
                carrier,
                amplitude,
            } => {
                let phase: f64 = carrier.iter().zip(x).zip(center).map(|((k, xi), c)| k * (xi - c)).sum();
                amplitude * (-dist_sq(x, center) / (2.0 * width * width)).exp() * phase.cos()
            }
            DataFunction::PlaneWave { alpha, amplitude } => amplitude * dot(alpha, x).cos(),
            DataFunction::SeparableCosine { alpha, amplitude } => {
                amplitude * alpha.iter().zip(x).map(|(a, xi)| (a * xi).cos()).product::<f64>()
            }
            DataFunction::SmoothBump {
                center,
                radius,
                amplitude,
            } => {
                let q = dist_sq(x, center) / (radius * radius);
                if q < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            }
            DataFunction::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
        }
    }

    /// Closed-form `Δf`, where available.
    pub fn laplacian(&self, x: &[f64]) -> Option<f64> {
        match self {
            DataFunction::Zero | DataFunction::Constant { .. } | DataFunction::Affine { .. } => Some(0.0),
            DataFunction::Gaussian { center, width, .. } => {
                let w2 = width * width;
                let r2 = dist_sq(x, center);
                Some(self.eval(x) * (r2 / (w2 * w2) - x.len() as f64 / w2))
            }
            DataFunction::PlaneWave { alpha, .. } | DataFunction::SeparableCosine { alpha, .. } => {
                Some(-dot(alpha, alpha) * self.eval(x))
            }
            DataFunction::Sum { terms } => terms.iter().map(|t| t.laplacian(x)).sum(),
            DataFunction::ModulatedGaussian { .. } | DataFunction::SmoothBump { .. } => None,
        }
    }

    /// Whether the function splits into spectral lines plus an integrable density.
    pub fn fourier_supported(&self) -> bool {
        match self {
            DataFunction::Affine { slope, offset } => *offset == 0.0 && slope.iter().all(|s| *s == 0.0),
            DataFunction::Sum { terms } => terms.iter().all(DataFunction::fourier_supported),
            _ => true,
        }
    }

    /// Spectral lines `(α_j, c_j)` with `Σ c_j e^{iα_j·x}` equal to the periodic part.
    pub fn lines(&self, n: usize) -> Vec<(Vec<f64>, Complex64)> {
        match self {
            DataFunction::Constant { value } if *value != 0.0 => vec![(vec![0.0; n], Complex64::new(*value, 0.0))],
            DataFunction::PlaneWave { alpha, amplitude } => {
                let c = Complex64::new(0.5 * amplitude, 0.0);
                vec![(alpha.clone(), c), (alpha.iter().map(|a| -a).collect(), c)]
            }
            DataFunction::SeparableCosine { alpha, amplitude } => {
                let terms = 1usize << alpha.len();
                let c = Complex64::new(amplitude / terms as f64, 0.0);
                (0..terms)
                    .map(|mask| {
                        let freq = alpha
                            .iter()
                            .enumerate()
                            .map(|(k, a)| if mask >> k & 1 == 1 { -a } else { *a })
                            .collect();
                        (freq, c)
                    })
                    .collect()
            }
            DataFunction::Sum { terms } => terms.iter().flat_map(|t| t.lines(n)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn has_density(&self) -> bool {
        match self {
            DataFunction::Gaussian { amplitude, .. }
            | DataFunction::ModulatedGaussian { amplitude, .. }
            | DataFunction::SmoothBump { amplitude, .. } => *amplitude != 0.0,
            DataFunction::Sum { terms } => terms.iter().any(DataFunction::has_density),
            _ => false,
        }
    }

    /// Unitary transform of the integrable part at frequency `α`.
    pub fn density(&self, alpha: &[f64]) -> Complex64 {
        let n = alpha.len() as i32;
        match self {
            DataFunction::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let a2 = dot(alpha, alpha);
                let mag = amplitude * width.powi(n) * (-width * width * a2 / 2.0).exp();
                Complex64::from_polar(mag, -dot(alpha, center))
            }
            DataFunction::ModulatedGaussian {
                center,
                width,
                carrier,
                amplitude,
            } => {
                let w2 = width * width;
                let minus = alpha.iter().zip(carrier).map(|(a, k)| (a - k) * (a - k)).sum::<f64>();
                let plus = alpha.iter().zip(carrier).map(|(a, k)| (a + k) * (a + k)).sum::<f64>();
                let mag = 0.5 * amplitude * width.powi(n) * ((-w2 * minus / 2.0).exp() + (-w2 * plus / 2.0).exp());
                Complex64::from_polar(mag, -dot(alpha, center))
            }
            DataFunction::SmoothBump {
                center,
                radius,
                amplitude,
            } => bump_transform(center, *radius, *amplitude, alpha),
            DataFunction::Sum { terms } => terms.iter().map(|t| t.density(alpha)).sum(),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Gaussian envelopes bounding `|f̂|`; `None` when no closed-form bound is known.
    pub fn decay_bounds(&self) -> Option<Vec<GaussianBound>> {
        match self {
            DataFunction::Gaussian { width, amplitude, .. } => {
                let n = self.dim().unwrap_or(1) as i32;
                Some(vec![GaussianBound {
                    amplitude: amplitude.abs() * width.powi(n),
                    width: *width,
                }])
            }
            DataFunction::ModulatedGaussian {
                width,
                carrier,
                amplitude,
                ..
            } => {
                // |α∓k|² ≥ |α|²/2 − |k|²
                let n = self.dim().unwrap_or(1) as i32;
                let k2 = dot(carrier, carrier);
                Some(vec![GaussianBound {
                    amplitude: amplitude.abs() * width.powi(n) * (width * width * k2 / 2.0).exp(),
                    width: width / 2f64.sqrt(),
                }])
            }
            DataFunction::SmoothBump { .. } => None,
            DataFunction::Sum { terms } => {
                let mut all = Vec::new();
                for t in terms {
                    all.extend(t.decay_bounds()?);
                }
                Some(all)
            }
            _ => Some(Vec::new()),
        }
    }
}

impl ScalarField for DataFunction {
    fn eval(&self, x: &[f64]) -> f64 {
        DataFunction::eval(self, x)
    }
}

fn bump_transform(center: &[f64], radius: f64, amplitude: f64, alpha: &[f64]) -> Complex64 {
    use gauss_quad::legendre::GaussLegendre;
    let n = alpha.len();
    let rule = GaussLegendre::new(BUMP_NODES.try_into().expect("nonzero"));
    let pairs = rule.as_node_weight_pairs();
    let total = BUMP_NODES.pow(n as u32);
    let bump = DataFunction::SmoothBump {
        center: center.to_vec(),
        radius,
        amplitude,
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut y = vec![0.0; n];
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for k in 0..n {
            let (node, weight) = pairs[rem % BUMP_NODES];
            rem /= BUMP_NODES;
            y[k] = center[k] + radius * node;
            w *= radius * weight;
        }
        let v = bump.eval(&y);
        if v != 0.0 {
            acc += Complex64::from_polar(w * v, -dot(alpha, &y));
        }
    }
    acc * (2.0 * PI).powf(-(n as f64) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_transform_round_trip_at_origin() {
        // (2π)^{-1/2} ∫ f̂ dα = f(0)
        let f = DataFunction::Gaussian {
            center: vec![0.3],
            width: 0.7,
            amplitude: 2.0,
        };
        let h = 1e-3;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut a = -40.0;
        while a < 40.0 {
            acc += f.density(&[a]) * h;
            a += h;
        }
        let val = acc.re / (2.0 * PI).sqrt();
        assert_relative_eq!(val, f.eval(&[0.0]), max_relative = 1e-9);
    }

    #[test]
    fn modulated_gaussian_bound_holds() {
        let f = DataFunction::ModulatedGaussian {
            center: vec![0.0, 0.1],
            width: 0.5,
            carrier: vec![3.0, -2.0],
            amplitude: 1.5,
        };
        let b = f.decay_bounds().unwrap()[0];
        for i in -30..=30 {
            for j in -30..=30 {
                let a = [i as f64 * 0.7, j as f64 * 0.7];
                let env = b.amplitude * (-b.width * b.width * dot(&a, &a) / 2.0).exp();
                assert!(f.density(&a).norm() <= env * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn separable_cosine_lines_reconstruct() {
        let f = DataFunction::SeparableCosine {
            alpha: vec![1.0, 2.5],
            amplitude: 3.0,
        };
        let x = [0.37, -1.1];
        let s: Complex64 = f
            .lines(2)
            .iter()
            .map(|(a, c)| c * Complex64::from_polar(1.0, dot(a, &x)))
            .sum();
        assert_relative_eq!(s.re, f.eval(&x), max_relative = 1e-14);
        assert!(s.im.abs() < 1e-14);
    }

    #[test]
    fn gaussian_laplacian_matches_differences() {
        let f = DataFunction::gaussian(vec![0.1, -0.2], 0.8);
        let x = [0.4, 0.3];
        let h = 1e-4;
        let mut fd = 0.0;
        for k in 0..2 {
            let mut p = x;
            let mut m = x;
            p[k] += h;
            m[k] -= h;
            fd += (f.eval(&p) - 2.0 * f.eval(&x) + f.eval(&m)) / (h * h);
        }
        assert_relative_eq!(f.laplacian(&x).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn bump_transform_at_zero_is_mass() {
        let f = DataFunction::SmoothBump {
            center: vec![0.2],
            radius: 0.5,
            amplitude: 1.0,
        };
        // mass by fine midpoint rule
        let m = 200_000;
        let h = 1.0 / m as f64;
        let mass: f64 = (0..m).map(|i| f.eval(&[-0.3 + (i as f64 + 0.5) * h]) * h).sum();
        let d = f.density(&[0.0]);
        assert_relative_eq!(d.re * (2.0 * PI).sqrt(), mass, max_relative = 1e-8);
        assert!(f.decay_bounds().is_none());
    }
}
