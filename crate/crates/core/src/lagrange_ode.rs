//! The semidiscrete (method-of-lines) model: one second-order ODE per interior
//! lattice point, `ξ̈ = a·Δ_h ξ − σ·ξ + w`, with `ξ` clamped on the boundary.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{classify, Domain, LatticeClassification, LatticeError, LatticeSpec, ScalarField};
use crate::leapfrog::DiscreteProblem;
use crate::spectral::{DataFunction, Flavor, Forcing, ReferenceSolution, SpectralError};
use crate::stencils::{laplacian_kernel, taylor_start, three_level};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("nan-detected at step {step} (t = {time})")]
    NanDetected { step: usize, time: f64 },
    #[error("step {h} does not divide the interval [{t0}, {t1}]")]
    StepMismatch { h: f64, t0: f64, t1: f64 },
    #[error("state has {got} entries, expected {expected}")]
    StateMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `offset + scale·profile(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub scale: f64,
    #[serde(default)]
    pub profile: Option<DataFunction>,
}

impl Coefficient {
    pub fn constant(c: f64) -> Self {
        Self {
            offset: c,
            scale: 0.0,
            profile: None,
        }
    }

    pub fn scaled(scale: f64, profile: DataFunction) -> Self {
        Self {
            offset: 0.0,
            scale,
            profile: Some(profile),
        }
    }

    pub fn is_constant(&self, c: f64) -> bool {
        self.offset == c && (self.scale == 0.0 || self.profile.as_ref().is_none_or(DataFunction::is_zero))
    }
}

impl ScalarField for Coefficient {
    fn eval(&self, x: &[f64]) -> f64 {
        match &self.profile {
            Some(p) if self.scale != 0.0 => self.offset + self.scale * p.eval(x),
            _ => self.offset,
        }
    }
}

/// Sign of the zeroth-order term in the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSign {
    /// `−σξ`, consistent with `∂²u/∂t² − aΔu + σu = w`.
    #[default]
    Minus,
    /// `+σξ`, the alternative sign for comparison runs.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    StormerVerlet,
    Rk4,
}

/// Semidiscrete system on a classified lattice.
///
/// States are dense vectors over the classification's index box; boundary
/// and ghost entries hold the clamp values and are never advanced.
#[derive(Debug, Clone)]
pub struct LagrangeSystem {
    pub n: usize,
    pub dx: f64,
    pub classification: Arc<LatticeClassification>,
    /// `a(x)` at interior points, `None` for `a ≡ 1`.
    a: Option<Vec<f64>>,
    /// `σ(x)` at interior points, `None` for `σ ≡ 0`.
    sigma: Option<Vec<f64>>,
    pub sigma_sign: SigmaSign,
    pub forcing: Forcing,
    /// Clamp values on boundary and ghost points.
    pub boundary: Vec<f64>,
    interior_coords: Vec<f64>,
    inv_dx2: f64,
}

impl LagrangeSystem {
    pub fn new(
        classification: Arc<LatticeClassification>,
        boundary: Vec<f64>,
        forcing: Forcing,
    ) -> Result<Self, OdeError> {
        let n = classification.dim();
        let dx = classification.dx();
        if boundary.len() != classification.len() {
            return Err(OdeError::StateMismatch {
                got: boundary.len(),
                expected: classification.len(),
            });
        }
        forcing.validate(n)?;
        let interior_coords = if forcing.is_zero() {
            Vec::new()
        } else {
            let mut c = vec![0.0; classification.interior().len() * n];
            for (k, &i) in classification.interior().iter().enumerate() {
                classification.coords_into(i, &mut c[k * n..(k + 1) * n]);
            }
            c
        };
        Ok(Self {
            n,
            dx,
            classification,
            a: None,
            sigma: None,
            sigma_sign: SigmaSign::Minus,
            forcing,
            boundary,
            interior_coords,
            inv_dx2: 1.0 / (dx * dx),
        })
    }

    /// The system whose Verlet discretization at `h = dt` is the given scheme.
    pub fn from_problem(problem: &DiscreteProblem) -> Result<Self, OdeError> {
        Self::new(
            problem.classification.clone(),
            problem.boundary.clone(),
            problem.forcing.clone(),
        )
    }

    /// Free-space system on a padded window: the window is padded by `pad_layers` lattice layers.
    pub fn free_space(n: usize, dx: f64, lower: &[f64], upper: &[f64], pad_layers: usize, f: &dyn ScalarField) -> Result<Self, OdeError> {
        let spec = LatticeSpec {
            n,
            dx,
            dt: dx,
            horizon: dx * (pad_layers.max(1) - 1).max(1) as f64,
        };
        let dom = Domain::FullSpace {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        };
        let cls = Arc::new(classify(&dom, &spec)?);
        let fv = cls.sample(f);
        let mut boundary = vec![0.0; cls.len()];
        for &i in cls.ghost() {
            boundary[i] = fv[i];
        }
        Self::new(cls, boundary, Forcing::Zero)
    }

    /// Sets `a(x)`; a coefficient identically 1 is dropped so the update algebra stays that of the scheme.
    pub fn with_a(mut self, a: &dyn ScalarField) -> Self {
        let vals = self.sample_interior(a);
        self.a = (!vals.iter().all(|v| *v == 1.0)).then_some(vals);
        self
    }

    pub fn with_sigma(mut self, sigma: &dyn ScalarField, sign: SigmaSign) -> Self {
        let vals = self.sample_interior(sigma);
        self.sigma = (!vals.iter().all(|v| *v == 0.0)).then_some(vals);
        self.sigma_sign = sign;
        self
    }

    fn sample_interior(&self, s: &dyn ScalarField) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.classification
            .interior()
            .iter()
            .map(|&i| {
                self.classification.coords_into(i, &mut x);
                s.eval(&x)
            })
            .collect()
    }

    pub fn state_len(&self) -> usize {
        self.classification.len()
    }

    /// Clamped state from samples: interior from `values`, boundary from the clamp.
    pub fn clamp(&self, values: &[f64]) -> Vec<f64> {
        let mut out = self.boundary.clone();
        for &i in self.classification.interior() {
            out[i] = values[i];
        }
        out
    }

    #[inline]
    fn accel(&self, xi: &[f64], k: usize, i: usize, t: f64) -> f64 {
        let lap = laplacian_kernel(xi, i, self.classification.strides(), self.inv_dx2);
        let mut acc = match &self.a {
            Some(a) => a[k] * lap,
            None => lap,
        };
        if let Some(s) = &self.sigma {
            match self.sigma_sign {
                SigmaSign::Minus => acc -= s[k] * xi[i],
                SigmaSign::Plus => acc += s[k] * xi[i],
            }
        }
        if !self.interior_coords.is_empty() {
            acc += self.forcing.eval(&self.interior_coords[k * self.n..(k + 1) * self.n], t);
        }
        acc
    }

    /// Acceleration at interior points, in interior order.
    pub fn rhs(&self, xi: &[f64], t: f64) -> Vec<f64> {
        self.classification
            .interior()
            .iter()
            .enumerate()
            .map(|(k, &i)| self.accel(xi, k, i, t))
            .collect()
    }
}

/// Positions (and for RK4 velocities) at the recorded steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub steps: Vec<usize>,
    pub states: Vec<Vec<f64>>,
    pub velocities: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn at_step(&self, step: usize) -> Option<&[f64]> {
        self.steps.iter().position(|&s| s == step).map(|k| self.states[k].as_slice())
    }
}

fn check_finite(v: &[f64], step: usize, time: f64) -> Result<(), OdeError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(OdeError::NanDetected { step, time })
    }
}

/// Fixed-step integration from `t0` to `t1` (either direction); records every `every`-th step.
///
/// Step `k` sits at `t0 + k·h`. Störmer–Verlet is used in position form
/// `ξ_{k+1} = 2ξ_k − ξ_{k−1} + h²·ξ̈_k`, started with
/// `ξ_1 = ξ_0 + h·ξ̇_0 + (h²/2)·ξ̈_0`, which is the three-level scheme when `h = dt`.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    system: &LagrangeSystem,
    xi0: &[f64],
    v0: &[f64],
    t0: f64,
    t1: f64,
    method: Method,
    h_ode: f64,
    every: usize,
) -> Result<Trajectory, OdeError> {
    let len = system.state_len();
    for v in [xi0, v0] {
        if v.len() != len {
            return Err(OdeError::StateMismatch {
                got: v.len(),
                expected: len,
            });
        }
    }
    let span = t1 - t0;
    let q = span.abs() / h_ode;
    let steps = q.round();
    if !(h_ode > 0.0) || (q - steps).abs() > 1e-9 * q.max(1.0) {
        return Err(OdeError::StepMismatch { h: h_ode, t0, t1 });
    }
    let steps = steps as usize;
    let h = if span < 0.0 { -h_ode } else { h_ode };
    let every = every.max(1);
    let time = |k: usize| t0 + k as f64 * h;
    let interior = system.classification.interior();

    let mut traj = Trajectory {
        times: vec![t0],
        steps: vec![0],
        states: vec![system.clamp(xi0)],
        velocities: None,
    };
    let record = |traj: &mut Trajectory, k: usize, state: &[f64], vel: Option<&[f64]>| {
        if k.is_multiple_of(every) || k == steps {
            traj.times.push(time(k));
            traj.steps.push(k);
            traj.states.push(state.to_vec());
            if let (Some(vs), Some(v)) = (traj.velocities.as_mut(), vel) {
                vs.push(v.to_vec());
            }
        }
    };
    if steps == 0 {
        return Ok(traj);
    }

    match method {
        Method::StormerVerlet => {
            let h2 = h * h;
            let half_h2 = 0.5 * h * h;
            let old0 = system.clamp(xi0);
            let mut cur = system.boundary.clone();
            for (k, &i) in interior.iter().enumerate() {
                cur[i] = taylor_start(old0[i], h, v0[i], half_h2, system.accel(&old0, k, i, time(0)));
            }
            check_finite(&cur, 1, time(1))?;
            record(&mut traj, 1, &cur, None);
            let mut old = old0;
            for step in 1..steps {
                let t = time(step);
                let mut next = system.boundary.clone();
                for (k, &i) in interior.iter().enumerate() {
                    next[i] = three_level(cur[i], old[i], h2, system.accel(&cur, k, i, t));
                }
                check_finite(&next, step + 1, time(step + 1))?;
                record(&mut traj, step + 1, &next, None);
                old = std::mem::replace(&mut cur, next);
            }
        }
        Method::Rk4 => {
            traj.velocities = Some(vec![{
                let mut v = vec![0.0; len];
                for &i in interior {
                    v[i] = v0[i];
                }
                v
            }]);
            let mut x = system.clamp(xi0);
            let mut v = traj.velocities.as_ref().expect("set above")[0].clone();
            let m = interior.len();
            let eval = |x: &[f64], t: f64| system.rhs(x, t);
            let shifted = |base: &[f64], dir: &[f64], c: f64| {
                let mut out = base.to_vec();
                for (k, &i) in interior.iter().enumerate() {
                    out[i] = base[i] + c * dir[k];
                }
                out
            };
            for step in 0..steps {
                let t = time(step);
                let vi: Vec<f64> = interior.iter().map(|&i| v[i]).collect();
                let k1x = vi.clone();
                let k1v = eval(&x, t);
                let x2 = shifted(&x, &k1x, 0.5 * h);
                let k2x: Vec<f64> = (0..m).map(|k| vi[k] + 0.5 * h * k1v[k]).collect();
                let k2v = eval(&x2, t + 0.5 * h);
                let x3 = shifted(&x, &k2x, 0.5 * h);
                let k3x: Vec<f64> = (0..m).map(|k| vi[k] + 0.5 * h * k2v[k]).collect();
                let k3v = eval(&x3, t + 0.5 * h);
                let x4 = shifted(&x, &k3x, h);
                let k4x: Vec<f64> = (0..m).map(|k| vi[k] + h * k3v[k]).collect();
                let k4v = eval(&x4, t + h);
                for (k, &i) in interior.iter().enumerate() {
                    x[i] += h / 6.0 * (k1x[k] + 2.0 * k2x[k] + 2.0 * k3x[k] + k4x[k]);
                    v[i] += h / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
                }
                check_finite(&x, step + 1, time(step + 1))?;
                record(&mut traj, step + 1, &x, Some(&v));
            }
        }
    }
    Ok(traj)
}

/// One row of an integrator-convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiErrorRow {
    pub h_ode: f64,
    pub max_error: f64,
    /// Root mean square error over the probes.
    pub rms_error: f64,
    /// `error(previous h) / error(this h)`; `None` on the first row.
    pub ratio: Option<f64>,
}

/// Max error of the integrator against the semidiscrete closed form at the probes.
///
/// Runs on a free-space window padded far enough that the truncated lattice is
/// indistinguishable from `dx·Zⁿ` over `[0, T]` at the probes. Probe times must be
/// non-negative multiples of every step in `h_values`.
#[allow(clippy::too_many_arguments)]
pub fn phi_reference_error(
    f: &DataFunction,
    g: &DataFunction,
    dx: f64,
    window: (&[f64], &[f64]),
    probes: &[(Vec<f64>, f64)],
    h_values: &[f64],
    method: Method,
    reference_tol: f64,
) -> Result<Vec<PhiErrorRow>, OdeError> {
    let n = window.0.len();
    let t_end = probes.iter().map(|p| p.1).fold(0.0f64, f64::max);
    // the semidiscrete model has no sharp cone; pad by 4·T/dx layers
    let pad = (4.0 * t_end / dx).ceil() as usize + 2;
    let system = LagrangeSystem::free_space(n, dx, window.0, window.1, pad, f)?;
    let cls = system.classification.clone();
    let reference = ReferenceSolution::auto(f, g, Flavor::Semidiscrete { dx }, n, t_end.max(1.0), reference_tol)?;
    let fv = cls.sample(f);
    let gv = cls.sample(g);

    let mut rows: Vec<PhiErrorRow> = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let traj = integrate(&system, &fv, &gv, 0.0, t_end, method, h, 1)?;
        let mut worst = 0.0f64;
        let mut sq = 0.0;
        for (x, t) in probes {
            let step = (t / h).round() as usize;
            let state = traj.at_step(step).ok_or(OdeError::StepMismatch { h, t0: 0.0, t1: *t })?;
            let i = cls.locate(x).ok_or(LatticeError::InvalidSpec(format!("probe {x:?} is not a lattice point")))?;
            let e = (state[i] - reference.eval(x, *t)).abs();
            worst = worst.max(e);
            sq += e * e;
        }
        let ratio = rows.last().map(|r| r.max_error / worst);
        rows.push(PhiErrorRow {
            h_ode: h,
            max_error: worst,
            rms_error: (sq / probes.len().max(1) as f64).sqrt(),
            ratio,
        });
    }
    Ok(rows)
}
