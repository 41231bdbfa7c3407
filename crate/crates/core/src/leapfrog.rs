//! The explicit three-level scheme `□_{dx,dt} v = w` with Dirichlet (or frozen ghost)
//! boundary values, stepped forward to `T` and backward to `−T`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{classify, Domain, LatticeClassification, LatticeError, LatticeSpec, PointKind, ScalarField};
use crate::spectral::{Forcing, SpectralError};
use crate::stencils::{laplacian_kernel, taylor_start, three_level, GridField, StencilError};

/// `max |v|` above which a run is declared unstable.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Interior sizes at or above this are updated in parallel.
pub const PARALLEL_MIN_POINTS: usize = 1 << 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LeapfrogError {
    #[error("blowup-detected at time level {level} (t = {time}): max |v| = {sup:e}")]
    BlowupDetected { level: i64, time: f64, sup: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Stencil(#[from] StencilError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Time of level `p`; every solver computes lattice times this way.
#[inline]
pub fn level_time(p: i64, dt: f64) -> f64 {
    p as f64 * dt
}

/// The fully discrete initial-boundary value problem.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub spec: LatticeSpec,
    pub classification: Arc<LatticeClassification>,
    /// Initial displacement on the index box.
    pub f: Vec<f64>,
    /// Initial velocity on the index box.
    pub g: Vec<f64>,
    /// Values held at boundary and ghost points at every level.
    pub boundary: Vec<f64>,
    pub forcing: Forcing,
    /// Rejects steps that violate the CFL bound; off only for instability demonstrations.
    pub enforce_cfl: bool,
}

impl DiscreteProblem {
    /// Samples `f`, `g` and the boundary data `h` on the lattice of `domain`.
    ///
    /// Ghost points of a full-space window are held at the `f` samples.
    pub fn from_data(
        domain: &Domain,
        spec: LatticeSpec,
        f: &dyn ScalarField,
        g: &dyn ScalarField,
        h: &dyn ScalarField,
        forcing: Forcing,
    ) -> Result<Self, LeapfrogError> {
        spec.validate()?;
        let cls = Arc::new(classify(domain, &spec)?);
        let fv = cls.sample(f);
        let gv = cls.sample(g);
        let mut boundary = vec![0.0; cls.len()];
        let mut x = vec![0.0; spec.n];
        for &i in cls.boundary() {
            cls.coords_into(i, &mut x);
            boundary[i] = h.eval(&x);
        }
        for &i in cls.ghost() {
            boundary[i] = fv[i];
        }
        Self::from_samples(spec, cls, fv, gv, boundary, forcing)
    }

    pub fn from_samples(
        spec: LatticeSpec,
        classification: Arc<LatticeClassification>,
        f: Vec<f64>,
        g: Vec<f64>,
        boundary: Vec<f64>,
        forcing: Forcing,
    ) -> Result<Self, LeapfrogError> {
        let len = classification.len();
        if f.len() != len || g.len() != len || boundary.len() != len {
            return Err(LeapfrogError::InvalidProblem("sample vectors do not match the lattice".into()));
        }
        if f.iter().chain(&g).chain(&boundary).any(|v| !v.is_finite()) {
            return Err(LeapfrogError::InvalidProblem("non-finite data".into()));
        }
        forcing.validate(spec.n)?;
        Ok(Self {
            spec,
            classification,
            f,
            g,
            boundary,
            forcing,
            enforce_cfl: true,
        })
    }

    /// Rejects variable coefficients: the scheme here is for `a ≡ 1`, `σ ≡ 0` only.
    pub fn check_coefficients(&self, a: &dyn ScalarField, sigma: &dyn ScalarField) -> Result<(), LeapfrogError> {
        let mut x = vec![0.0; self.spec.n];
        for &i in self.classification.interior() {
            self.classification.coords_into(i, &mut x);
            if a.eval(&x) != 1.0 || sigma.eval(&x) != 0.0 {
                return Err(LeapfrogError::InvalidProblem(
                    "variable coefficients require the splitting pipeline".into(),
                ));
            }
        }
        Ok(())
    }

    fn check(&self) -> Result<(), LeapfrogError> {
        self.spec.validate()?;
        if self.enforce_cfl && !self.spec.satisfies_cfl() {
            return Err(LatticeError::NotAdmissible {
                n: self.spec.n,
                dx: self.spec.dx,
                dt: self.spec.dt,
                horizon: self.spec.horizon,
            }
            .into());
        }
        Ok(())
    }

    fn template(&self) -> Vec<f64> {
        self.boundary.clone()
    }
}

/// Which levels `solve` keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Full,
    /// Level 0 and the last two levels in each direction.
    Window,
    Select(BTreeSet<i64>),
}

/// Advances the scheme one level at a time on interior points.
struct Stepper<'a> {
    problem: &'a DiscreteProblem,
    interior_coords: Vec<f64>,
    inv_dx2: f64,
    h2: f64,
}

impl<'a> Stepper<'a> {
    fn new(problem: &'a DiscreteProblem) -> Self {
        let cls = &problem.classification;
        let n = problem.spec.n;
        let interior_coords = if problem.forcing.is_zero() {
            Vec::new()
        } else {
            let mut c = vec![0.0; cls.interior().len() * n];
            for (k, &i) in cls.interior().iter().enumerate() {
                cls.coords_into(i, &mut c[k * n..(k + 1) * n]);
            }
            c
        };
        let dx = problem.spec.dx;
        let dt = problem.spec.dt;
        Self {
            problem,
            interior_coords,
            inv_dx2: 1.0 / (dx * dx),
            h2: dt * dt,
        }
    }

    fn acceleration(&self, u: &[f64], k: usize, i: usize, t: f64) -> f64 {
        let lap = laplacian_kernel(u, i, self.problem.classification.strides(), self.inv_dx2);
        if self.interior_coords.is_empty() {
            lap
        } else {
            let n = self.problem.spec.n;
            lap + self.problem.forcing.eval(&self.interior_coords[k * n..(k + 1) * n], t)
        }
    }

    fn fill<F>(&self, out: &mut [f64], update: F)
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let interior = self.problem.classification.interior();
        if interior.len() >= PARALLEL_MIN_POINTS {
            let vals: Vec<f64> = interior.par_iter().enumerate().map(|(k, &i)| update(k, i)).collect();
            for (k, &i) in interior.iter().enumerate() {
                out[i] = vals[k];
            }
        } else {
            for (k, &i) in interior.iter().enumerate() {
                out[i] = update(k, i);
            }
        }
    }

    /// Level 0: `f` inside, boundary values elsewhere.
    fn initial(&self) -> Vec<f64> {
        let p = self.problem;
        let mut out = p.template();
        for &i in p.classification.interior() {
            out[i] = p.f[i];
        }
        out
    }

    /// Level `±1` from level 0 and the initial velocity.
    fn start(&self, level0: &[f64], sign: f64) -> Vec<f64> {
        let p = self.problem;
        let h = sign * p.spec.dt;
        let half_h2 = 0.5 * p.spec.dt * p.spec.dt;
        let mut out = p.template();
        self.fill(&mut out, |k, i| {
            taylor_start(level0[i], h, p.g[i], half_h2, self.acceleration(level0, k, i, 0.0))
        });
        out
    }

    /// Level `p + dir` from levels `p` and `p − dir`.
    fn next(&self, cur: &[f64], old: &[f64], p: i64) -> Vec<f64> {
        let t = level_time(p, self.problem.spec.dt);
        let mut out = self.problem.template();
        self.fill(&mut out, |k, i| three_level(cur[i], old[i], self.h2, self.acceleration(cur, k, i, t)));
        out
    }
}

fn check_blowup(cls: &LatticeClassification, v: &[f64], level: i64, dt: f64) -> Result<(), LeapfrogError> {
    let mut sup = 0.0f64;
    for &i in cls.interior() {
        let a = v[i].abs();
        if !a.is_finite() {
            sup = f64::INFINITY;
            break;
        }
        sup = sup.max(a);
    }
    if sup > BLOWUP_THRESHOLD || !sup.is_finite() {
        return Err(LeapfrogError::BlowupDetected {
            level,
            time: level_time(level, dt),
            sup,
        });
    }
    Ok(())
}

/// Levels `−1, 0, +1`: `v(±dt) = f ± dt·g + (dt²/2)(Δ_h f + w(·, 0))`.
pub fn bootstrap(problem: &DiscreteProblem) -> Result<GridField, LeapfrogError> {
    problem.check()?;
    let st = Stepper::new(problem);
    let mut field = GridField::new(problem.spec, problem.classification.clone());
    let level0 = st.initial();
    field.insert_level(1, st.start(&level0, 1.0))?;
    field.insert_level(-1, st.start(&level0, -1.0))?;
    field.insert_level(0, level0)?;
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Adds the next level beyond the current range end in `direction`.
pub fn step(problem: &DiscreteProblem, field: &mut GridField, direction: Direction) -> Result<i64, LeapfrogError> {
    problem.check()?;
    let (p, d) = match direction {
        Direction::Forward => (field.level_indices().last().ok_or(StencilError::MissingLevel(0))?, 1),
        Direction::Backward => (field.level_indices().next().ok_or(StencilError::MissingLevel(0))?, -1),
    };
    let st = Stepper::new(problem);
    let next = st.next(field.level(p)?, field.level(p - d)?, p);
    check_blowup(&problem.classification, &next, p + d, problem.spec.dt)?;
    field.insert_level_unchecked(p + d, next);
    Ok(p + d)
}

/// Runs the scheme over `[p_min, p_max]` (`p_min ≤ −1`, `p_max ≥ 1` unless zero) and records levels.
pub fn solve(problem: &DiscreteProblem, record: &Record, p_min: i64, p_max: i64) -> Result<GridField, LeapfrogError> {
    problem.check()?;
    if p_min > 0 || p_max < 0 {
        return Err(LeapfrogError::InvalidProblem("time range must contain 0".into()));
    }
    let st = Stepper::new(problem);
    let cls = &problem.classification;
    let dt = problem.spec.dt;
    let mut out = GridField::new(problem.spec, cls.clone());
    let keep = |p: i64, last: i64| -> bool {
        match record {
            Record::Full => true,
            Record::Window => p == 0 || (p - last).abs() <= 1,
            Record::Select(s) => s.contains(&p),
        }
    };

    let level0 = st.initial();
    for (dir, end) in [(1i64, p_max), (-1i64, p_min)] {
        if end == 0 {
            continue;
        }
        let mut old = level0.clone();
        let mut cur = st.start(&level0, dir as f64);
        check_blowup(cls, &cur, dir, dt)?;
        let mut p = dir;
        if keep(p, end) {
            out.insert_level_unchecked(p, cur.clone());
        }
        while p != end {
            let next = st.next(&cur, &old, p);
            p += dir;
            check_blowup(cls, &next, p, dt)?;
            if keep(p, end) {
                out.insert_level_unchecked(p, next.clone());
            }
            old = std::mem::replace(&mut cur, next);
        }
    }
    if keep(0, p_max) || keep(0, p_min) {
        out.insert_level_unchecked(0, level0);
    }
    Ok(out)
}

/// Two-sided solve over `[−T, T]`.
pub fn solve_horizon(problem: &DiscreteProblem, record: &Record) -> Result<GridField, LeapfrogError> {
    let steps = problem.spec.steps().ok_or(LatticeError::NotAdmissible {
        n: problem.spec.n,
        dx: problem.spec.dx,
        dt: problem.spec.dt,
        horizon: problem.spec.horizon,
    })? as i64;
    solve(problem, record, -steps, steps)
}

/// `max |□_{dx,dt} v − w|` over interior points of every level with both time neighbours stored.
pub fn scheme_residual(problem: &DiscreteProblem, field: &GridField) -> Result<f64, LeapfrogError> {
    let cls = &problem.classification;
    let dt = problem.spec.dt;
    let inv_dx2 = 1.0 / (problem.spec.dx * problem.spec.dx);
    let mut worst = 0.0f64;
    let mut x = vec![0.0; problem.spec.n];
    let levels: Vec<i64> = field.level_indices().collect();
    for &p in &levels {
        if !(field.has_level(p - 1) && field.has_level(p + 1)) {
            continue;
        }
        let (dn, c, up) = (field.level(p - 1)?, field.level(p)?, field.level(p + 1)?);
        let t = level_time(p, dt);
        for &i in cls.interior() {
            cls.coords_into(i, &mut x);
            let tt = (up[i] - 2.0 * c[i] + dn[i]) / (dt * dt);
            let lap = laplacian_kernel(c, i, cls.strides(), inv_dx2);
            worst = worst.max((tt - lap - problem.forcing.eval(&x, t)).abs());
        }
    }
    Ok(worst)
}

/// Discrete energy between levels `p` and `p + 1`:
/// `½ Σ ((v^{p+1} − v^p)/dt)²·dxⁿ + ½ Σ_links (δv^{p+1})(δv^p)·dxⁿ`.
pub fn energy(field: &GridField, p: i64) -> Result<f64, LeapfrogError> {
    let cls = &field.classification;
    let (a, b) = (field.level(p)?, field.level(p + 1)?);
    let dx = field.spec.dx;
    let dt = field.spec.dt;
    let vol = dx.powi(field.spec.n as i32);
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for i in cls.support() {
        if cls.kind(i) == PointKind::Interior {
            let d = (b[i] - a[i]) / dt;
            kinetic += d * d;
        }
        for (k, &s) in cls.strides().iter().enumerate() {
            let q = (i / s) % cls.shape()[k];
            if q + 1 < cls.shape()[k] && cls.kind(i + s) != PointKind::Outside {
                potential += ((b[i + s] - b[i]) / dx) * ((a[i + s] - a[i]) / dx);
            }
        }
    }
    Ok(0.5 * (kinetic + potential) * vol)
}
