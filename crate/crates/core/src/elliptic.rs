//! The discrete elliptic problem `b·Δ_h v − σ·v = 0` in the interior, `v = h` on
//! the boundary, and the splitting `u = φ + v` that reduces a variable-coefficient
//! problem to a constant-coefficient wave problem with zero boundary values.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::lattice::{classify, Domain, LatticeClassification, LatticeError, LatticeSpec, PointKind, ScalarField};
use crate::leapfrog::{DiscreteProblem, LeapfrogError};
use crate::spectral::Forcing;

/// Largest interior size handled by the dense fallback.
pub const DENSE_MAX: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("singular-system: min |pivot| {min_pivot:e} vs max {max_pivot:e}")]
    SingularSystem { min_pivot: f64, max_pivot: f64 },
    #[error("system with {0} unknowns is not definite and too large for the dense solver")]
    TooLarge(usize),
    #[error("coefficient samples do not match the lattice")]
    SizeMismatch,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Leapfrog(#[from] LeapfrogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// No interior unknowns, or a zero right-hand side with zero boundary data.
    Trivial,
    ConjugateGradient,
    Dense,
}

/// Interior rows `b·Δ_h v − σ·v = 0`; boundary rows `v = h`.
///
/// A row with `b = σ = 0` is degenerate; it is replaced by the Laplacian row
/// (harmonic extension). A row with `b = 0`, `σ ≠ 0` reduces to `v = 0`.
#[derive(Debug, Clone)]
pub struct EllipticProblem {
    pub classification: Arc<LatticeClassification>,
    /// `b` at every index-box point (only interior entries are read).
    pub b: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Boundary values (only boundary entries are read).
    pub h: Vec<f64>,
}

impl EllipticProblem {
    pub fn from_fields(
        classification: Arc<LatticeClassification>,
        b: &dyn ScalarField,
        sigma: &dyn ScalarField,
        h: &dyn ScalarField,
    ) -> Self {
        let bv = classification.sample(b);
        let sv = classification.sample(sigma);
        let hv = classification.sample(h);
        Self {
            classification,
            b: bv,
            sigma: sv,
            h: hv,
        }
    }

    pub fn dx(&self) -> f64 {
        self.classification.dx()
    }

    /// Row `(b_i, σ_i)` after degenerate-row handling; `None` for the identity row.
    fn row(&self, i: usize) -> Option<(f64, f64)> {
        let (b, s) = (self.b[i], self.sigma[i]);
        if b == 0.0 && s == 0.0 {
            Some((1.0, 0.0))
        } else if b == 0.0 {
            None
        } else {
            Some((b, s))
        }
    }

    /// `b·Δ_h v − σ·v` at interior point `i` with the degenerate-row convention.
    pub fn apply_row(&self, v: &[f64], i: usize) -> f64 {
        let cls = &self.classification;
        match self.row(i) {
            None => v[i],
            Some((b, s)) => {
                let inv = 1.0 / (self.dx() * self.dx());
                let mut lap = 0.0;
                for &st in cls.strides() {
                    lap += (v[i + st] - 2.0 * v[i] + v[i - st]) * inv;
                }
                b * lap - s * v[i]
            }
        }
    }

    /// Residual scale `max(1, |v|∞)·(1 + max|b|·2n/dx² + max|σ|)`.
    pub fn residual_scale(&self, v: &[f64]) -> f64 {
        let cls = &self.classification;
        let n = cls.dim() as f64;
        let dx = self.dx();
        let mut vmax = 1.0f64;
        let mut bmax = 0.0f64;
        let mut smax = 0.0f64;
        for i in cls.support() {
            vmax = vmax.max(v[i].abs());
        }
        for &i in cls.interior() {
            bmax = bmax.max(self.b[i].abs());
            smax = smax.max(self.sigma[i].abs());
        }
        vmax * (1.0 + bmax.max(1.0) * 2.0 * n / (dx * dx) + smax)
    }

    /// `max |b·Δ_h v − σ·v|` over interior points.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.classification
            .interior()
            .iter()
            .map(|&i| self.apply_row(v, i).abs())
            .fold(0.0, f64::max)
    }

    fn definite(&self) -> bool {
        self.classification.interior().iter().all(|&i| match self.row(i) {
            Some((b, s)) => b > 0.0 && s >= 0.0,
            None => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    pub values: Vec<f64>,
    pub residual: f64,
    pub scale: f64,
    pub solver: SolverKind,
    pub iterations: usize,
}

/// Maps interior flat indices to unknown numbers.
fn unknown_map(cls: &LatticeClassification) -> Vec<usize> {
    let mut map = vec![usize::MAX; cls.len()];
    for (k, &i) in cls.interior().iter().enumerate() {
        map[i] = k;
    }
    map
}

/// Preconditioned CG on `−Δ_h v + (σ/b)·v = 0` with Dirichlet data moved to the right-hand side.
fn solve_cg(p: &EllipticProblem, v: &mut [f64]) -> Option<usize> {
    let cls = &p.classification;
    let interior = cls.interior();
    let m = interior.len();
    let map = unknown_map(cls);
    let inv = 1.0 / (p.dx() * p.dx());
    let strides = cls.strides().to_vec();
    let shift: Vec<f64> = interior
        .iter()
        .map(|&i| {
            let (b, s) = p.row(i).expect("definite rows");
            s / b
        })
        .collect();
    let diag: Vec<f64> = shift.iter().map(|c| 2.0 * strides.len() as f64 * inv + c).collect();

    // A·x over unknowns, with boundary neighbours contributing zero
    let apply = |x: &[f64], out: &mut [f64]| {
        for (k, &i) in interior.iter().enumerate() {
            let mut acc = diag[k] * x[k];
            for &s in &strides {
                for nb in [i + s, i - s] {
                    let j = map[nb];
                    if j != usize::MAX {
                        acc -= inv * x[j];
                    }
                }
            }
            out[k] = acc;
        }
    };
    // right-hand side: boundary neighbours moved over
    let mut rhs = vec![0.0; m];
    for (k, &i) in interior.iter().enumerate() {
        for &s in &strides {
            for nb in [i + s, i - s] {
                if map[nb] == usize::MAX {
                    rhs[k] += inv * v[nb];
                }
            }
        }
    }
    let bnorm = rhs.iter().map(|r| r * r).sum::<f64>().sqrt();
    let mut x = vec![0.0; m];
    if bnorm == 0.0 {
        for &i in interior {
            v[i] = 0.0;
        }
        return Some(0);
    }
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut d = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ad = vec![0.0; m];
    let max_iter = 20 * m + 100;
    for it in 1..=max_iter {
        apply(&d, &mut ad);
        let dad: f64 = d.iter().zip(&ad).map(|(a, b)| a * b).sum();
        if !(dad > 0.0) {
            return None;
        }
        let alpha = rz / dad;
        for k in 0..m {
            x[k] += alpha * d[k];
            r[k] -= alpha * ad[k];
        }
        let rnorm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        if rnorm <= 1e-15 * bnorm {
            for (k, &i) in interior.iter().enumerate() {
                v[i] = x[k];
            }
            return Some(it);
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            d[k] = z[k] + beta * d[k];
        }
    }
    None
}

fn solve_dense(p: &EllipticProblem, v: &mut [f64]) -> Result<(), EllipticError> {
    let cls = &p.classification;
    let interior = cls.interior();
    let m = interior.len();
    if m > DENSE_MAX {
        return Err(EllipticError::TooLarge(m));
    }
    let map = unknown_map(cls);
    let inv = 1.0 / (p.dx() * p.dx());
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (k, &i) in interior.iter().enumerate() {
        match p.row(i) {
            None => a[(k, k)] = 1.0,
            Some((b, s)) => {
                a[(k, k)] = -2.0 * cls.dim() as f64 * b * inv - s;
                for &st in cls.strides() {
                    for nb in [i + st, i - st] {
                        let j = map[nb];
                        if j == usize::MAX {
                            rhs[k] -= b * inv * v[nb];
                        } else {
                            a[(k, j)] += b * inv;
                        }
                    }
                }
            }
        }
    }
    let lu = a.lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..m {
        let d = u[(k, k)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo >= 1e-12 * hi) || hi == 0.0 {
        return Err(EllipticError::SingularSystem {
            min_pivot: lo,
            max_pivot: hi,
        });
    }
    let sol = lu.solve(&rhs).ok_or(EllipticError::SingularSystem {
        min_pivot: lo,
        max_pivot: hi,
    })?;
    for (k, &i) in interior.iter().enumerate() {
        v[i] = sol[k];
    }
    Ok(())
}

/// Solves the discrete elliptic problem.
///
/// CG is used when every row is definite (`b > 0`, `σ ≥ 0`); a CG breakdown and
/// every other case go to the dense LU solver.
pub fn assemble_and_solve(problem: &EllipticProblem) -> Result<EllipticSolution, EllipticError> {
    let cls = &problem.classification;
    if problem.b.len() != cls.len() || problem.sigma.len() != cls.len() || problem.h.len() != cls.len() {
        return Err(EllipticError::SizeMismatch);
    }
    let mut v = vec![0.0; cls.len()];
    for i in cls.support() {
        if cls.kind(i) != PointKind::Interior {
            v[i] = problem.h[i];
        }
    }
    let mut solver = SolverKind::Trivial;
    let mut iterations = 0;
    if !cls.interior().is_empty() {
        let cg = if problem.definite() {
            solve_cg(problem, &mut v)
        } else {
            None
        };
        match cg {
            Some(0) => {}
            Some(it) => {
                solver = SolverKind::ConjugateGradient;
                iterations = it;
            }
            None => {
                solve_dense(problem, &mut v)?;
                solver = SolverKind::Dense;
            }
        }
    }
    let residual = problem.residual(&v);
    let scale = problem.residual_scale(&v);
    Ok(EllipticSolution {
        values: v,
        residual,
        scale,
        solver,
        iterations,
    })
}

/// Dense solve regardless of definiteness, for cross-checking.
pub fn solve_dense_only(problem: &EllipticProblem) -> Result<Vec<f64>, EllipticError> {
    let cls = &problem.classification;
    let mut v = vec![0.0; cls.len()];
    for i in cls.support() {
        if cls.kind(i) != PointKind::Interior {
            v[i] = problem.h[i];
        }
    }
    solve_dense(problem, &mut v)?;
    Ok(v)
}

/// Problem `∂²u/∂t² − (1 + b)Δu + σu = w` with `u = h` on the boundary.
pub struct VariableProblem<'a> {
    pub domain: &'a Domain,
    pub spec: LatticeSpec,
    pub f: &'a dyn ScalarField,
    pub g: &'a dyn ScalarField,
    pub h: &'a dyn ScalarField,
    pub b: &'a dyn ScalarField,
    pub sigma: &'a dyn ScalarField,
    pub forcing: Forcing,
}

/// Output of the splitting: the elliptic part and the zero-boundary wave problem for `φ`.
#[derive(Debug, Clone)]
pub struct SplitPipeline {
    pub elliptic: EllipticSolution,
    /// `f − v` on the lattice.
    pub shifted_f: Vec<f64>,
    /// Wave problem for `φ`: data `(f − v, g)`, zero boundary values.
    pub problem: DiscreteProblem,
}

impl SplitPipeline {
    /// `φ + v` pointwise.
    pub fn reconstruct(&self, phi: &[f64]) -> Vec<f64> {
        phi.iter().zip(&self.elliptic.values).map(|(p, v)| p + v).collect()
    }
}

pub fn split_pipeline(full: &VariableProblem<'_>) -> Result<SplitPipeline, EllipticError> {
    let cls = Arc::new(classify(full.domain, &full.spec)?);
    let ep = EllipticProblem::from_fields(cls.clone(), full.b, full.sigma, full.h);
    let elliptic = assemble_and_solve(&ep)?;
    let f = cls.sample(full.f);
    let g = cls.sample(full.g);
    let shifted_f: Vec<f64> = f.iter().zip(&elliptic.values).map(|(a, v)| a - v).collect();
    let problem = DiscreteProblem::from_samples(
        full.spec,
        cls.clone(),
        shifted_f.clone(),
        g,
        vec![0.0; cls.len()],
        full.forcing.clone(),
    )?;
    Ok(SplitPipeline {
        elliptic,
        shifted_f,
        problem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval(dx: f64) -> Arc<LatticeClassification> {
        let spec = LatticeSpec::new(1, dx, dx, 1.0).unwrap();
        Arc::new(classify(&Domain::unit_box(1), &spec).unwrap())
    }

    #[test]
    fn constants_are_harmonic() {
        let cls = interval(0.125);
        let p = EllipticProblem::from_fields(cls, &|x: &[f64]| 1.0 + x[0], &|_: &[f64]| 0.0, &|_: &[f64]| 2.5);
        let s = assemble_and_solve(&p).unwrap();
        for &i in p.classification.interior() {
            assert_relative_eq!(s.values[i], 2.5, max_relative = 1e-13);
        }
    }

    #[test]
    fn linear_data_is_exact() {
        let cls = interval(0.25);
        let p = EllipticProblem::from_fields(cls.clone(), &|_: &[f64]| 1.0, &|_: &[f64]| 0.0, &|x: &[f64]| x[0]);
        let s = assemble_and_solve(&p).unwrap();
        let vals: Vec<f64> = cls.support().map(|i| s.values[i]).collect();
        let expect = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (a, b) in vals.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn shifted_problem_matches_tridiagonal_oracle() {
        let dx = 0.25;
        let cls = interval(dx);
        let p = EllipticProblem::from_fields(cls.clone(), &|_: &[f64]| 1.0, &|_: &[f64]| 1.0, &|_: &[f64]| 1.0);
        let s = assemble_and_solve(&p).unwrap();
        assert_eq!(s.solver, SolverKind::ConjugateGradient);
        // independent 3×3 solve: (v_{k−1} − 2v_k + v_{k+1})/dx² − v_k = 0
        let d = -2.0 / (dx * dx) - 1.0;
        let o = 1.0 / (dx * dx);
        let a = nalgebra::Matrix3::new(d, o, 0.0, o, d, o, 0.0, o, d);
        let rhs = nalgebra::Vector3::new(-o, 0.0, -o);
        let oracle = a.lu().solve(&rhs).unwrap();
        for (k, &i) in cls.interior().iter().enumerate() {
            assert_relative_eq!(s.values[i], oracle[k], max_relative = 1e-12);
        }
        assert!(s.residual <= 1e-9 * s.scale);
    }

    #[test]
    fn cg_and_dense_agree() {
        let spec = LatticeSpec::new(2, 0.1, 0.05, 1.0).unwrap();
        let cls = Arc::new(classify(&Domain::unit_box(2), &spec).unwrap());
        let p = EllipticProblem::from_fields(
            cls,
            &|x: &[f64]| 1.0 + 0.5 * x[0] * x[1],
            &|x: &[f64]| 2.0 * x[0],
            &|x: &[f64]| (3.0 * x[0]).sin() + x[1],
        );
        let cg = assemble_and_solve(&p).unwrap();
        assert_eq!(cg.solver, SolverKind::ConjugateGradient);
        let dense = solve_dense_only(&p).unwrap();
        for i in 0..dense.len() {
            assert!((cg.values[i] - dense[i]).abs() < 1e-8);
        }
        assert!(cg.residual <= 1e-9 * cg.scale);
    }

    #[test]
    fn resonant_shift_is_singular() {
        // σ/b = −(2/dx)² sin²(π dx/2) is a Dirichlet eigenvalue of Δ_h
        let dx = 0.25;
        let cls = interval(dx);
        let lam = (2.0 / dx) * (2.0 / dx) * (std::f64::consts::PI * dx / 2.0).sin().powi(2);
        let p = EllipticProblem::from_fields(cls, &|_: &[f64]| 1.0, &move |_: &[f64]| -lam, &|_: &[f64]| 1.0);
        assert!(matches!(assemble_and_solve(&p), Err(EllipticError::SingularSystem { .. })));
    }

    #[test]
    fn boundary_rows_are_exact() {
        let cls = interval(0.125);
        let h = |x: &[f64]| 0.1 + x[0].exp();
        let p = EllipticProblem::from_fields(cls.clone(), &|_: &[f64]| 2.0, &|_: &[f64]| 0.3, &h);
        let s = assemble_and_solve(&p).unwrap();
        for &i in cls.boundary() {
            assert_eq!(s.values[i], h(&cls.coords(i)));
        }
    }

    #[test]
    fn trivial_split_reduces_to_plain_problem() {
        let spec = LatticeSpec::new(1, 0.125, 0.0625, 1.0).unwrap();
        let dom = Domain::unit_box(1);
        let f = |x: &[f64]| (std::f64::consts::PI * x[0]).sin();
        let zero = |_: &[f64]| 0.0;
        let vp = VariableProblem {
            domain: &dom,
            spec,
            f: &f,
            g: &zero,
            h: &zero,
            b: &zero,
            sigma: &zero,
            forcing: Forcing::Zero,
        };
        let sp = split_pipeline(&vp).unwrap();
        assert!(sp.elliptic.values.iter().all(|v| *v == 0.0));
        let plain = DiscreteProblem::from_data(&dom, spec, &f, &zero, &zero, Forcing::Zero).unwrap();
        for &i in plain.classification.interior() {
            assert_eq!(sp.problem.f[i], plain.f[i]);
        }
    }

    #[test]
    fn constant_split() {
        let spec = LatticeSpec::new(1, 0.125, 0.0625, 1.0).unwrap();
        let dom = Domain::unit_box(1);
        let c = |_: &[f64]| 1.5;
        let zero = |_: &[f64]| 0.0;
        let vp = VariableProblem {
            domain: &dom,
            spec,
            f: &c,
            g: &zero,
            h: &c,
            b: &|x: &[f64]| 0.2 * x[0],
            sigma: &zero,
            forcing: Forcing::Zero,
        };
        let sp = split_pipeline(&vp).unwrap();
        for &i in sp.problem.classification.interior() {
            assert!((sp.elliptic.values[i] - 1.5).abs() < 1e-12);
            assert!(sp.shifted_f[i].abs() < 1e-12);
        }
    }
}
