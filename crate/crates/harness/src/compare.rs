//! Sup and discrete-L2 differences over the common points of nested lattices.

use latwave::lattice::PointKind;
use latwave::stencils::GridField;
use rayon::prelude::*;

use crate::HarnessError;

/// Space-time comparison window `[lower, upper] × [t_min, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
}

impl Window {
    pub fn cube(n: usize, half: f64, t_min: f64, t_max: f64) -> Self {
        Self {
            lower: vec![-half; n],
            upper: vec![half; n],
            t_min,
            t_max,
        }
    }

    fn contains(&self, x: &[f64], t: f64) -> bool {
        let eps = 1e-9;
        t >= self.t_min - eps
            && t <= self.t_max + eps
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= lo - eps && *v <= hi + eps)
    }
}

/// Spacing of the comparison lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonGrid {
    pub dx: f64,
    pub dt: f64,
}

pub enum Target<'a> {
    Field(&'a GridField),
    Oracle(&'a (dyn Fn(&[f64], f64) -> f64 + Sync)),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub sup: f64,
    /// `(Σ|e|²·dxⁿ·dt)^{1/2}` with the comparison spacings.
    pub l2: f64,
    pub points: usize,
}

/// `k` with `k·step = value`, if any.
fn multiple_of(value: f64, step: f64) -> Option<i64> {
    let q = value / step;
    let k = q.round();
    ((q - k).abs() <= 1e-9 * q.abs().max(1.0)).then_some(k as i64)
}

/// Compares `a` against another field or an oracle on the common lattice points in `window`.
///
/// Without an explicit grid the coarser spacings of the two fields are used
/// (for an oracle, those of `a`). Points are visited in lexicographic order
/// with levels ascending, so the sums are reproducible.
pub fn compare_on_common_lattice(
    a: &GridField,
    b: Target<'_>,
    window: &Window,
    grid: Option<CommonGrid>,
) -> Result<Norms, HarnessError> {
    let grid = grid.unwrap_or(match &b {
        Target::Field(f) => CommonGrid {
            dx: a.spec.dx.max(f.spec.dx),
            dt: a.spec.dt.max(f.spec.dt),
        },
        Target::Oracle(_) => CommonGrid {
            dx: a.spec.dx,
            dt: a.spec.dt,
        },
    });
    let cls = &a.classification;
    let n = cls.dim();
    // (x, t, value in a, value in b when b is a field)
    let mut pts: Vec<(Vec<f64>, f64, f64, Option<f64>)> = Vec::new();
    for p in a.level_indices() {
        let t = p as f64 * a.spec.dt;
        if multiple_of(t, grid.dt).is_none() {
            continue;
        }
        let lvl = a.level(p)?;
        for i in cls.support() {
            if cls.kind(i) == PointKind::Ghost {
                continue;
            }
            let x = cls.coords(i);
            if !window.contains(&x, t) || x.iter().any(|v| multiple_of(*v, grid.dx).is_none()) {
                continue;
            }
            let other = match &b {
                Target::Field(f) => {
                    let Some(q) = multiple_of(t, f.spec.dt) else { continue };
                    let Ok(fl) = f.level(q) else { continue };
                    let Some(j) = f.classification.locate(&x) else { continue };
                    if f.classification.kind(j) == PointKind::Ghost {
                        continue;
                    }
                    Some(fl[j])
                }
                Target::Oracle(_) => None,
            };
            pts.push((x, t, lvl[i], other));
        }
    }
    if pts.is_empty() {
        return Err(HarnessError::NoCommonPoints);
    }
    let errs: Vec<f64> = match &b {
        Target::Field(_) => pts.iter().map(|(_, _, va, vb)| (va - vb.expect("field value")).abs()).collect(),
        Target::Oracle(o) => pts.par_iter().map(|(x, t, va, _)| (va - o(x, *t)).abs()).collect(),
    };
    let sup = errs.iter().copied().fold(0.0, f64::max);
    let sum: f64 = errs.iter().map(|e| e * e).sum();
    Ok(Norms {
        sup,
        l2: (sum * grid.dx.powi(n as i32) * grid.dt).sqrt(),
        points: errs.len(),
    })
}

impl From<latwave::stencils::StencilError> for HarnessError {
    fn from(e: latwave::stencils::StencilError) -> Self {
        HarnessError::Leapfrog(e.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use latwave::lattice::{classify, Domain, LatticeSpec};
    use std::sync::Arc;

    fn field(dx: f64, dt: f64, levels: i64, u: impl Fn(&[f64], f64) -> f64 + Sync) -> GridField {
        let spec = LatticeSpec::new(1, dx, dt, levels as f64 * dt).unwrap();
        let dom = Domain::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        };
        let cls = Arc::new(classify(&dom, &spec).unwrap());
        let mut f = GridField::new(spec, cls.clone());
        for p in 0..levels {
            let t = p as f64 * dt;
            f.insert_level(p, cls.sample(&|x: &[f64]| u(x, t))).unwrap();
        }
        f
    }

    #[test]
    fn identical_fields_have_zero_difference() {
        let a = field(0.125, 0.0625, 5, |x, t| x[0] + t);
        let n = compare_on_common_lattice(&a, Target::Field(&a), &Window::cube(1, 2.0, 0.0, 1.0), None).unwrap();
        assert_eq!((n.sup, n.l2), (0.0, 0.0));
    }

    #[test]
    fn unit_offset_on_hundred_points() {
        // 10 points × 10 levels with dx = dt = 0.1
        let a = field(0.1, 0.1, 10, |x, t| (x[0] * t).sin());
        let w = Window {
            lower: vec![0.05],
            upper: vec![0.95],
            t_min: 0.0,
            t_max: 0.9,
        };
        let oracle = |x: &[f64], t: f64| (x[0] * t).sin() - 1.0;
        let n = compare_on_common_lattice(&a, Target::Oracle(&oracle), &w, None).unwrap();
        assert_eq!(n.points, 90);
        let w = Window { lower: vec![0.0], ..w };
        let n = compare_on_common_lattice(&a, Target::Oracle(&oracle), &w, None).unwrap();
        assert_eq!(n.points, 100);
        assert!((n.sup - 1.0).abs() < 1e-15);
        assert!((n.l2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fine_field_is_compared_on_coarse_points() {
        let coarse = field(0.25, 0.125, 5, |x, t| x[0] * x[0] + t);
        let fine = field(0.125, 0.0625, 9, |x, t| x[0] * x[0] + t + 0.5);
        let n = compare_on_common_lattice(&fine, Target::Field(&coarse), &Window::cube(1, 1.0, 0.0, 0.5), None).unwrap();
        assert_eq!(n.points, 5 * 5);
        assert_eq!(n.sup, 0.5);
    }

    #[test]
    fn disjoint_windows_fail() {
        let a = field(0.25, 0.125, 3, |_, _| 0.0);
        let w = Window {
            lower: vec![3.0],
            upper: vec![4.0],
            t_min: 0.0,
            t_max: 1.0,
        };
        assert!(matches!(
            compare_on_common_lattice(&a, Target::Field(&a), &w, None),
            Err(HarnessError::NoCommonPoints)
        ));
    }
}
