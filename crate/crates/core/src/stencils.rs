//! Difference quotients in time and space, the discrete Laplacian and the
//! discrete d'Alembertian, on stored grid levels and on callables.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{LatticeClassification, LatticeSpec, PointKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StencilError {
    #[error("missing-level: time level {0} is not stored")]
    MissingLevel(i64),
    #[error("missing-neighbor: point {point:?} has no neighbour along axis {axis}")]
    MissingNeighbor { point: Vec<i64>, axis: usize },
    #[error("corrupted state: non-finite value at level {level}")]
    NonFinite { level: i64 },
    #[error("level {level} has {got} values, expected {expected}")]
    SupportMismatch { level: i64, got: usize, expected: usize },
}

/// Values on the lattice support at one or more time levels `t = p·dt`.
///
/// Each level is a dense vector over the classification's index box; points
/// of kind [`PointKind::Outside`] hold zero and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: LatticeSpec,
    pub classification: Arc<LatticeClassification>,
    levels: BTreeMap<i64, Vec<f64>>,
}

impl GridField {
    pub fn new(spec: LatticeSpec, classification: Arc<LatticeClassification>) -> Self {
        Self {
            spec,
            classification,
            levels: BTreeMap::new(),
        }
    }

    pub fn insert_level(&mut self, p: i64, values: Vec<f64>) -> Result<(), StencilError> {
        let expected = self.classification.len();
        if values.len() != expected {
            return Err(StencilError::SupportMismatch {
                level: p,
                got: values.len(),
                expected,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StencilError::NonFinite { level: p });
        }
        self.levels.insert(p, values);
        Ok(())
    }

    /// Inserts without the finiteness scan; for solver-internal use where the scan already ran.
    pub(crate) fn insert_level_unchecked(&mut self, p: i64, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.classification.len());
        self.levels.insert(p, values);
    }

    pub fn remove_level(&mut self, p: i64) -> Option<Vec<f64>> {
        self.levels.remove(&p)
    }

    pub fn level(&self, p: i64) -> Result<&[f64], StencilError> {
        self.levels
            .get(&p)
            .map(Vec::as_slice)
            .ok_or(StencilError::MissingLevel(p))
    }

    pub fn has_level(&self, p: i64) -> bool {
        self.levels.contains_key(&p)
    }

    /// Stored level indices, ascending.
    pub fn level_indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.levels.keys().copied()
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &BTreeMap<i64, Vec<f64>> {
        &self.levels
    }

    pub fn value(&self, flat: usize, p: i64) -> Result<f64, StencilError> {
        Ok(self.level(p)?[flat])
    }

    /// Max absolute value over the support of one level.
    pub fn sup_norm(&self, p: i64) -> Result<f64, StencilError> {
        let lvl = self.level(p)?;
        Ok(self
            .classification
            .support()
            .fold(0.0f64, |m, i| m.max(lvl[i].abs())))
    }

    /// Writes one level as a binary snapshot (see [`write_snapshot`]).
    pub fn dump_level<W: Write>(&self, p: i64, out: &mut W) -> io::Result<()> {
        let lvl = self
            .level(p)
            .map_err(|e| io::Error::new(io::ErrorKind::NotFound, e.to_string()))?;
        write_snapshot(out, &self.classification, self.spec.dt, p, lvl)
    }
}

/// Binary snapshot: `n: u32`, `dx: f64`, `dt: f64`, `level: i64`, `count: u64`,
/// then `count` values, all little-endian, support points in lexicographic order.
pub fn write_snapshot<W: Write>(
    out: &mut W,
    cls: &LatticeClassification,
    dt: f64,
    level: i64,
    values: &[f64],
) -> io::Result<()> {
    let support: Vec<usize> = cls.support().collect();
    out.write_all(&(cls.dim() as u32).to_le_bytes())?;
    out.write_all(&cls.dx().to_le_bytes())?;
    out.write_all(&dt.to_le_bytes())?;
    out.write_all(&level.to_le_bytes())?;
    out.write_all(&(support.len() as u64).to_le_bytes())?;
    for i in support {
        out.write_all(&values[i].to_le_bytes())?;
    }
    Ok(())
}

/// Parsed snapshot header and payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u32,
    pub dx: f64,
    pub dt: f64,
    pub level: i64,
    pub values: Vec<f64>,
}

pub fn read_snapshot(bytes: &[u8]) -> io::Result<Snapshot> {
    fn take<const N: usize>(b: &[u8], at: &mut usize) -> io::Result<[u8; N]> {
        let s = b
            .get(*at..*at + N)
            .ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "truncated snapshot"))?;
        *at += N;
        Ok(s.try_into().expect("slice length checked"))
    }
    let mut at = 0;
    let n = u32::from_le_bytes(take(bytes, &mut at)?);
    let dx = f64::from_le_bytes(take(bytes, &mut at)?);
    let dt = f64::from_le_bytes(take(bytes, &mut at)?);
    let level = i64::from_le_bytes(take(bytes, &mut at)?);
    let count = u64::from_le_bytes(take(bytes, &mut at)?) as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(take(bytes, &mut at)?));
    }
    Ok(Snapshot {
        n,
        dx,
        dt,
        level,
        values,
    })
}

// Kernels shared by every solver so that identical inputs give bit-identical outputs.

/// `Σ_k (u[i+s_k] − 2u[i] + u[i−s_k]) / dx²`, axes ascending.
#[inline]
pub(crate) fn laplacian_kernel(u: &[f64], i: usize, strides: &[usize], inv_dx2: f64) -> f64 {
    let c = u[i];
    let mut acc = 0.0;
    for &s in strides {
        acc += (u[i + s] - 2.0 * c + u[i - s]) * inv_dx2;
    }
    acc
}

/// Three-level update `2·cur − old + h²·acc`.
#[inline]
pub(crate) fn three_level(cur: f64, old: f64, h2: f64, acc: f64) -> f64 {
    2.0 * cur - old + h2 * acc
}

/// First step `x0 + h·v0 + (h²/2)·acc`.
#[inline]
pub(crate) fn taylor_start(x0: f64, h: f64, v0: f64, half_h2: f64, acc: f64) -> f64 {
    x0 + h * v0 + half_h2 * acc
}

fn neighbours_present(cls: &LatticeClassification, flat: usize, axis: usize) -> bool {
    let s = cls.strides()[axis];
    let q = (flat / s) % cls.shape()[axis];
    q > 0
        && q + 1 < cls.shape()[axis]
        && cls.kind(flat - s) != PointKind::Outside
        && cls.kind(flat + s) != PointKind::Outside
}

pub fn delta_t_forward(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    Ok((field.value(flat, p + 1)? - field.value(flat, p)?) / field.spec.dt)
}

pub fn delta_t_backward(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    Ok((field.value(flat, p)? - field.value(flat, p - 1)?) / field.spec.dt)
}

pub fn delta_t_centered(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    Ok((field.value(flat, p + 1)? - field.value(flat, p - 1)?) / (2.0 * field.spec.dt))
}

pub fn delta_t_second(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    let dt = field.spec.dt;
    let up = field.value(flat, p + 1)?;
    let c = field.value(flat, p)?;
    let dn = field.value(flat, p - 1)?;
    Ok((up - 2.0 * c + dn) / (dt * dt))
}

pub fn delta_x_second(field: &GridField, flat: usize, p: i64, axis: usize) -> Result<f64, StencilError> {
    let cls = &field.classification;
    if !neighbours_present(cls, flat, axis) {
        return Err(StencilError::MissingNeighbor {
            point: cls.multi_index(flat),
            axis,
        });
    }
    let lvl = field.level(p)?;
    let s = cls.strides()[axis];
    let dx = field.spec.dx;
    Ok((lvl[flat + s] - 2.0 * lvl[flat] + lvl[flat - s]) / (dx * dx))
}

pub fn discrete_laplacian(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    let mut acc = 0.0;
    for k in 0..field.spec.n {
        acc += delta_x_second(field, flat, p, k)?;
    }
    Ok(acc)
}

pub fn discrete_dalembert(field: &GridField, flat: usize, p: i64) -> Result<f64, StencilError> {
    Ok(delta_t_second(field, flat, p)? - discrete_laplacian(field, flat, p)?)
}

/// The same operators applied to a callable `u(x, t)` at an arbitrary point.
pub mod symbolic {
    fn shifted(x: &[f64], axis: usize, by: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y[axis] += by;
        y
    }

    pub fn delta_t_second<U: Fn(&[f64], f64) -> f64>(u: &U, x: &[f64], t: f64, dt: f64) -> f64 {
        (u(x, t + dt) - 2.0 * u(x, t) + u(x, t - dt)) / (dt * dt)
    }

    pub fn delta_x_second<U: Fn(&[f64], f64) -> f64>(u: &U, x: &[f64], t: f64, dx: f64, axis: usize) -> f64 {
        (u(&shifted(x, axis, dx), t) - 2.0 * u(x, t) + u(&shifted(x, axis, -dx), t)) / (dx * dx)
    }

    pub fn discrete_laplacian<U: Fn(&[f64], f64) -> f64>(u: &U, x: &[f64], t: f64, dx: f64) -> f64 {
        (0..x.len()).map(|k| delta_x_second(u, x, t, dx, k)).sum()
    }

    pub fn discrete_dalembert<U: Fn(&[f64], f64) -> f64>(u: &U, x: &[f64], t: f64, dx: f64, dt: f64) -> f64 {
        delta_t_second(u, x, t, dt) - discrete_laplacian(u, x, t, dx)
    }

    /// `□` from neighbour increments `d(axis, ±1) = u(neighbour) − u(centre)`, with
    /// `axis = None` for time.
    ///
    /// Same operator, but when the increments are computed directly the result
    /// avoids the `ε·|u|/dt²` cancellation of pointwise sampling.
    pub fn discrete_dalembert_increments<D: Fn(Option<usize>, f64) -> f64>(d: &D, n: usize, dx: f64, dt: f64) -> f64 {
        let time = (d(None, 1.0) + d(None, -1.0)) / (dt * dt);
        let space: f64 = (0..n).map(|k| (d(Some(k), 1.0) + d(Some(k), -1.0)) / (dx * dx)).sum();
        time - space
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{classify, Domain};
    use approx::assert_relative_eq;

    fn field_from<F: Fn(&[f64], f64) -> f64 + Sync>(n: usize, dx: f64, dt: f64, levels: std::ops::RangeInclusive<i64>, u: F) -> GridField {
        let spec = LatticeSpec {
            n,
            dx,
            dt,
            horizon: 1.0,
        };
        let dom = Domain::Box {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        };
        let cls = Arc::new(classify(&dom, &spec).unwrap());
        let mut f = GridField::new(spec, cls.clone());
        for p in levels {
            let t = p as f64 * dt;
            let vals = cls.sample(&|x: &[f64]| u(x, t));
            f.insert_level(p, vals).unwrap();
        }
        f
    }

    #[test]
    fn time_quotients_of_polynomials() {
        let f = field_from(1, 0.25, 0.1, -1..=1, |_, t| t);
        let i = f.classification.interior()[0];
        assert_eq!(delta_t_centered(&f, i, 0).unwrap(), 1.0);
        assert_eq!(delta_t_second(&f, i, 0).unwrap(), 0.0);

        let f = field_from(1, 0.25, 0.5, -1..=1, |_, t| t * t);
        assert_eq!(delta_t_second(&f, i, 0).unwrap(), 2.0);
        let f = field_from(1, 0.25, 0.1, -1..=1, |_, t| t * t);
        assert_relative_eq!(delta_t_second(&f, i, 0).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn time_second_difference_of_sine() {
        let dt = 0.1;
        let u = |_: &[f64], t: f64| t.sin();
        let x = [0.0];
        assert_eq!(symbolic::delta_t_second(&u, &x, 0.0, dt), 0.0);
        let v = symbolic::delta_t_second(&u, &x, std::f64::consts::FRAC_PI_2, dt);
        let s = (0.05f64).sin() / 0.05;
        assert_relative_eq!(v, -s * s, max_relative = 1e-10);
        assert!((v + 0.999167).abs() < 1e-6);
    }

    #[test]
    fn missing_level_at_range_end() {
        let f = field_from(1, 0.25, 0.1, 0..=1, |_, t| t);
        let i = f.classification.interior()[0];
        assert_eq!(delta_t_second(&f, i, 1), Err(StencilError::MissingLevel(2)));
        assert_eq!(delta_t_backward(&f, i, 0), Err(StencilError::MissingLevel(-1)));
        assert_eq!(delta_t_forward(&f, i, 0).unwrap(), 1.0);
    }

    #[test]
    fn space_second_differences() {
        let f = field_from(1, 0.25, 0.1, 0..=0, |x, _| x[0]);
        for &i in f.classification.interior() {
            assert_eq!(delta_x_second(&f, i, 0, 0).unwrap(), 0.0);
        }
        let f = field_from(1, 0.25, 0.1, 0..=0, |x, _| x[0] * x[0]);
        for &i in f.classification.interior() {
            assert_eq!(delta_x_second(&f, i, 0, 0).unwrap(), 2.0);
        }
        let b = f.classification.boundary()[0];
        assert!(matches!(
            delta_x_second(&f, b, 0, 0),
            Err(StencilError::MissingNeighbor { .. })
        ));
    }

    #[test]
    fn plane_wave_eigenvalue() {
        let (alpha, dx) = (2.0f64, 0.5f64);
        let x = [0.3];
        let re = |x: &[f64], _t: f64| (alpha * x[0]).cos();
        let im = |x: &[f64], _t: f64| (alpha * x[0]).sin();
        let lr = symbolic::delta_x_second(&re, &x, 0.0, dx, 0);
        let li = symbolic::delta_x_second(&im, &x, 0.0, dx, 0);
        let s = (alpha * dx / 2.0).sin() / (alpha * dx / 2.0);
        let factor = -alpha * alpha * s * s;
        assert_relative_eq!(lr, factor * (alpha * x[0]).cos(), max_relative = 1e-12);
        assert_relative_eq!(li, factor * (alpha * x[0]).sin(), max_relative = 1e-12);
        assert!((factor + 3.677582).abs() < 1e-6);
    }

    #[test]
    fn laplacian_matches_five_point_stencil() {
        let vals = [0.3, -1.2, 0.7, 2.2, 0.1, -0.4, 1.9, 0.05, -0.8];
        let u = move |x: &[f64], _t: f64| {
            let i = (x[0] / 0.5).round() as usize;
            let j = (x[1] / 0.5).round() as usize;
            vals[i * 3 + j]
        };
        let f = field_from(2, 0.5, 0.25, 0..=0, u);
        let c = f.classification.locate(&[0.5, 0.5]).unwrap();
        let oracle = (vals[1] + vals[3] + vals[5] + vals[7] - 4.0 * vals[4]) / 0.25;
        assert_relative_eq!(discrete_laplacian(&f, c, 0).unwrap(), oracle, max_relative = 1e-14);
        let f = field_from(2, 0.25, 0.125, 0..=0, |x, _| x[0] * x[0] + x[1] * x[1]);
        for &i in f.classification.interior() {
            assert_eq!(discrete_laplacian(&f, i, 0).unwrap(), 4.0);
        }
    }

    #[test]
    fn dalembert_annihilates_low_order_polynomials() {
        let funcs: Vec<Box<dyn Fn(&[f64], f64) -> f64 + Sync>> = vec![
            Box::new(|_, _| 1.0),
            Box::new(|_, t| t),
            Box::new(|x, _| x[1]),
            Box::new(|x, t| t * x[0]),
            Box::new(|x, t| t * t + x[0] * x[0]),
            Box::new(|x, _| x[0] * x[0] - x[1] * x[1]),
            Box::new(|x, t| t - x[0]),
        ];
        for u in &funcs {
            let f = field_from(2, 0.125, 0.0625, -1..=1, u);
            for &i in f.classification.interior() {
                assert!(discrete_dalembert(&f, i, 0).unwrap().abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn second_difference_composes_forward_and_backward() {
        let f = field_from(1, 0.25, 0.1, -1..=1, |x, t| (3.0 * t).sin() + x[0]);
        let i = f.classification.interior()[1];
        let composed = (delta_t_forward(&f, i, 0).unwrap() - delta_t_forward(&f, i, -1).unwrap()) / 0.1;
        assert_relative_eq!(composed, delta_t_second(&f, i, 0).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn non_finite_levels_rejected() {
        let mut f = field_from(1, 0.25, 0.1, 0..=0, |_, _| 0.0);
        let mut vals = f.level(0).unwrap().to_vec();
        vals[2] = f64::NAN;
        assert_eq!(f.insert_level(1, vals), Err(StencilError::NonFinite { level: 1 }));
    }

    #[test]
    fn snapshot_round_trip() {
        let f = field_from(2, 0.25, 0.125, 3..=3, |x, _| x[0] - 2.0 * x[1]);
        let mut buf = Vec::new();
        f.dump_level(3, &mut buf).unwrap();
        let snap = read_snapshot(&buf).unwrap();
        assert_eq!((snap.n, snap.dx, snap.dt, snap.level), (2, 0.25, 0.125, 3));
        let expected: Vec<f64> = f.classification.support().map(|i| f.level(3).unwrap()[i]).collect();
        assert_eq!(snap.values, expected);
        assert_eq!(buf.len(), 4 + 8 * 4 + 8 * expected.len());
    }
}
