//! Space-time lattices, domains and the interior/boundary split of lattice points.
//!
//! A lattice is `dx·Zⁿ × dt·Z`. It is admissible for a horizon `T` when
//! `T/dt` is a positive integer and the steps satisfy the CFL bound
//! `dt/dx ≤ 1/√n`. Points are stored on a dense index box; each point of
//! the box carries a [`PointKind`].

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for integrality of `T/dt` and for lattice point identification.
pub const LATTICE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice parameters: {0}")]
    InvalidSpec(String),
    #[error("lattice (n={n}, dx={dx}, dt={dt}, T={horizon}) is not admissible")]
    NotAdmissible { n: usize, dx: f64, dt: f64, horizon: f64 },
    #[error("refinement needs at least one level")]
    NoLevels,
    #[error("ambiguous-boundary: lattice point {point:?} lies within 1e-12·dx of the boundary")]
    AmbiguousBoundary { point: Vec<i64> },
    #[error("unsupported-shape: {0}")]
    UnsupportedShape(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// The pair `(dx, dt)` together with the horizon `T` and the spatial dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl LatticeSpec {
    pub fn new(n: usize, dx: f64, dt: f64, horizon: f64) -> Result<Self, LatticeError> {
        let spec = Self { n, dx, dt, horizon };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks positivity and finiteness of all fields.
    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n == 0 {
            return Err(LatticeError::InvalidSpec("dimension must be at least 1".into()));
        }
        for (name, v) in [("dx", self.dx), ("dt", self.dt), ("T", self.horizon)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LatticeError::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn cfl_ratio(&self) -> f64 {
        self.dt / self.dx
    }

    /// `T/dt` when it is a positive integer (within [`LATTICE_TOL`]).
    pub fn steps(&self) -> Option<u64> {
        let q = self.horizon / self.dt;
        let r = q.round();
        if r >= 1.0 && (q - r).abs() <= LATTICE_TOL * q.max(1.0) {
            Some(r as u64)
        } else {
            None
        }
    }

    /// Number of whole steps that fit in `[0, T]`, whether or not `T/dt` is integral.
    pub fn steps_within_horizon(&self) -> u64 {
        match self.steps() {
            Some(s) => s,
            None => (self.horizon / self.dt).floor() as u64,
        }
    }

    pub fn satisfies_cfl(&self) -> bool {
        self.dt * (self.n as f64).sqrt() <= self.dx * (1.0 + LATTICE_TOL)
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_ok() && self.steps().is_some() && self.satisfies_cfl()
    }

    /// `2·(T/dt) + 1` levels covering `[-T, T]`.
    pub fn time_levels(&self) -> Option<u64> {
        self.steps().map(|s| 2 * s + 1)
    }

    pub fn require_admissible(&self) -> Result<(), LatticeError> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(LatticeError::NotAdmissible {
                n: self.n,
                dx: self.dx,
                dt: self.dt,
                horizon: self.horizon,
            })
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            dx: self.dx * 0.5,
            dt: self.dt * 0.5,
            ..*self
        }
    }
}

pub fn is_admissible(spec: &LatticeSpec) -> bool {
    spec.is_admissible()
}

/// Nested family obtained by halving `(dx, dt)` `levels` times; the input itself is not included.
pub fn refine_halving(spec: &LatticeSpec, levels: usize) -> Result<Vec<LatticeSpec>, LatticeError> {
    spec.require_admissible()?;
    if levels == 0 {
        return Err(LatticeError::NoLevels);
    }
    let mut out = Vec::with_capacity(levels);
    let mut cur = *spec;
    for _ in 0..levels {
        cur = cur.halved();
        debug_assert!(cur.is_admissible());
        out.push(cur);
    }
    Ok(out)
}

/// A real-valued function on `Rⁿ`.
pub trait ScalarField: Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> ScalarField for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Spatial domain `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    /// Open box `Π (lower_k, upper_k)`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Open ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// All of `Rⁿ`; the window only bounds where errors are measured.
    FullSpace { lower: Vec<f64>, upper: Vec<f64> },
    /// Finite union of boxes and balls.
    Union { parts: Vec<Domain> },
}

impl Domain {
    pub fn unit_box(n: usize) -> Self {
        Domain::Box {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } | Domain::FullSpace { lower, .. } => lower.len(),
            Domain::Ball { center, .. } => center.len(),
            Domain::Union { parts } => parts.first().map_or(0, Domain::dim),
        }
    }

    /// Membership in the open set.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lower, upper } => {
                x.iter().zip(lower).zip(upper).all(|((&xi, &lo), &hi)| xi > lo && xi < hi)
            }
            Domain::Ball { center, radius } => dist_sq(x, center) < radius * radius,
            Domain::FullSpace { .. } => true,
            Domain::Union { parts } => parts.iter().any(|p| p.contains(x)),
        }
    }

    /// Membership in the closure.
    pub fn contains_closure(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lower, upper } => {
                x.iter().zip(lower).zip(upper).all(|((&xi, &lo), &hi)| xi >= lo && xi <= hi)
            }
            Domain::Ball { center, radius } => dist_sq(x, center) <= radius * radius,
            Domain::FullSpace { .. } => true,
            Domain::Union { parts } => parts.iter().any(|p| p.contains_closure(x)),
        }
    }

    /// True when `x` is within `tol` of the boundary without lying exactly on it.
    pub fn is_ambiguous(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Domain::Box { lower, upper } => {
                let inside_padded = x
                    .iter()
                    .zip(lower)
                    .zip(upper)
                    .all(|((&xi, &lo), &hi)| xi >= lo - tol && xi <= hi + tol);
                inside_padded
                    && x.iter().zip(lower).zip(upper).any(|((&xi, &lo), &hi)| {
                        let a = (xi - lo).abs();
                        let b = (xi - hi).abs();
                        (a > 0.0 && a <= tol) || (b > 0.0 && b <= tol)
                    })
            }
            Domain::Ball { center, radius } => {
                let gap = (dist_sq(x, center) - radius * radius).abs();
                gap > 0.0 && gap <= 2.0 * radius * tol
            }
            Domain::FullSpace { .. } => false,
            Domain::Union { parts } => parts.iter().any(|p| p.is_ambiguous(x, tol)),
        }
    }

    /// Axis-aligned bounds of the closure (the window for full space).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lower, upper } | Domain::FullSpace { lower, upper } => {
                (lower.clone(), upper.clone())
            }
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Domain::Union { parts } => {
                let n = self.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for p in parts {
                    let (plo, phi) = p.bounding_box();
                    for k in 0..n {
                        lo[k] = lo[k].min(plo[k]);
                        hi[k] = hi[k].max(phi[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn is_full_space(&self) -> bool {
        matches!(self, Domain::FullSpace { .. })
    }
}

fn dist_sq(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointKind {
    Outside,
    /// In `Ω` with all `2n` axis neighbours in the closure.
    Interior,
    /// In the closure but not interior.
    Boundary,
    /// Frozen outer layer of a full-space window; lies outside the causal cone of the window.
    Ghost,
}

/// Lattice points of a domain on a dense index box, tagged interior / boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeClassification {
    n: usize,
    dx: f64,
    lo: Vec<i64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    kinds: Vec<PointKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    ghost: Vec<usize>,
}

impl LatticeClassification {
    fn from_kinds(n: usize, dx: f64, lo: Vec<i64>, shape: Vec<usize>, kinds: Vec<PointKind>) -> Self {
        let strides = strides_for(&shape);
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        let mut ghost = Vec::new();
        for (i, k) in kinds.iter().enumerate() {
            match k {
                PointKind::Interior => interior.push(i),
                PointKind::Boundary => boundary.push(i),
                PointKind::Ghost => ghost.push(i),
                PointKind::Outside => {}
            }
        }
        Self {
            n,
            dx,
            lo,
            shape,
            strides,
            kinds,
            interior,
            boundary,
            ghost,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of points in the index box (not only the support).
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn lower_index(&self) -> &[i64] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Flat-index offset between axis neighbours along each axis.
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn kind(&self, flat: usize) -> PointKind {
        self.kinds[flat]
    }

    pub fn kinds(&self) -> &[PointKind] {
        &self.kinds
    }

    /// Flat indices of `Ω_Δx`, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Flat indices of `∂_Δx Ω`, ascending.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn ghost(&self) -> &[usize] {
        &self.ghost
    }

    /// Flat indices of every non-outside point, in lexicographic lattice order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| **k != PointKind::Outside)
            .map(|(i, _)| i)
    }

    pub fn flat_index(&self, index: &[i64]) -> Option<usize> {
        if index.len() != self.n {
            return None;
        }
        let mut flat = 0usize;
        for k in 0..self.n {
            let off = index[k] - self.lo[k];
            if off < 0 || off as usize >= self.shape[k] {
                return None;
            }
            flat += off as usize * self.strides[k];
        }
        Some(flat)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<i64> {
        let mut rem = flat;
        let mut out = vec![0i64; self.n];
        for k in 0..self.n {
            let q = rem / self.strides[k];
            rem %= self.strides[k];
            out[k] = self.lo[k] + q as i64;
        }
        out
    }

    pub fn coords_into(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for k in 0..self.n {
            let q = rem / self.strides[k];
            rem %= self.strides[k];
            out[k] = (self.lo[k] + q as i64) as f64 * self.dx;
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.coords_into(flat, &mut out);
        out
    }

    /// Flat index of the lattice point at physical position `x`, if it lies on the lattice.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let idx = lattice_index_of(x, self.dx)?;
        self.flat_index(&idx)
    }

    pub fn interior_set(&self) -> BTreeSet<Vec<i64>> {
        self.interior.iter().map(|&i| self.multi_index(i)).collect()
    }

    pub fn boundary_set(&self) -> BTreeSet<Vec<i64>> {
        self.boundary.iter().map(|&i| self.multi_index(i)).collect()
    }

    /// Samples `field` at every support point; outside points get 0.
    pub fn sample(&self, field: &dyn ScalarField) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut x = vec![0.0; self.n];
        for i in self.support().collect::<Vec<_>>() {
            self.coords_into(i, &mut x);
            out[i] = field.eval(&x);
        }
        out
    }
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

/// Multi-index `k` with `k·dx = x` within [`LATTICE_TOL`]·dx, if any.
pub fn lattice_index_of(x: &[f64], dx: f64) -> Option<Vec<i64>> {
    x.iter()
        .map(|&xi| {
            let q = xi / dx;
            let r = q.round();
            ((q - r).abs() <= LATTICE_TOL * q.abs().max(1.0)).then_some(r as i64)
        })
        .collect()
}

/// Splits the lattice points of `domain` into interior and boundary.
///
/// For a full-space window the window is padded by `T/dt + 1` layers; the
/// outermost layer becomes a frozen ghost layer and everything else is interior.
pub fn classify(domain: &Domain, spec: &LatticeSpec) -> Result<LatticeClassification, LatticeError> {
    let n = spec.n;
    if domain.dim() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            got: domain.dim(),
        });
    }
    let dx = spec.dx;
    let (blo, bhi) = domain.bounding_box();

    if let Domain::FullSpace { .. } = domain {
        let steps = (spec.horizon / spec.dt).ceil().max(spec.steps_within_horizon() as f64) as i64;
        let pad = steps + 1;
        let lo: Vec<i64> = blo.iter().map(|&l| (l / dx - LATTICE_TOL).ceil() as i64 - pad).collect();
        let hi: Vec<i64> = bhi.iter().map(|&h| (h / dx + LATTICE_TOL).floor() as i64 + pad).collect();
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let total: usize = shape.iter().product();
        let strides = strides_for(&shape);
        let mut kinds = vec![PointKind::Interior; total];
        for (flat, kind) in kinds.iter_mut().enumerate() {
            let mut rem = flat;
            for k in 0..n {
                let q = rem / strides[k];
                rem %= strides[k];
                if q == 0 || q == shape[k] - 1 {
                    *kind = PointKind::Ghost;
                    break;
                }
            }
        }
        return Ok(LatticeClassification::from_kinds(n, dx, lo, shape, kinds));
    }

    let lo: Vec<i64> = blo.iter().map(|&l| (l / dx).floor() as i64 - 1).collect();
    let hi: Vec<i64> = bhi.iter().map(|&h| (h / dx).ceil() as i64 + 1).collect();
    let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
    let total: usize = shape.iter().product();
    let strides = strides_for(&shape);

    let tol = LATTICE_TOL * dx;
    let mut open = vec![false; total];
    let mut closed = vec![false; total];
    let mut x = vec![0.0; n];
    for flat in 0..total {
        let mut rem = flat;
        for k in 0..n {
            let q = rem / strides[k];
            rem %= strides[k];
            x[k] = (lo[k] + q as i64) as f64 * dx;
        }
        if domain.is_ambiguous(&x, tol) {
            let idx = (0..n)
                .map(|k| lo[k] + ((flat / strides[k]) % shape[k]) as i64)
                .collect();
            return Err(LatticeError::AmbiguousBoundary { point: idx });
        }
        open[flat] = domain.contains(&x);
        closed[flat] = domain.contains_closure(&x);
    }

    let mut kinds = vec![PointKind::Outside; total];
    for flat in 0..total {
        if !closed[flat] {
            continue;
        }
        let mut interior = open[flat];
        if interior {
            'axes: for k in 0..n {
                let q = (flat / strides[k]) % shape[k];
                // the index box is padded by one layer, so closure points never sit on its edge
                if q == 0 || q + 1 == shape[k] {
                    interior = false;
                    break 'axes;
                }
                if !closed[flat - strides[k]] || !closed[flat + strides[k]] {
                    interior = false;
                    break 'axes;
                }
            }
        }
        kinds[flat] = if interior {
            PointKind::Interior
        } else {
            PointKind::Boundary
        };
    }
    Ok(LatticeClassification::from_kinds(n, dx, lo, shape, kinds))
}

/// Boundary lattice points at which the domain locally splits into several pieces.
///
/// Boxes and balls are convex and never have double points. For unions every
/// boundary lattice point is probed: the indicator is sampled at spacing `dx/8`
/// on the ball of radius `dx/2` around it and the in-domain samples are split
/// into axis-connected components. Two or more components flag a suspect.
/// This is a sampling heuristic, not a proof of connectivity.
pub fn detect_double_points(domain: &Domain, spec: &LatticeSpec) -> Result<Vec<Vec<i64>>, LatticeError> {
    match domain {
        Domain::Box { .. } | Domain::Ball { .. } => Ok(Vec::new()),
        Domain::FullSpace { .. } => Err(LatticeError::UnsupportedShape(
            "full space has no bounded boundary to scan",
        )),
        Domain::Union { .. } => {
            let cls = classify(domain, spec)?;
            let n = spec.n;
            let h = spec.dx / 8.0;
            let half = 4i64;
            let side = (2 * half + 1) as usize;
            let total = side.pow(n as u32);
            let mut suspects = Vec::new();
            let mut centre = vec![0.0; n];
            let mut y = vec![0.0; n];
            for &b in cls.boundary() {
                cls.coords_into(b, &mut centre);
                let mut inside = vec![false; total];
                for (s, slot) in inside.iter_mut().enumerate() {
                    let mut rem = s;
                    let mut r2 = 0i64;
                    for k in (0..n).rev() {
                        let o = (rem % side) as i64 - half;
                        rem /= side;
                        r2 += o * o;
                        y[k] = centre[k] + o as f64 * h;
                    }
                    *slot = r2 <= half * half && domain.contains(&y);
                }
                if count_components(&inside, n, side) >= 2 {
                    suspects.push(cls.multi_index(b));
                }
            }
            Ok(suspects)
        }
    }
}

fn count_components(mask: &[bool], n: usize, side: usize) -> usize {
    let strides = strides_for(&vec![side; n]);
    let mut seen = vec![false; mask.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for k in 0..n {
                let q = (p / strides[k]) % side;
                if q > 0 {
                    let nb = p - strides[k];
                    if mask[nb] && !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
                if q + 1 < side {
                    let nb = p + strides[k];
                    if mask[nb] && !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
    }
    components
}

/// Result of checking the compatibility conditions between initial and boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub samples: usize,
    /// `max |f − h|` over the sampled boundary.
    pub max_trace_mismatch: f64,
    /// `max |g|` over the sampled boundary.
    pub max_velocity_trace: f64,
    /// `max |Δ_∂Ω h|`, from tangential second differences.
    pub max_surface_laplacian: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Samples `∂Ω` and checks `f → h`, `g → 0` and `Δ_∂Ω h = 0` there.
///
/// `dx` sets the tangential difference step (`dx/4`).
pub fn check_compatibility(
    f: &dyn ScalarField,
    g: &dyn ScalarField,
    h: &dyn ScalarField,
    domain: &Domain,
    dx: f64,
    tol: f64,
) -> CompatibilityReport {
    let eps = dx / 4.0;
    let samples = boundary_samples(domain, eps);
    let mut trace = 0.0f64;
    let mut vel = 0.0f64;
    let mut lap = 0.0f64;
    for s in &samples {
        trace = trace.max((f.eval(&s.point) - h.eval(&s.point)).abs());
        vel = vel.max(g.eval(&s.point).abs());
        let mut acc = 0.0;
        for path in &s.tangents {
            let plus = h.eval(&path.forward);
            let minus = h.eval(&path.backward);
            let centre = h.eval(&s.point);
            acc += (plus - 2.0 * centre + minus) / (path.step * path.step);
        }
        lap = lap.max(acc.abs());
    }
    CompatibilityReport {
        samples: samples.len(),
        max_trace_mismatch: trace,
        max_velocity_trace: vel,
        max_surface_laplacian: lap,
        tol,
        pass: trace <= tol && vel <= tol && lap <= tol,
    }
}

struct TangentPath {
    forward: Vec<f64>,
    backward: Vec<f64>,
    step: f64,
}

struct BoundarySample {
    point: Vec<f64>,
    tangents: Vec<TangentPath>,
}

fn boundary_samples(domain: &Domain, eps: f64) -> Vec<BoundarySample> {
    match domain {
        Domain::Box { lower, upper } => box_samples(lower, upper, eps),
        Domain::Ball { center, radius } => ball_samples(center, *radius, eps),
        Domain::FullSpace { .. } => Vec::new(),
        Domain::Union { parts } => parts
            .iter()
            .flat_map(|p| boundary_samples(p, eps))
            .filter(|s| !domain.contains(&s.point))
            .collect(),
    }
}

fn box_samples(lower: &[f64], upper: &[f64], eps: f64) -> Vec<BoundarySample> {
    let n = lower.len();
    let mut out = Vec::new();
    if n == 1 {
        for x in [lower[0], upper[0]] {
            out.push(BoundarySample {
                point: vec![x],
                tangents: Vec::new(),
            });
        }
        return out;
    }
    // per-face cell-centred grid, sized so the whole boundary gets at least 100 samples
    let faces = 2 * n;
    let mut m = 1usize;
    while faces * m.pow((n - 1) as u32) < 100 {
        m += 1;
    }
    for axis in 0..n {
        for value in [lower[axis], upper[axis]] {
            let others: Vec<usize> = (0..n).filter(|&k| k != axis).collect();
            let count = m.pow(others.len() as u32);
            for c in 0..count {
                let mut point = vec![0.0; n];
                point[axis] = value;
                let mut rem = c;
                for &k in &others {
                    let j = rem % m;
                    rem /= m;
                    point[k] = lower[k] + (upper[k] - lower[k]) * (j as f64 + 0.5) / m as f64;
                }
                let tangents = others
                    .iter()
                    .map(|&k| {
                        let cell = (upper[k] - lower[k]) / (2.0 * m as f64);
                        let step = eps.min(cell);
                        let mut fw = point.clone();
                        let mut bw = point.clone();
                        fw[k] += step;
                        bw[k] -= step;
                        TangentPath {
                            forward: fw,
                            backward: bw,
                            step,
                        }
                    })
                    .collect();
                out.push(BoundarySample { point, tangents });
            }
        }
    }
    out
}

fn ball_samples(center: &[f64], radius: f64, eps: f64) -> Vec<BoundarySample> {
    let n = center.len();
    let on_sphere = |u: &[f64]| -> Vec<f64> { center.iter().zip(u).map(|(c, ui)| c + radius * ui).collect() };
    // point reached by walking arclength s along the great circle through u in direction e
    let geodesic = |u: &[f64], e: &[f64], s: f64| -> Vec<f64> {
        let th = s / radius;
        let dir: Vec<f64> = u.iter().zip(e).map(|(a, b)| a * th.cos() + b * th.sin()).collect();
        on_sphere(&dir)
    };
    let mut out = Vec::new();
    match n {
        1 => {
            for u in [-1.0, 1.0] {
                out.push(BoundarySample {
                    point: on_sphere(&[u]),
                    tangents: Vec::new(),
                });
            }
        }
        2 => {
            let m = 128;
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let u = [th.cos(), th.sin()];
                let e = [-th.sin(), th.cos()];
                out.push(BoundarySample {
                    point: on_sphere(&u),
                    tangents: vec![TangentPath {
                        forward: geodesic(&u, &e, eps),
                        backward: geodesic(&u, &e, -eps),
                        step: eps,
                    }],
                });
            }
        }
        _ => {
            // Fibonacci sphere in the first three coordinates
            let m = 128;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for j in 0..m {
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * j as f64;
                let mut u = vec![0.0; n];
                u[0] = r * phi.cos();
                u[1] = r * phi.sin();
                u[2] = z;
                let mut e1 = vec![0.0; n];
                e1[0] = -phi.sin();
                e1[1] = phi.cos();
                let mut e2 = vec![0.0; n];
                e2[0] = z * phi.cos();
                e2[1] = z * phi.sin();
                e2[2] = -r;
                let tangents = [e1, e2]
                    .iter()
                    .map(|e| TangentPath {
                        forward: geodesic(&u, e, eps),
                        backward: geodesic(&u, e, -eps),
                        step: eps,
                    })
                    .collect();
                out.push(BoundarySample {
                    point: on_sphere(&u),
                    tangents,
                });
            }
        }
    }
    out
}
