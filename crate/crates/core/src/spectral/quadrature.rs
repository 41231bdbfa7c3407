//! Tensor Gauss–Legendre rules on `[−M, M]ⁿ` and the closed-form Gaussian tail bound.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::data::DataFunction;

pub const DEFAULT_NODES: usize = 129;
pub const DEFAULT_NODES_3D: usize = 49;

/// Frequency-domain quadrature: `nodes_per_axis` Gauss–Legendre nodes on each axis of `[−M, M]ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyQuadrature {
    pub n: usize,
    pub cutoff: f64,
    pub nodes_per_axis: usize,
}

/// Flattened tensor rule: `coords[j*n..(j+1)*n]` is node `j`.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub n: usize,
    pub coords: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.coords[j * self.n..(j + 1) * self.n]
    }
}

impl FrequencyQuadrature {
    pub fn new(n: usize, cutoff: f64, nodes_per_axis: usize) -> Self {
        Self {
            n,
            cutoff,
            nodes_per_axis,
        }
    }

    pub fn default_nodes(n: usize) -> usize {
        if n >= 3 {
            DEFAULT_NODES_3D
        } else {
            DEFAULT_NODES
        }
    }

    /// The same cutoff with `2N − 1` nodes per axis, for self-consistency checks.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_per_axis: 2 * self.nodes_per_axis - 1,
            ..*self
        }
    }

    pub fn rule(&self) -> TensorRule {
        let n = self.n;
        let m = self.nodes_per_axis.max(1);
        let gl = GaussLegendre::new(m.try_into().expect("nonzero"));
        let pairs = gl.as_node_weight_pairs();
        let total = m.pow(n as u32);
        let mut coords = Vec::with_capacity(total * n);
        let mut weights = Vec::with_capacity(total);
        for idx in 0..total {
            let mut w = 1.0;
            let mut stride = total;
            for _ in 0..n {
                stride /= m;
                let (node, weight) = pairs[(idx / stride) % m];
                coords.push(self.cutoff * node);
                w *= self.cutoff * weight;
            }
            weights.push(w);
        }
        TensorRule { n, coords, weights }
    }
}

/// `∫_{|α|>M} exp(−w²|α|²/2) dα` over `Rⁿ`.
pub fn gaussian_tail_integral(n: usize, width: f64, cutoff: f64) -> f64 {
    let w2 = width * width;
    let a = n as f64 / 2.0;
    let x = w2 * cutoff * cutoff / 2.0;
    let q = if x > 0.0 { gamma_ur(a, x) } else { 1.0 };
    (2.0 * PI / w2).powf(a) * q
}

/// Bound on the discarded part `(2π)^{-n/2} ∫_{|α|>M} (2|f̂| + 2T|ĝ|) dα` of a reference solution.
///
/// `None` when a datum has no closed-form decay envelope.
pub fn tail_bound(f: &DataFunction, g: &DataFunction, n: usize, horizon: f64, cutoff: f64) -> Option<f64> {
    let norm = (2.0 * PI).powf(-(n as f64) / 2.0);
    let mut acc = 0.0;
    for (datum, weight) in [(f, 2.0), (g, 2.0 * horizon)] {
        for b in datum.decay_bounds()? {
            acc += weight * b.amplitude * gaussian_tail_integral(n, b.width, cutoff);
        }
    }
    Some(norm * acc)
}

/// Smallest cutoff (to 1e-3 relative) whose tail bound is at most `tol`.
pub fn auto_cutoff(f: &DataFunction, g: &DataFunction, n: usize, horizon: f64, tol: f64) -> Option<f64> {
    let bound = |m: f64| tail_bound(f, g, n, horizon, m);
    if bound(0.0)? <= tol {
        return Some(0.0);
    }
    let mut hi = 1.0;
    while bound(hi)? > tol {
        hi *= 2.0;
        if hi > 1e8 {
            return None;
        }
    }
    let mut lo = hi / 2.0;
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if bound(mid)? > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}
