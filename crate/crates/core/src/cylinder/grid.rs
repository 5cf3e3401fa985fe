//! Tensor grid on the truncated cylinder `[-s_max, s_max] x (0, π)`.
//!
//! The `s` direction is a uniform node set with homogeneous Dirichlet ghost
//! values one step beyond each end. The azimuthal direction uses the Gauss
//! rule of the weight `(sin φ)^{d-2}` (Gauss-Gegenbauer in `x = cos φ`) together
//! with the zonal harmonics orthonormal for that rule, so the angular
//! Laplacian is diagonal in modal space with eigenvalues `k (k + d - 2)`.

use crate::error::{invalid, Result};
use crate::specfun::ln_sphere_area;

use super::tridiag;

pub const MIN_NS: usize = 16;
pub const MIN_NPHI: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGrid {
    pub s_max: f64,
    pub n_s: usize,
    pub n_phi: usize,
    pub d: u32,
    /// Node spacing in `s`.
    pub h: f64,
    pub s: Vec<f64>,
    /// Azimuthal nodes in increasing order.
    pub phi: Vec<f64>,
    /// Angular quadrature weights; they sum to `∫_0^π (sin φ)^{d-2} dφ`.
    pub ang_weights: Vec<f64>,
    /// Angular weights normalized to unit sum.
    pub(crate) unit_weights: Vec<f64>,
    /// Recurrence coefficients of the orthonormal zonal basis.
    beta: Vec<f64>,
    /// `q[j * n_phi + k]`: k-th orthonormal zonal function at node j.
    pub(crate) q: Vec<f64>,
    /// Eigenvalues `k (k + d - 2)` of the sphere Laplacian per mode.
    pub(crate) modes: Vec<f64>,
    /// `ln |S^{d-1}|`.
    pub ln_sphere: f64,
}

/// Squared recurrence coefficient `β_k²` (k >= 1) of the orthonormal
/// polynomials for the weight `(1 - x²)^{(d-3)/2}` on `[-1, 1]`.
fn beta_sq(k: usize, d: u32) -> f64 {
    let k = k as f64;
    if d == 2 {
        return if k == 1.0 { 0.5 } else { 0.25 };
    }
    let lam = 0.5 * (d as f64 - 2.0);
    k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0))
}

/// `build_grid(s_max, n_s, n_phi, d)`; `n_phi = 1` collapses to a radial grid.
pub fn build_grid(s_max: f64, n_s: usize, n_phi: usize, d: u32) -> Result<CylinderGrid> {
    if !(s_max > 0.0) || !s_max.is_finite() {
        return invalid(format!("s_max must be finite and > 0, got {s_max}"));
    }
    if n_s < MIN_NS {
        return invalid(format!("n_s must be >= {MIN_NS}, got {n_s}"));
    }
    if n_phi != 1 && n_phi < MIN_NPHI {
        return invalid(format!("n_phi must be 1 (radial) or >= {MIN_NPHI}, got {n_phi}"));
    }
    if d < 2 {
        return invalid(format!("cylinder grids need d >= 2, got {d}"));
    }
    let h = 2.0 * s_max / (n_s - 1) as f64;
    let s = (0..n_s).map(|i| -s_max + i as f64 * h).collect();

    let ln_sphere = ln_sphere_area(d as f64 - 1.0);
    let total = (ln_sphere - ln_sphere_area(d as f64 - 2.0)).exp();

    let beta: Vec<f64> = (1..n_phi.max(2)).map(|k| beta_sq(k, d).sqrt()).collect();
    let (x, q, unit_weights) = if n_phi == 1 {
        (vec![0.0], vec![1.0], vec![1.0])
    } else {
        let off_sq: Vec<f64> = beta[..n_phi - 1].iter().map(|b| b * b).collect();
        let mut x = tridiag::eigenvalues(&vec![0.0; n_phi], &off_sq)?;
        // descending x is ascending φ
        x.reverse();
        let mut q = vec![0.0; n_phi * n_phi];
        let mut w = vec![0.0; n_phi];
        for (j, &xj) in x.iter().enumerate() {
            let row = orthonormal_at(&beta, n_phi, xj);
            w[j] = 1.0 / row.iter().map(|v| v * v).sum::<f64>();
            q[j * n_phi..(j + 1) * n_phi].copy_from_slice(&row);
        }
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= sum);
        (x, q, w)
    };
    let phi = x.iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect();
    let ang_weights = unit_weights.iter().map(|w| w * total).collect();
    let modes = (0..n_phi)
        .map(|k| {
            let k = k as f64;
            k * (k + d as f64 - 2.0)
        })
        .collect();
    Ok(CylinderGrid {
        s_max,
        n_s,
        n_phi,
        d,
        h,
        s,
        phi,
        ang_weights,
        unit_weights,
        beta,
        q,
        modes,
        ln_sphere,
    })
}

/// The first `n` orthonormal zonal functions at `x = cos φ`.
fn orthonormal_at(beta: &[f64], n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    out[0] = 1.0;
    if n > 1 {
        out[1] = x / beta[0];
    }
    for k in 1..n.saturating_sub(1) {
        out[k + 1] = (x * out[k] - beta[k - 1] * out[k - 1]) / beta[k];
    }
    out
}

impl CylinderGrid {
    pub fn len(&self) -> usize {
        self.n_s * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_radial(&self) -> bool {
        self.n_phi == 1
    }

    /// Sum of the angular weights.
    pub fn angular_total(&self) -> f64 {
        self.ang_weights.iter().sum()
    }

    /// Orthonormal zonal functions of degree `< n` at angle `phi`.
    pub(crate) fn zonal_at(&self, n: usize, phi: f64) -> Vec<f64> {
        if self.n_phi == 1 {
            return vec![1.0];
        }
        orthonormal_at(&self.beta, n.min(self.n_phi), phi.cos())
    }

    /// Modal coefficients `c[i * n_phi + k]` of `values`.
    pub(crate) fn to_modal(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n_phi;
        let mut c = vec![0.0; values.len()];
        for i in 0..self.n_s {
            let row = &values[i * n..(i + 1) * n];
            let out = &mut c[i * n..(i + 1) * n];
            for (j, &v) in row.iter().enumerate() {
                let wv = self.unit_weights[j] * v;
                let qj = &self.q[j * n..(j + 1) * n];
                for k in 0..n {
                    out[k] += wv * qj[k];
                }
            }
        }
        c
    }

    /// Nodal values from modal coefficients.
    pub(crate) fn to_nodal(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n_phi;
        let mut v = vec![0.0; c.len()];
        for i in 0..self.n_s {
            let ci = &c[i * n..(i + 1) * n];
            for j in 0..n {
                let qj = &self.q[j * n..(j + 1) * n];
                v[i * n + j] = qj.iter().zip(ci).map(|(a, b)| a * b).sum();
            }
        }
        v
    }
}
