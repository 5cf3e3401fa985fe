//! Symmetric tridiagonal helpers: Sturm-sequence bisection and a Thomas solve.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `diag` and squared off-diagonal `off_sq`
/// (`off_sq[i]` couples rows `i` and `i + 1`).
pub fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
        q = diag[i] - x - off_sq[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off_sq: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off_sq[i - 1].sqrt() } else { 0.0 };
        let right = if i + 1 < n { off_sq[i].sqrt() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
pub fn eigenvalue(diag: &[f64], off_sq: &[f64], k: usize) -> Result<f64> {
    let n = diag.len();
    if n == 0 || off_sq.len() + 1 != n {
        return Err(Error::Eigen(format!(
            "inconsistent tridiagonal sizes: {} diagonal, {} off-diagonal",
            n,
            off_sq.len()
        )));
    }
    if k >= n {
        return Err(Error::Eigen(format!("eigenvalue index {k} >= size {n}")));
    }
    if diag.iter().chain(off_sq).any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    let (mut lo, mut hi) = gershgorin(diag, off_sq);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off_sq, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(diag: &[f64], off_sq: &[f64]) -> Result<Vec<f64>> {
    (0..diag.len()).map(|k| eigenvalue(diag, off_sq, k)).collect()
}

/// LU factors of a symmetric tridiagonal matrix with constant off-diagonal.
#[derive(Debug, Clone)]
pub struct ConstTridiagLu {
    off: f64,
    pivots: Vec<f64>,
}

impl ConstTridiagLu {
    pub fn new(diag: impl Iterator<Item = f64>, off: f64) -> Self {
        let mut pivots = Vec::new();
        let mut prev: Option<f64> = None;
        for d in diag {
            let piv = match prev {
                None => d,
                Some(p) => d - off * off / p,
            };
            pivots.push(piv);
            prev = Some(piv);
        }
        Self { off, pivots }
    }

    /// Solves in place; `x` is read and written with stride `stride` from `offset`.
    pub fn solve_strided(&self, x: &mut [f64], offset: usize, stride: usize) {
        let n = self.pivots.len();
        let at = |i: usize| offset + i * stride;
        for i in 1..n {
            let m = self.off / self.pivots[i - 1];
            x[at(i)] -= m * x[at(i - 1)];
        }
        x[at(n - 1)] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[at(i)] = (x[at(i)] - self.off * x[at(i + 1)]) / self.pivots[i];
        }
    }
}
