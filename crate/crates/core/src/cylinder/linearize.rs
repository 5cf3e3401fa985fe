//! Linearization of the Euler-Lagrange equation on the first angular harmonic.

use crate::error::{invalid, Result};

use super::diagnostics::normalization_factor;
use super::functional::energies_of;
use super::minimize::MinimizationResult;
use super::tridiag;

/// Tridiagonal form of
/// `-θ ∂_ss + θ(d-1) + (1-θ)t + Λ - (t+Λ)^{1-θ}(p-1)(w*)^{p-2}`
/// with Dirichlet ghosts at `±(s_max + h)`.
pub fn first_harmonic_operator(
    profile: &MinimizationResult,
    theta: f64,
    p: f64,
    lambda: f64,
    d: u32,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = &profile.profile;
    if !w.radial_flag() {
        return invalid("linearization needs a radial profile");
    }
    let e = energies_of(w);
    let t = e.t();
    let c = normalization_factor(w, theta, p, lambda);
    let g = &w.grid;
    let h2 = g.h * g.h;
    let base = theta * (d as f64 - 1.0) + (1.0 - theta) * t + lambda;
    let amp = (t + lambda).powf(1.0 - theta) * (p - 1.0);
    let avg = w.radial_average();
    let diag = avg
        .iter()
        .map(|v| 2.0 * theta / h2 + base - amp * (c * v.abs()).powf(p - 2.0))
        .collect();
    let off = vec![theta * theta / (h2 * h2); g.n_s - 1];
    Ok((diag, off))
}

/// Smallest eigenvalue of [`first_harmonic_operator`].
pub fn linearization_lowest_eigenvalue(
    profile: &MinimizationResult,
    theta: f64,
    p: f64,
    lambda: f64,
    d: u32,
) -> Result<f64> {
    let (diag, off) = first_harmonic_operator(profile, theta, p, lambda, d)?;
    tridiag::eigenvalue(&diag, &off, 0)
}
