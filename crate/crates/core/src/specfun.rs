//! Log-gamma and the half-integer gamma ratio.
//!
//! `ln Γ` uses the Stirling series with fixed Bernoulli coefficients for
//! `x >= 10` and the upward recurrence below that. Every closed-form constant
//! in the crate is assembled from these in log space.

use crate::error::{invalid, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_MIN: f64 = 10.0;

/// Tail `Σ c_k / x^{2k-1}` of the Stirling series.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("ln_gamma needs finite x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_MIN {
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x);
    }
    // Γ(x) = Γ(x + n) / (x (x+1) ... (x+n-1))
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_unchecked(shifted) - prod.ln()
}

/// `ln (Γ(z + 1/2) / Γ(z))`, free of the cancellation in `ln Γ(z+1/2) - ln Γ(z)`.
pub fn ln_gamma_half_ratio(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return invalid(format!("gamma_half_ratio needs finite z > 0, got {z}"));
    }
    if z > 1e8 {
        // √z (1 - 1/(8z) + 1/(128z²) + 5/(1024z³))
        let u = 1.0 / z;
        let series = 1.0 + u * (-1.0 / 8.0 + u * (1.0 / 128.0 + u * 5.0 / 1024.0));
        return Ok(0.5 * z.ln() + series.ln());
    }
    if z < STIRLING_MIN {
        return Ok(ln_gamma_unchecked(z + 0.5) - ln_gamma_unchecked(z));
    }
    // (z)ln(z+1/2) - (z-1/2)ln z - 1/2 = ln z / 2 + [z ln(1 + 1/(2z)) - 1/2]
    let u = 0.5 / z;
    let bracket = z * u.ln_1p() - 0.5;
    Ok(0.5 * z.ln() + bracket + stirling_tail(z + 0.5) - stirling_tail(z))
}

/// `Γ(z + 1/2) / Γ(z)`.
pub fn gamma_half_ratio(z: f64) -> Result<f64> {
    ln_gamma_half_ratio(z).map(f64::exp)
}

/// Area of the unit sphere `S^{n}` embedded in `R^{n+1}`, as a log.
pub fn ln_sphere_area(n: f64) -> f64 {
    let k = 0.5 * (n + 1.0);
    std::f64::consts::LN_2 + k * std::f64::consts::PI.ln() - ln_gamma_unchecked(k)
}
