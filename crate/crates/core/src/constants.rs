//! Closed-form optimal constants among radial (s-symmetric) functions, plus
//! the Euclidean comparison constants used by the symmetry-breaking tests.
//!
//! All values are assembled as logarithms and exponentiated once; the Γ-ratio
//! factors overflow near `p = 2` otherwise.
//!
//! # Measure conventions
//!
//! The radial CKN constant is the constant of the cylinder inequality when the
//! sphere carries its normalized (probability) measure; it does not depend on
//! `d`. Comparing it with a constant of `R^d` (Sobolev, Gagliardo-Nirenberg)
//! requires the factor `|S^{d-1}|^{2/p - 1}`, see [`ln_sphere_factor`]. The
//! radial WLH constant is already expressed with the full measure.
//!
//! # The Gaussian quotient `h(p, d)`
//!
//! For `g(x) = (2π)^{-d/4} exp(-|x|²/4)`:
//!
//! * `‖g‖₂² = (2π)^{-d/2} ∫ exp(-|x|²/2) dx = 1`,
//! * `‖∇g‖₂² = ∫ |x|²/4 g² dx = d/4` (second moment of a standard normal),
//! * `‖g‖_p^p = (2π)^{-dp/4} (4π/p)^{d/2}`, so `‖g‖_p² = (2π)^{-d/2} (4π/p)^{d/p}`.
//!
//! Hence `ln h = ϑ ln(d/4) + (d/2) ln(2π) - (d/p) ln(4π/p)` with `ϑ = ϑ(d,p)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{critical_exponent, theta_min};
use crate::regions::a_minus;
use crate::specfun::{ln_gamma_half_ratio, ln_gamma_unchecked, ln_sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulaId {
    CknStar,
    WlhStar,
    WlhStarQuarter,
    SobolevStar,
    LogSobolev,
    GaussianH,
    BigL,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantValue {
    pub value: f64,
    pub log_value: f64,
    pub formula_id: FormulaId,
}

impl ConstantValue {
    fn from_log(log_value: f64, formula_id: FormulaId) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            formula_id,
        }
    }
}

fn domain(formula: &'static str, detail: String) -> Error {
    Error::Domain { formula, detail }
}

/// `ln |S^{d-1}|^{2/p - 1}`: converts the normalized-measure cylinder constant
/// to the full-measure one.
pub fn ln_sphere_factor(p: f64, d: f64) -> f64 {
    (2.0 / p - 1.0) * ln_sphere_area(d - 1.0)
}

pub(crate) fn ln_c_ckn_star(theta: f64, p: f64, lambda: f64) -> Result<f64> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(domain("c_ckn_star", format!("needs 2 < p < inf, got p = {p}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain("c_ckn_star", format!("needs 0 < theta <= 1, got {theta}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("c_ckn_star", format!("needs lambda > 0, got {lambda}")));
    }
    let den = 2.0 + (2.0 * theta - 1.0) * p;
    if !(den > 0.0) {
        return Err(domain(
            "c_ckn_star",
            format!("2 + (2 theta - 1) p = {den} is not positive"),
        ));
    }
    let q = p - 2.0;
    let f1 = q / (2.0 * p) * (lambda.ln() + 2.0 * q.ln() - den.ln());
    let f2 = theta * (den.ln() - (2.0 * p * theta * lambda).ln());
    let f3 = (6.0 - p) / (2.0 * p) * (4.0 / (p + 2.0)).ln();
    let f4 = q / p * (ln_gamma_half_ratio(2.0 / q)? - 0.5 * PI.ln());
    Ok(f1 + f2 + f3 + f4)
}

/// Optimal CKN constant among radial functions, `C*_CKN(θ, p, Λ)`.
pub fn c_ckn_star(theta: f64, p: f64, lambda: f64) -> Result<ConstantValue> {
    ln_c_ckn_star(theta, p, lambda).map(|l| ConstantValue::from_log(l, FormulaId::CknStar))
}

/// Optimal WLH constant among radial functions, `C*_WLH(γ, Λ)` in dimension `d`.
pub fn c_wlh_star(gamma: f64, lambda: f64, d: f64) -> Result<ConstantValue> {
    if !(gamma >= 0.25) {
        return Err(domain("c_wlh_star", format!("needs gamma >= 1/4, got {gamma}")));
    }
    if !(lambda > 0.0) {
        return Err(domain("c_wlh_star", format!("needs lambda > 0, got {lambda}")));
    }
    let lg = ln_gamma_unchecked(0.5 * d);
    let ln_base = std::f64::consts::LN_2 + (d + 1.0) * PI.ln() + 1.0;
    if gamma == 0.25 {
        return Ok(ConstantValue::from_log(
            2.0 * lg - ln_base,
            FormulaId::WlhStarQuarter,
        ));
    }
    let k = 4.0 * gamma - 1.0;
    let log = -(4.0 * gamma).ln() + lg / (2.0 * gamma) - ln_base / (4.0 * gamma)
        + k / (4.0 * gamma) * (k.ln() - lambda.ln());
    Ok(ConstantValue::from_log(log, FormulaId::WlhStar))
}

/// Sharp Sobolev constant in `‖u‖²_{2*} <= S_*(d) ‖∇u‖²₂`.
pub fn sobolev_star(d: f64) -> Result<ConstantValue> {
    if !(d >= 3.0) {
        return Err(domain("sobolev_star", format!("needs d >= 3, got {d}")));
    }
    let log = -(PI * d * (d - 2.0)).ln()
        + 2.0 / d * (ln_gamma_unchecked(d) - ln_gamma_unchecked(0.5 * d));
    Ok(ConstantValue::from_log(log, FormulaId::SobolevStar))
}

/// Euclidean logarithmic Sobolev constant `2 / (π d e)`.
pub fn c_ls(d: f64) -> ConstantValue {
    ConstantValue::from_log(
        std::f64::consts::LN_2 - (PI * d).ln() - 1.0,
        FormulaId::LogSobolev,
    )
}

/// Gagliardo-Nirenberg quotient of the standard Gaussian; an upper bound for `1/C_GN(p)`.
pub fn gaussian_h(p: f64, d: f64) -> Result<ConstantValue> {
    if !(p >= 2.0 && p < critical_exponent(d)) {
        return Err(domain("gaussian_h", format!("needs 2 <= p < 2*, got p = {p}")));
    }
    let th = theta_min(d, p)?;
    let log = th * (0.25 * d).ln() + 0.5 * d * (2.0 * PI).ln() - d / p * (4.0 * PI / p).ln();
    Ok(ConstantValue::from_log(log, FormulaId::GaussianH))
}

pub(crate) fn ln_big_l(p: f64, d: f64) -> Result<f64> {
    if !(d >= 2.0) {
        return Err(domain("big_l", format!("needs d >= 2, got {d}")));
    }
    if !(p > 2.0 && p < critical_exponent(d)) {
        return Err(domain("big_l", format!("needs 2 < p < 2*, got p = {p}")));
    }
    let th = theta_min(d, p)?;
    let lam = (crate::params::a_crit(d) - a_minus(p, d)).powi(2);
    Ok(gaussian_h(p, d)?.log_value + ln_c_ckn_star(th, p, lam)? + ln_sphere_factor(p, d))
}

/// `L(p, d) = h(p, d) C*_CKN(ϑ, p, Λ(a₋(p)))`, with both constants on `R^d`.
/// `L < 1` certifies symmetry breaking at `θ = ϑ(p,d)`, `a = a₋(p)`.
pub fn big_l(p: f64, d: f64) -> Result<ConstantValue> {
    ln_big_l(p, d).map(|l| ConstantValue::from_log(l, FormulaId::BigL))
}

/// Step used by [`ell`].
pub const ELL_STEP: f64 = 1e-4;

/// `ℓ(d) = lim_{p→2+} ∂L/∂p`. Since `L → 1` this equals the derivative of
/// `ln L`, computed from one-sided quotients with two Richardson levels.
pub fn ell(d: f64) -> Result<f64> {
    let q = |delta: f64| ln_big_l(2.0 + delta, d).map(|l| l / delta);
    let h = ELL_STEP;
    let (d1, d2, d3) = (q(h)?, q(h / 2.0)?, q(h / 4.0)?);
    let r1 = 2.0 * d2 - d1;
    let r2 = 2.0 * d3 - d2;
    Ok((4.0 * r2 - r1) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn ckn_star_theta1_p4() {
        let c = c_ckn_star(1.0, 4.0, 1.0).unwrap();
        assert!(rel(c.value, 3f64.sqrt() / 4.0) < 1e-14);
        assert!(rel(c.value, c.log_value.exp()) < 1e-15);
        assert_eq!(c.formula_id, FormulaId::CknStar);
    }

    #[test]
    fn ckn_star_lambda_power() {
        let c1 = c_ckn_star(1.0, 4.0, 1.0).unwrap().value;
        let c4 = c_ckn_star(1.0, 4.0, 4.0).unwrap().value;
        assert!(rel(c4, c1 * 4f64.powf(0.25 - 1.0)) < 1e-13);
    }

    #[test]
    fn ckn_star_hardy_limit() {
        let c = c_ckn_star(0.7, 2.0 + 1e-8, 2.0).unwrap().value;
        assert!(rel(c, 2f64.powf(-0.7)) < 1e-6);
    }

    #[test]
    fn ckn_star_domain_errors() {
        // 2 + (2θ-1)p <= 0 for θ = 0.1, p = 3
        assert!(matches!(
            c_ckn_star(0.1, 3.0, 1.0),
            Err(Error::Domain { formula: "c_ckn_star", .. })
        ));
        assert!(c_ckn_star(1.0, 2.0, 1.0).is_err());
        assert!(c_ckn_star(1.0, 4.0, 0.0).is_err());
    }

    #[test]
    fn wlh_star_values() {
        let q = c_wlh_star(0.25, 3.0, 1.0).unwrap();
        assert!(rel(q.value, 1.0 / (2.0 * PI * std::f64::consts::E)) < 1e-14);
        assert_eq!(q.formula_id, FormulaId::WlhStarQuarter);
        // arithmetic oracle, evaluated independently with 40-digit arithmetic
        let v = c_wlh_star(0.75, 1.0, 3.0).unwrap().value;
        assert!(rel(v, 0.060_342_140_733_049_89) < 1e-13);
        let near = c_wlh_star(0.25 + 1e-9, 7.0, 1.0).unwrap().value;
        assert!(rel(near, q.value) < 1e-6);
        assert!(c_wlh_star(0.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn log_sobolev_values() {
        assert!(rel(c_ls(1.0).value, 0.234_199_326_097_276_67) < 1e-12);
        assert!(rel(c_ls(2.0).value, 0.117_099_663_048_638_34) < 1e-12);
        assert!(rel(c_ls(3.0).value, 0.078_066_442_032_425_56) < 1e-12);
    }

    #[test]
    fn sobolev_matches_critical_limit() {
        for d in [3.0, 4.0, 5.0, 7.0] {
            let ps = critical_exponent(d);
            let s = sobolev_star(d).unwrap().value;
            let p = ps - 1e-9;
            let ac = 0.5 * (d - 2.0);
            let lim = (ln_c_ckn_star(1.0, p, ac * ac).unwrap() + ln_sphere_factor(p, d)).exp();
            assert!(rel(lim, s) < 1e-7, "d={d}: {lim} vs {s}");
        }
        assert!(sobolev_star(2.0).is_err());
    }

    #[test]
    fn sobolev_d3_classical() {
        // S_*(3) = (4 / (3 (2π²)^{2/3}))... equivalently 1/(3 (π/2)^{4/3})
        let want = 1.0 / (3.0 * (PI / 2.0).powf(4.0 / 3.0));
        assert!(rel(sobolev_star(3.0).unwrap().value, want) < 1e-13);
    }

    #[test]
    fn gaussian_h_at_two() {
        for d in [2.0, 3.0, 7.0] {
            assert!((gaussian_h(2.0, d).unwrap().value - 1.0).abs() < 1e-14);
        }
        assert!(gaussian_h(6.0, 3.0).is_err());
        assert!(gaussian_h(1.5, 3.0).is_err());
    }

    #[test]
    fn big_l_near_two() {
        for d in 2..=10 {
            let l = big_l(2.0 + 1e-6, d as f64).unwrap().value;
            assert!((l - 1.0).abs() < 1e-4, "d={d}: {l}");
        }
        assert!(big_l(2.1, 3.0).unwrap().value < 1.0);
    }

    #[test]
    fn big_l_ordering_in_d() {
        // L is closer to 1 for larger d near p = 2 because ℓ(d) increases
        let l3 = big_l(2.05, 3.0).unwrap().value;
        let l10 = big_l(2.05, 10.0).unwrap().value;
        assert!(l3 < 1.0 && l10 < 1.0);
        assert!(l3 < l10);
    }

    #[test]
    fn ell_values() {
        let l100 = ell(100.0).unwrap();
        assert!((l100 + 0.25 * 2f64.ln()).abs() < 0.02, "{l100}");
        let (l3, l4, l10) = (ell(3.0).unwrap(), ell(4.0).unwrap(), ell(10.0).unwrap());
        assert!(l3 < l4 && l4 < l10);
        assert!(l3 < 0.0);
        // independent mpmath differentiation of ln L at p = 2 + 1e-6
        assert!((ell(3.0).unwrap() + 0.193_146_737).abs() < 1e-5);
    }
}
