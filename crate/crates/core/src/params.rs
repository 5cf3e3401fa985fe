//! Parameter-domain arithmetic for the CKN and WLH families.
//!
//! `Λ = (a - a_c)²` is the canonical coordinate: every constructor converts
//! `a` to `Λ` immediately and keeps the `a < a_c` representative. Formulas take
//! the dimension as `f64` so limits in `d` reuse the same code path; the
//! parameter structs carry it as an integer.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// `a_c = (d - 2) / 2`.
pub fn a_crit(d: f64) -> f64 {
    0.5 * (d - 2.0)
}

/// `ϑ(d, p) = d (p - 2) / (2p)`, the smallest admissible interpolation exponent.
pub fn theta_min(d: f64, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return invalid(format!("theta_min needs p >= 2, got p = {p}"));
    }
    Ok(d * (p - 2.0) / (2.0 * p))
}

/// Critical Sobolev exponent `2* = 2d/(d-2)`, infinite for `d <= 2`.
pub fn critical_exponent(d: f64) -> f64 {
    if d > 2.0 {
        2.0 * d / (d - 2.0)
    } else {
        f64::INFINITY
    }
}

pub fn lambda_of_a(d: f64, a: f64) -> f64 {
    let x = a - a_crit(d);
    x * x
}

/// Inverse of [`lambda_of_a`] on the `a < a_c` branch.
pub fn a_of_lambda(d: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return invalid(format!("lambda must be >= 0, got {lambda}"));
    }
    Ok(a_crit(d) - lambda.sqrt())
}

/// `b` such that `p = p(a, b)`.
pub fn b_of(d: f64, a: f64, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("b_of needs a finite p > 0, got {p}"));
    }
    Ok(a + d / p - a_crit(d))
}

/// `p(a, b) = 2d / (d - 2 + 2(b - a))`.
pub fn p_of(d: f64, a: f64, b: f64) -> Result<f64> {
    let den = d - 2.0 + 2.0 * (b - a);
    if !(den > 0.0) {
        return invalid(format!(
            "p(a,b) denominator d-2+2(b-a) = {den} is not positive"
        ));
    }
    Ok(2.0 * d / den)
}

/// Reason a parameter point is outside the admissible set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    DimensionTooSmall { d: u32 },
    NotBelowCritical { a: f64, a_c: f64 },
    BRange { b: f64, lower: f64, upper: f64, lower_open: bool },
    ThetaBelowMin { theta: f64, theta_min: f64 },
    ThetaAboveOne { theta: f64 },
    GammaBelowQuarterDim { gamma: f64, bound: f64 },
    GammaNotAboveHalf { gamma: f64 },
    NonFinite(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionTooSmall { d } => write!(f, "dimension d = {d} must be >= 1"),
            Violation::NotBelowCritical { a, a_c } => {
                write!(f, "a = {a} must be < a_c = {a_c}")
            }
            Violation::BRange {
                b,
                lower,
                upper,
                lower_open,
            } => {
                let lb = if *lower_open { "(" } else { "[" };
                write!(f, "b = {b} outside {lb}{lower}, {upper}]")
            }
            Violation::ThetaBelowMin { theta, theta_min } => {
                write!(f, "theta = {theta} < theta_min = {theta_min}")
            }
            Violation::ThetaAboveOne { theta } => write!(f, "theta = {theta} > 1"),
            Violation::GammaBelowQuarterDim { gamma, bound } => {
                write!(f, "gamma = {gamma} < d/4 = {bound}")
            }
            Violation::GammaNotAboveHalf { gamma } => {
                write!(f, "gamma = {gamma} must be > 1/2 when d = 2")
            }
            Violation::NonFinite(what) => write!(f, "{what} is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Admissibility {
    Accept,
    Reject(Violation),
}

impl Admissibility {
    pub fn is_accept(&self) -> bool {
        matches!(self, Admissibility::Accept)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Admissibility::Accept => Ok(()),
            Admissibility::Reject(v) => Err(Error::InvalidParameter(v.to_string())),
        }
    }
}

/// A point of the CKN family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CknParams {
    pub d: u32,
    pub p: f64,
    pub theta: f64,
    pub a: f64,
    pub lambda: f64,
    pub b: f64,
}

impl CknParams {
    /// Builds the point from the weights `(a, b)`; `p = p(a, b)`.
    pub fn from_ab(d: u32, a: f64, b: f64, theta: f64) -> Result<Self> {
        let df = d as f64;
        let p = p_of(df, a, b)?;
        Ok(Self {
            d,
            p,
            theta,
            a,
            lambda: lambda_of_a(df, a),
            b,
        })
    }

    /// Builds the point from `(p, Λ)` on the `a < a_c` branch.
    pub fn from_lambda(d: u32, p: f64, theta: f64, lambda: f64) -> Result<Self> {
        let df = d as f64;
        let a = a_of_lambda(df, lambda)?;
        let b = b_of(df, a, p)?;
        Ok(Self {
            d,
            p,
            theta,
            a,
            lambda,
            b,
        })
    }

    pub fn from_a(d: u32, p: f64, theta: f64, a: f64) -> Result<Self> {
        let df = d as f64;
        let b = b_of(df, a, p)?;
        Ok(Self {
            d,
            p,
            theta,
            a,
            lambda: lambda_of_a(df, a),
            b,
        })
    }

    pub fn a_c(&self) -> f64 {
        a_crit(self.d as f64)
    }

    /// `p = 2` and `p = 2*` are representable but carry no extremals.
    pub fn admissible_for_minimization(&self) -> bool {
        validate_ckn(self).is_accept()
            && self.p > 2.0
            && self.p < critical_exponent(self.d as f64)
            && self.theta > 0.0
    }
}

pub fn validate_ckn(params: &CknParams) -> Admissibility {
    use Violation::*;
    let CknParams {
        d, p, theta, a, b, ..
    } = *params;
    for (name, v) in [("p", p), ("theta", theta), ("a", a), ("b", b)] {
        if !v.is_finite() {
            return Admissibility::Reject(NonFinite(name));
        }
    }
    if d < 1 {
        return Admissibility::Reject(DimensionTooSmall { d });
    }
    let df = d as f64;
    let a_c = a_crit(df);
    if !(a < a_c) {
        return Admissibility::Reject(NotBelowCritical { a, a_c });
    }
    let (lower, upper, lower_open) = match d {
        1 => (a + 0.5, a + 1.0, true),
        2 => (a, a + 1.0, true),
        _ => (a, a + 1.0, false),
    };
    let below = if lower_open { b <= lower } else { b < lower };
    if below || b > upper {
        return Admissibility::Reject(BRange {
            b,
            lower,
            upper,
            lower_open,
        });
    }
    let tmin = match theta_min(df, p) {
        Ok(t) => t,
        Err(_) => {
            return Admissibility::Reject(BRange {
                b,
                lower,
                upper,
                lower_open,
            })
        }
    };
    // absorbs the rounding of ϑ when θ is set to exactly ϑ(d,p)
    if theta < tmin - 1e-14 * tmin.abs().max(1.0) {
        return Admissibility::Reject(ThetaBelowMin {
            theta,
            theta_min: tmin,
        });
    }
    if theta > 1.0 {
        return Admissibility::Reject(ThetaAboveOne { theta });
    }
    Admissibility::Accept
}

/// A point of the weighted logarithmic Hardy family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WlhParams {
    pub d: u32,
    pub gamma: f64,
    pub a: f64,
    pub lambda: f64,
}

impl WlhParams {
    pub fn from_a(d: u32, gamma: f64, a: f64) -> Self {
        Self {
            d,
            gamma,
            a,
            lambda: lambda_of_a(d as f64, a),
        }
    }

    pub fn from_lambda(d: u32, gamma: f64, lambda: f64) -> Result<Self> {
        Ok(Self {
            d,
            gamma,
            a: a_of_lambda(d as f64, lambda)?,
            lambda,
        })
    }
}

pub fn validate_wlh(params: &WlhParams) -> Admissibility {
    use Violation::*;
    let WlhParams { d, gamma, a, .. } = *params;
    if !gamma.is_finite() {
        return Admissibility::Reject(NonFinite("gamma"));
    }
    if !a.is_finite() {
        return Admissibility::Reject(NonFinite("a"));
    }
    if d < 1 {
        return Admissibility::Reject(DimensionTooSmall { d });
    }
    let df = d as f64;
    let a_c = a_crit(df);
    if !(a < a_c) {
        return Admissibility::Reject(NotBelowCritical { a, a_c });
    }
    let bound = df / 4.0;
    if gamma < bound {
        return Admissibility::Reject(GammaBelowQuarterDim { gamma, bound });
    }
    if d == 2 && gamma <= 0.5 {
        return Admissibility::Reject(GammaNotAboveHalf { gamma });
    }
    Admissibility::Accept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_min_examples() {
        assert_eq!(theta_min(3.0, 2.0).unwrap(), 0.0);
        assert_eq!(theta_min(3.0, 6.0).unwrap(), 1.0);
        assert!((theta_min(5.0, 2.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(theta_min(3.0, 1.9).is_err());
    }

    #[test]
    fn theta_min_endpoints() {
        for d in 3..40 {
            let df = d as f64;
            assert_eq!(theta_min(df, 2.0).unwrap(), 0.0);
            assert!((theta_min(df, critical_exponent(df)).unwrap() - 1.0).abs() < 1e-14, "d = {d}");
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_of_a(3.0, 0.5), 0.0);
        assert_eq!(lambda_of_a(2.0, -1.0), 1.0);
        assert_eq!(lambda_of_a(5.0, -0.5), 4.0);
        assert_eq!(a_of_lambda(3.0, 0.0).unwrap(), 0.5);
        assert_eq!(a_of_lambda(2.0, 1.0).unwrap(), -1.0);
        assert_eq!(a_of_lambda(5.0, 4.0).unwrap(), -0.5);
        assert!(a_of_lambda(3.0, -1e-3).is_err());
    }

    #[test]
    fn b_and_p_examples() {
        assert_eq!(b_of(3.0, 0.0, 6.0).unwrap(), 0.0);
        assert_eq!(b_of(3.0, 0.0, 2.0).unwrap(), 1.0);
        let p = p_of(4.0, -0.3, 0.2).unwrap();
        assert!((b_of(4.0, -0.3, p).unwrap() - 0.2).abs() < 1e-14);
        assert!(p_of(1.0, 0.0, 0.4).is_err());
    }

    #[test]
    fn validate_ckn_examples() {
        let ok = CknParams::from_ab(3, 0.0, 0.5, 0.8).unwrap();
        assert!((ok.p - 3.0).abs() < 1e-15);
        assert_eq!(validate_ckn(&ok), Admissibility::Accept);

        let low = CknParams::from_ab(3, 0.0, 0.5, 0.2).unwrap();
        assert!(matches!(
            validate_ckn(&low),
            Admissibility::Reject(Violation::ThetaBelowMin { .. })
        ));

        // b <= a + 1/2 in d = 1
        let d1 = CknParams {
            d: 1,
            p: 10.0,
            theta: 0.3,
            a: -1.0,
            lambda: lambda_of_a(1.0, -1.0),
            b: -0.6,
        };
        assert!(matches!(
            validate_ckn(&d1),
            Admissibility::Reject(Violation::BRange {
                lower_open: true,
                ..
            })
        ));
    }

    #[test]
    fn validate_ckn_a_at_critical() {
        let p = CknParams::from_ab(3, 0.5, 1.0, 0.9).unwrap();
        assert!(matches!(
            validate_ckn(&p),
            Admissibility::Reject(Violation::NotBelowCritical { .. })
        ));
    }

    #[test]
    fn boundary_exponents_not_minimizable() {
        let hardy = CknParams::from_ab(3, 0.0, 1.0, 0.5).unwrap();
        assert!(validate_ckn(&hardy).is_accept());
        assert!(!hardy.admissible_for_minimization());
        let sob = CknParams::from_ab(3, -0.5, -0.5, 1.0).unwrap();
        assert!(validate_ckn(&sob).is_accept());
        assert!(!sob.admissible_for_minimization());
    }

    #[test]
    fn validate_wlh_examples() {
        assert!(!validate_wlh(&WlhParams::from_a(2, 0.5, -1.0)).is_accept());
        assert!(validate_wlh(&WlhParams::from_a(4, 1.0, -1.0)).is_accept());
        assert!(validate_wlh(&WlhParams::from_a(1, 0.25, -1.0)).is_accept());
        assert!(!validate_wlh(&WlhParams::from_a(3, 0.7, -1.0)).is_accept());
    }
}
