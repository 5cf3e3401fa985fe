//! Symmetry and symmetry-breaking boundary curves, and the point classifiers.

mod sweep;

pub use sweep::{sweep, Axis, AxisParam, Bindings, Boundaries, Family, GridSpec, SweepRow};

use serde::Serialize;

use crate::constants::{big_l, ln_c_ckn_star, ln_sphere_factor, sobolev_star};
use crate::error::{Error, Result, Sign};
use crate::params::{
    a_crit, critical_exponent, lambda_of_a, theta_min, validate_ckn, validate_wlh, CknParams,
    WlhParams,
};
use crate::specfun::ln_gamma_unchecked;

/// `Θ(a, p, d)`: symmetry breaking holds for `θ < Θ`.
pub fn theta_big(a: f64, p: f64, d: f64) -> f64 {
    let bracket = (p + 2.0).powi(2) * (d * d + 4.0 * a * a - 4.0 * a * (d - 2.0))
        - 4.0 * p * (p + 4.0) * (d - 1.0);
    (p - 2.0) / (32.0 * (d - 1.0) * p) * bracket
}

/// Linear-instability curve at `θ = 1`, `A(p)`. Diverges to `-∞` as `p → 2+`.
pub fn a_fs(p: f64, d: f64) -> f64 {
    let den = (p + 2.0) * (p - 2.0);
    if den <= 0.0 {
        return f64::NEG_INFINITY;
    }
    a_crit(d) - 2.0 * ((d - 1.0) / den).sqrt()
}

/// `a₋(p) = a_c - 2(d-1)/(p+2)`.
pub fn a_minus(p: f64, d: f64) -> f64 {
    a_crit(d) - 2.0 * (d - 1.0) / (p + 2.0)
}

fn abar_radicand(theta: f64, p: f64) -> f64 {
    2.0 * p * theta / (p - 2.0) - 1.0
}

/// Linear-instability curve `ā(θ, p)`: symmetry breaking for `a < ā`.
pub fn a_bar(theta: f64, p: f64, d: f64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::Domain {
            formula: "a_bar",
            detail: format!("needs p > 2, got {p}"),
        });
    }
    let r = abar_radicand(theta, p);
    if r < 0.0 {
        return Err(Error::Domain {
            formula: "a_bar",
            detail: format!("2 p theta / (p - 2) = {} < 1", r + 1.0),
        });
    }
    Ok(a_crit(d) - 2.0 * (d - 1.0).sqrt() / (p + 2.0) * r.sqrt())
}

/// `Λ̲(θ, p) = (a_c - ā(θ, p))²`.
pub fn lambda_underline(theta: f64, p: f64, d: f64) -> Result<f64> {
    let ab = a_bar(theta, p, d)?;
    Ok(lambda_of_a(d, ab))
}

/// `ã(γ) = a_c - √((d-1)(4γ-1)) / 2`.
pub fn a_tilde(gamma: f64, d: f64) -> f64 {
    a_crit(d) - 0.5 * ((d - 1.0) * (4.0 * gamma - 1.0)).sqrt()
}

/// `Λ̃(γ) = (d-1)(4γ-1)/4`.
pub fn lambda_tilde(gamma: f64, d: f64) -> f64 {
    0.25 * (d - 1.0) * (4.0 * gamma - 1.0)
}

fn ln_lambda_sb(gamma: f64, d: f64) -> f64 {
    let k = 4.0 * gamma - 1.0;
    let pi_ln = std::f64::consts::PI.ln();
    (k / 8.0).ln() + 1.0 + ((k - d) * pi_ln - 16f64.ln()) / k
        + 4.0 * gamma / k * (d / gamma).ln()
        + 2.0 / k * ln_gamma_unchecked(0.5 * d)
}

/// `Λ_SB(γ, d)`: above it the radial WLH constant is below the log-Sobolev one.
pub fn lambda_sb(gamma: f64, d: f64) -> Result<f64> {
    if !(gamma > 0.25) {
        return Err(Error::Domain {
            formula: "lambda_sb",
            detail: format!("needs gamma > 1/4, got {gamma}"),
        });
    }
    Ok(ln_lambda_sb(gamma, d).exp())
}

/// Upper end of the γ range searched by [`gamma_sb_interval`].
pub const GAMMA_SB_MAX: f64 = 1000.0;
const GAMMA_SCAN_POINTS: usize = 4000;

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The γ-interval where `Λ_SB(γ,d) > Λ̃(γ)`, i.e. where linear instability
/// gives the better breaking threshold. `None` when `Λ_SB < Λ̃` throughout.
pub fn gamma_sb_interval(d: u32) -> Option<(f64, f64)> {
    let df = d as f64;
    if d < 2 {
        return None;
    }
    let lo = if d == 2 { 0.5 } else { 0.25 * df };
    let f = |g: f64| ln_lambda_sb(g, df) - lambda_tilde(g, df).ln();
    // log-spaced scan, then bisection on each sign change
    let start = if d == 2 { lo * (1.0 + 1e-12) } else { lo };
    let ratio = (GAMMA_SB_MAX / start).ln();
    let node = |i: usize| start * (ratio * i as f64 / GAMMA_SCAN_POINTS as f64).exp();
    let mut roots = Vec::new();
    let mut prev = (start, f(start));
    for i in 1..=GAMMA_SCAN_POINTS {
        let g = node(i);
        let v = f(g);
        if (v > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(prev.0, g, f, 1e-13 * g.max(1.0)));
        }
        prev = (g, v);
    }
    let first_positive = f(start) > 0.0;
    let last_positive = prev.1 > 0.0;
    match (roots.first(), roots.last()) {
        (None, _) => {
            if first_positive {
                Some((lo, GAMMA_SB_MAX))
            } else {
                None
            }
        }
        (Some(&r0), Some(&r1)) => {
            let left = if first_positive { lo } else { r0 };
            let right = if last_positive { GAMMA_SB_MAX } else { r1 };
            Some((left, right))
        }
        _ => unreachable!(),
    }
}

const A0_BRACKET_EPS: f64 = 1e-12;
const A0_TOL: f64 = 1e-13;

struct SchwarzSystem {
    a_c: f64,
    theta: f64,
    vartheta: f64,
    ln_k: f64,
    exponent: f64,
}

impl SchwarzSystem {
    fn new(theta: f64, p: f64, d: f64) -> Result<Self> {
        let a_c = a_crit(d);
        let vartheta = theta_min(d, p)?;
        // Euclidean radial constant C*(θ,p,1) on the full-measure cylinder
        let ln_cstar = ln_c_ckn_star(theta, p, 1.0)? + ln_sphere_factor(p, d);
        let ln_k = vartheta * sobolev_star(d)?.log_value - ln_cstar;
        Ok(Self {
            a_c,
            theta,
            vartheta,
            ln_k,
            exponent: 2.0 * theta - 2.0 / d * vartheta,
        })
    }

    fn t1(&self, a: f64) -> f64 {
        let x = self.a_c - a;
        (self.theta * self.a_c * self.a_c - x * x) / (1.0 - self.theta)
    }

    /// `ln` of the two sides of the a-priori bound, differenced at `t = T1(a)`.
    fn psi(&self, a: f64) -> f64 {
        let x = self.a_c - a;
        let t1 = self.t1(a).max(0.0);
        self.theta * (t1 + x * x).ln()
            - (self.ln_k + self.exponent * x.ln() + self.vartheta * (t1 + self.a_c * self.a_c).ln())
    }
}

/// Left end `a₀(θ, p)` of the range `[a₀, a_c)` where Schwarz symmetrization
/// proves radial symmetry (`d >= 3`).
pub fn schwarz_a0(theta: f64, p: f64, d: u32) -> Result<f64> {
    let df = d as f64;
    if d < 3 {
        return Err(Error::InvalidParameter(format!(
            "schwarz_a0 needs d >= 3, got {d}"
        )));
    }
    if !(p > 2.0 && p < critical_exponent(df)) {
        return Err(Error::InvalidParameter(format!(
            "schwarz_a0 needs 2 < p < 2*, got {p}"
        )));
    }
    let vartheta = theta_min(df, p)?;
    if theta < vartheta - 1e-14 || theta > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "schwarz_a0 needs theta in [{vartheta}, 1], got {theta}"
        )));
    }
    if theta == 1.0 {
        return Ok(0.0);
    }
    let sys = SchwarzSystem::new(theta, p, df)?;
    let a_c = sys.a_c;
    let lo = a_c * (1.0 - theta.sqrt()) + A0_BRACKET_EPS;
    let hi = a_c - A0_BRACKET_EPS;
    let (f_lo, f_hi) = (sys.psi(lo), sys.psi(hi));
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoRoot {
            what: "schwarz_a0",
            sign: if f_lo > 0.0 {
                Sign::Positive
            } else {
                Sign::Negative
            },
        });
    }
    Ok(bisect(lo, hi, |a| sys.psi(a), A0_TOL))
}

/// Lower end of the feasible bracket for [`schwarz_a0`].
pub fn schwarz_feasible_lower(theta: f64, d: f64) -> f64 {
    a_crit(d) * (1.0 - theta.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SymmetricProven,
    BrokenProven,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mechanism {
    SchwarzCurve,
    LinearInstability,
    GnComparison,
    LsComparison,
}

impl Mechanism {
    pub fn proves_breaking(self) -> bool {
        !matches!(self, Mechanism::SchwarzCurve)
    }
}

/// Signed distance to one boundary. `margin > 0` (or `>= 0` for the Schwarz
/// curve) means the mechanism's conclusion holds at the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub mechanism: Mechanism,
    pub boundary: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub verdict: Verdict,
    pub mechanisms: Vec<Mechanism>,
    pub margins: Vec<Margin>,
}

impl RegionVerdict {
    fn assemble(margins: Vec<Margin>) -> Result<Self> {
        let mechanisms: Vec<Mechanism> = margins
            .iter()
            .filter(|m| {
                if m.mechanism.proves_breaking() {
                    m.margin > 0.0
                } else {
                    m.margin >= 0.0
                }
            })
            .map(|m| m.mechanism)
            .collect();
        let broken = mechanisms.iter().any(|m| m.proves_breaking());
        let symmetric = mechanisms.contains(&Mechanism::SchwarzCurve);
        let verdict = match (broken, symmetric) {
            (true, true) => {
                return Err(Error::Inconsistent(format!(
                    "both symmetry and breaking proven: {margins:?}"
                )))
            }
            (true, false) => Verdict::BrokenProven,
            (false, true) => Verdict::SymmetricProven,
            (false, false) => Verdict::Undetermined,
        };
        Ok(Self {
            verdict,
            mechanisms,
            margins,
        })
    }

    pub fn margin(&self, mechanism: Mechanism) -> Option<&Margin> {
        self.margins.iter().find(|m| m.mechanism == mechanism)
    }
}

/// Tolerance for recognising the corner point `θ = ϑ(p,d)`, `a = a₋(p)`.
pub const CORNER_TOL: f64 = 1e-9;

/// Schwarz boundary used by the classifier; a sign-definite system means every
/// feasible `a` satisfies both conditions.
fn schwarz_boundary(theta: f64, p: f64, d: u32) -> Result<f64> {
    match schwarz_a0(theta, p, d) {
        Err(Error::NoRoot {
            sign: Sign::Positive,
            ..
        }) => Ok(schwarz_feasible_lower(theta, d as f64)),
        other => other,
    }
}

pub fn classify_ckn(theta: f64, p: f64, a: f64, d: u32) -> Result<RegionVerdict> {
    let params = CknParams::from_a(d, p, theta, a)?;
    validate_ckn(&params).into_result()?;
    let df = d as f64;
    if d < 2 || !(p > 2.0 && p < critical_exponent(df)) {
        return RegionVerdict::assemble(Vec::new());
    }
    let mut margins = Vec::new();

    let ab = a_bar(theta, p, df)?;
    margins.push(Margin {
        mechanism: Mechanism::LinearInstability,
        boundary: ab,
        margin: ab - a,
    });

    if d >= 3 {
        let a0 = schwarz_boundary(theta, p, d)?;
        margins.push(Margin {
            mechanism: Mechanism::SchwarzCurve,
            boundary: a0,
            margin: a - a0,
        });
    }

    let vt = theta_min(df, p)?;
    let am = a_minus(p, df);
    if (theta - vt).abs() <= CORNER_TOL && (a - am).abs() <= CORNER_TOL {
        let l = big_l(p, df)?.value;
        margins.push(Margin {
            mechanism: Mechanism::GnComparison,
            boundary: 1.0,
            margin: 1.0 - l,
        });
    }
    RegionVerdict::assemble(margins)
}

pub fn classify_wlh(gamma: f64, a: f64, d: u32) -> Result<RegionVerdict> {
    let params = WlhParams::from_a(d, gamma, a);
    validate_wlh(&params).into_result()?;
    if d < 2 {
        return RegionVerdict::assemble(Vec::new());
    }
    let df = d as f64;
    let lam = params.lambda;
    let lt = lambda_tilde(gamma, df);
    let mut margins = vec![Margin {
        mechanism: Mechanism::LinearInstability,
        boundary: lt,
        margin: lam - lt,
    }];
    if gamma > 0.25 {
        let lsb = lambda_sb(gamma, df)?;
        margins.push(Margin {
            mechanism: Mechanism::LsComparison,
            boundary: lsb,
            margin: lam - lsb,
        });
    }
    RegionVerdict::assemble(margins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_big_boundaries() {
        for d in [2.0, 3.0, 5.0] {
            for p in [2.2, 3.0, 3.9] {
                if p >= critical_exponent(d) {
                    continue;
                }
                let vt = theta_min(d, p).unwrap();
                assert!((theta_big(a_minus(p, d), p, d) - vt).abs() < 1e-12);
                assert!((theta_big(a_fs(p, d), p, d) - 1.0).abs() < 1e-12);
            }
        }
        assert!(theta_big(-10.0, 4.0, 3.0) > 1.0);
    }

    #[test]
    fn curve_examples() {
        assert!((a_fs(4.0, 2.0) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((a_fs(4.0, 5.0) - 0.345_299_461_620_748).abs() < 1e-12);
        assert_eq!(a_fs(2.0, 3.0), f64::NEG_INFINITY);
        assert!(a_fs(2.0 + 1e-12, 3.0) < -1e5);
        assert!((a_minus(4.0, 2.0) + 1.0 / 3.0).abs() < 1e-15);
        assert!((a_minus(2.0, 3.0) + 0.5).abs() < 1e-15);
        assert!((a_bar(1.0, 4.0, 2.0).unwrap() + 0.577_350_269_189_625_8).abs() < 1e-12);
        assert!(a_bar(0.01, 4.0, 2.0).is_err());
    }

    #[test]
    fn lambda_underline_examples() {
        assert!((lambda_underline(1.0, 4.0, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let (p, d) = (3.0, 4.0);
        let vt = theta_min(d, p).unwrap();
        let want = (2.0 * (d - 1.0) / (p + 2.0)).powi(2);
        assert!((lambda_underline(vt, p, d).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(a_tilde(0.25, 4.0), 1.0);
        assert_eq!(lambda_tilde(0.25, 4.0), 0.0);
        assert!((a_tilde(1.0, 2.0) + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((lambda_tilde(1.0, 2.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lambda_sb_examples() {
        // 40-digit evaluation of the closed form
        assert!((lambda_sb(1.0, 2.0).unwrap() - 1.492_940_067_775_133).abs() < 1e-12);
        let g = 0.621_414_058_319_692_8;
        let r = lambda_sb(g, 2.0).unwrap() / lambda_tilde(g, 2.0);
        assert!((r - 1.0).abs() < 1e-10);
        let g6 = 6.0 / 4.0 + 1.0;
        assert!(lambda_sb(g6, 6.0).unwrap() < lambda_tilde(g6, 6.0));
        assert!(lambda_sb(0.25, 2.0).is_err());
    }

    #[test]
    fn gamma_sb_intervals() {
        let (a, b) = gamma_sb_interval(2).unwrap();
        assert!((a / 0.621414 - 1.0).abs() < 1e-4 && (b / 6.69625 - 1.0).abs() < 1e-4);
        let (a, b) = gamma_sb_interval(3).unwrap();
        assert!((a / 0.937725 - 1.0).abs() < 1e-4 && (b / 4.14851 - 1.0).abs() < 1e-4);
        assert_eq!(gamma_sb_interval(5), None);
        for d in 2..=4 {
            let (a, b) = gamma_sb_interval(d).unwrap();
            for g in [a, b] {
                let lt = lambda_tilde(g, d as f64);
                assert!((lambda_sb(g, d as f64).unwrap() - lt).abs() / lt < 1e-7);
            }
        }
    }

    #[test]
    fn schwarz_a0_limits() {
        let near_one = schwarz_a0(1.0 - 1e-3, 2.5, 5).unwrap();
        assert!(near_one.abs() < 0.05, "{near_one}");
        let vt = theta_min(5.0, 2.1).unwrap();
        let left = schwarz_a0(vt, 2.1, 5).unwrap();
        assert!(left > 1.0 && left < 1.5, "{left}");
        assert!(schwarz_a0(0.8, 2.5, 2).is_err());
        assert_eq!(schwarz_a0(1.0, 2.5, 5).unwrap(), 0.0);
    }

    #[test]
    fn schwarz_a0_regression() {
        // frozen from a 200-step mpmath bisection of the same system
        let a0 = schwarz_a0(0.8, 2.5, 5).unwrap();
        assert!((a0 - 0.191_413_463_715_177_2).abs() < 1e-9, "{a0}");
    }

    #[test]
    fn classify_ckn_examples() {
        let v = classify_ckn(1.0, 4.0, -1.0, 2).unwrap();
        assert_eq!(v.verdict, Verdict::BrokenProven);
        assert_eq!(v.mechanisms, vec![Mechanism::LinearInstability]);
        let m = v.margin(Mechanism::LinearInstability).unwrap();
        assert!((m.boundary - a_fs(4.0, 2.0)).abs() < 1e-12);
        assert!((m.margin - 0.422_649_730_810_374_2).abs() < 1e-12);

        let a0 = schwarz_a0(0.9, 2.5, 5).unwrap();
        let v = classify_ckn(0.9, 2.5, 1.45, 5).unwrap();
        assert_eq!(1.45 >= a0, v.verdict == Verdict::SymmetricProven);

        let p = 2.05;
        let vt = theta_min(3.0, p).unwrap();
        let v = classify_ckn(vt, p, a_minus(p, 3.0), 3).unwrap();
        assert_eq!(v.verdict, Verdict::BrokenProven);
        assert!(v.mechanisms.contains(&Mechanism::GnComparison));
    }

    #[test]
    fn classify_ckn_rejects_inadmissible() {
        assert!(classify_ckn(0.1, 4.0, -1.0, 2).is_err());
        assert!(classify_ckn(0.9, 3.0, 0.6, 3).is_err());
    }

    #[test]
    fn classify_wlh_examples() {
        let v = classify_wlh(1.0, -2.0, 2).unwrap();
        assert_eq!(v.verdict, Verdict::BrokenProven);
        assert_eq!(
            v.mechanisms,
            vec![Mechanism::LinearInstability, Mechanism::LsComparison]
        );
        let v = classify_wlh(1.0, -1.0, 2).unwrap();
        assert_eq!(v.mechanisms, vec![Mechanism::LinearInstability]);
        let v = classify_wlh(1.0, -0.5, 2).unwrap();
        assert_eq!(v.verdict, Verdict::Undetermined);
        assert!(v.mechanisms.is_empty());
        assert!(classify_wlh(0.5, -1.0, 2).is_err());
    }
}
