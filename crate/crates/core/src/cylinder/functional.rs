//! Discrete cylinder functionals `F` (CKN) and `G` (WLH) and their gradients.
//!
//! Norms use the normalized measure on `S^{d-1}`; `G` adds the constant
//! `ln |S^{d-1}| / (2γ)` to report the full-measure value.

use crate::error::{invalid, Result};

use super::field::CylinderField;
use super::grid::CylinderGrid;

/// Quadratic pieces of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    /// `‖w‖₂²`
    pub mass: f64,
    /// `‖∂_s w‖₂²`
    pub kinetic_s: f64,
    /// `‖∇_ω w‖₂²`
    pub kinetic_phi: f64,
}

impl Energies {
    pub fn kinetic(&self) -> f64 {
        self.kinetic_s + self.kinetic_phi
    }

    /// `t = ‖∇w‖² / ‖w‖²`.
    pub fn t(&self) -> f64 {
        self.kinetic() / self.mass
    }

    pub fn angular_fraction(&self) -> f64 {
        let k = self.kinetic();
        if k > 0.0 {
            (self.kinetic_phi / k).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

/// Energies of `w`; when `grad` is given it receives `∂M`, `∂K` (stacked as
/// `grad[0]` and `grad[1]`).
pub(crate) fn energies(
    grid: &CylinderGrid,
    w: &[f64],
    mut grad: Option<(&mut [f64], &mut [f64])>,
) -> Energies {
    let n = grid.n_phi;
    let h = grid.h;
    let uw = &grid.unit_weights;
    let mut mass = 0.0;
    let mut ks = 0.0;
    for i in 0..grid.n_s {
        for j in 0..n {
            let v = w[i * n + j];
            let prev = if i > 0 { w[(i - 1) * n + j] } else { 0.0 };
            let next = if i + 1 < grid.n_s { w[(i + 1) * n + j] } else { 0.0 };
            mass += uw[j] * v * v;
            ks += uw[j] * (v - prev) * (v - prev);
            if let Some((gm, gk)) = grad.as_mut() {
                gm[i * n + j] = 2.0 * h * uw[j] * v;
                gk[i * n + j] = 2.0 * uw[j] / h * (2.0 * v - prev - next);
            }
        }
    }
    // closing edge to the right ghost
    for j in 0..n {
        let v = w[(grid.n_s - 1) * n + j];
        ks += uw[j] * v * v;
    }
    mass *= h;
    ks /= h;

    let mut kphi = 0.0;
    if n > 1 {
        let c = grid.to_modal(w);
        let mut lc = vec![0.0; c.len()];
        for i in 0..grid.n_s {
            for k in 1..n {
                let ck = c[i * n + k];
                kphi += grid.modes[k] * ck * ck;
                lc[i * n + k] = grid.modes[k] * ck;
            }
        }
        kphi *= h;
        if let Some((_, gk)) = grad.as_mut() {
            let back = grid.to_nodal(&lc);
            for i in 0..grid.n_s {
                for j in 0..n {
                    gk[i * n + j] += 2.0 * h * uw[j] * back[i * n + j];
                }
            }
        }
    }
    Energies {
        mass,
        kinetic_s: ks,
        kinetic_phi: kphi,
    }
}

/// `Σ ω |w|^p` and optionally its gradient.
fn lp_integral(grid: &CylinderGrid, w: &[f64], p: f64, grad: Option<&mut [f64]>) -> f64 {
    let n = grid.n_phi;
    let mut acc = 0.0;
    for (idx, &v) in w.iter().enumerate() {
        acc += grid.unit_weights[idx % n] * v.abs().powf(p);
    }
    if let Some(g) = grad {
        for (idx, &v) in w.iter().enumerate() {
            g[idx] = grid.h * p * grid.unit_weights[idx % n] * v.abs().powf(p - 2.0) * v;
        }
    }
    acc * grid.h
}

/// Floor on `w²` inside the logarithm.
const ENTROPY_FLOOR: f64 = 1e-300;

/// `Σ ω w² ln w²` and optionally its gradient.
fn entropy_integral(grid: &CylinderGrid, w: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = grid.n_phi;
    let mut acc = 0.0;
    for (idx, &v) in w.iter().enumerate() {
        let v2 = v * v;
        if v2 > 0.0 {
            acc += grid.unit_weights[idx % n] * v2 * v2.max(ENTROPY_FLOOR).ln();
        }
    }
    if let Some(g) = grad {
        for (idx, &v) in w.iter().enumerate() {
            let v2 = v * v;
            g[idx] = if v2 > 0.0 {
                2.0 * grid.h * grid.unit_weights[idx % n] * v * (v2.max(ENTROPY_FLOOR).ln() + 1.0)
            } else {
                0.0
            };
        }
    }
    acc * grid.h
}

/// A scale-invariant quotient on the cylinder, evaluated in log form.
pub trait CylinderFunctional: Sync {
    /// `ln` of the quotient; fills `grad` with its gradient when provided.
    fn log_value(&self, grid: &CylinderGrid, w: &[f64], grad: Option<&mut [f64]>) -> Result<LogEval>;

    /// Shift `c` of the preconditioner `-Δ + c` at the current energies.
    fn shift(&self, e: &Energies) -> f64;

    fn lambda(&self) -> f64;
}

/// Log value plus the energies it was built from.
#[derive(Debug, Clone, Copy)]
pub struct LogEval {
    pub log_value: f64,
    pub energies: Energies,
}

/// `F[w] = (‖∇w‖² + Λ‖w‖²) ‖w‖₂^{2(1-θ)/θ} / ‖w‖_p^{2/θ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CknFunctional {
    pub theta: f64,
    pub p: f64,
    pub lambda: f64,
}

impl CknFunctional {
    pub fn new(theta: f64, p: f64, lambda: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return invalid(format!("F needs 0 < theta <= 1, got {theta}"));
        }
        if !(p > 2.0) || !p.is_finite() {
            return invalid(format!("F needs finite p > 2, got {p}"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid(format!("F needs lambda > 0, got {lambda}"));
        }
        Ok(Self { theta, p, lambda })
    }
}

impl CylinderFunctional for CknFunctional {
    fn log_value(&self, grid: &CylinderGrid, w: &[f64], grad: Option<&mut [f64]>) -> Result<LogEval> {
        let Self { theta, p, lambda } = *self;
        let em = (1.0 - theta) / theta;
        let ep = 2.0 / (p * theta);
        let (e, pint) = match grad {
            None => (energies(grid, w, None), lp_integral(grid, w, p, None)),
            Some(g) => {
                let n = w.len();
                let mut gm = vec![0.0; n];
                let mut gp = vec![0.0; n];
                let e = energies(grid, w, Some((&mut gm, g)));
                let pint = lp_integral(grid, w, p, Some(&mut gp));
                if e.mass > 0.0 && pint > 0.0 {
                    let q = e.kinetic() + lambda * e.mass;
                    for i in 0..n {
                        g[i] = (g[i] + lambda * gm[i]) / q + em * gm[i] / e.mass - ep * gp[i] / pint;
                    }
                }
                (e, pint)
            }
        };
        if !(e.mass > 0.0) || !(pint > 0.0) {
            return Err(crate::error::Error::ZeroField);
        }
        let q = e.kinetic() + lambda * e.mass;
        Ok(LogEval {
            log_value: q.ln() + em * e.mass.ln() - ep * pint.ln(),
            energies: e,
        })
    }

    fn shift(&self, e: &Energies) -> f64 {
        ((1.0 - self.theta) * e.t() + self.lambda) / self.theta
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `G[w] = (‖∇w‖² + Λ‖w‖²)/‖w‖² · exp(-(1/2γ) ∫ (w²/‖w‖²) ln(w²/‖w‖²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlhFunctional {
    pub gamma: f64,
    pub lambda: f64,
}

impl WlhFunctional {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return invalid(format!("G needs finite gamma > 0, got {gamma}"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid(format!("G needs lambda > 0, got {lambda}"));
        }
        Ok(Self { gamma, lambda })
    }
}

impl CylinderFunctional for WlhFunctional {
    fn log_value(&self, grid: &CylinderGrid, w: &[f64], grad: Option<&mut [f64]>) -> Result<LogEval> {
        let Self { gamma, lambda } = *self;
        let c = 0.5 / gamma;
        let (e, ent) = match grad {
            None => (energies(grid, w, None), entropy_integral(grid, w, None)),
            Some(g) => {
                let n = w.len();
                let mut gm = vec![0.0; n];
                let mut ge = vec![0.0; n];
                let e = energies(grid, w, Some((&mut gm, g)));
                let ent = entropy_integral(grid, w, Some(&mut ge));
                if e.mass > 0.0 {
                    let q = e.kinetic() + lambda * e.mass;
                    let m = e.mass;
                    // E = ent/M - ln M; ∂E = ∂ent/M - ent ∂M/M² - ∂M/M
                    for i in 0..n {
                        let de = ge[i] / m - ent * gm[i] / (m * m) - gm[i] / m;
                        g[i] = (g[i] + lambda * gm[i]) / q - gm[i] / m - c * de;
                    }
                }
                (e, ent)
            }
        };
        if !(e.mass > 0.0) {
            return Err(crate::error::Error::ZeroField);
        }
        let q = e.kinetic() + lambda * e.mass;
        let entropy = ent / e.mass - e.mass.ln();
        Ok(LogEval {
            log_value: q.ln() - e.mass.ln() - c * entropy + c * grid.ln_sphere,
            energies: e,
        })
    }

    fn shift(&self, _e: &Energies) -> f64 {
        self.lambda
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn energies_of(w: &CylinderField) -> Energies {
    energies(&w.grid, &w.values, None)
}

/// `eval_F(w, θ, p, Λ)`.
pub fn eval_f(w: &CylinderField, theta: f64, p: f64, lambda: f64) -> Result<f64> {
    w.check_nonzero()?;
    let f = CknFunctional::new(theta, p, lambda)?;
    Ok(f.log_value(&w.grid, &w.values, None)?.log_value.exp())
}

/// `eval_G(w, γ, Λ)`.
pub fn eval_g(w: &CylinderField, gamma: f64, lambda: f64) -> Result<f64> {
    w.check_nonzero()?;
    let f = WlhFunctional::new(gamma, lambda)?;
    Ok(f.log_value(&w.grid, &w.values, None)?.log_value.exp())
}

/// Value and gradient of a functional (not its log).
pub fn value_and_gradient(
    functional: &dyn CylinderFunctional,
    w: &CylinderField,
) -> Result<(f64, Vec<f64>)> {
    w.check_nonzero()?;
    let mut g = vec![0.0; w.values.len()];
    let ev = functional.log_value(&w.grid, &w.values, Some(&mut g))?;
    let v = ev.log_value.exp();
    g.iter_mut().for_each(|x| *x *= v);
    Ok((v, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::grid::build_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn bump(grid: Arc<CylinderGrid>) -> CylinderField {
        CylinderField::from_fn(grid, |s, phi| {
            (1.0 / s.cosh()) * (1.0 + 0.3 * phi.cos() + 0.1 * (2.0 * phi).cos())
        })
        .unwrap()
    }

    #[test]
    fn homogeneity() {
        let g = Arc::new(build_grid(12.0, 128, 10, 3).unwrap());
        let w = bump(g.clone());
        let mut w2 = w.clone();
        w2.values.iter_mut().for_each(|v| *v *= 2.0);
        let a = eval_f(&w, 0.8, 3.0, 2.0).unwrap();
        let b = eval_f(&w2, 0.8, 3.0, 2.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        let mut w3 = w.clone();
        w3.values.iter_mut().for_each(|v| *v *= -0.37);
        let a = eval_g(&w, 1.0, 0.5).unwrap();
        let b = eval_g(&w3, 1.0, 0.5).unwrap();
        assert!((a - b).abs() < 1e-11 * a);
    }

    #[test]
    fn zero_field_rejected() {
        let g = Arc::new(build_grid(5.0, 32, 1, 2).unwrap());
        let z = CylinderField::new(g, vec![0.0; 32]).unwrap();
        assert!(matches!(eval_f(&z, 1.0, 4.0, 1.0), Err(crate::Error::ZeroField)));
        assert!(matches!(eval_g(&z, 1.0, 1.0), Err(crate::Error::ZeroField)));
    }

    #[test]
    fn sech_profile_close_to_radial_optimum() {
        // θ = 1, p = 4, Λ = 1: the optimizer is sech(s), value 4/√3
        let g = Arc::new(build_grid(20.0, 2048, 1, 2).unwrap());
        let w = CylinderField::from_fn(g, |s, _| 1.0 / s.cosh()).unwrap();
        let v = eval_f(&w, 1.0, 4.0, 1.0).unwrap();
        assert!((v - 4.0 / 3f64.sqrt()).abs() < 1e-4, "{v}");
    }

    #[test]
    fn gaussian_profile_finite_for_g() {
        let g = Arc::new(build_grid(20.0, 512, 1, 3).unwrap());
        let w = CylinderField::from_fn(g, |s, _| (-s * s / 3.0).exp()).unwrap();
        let v = eval_g(&w, 1.0, 1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn angular_energy_of_first_harmonic() {
        // w = f(s) cos φ has ‖∇_ω w‖² = (d-1)‖w‖²
        for d in [2, 3, 5] {
            let g = Arc::new(build_grid(10.0, 64, 12, d).unwrap());
            let w = CylinderField::from_fn(g, |s, phi| (-s * s).exp() * phi.cos()).unwrap();
            let e = energies_of(&w);
            assert!((e.kinetic_phi - (d as f64 - 1.0) * e.mass).abs() < 1e-12 * e.mass);
        }
    }

    fn check_gradient(f: &dyn CylinderFunctional, w: &CylinderField, rng: &mut ChaCha8Rng) {
        let (_, g) = value_and_gradient(f, w).unwrap();
        for _ in 0..4 {
            let dir: Vec<f64> = (0..w.values.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let an: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let eps = 1e-5;
            let shifted = |t: f64| {
                let vals = w.values.iter().zip(&dir).map(|(v, d)| v + t * d).collect();
                let wf = CylinderField::new(w.grid.clone(), vals).unwrap();
                f.log_value(&wf.grid, &wf.values, None).unwrap().log_value.exp()
            };
            let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
            assert!(
                (an - fd).abs() <= 1e-6 * an.abs().max(fd.abs()).max(1e-8),
                "analytic {an} vs fd {fd}"
            );
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2, 3] {
            let g = Arc::new(build_grid(6.0, 24, 8, d).unwrap());
            let vals = (0..g.len()).map(|_| rng.gen_range(0.2..1.5)).collect();
            let w = CylinderField::new(g, vals).unwrap();
            check_gradient(&CknFunctional::new(0.7, 3.0, 0.8).unwrap(), &w, &mut rng);
            check_gradient(&CknFunctional::new(1.0, 4.0, 1.0).unwrap(), &w, &mut rng);
            check_gradient(&WlhFunctional::new(1.0, 0.5).unwrap(), &w, &mut rng);
        }
    }
}
