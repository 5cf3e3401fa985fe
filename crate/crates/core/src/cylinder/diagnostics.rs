//! Symmetry measures, the scaling identity and first-order checks.

use std::sync::Arc;

use crate::error::{invalid, Result};

use super::field::CylinderField;
use super::functional::{energies, energies_of, eval_f, Energies};

/// `‖w(c+s,·) - w(c-s,·)‖ / ‖w‖` at a given center.
fn reflection_residual(w: &CylinderField, c: f64) -> f64 {
    let g = &w.grid;
    let n = g.n_phi;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..g.n_s {
        let s = g.s[i];
        for j in 0..n {
            let diff = w.interp_s(c + s, j) - w.interp_s(c - s, j);
            num += g.unit_weights[j] * diff * diff;
            let v = w.values[i * n + j];
            den += g.unit_weights[j] * v * v;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Best reflection center and the residual there.
pub fn s_symmetry(w: &CylinderField) -> (f64, f64) {
    let g = &w.grid;
    let n = g.n_phi;
    let (mut m1, mut m0) = (0.0, 0.0);
    for (idx, v) in w.values.iter().enumerate() {
        let wt = g.unit_weights[idx % n] * v * v;
        m1 += wt * g.s[idx / n];
        m0 += wt;
    }
    if m0 == 0.0 {
        return (0.0, 0.0);
    }
    let c0 = m1 / m0;
    // golden section around the mass center
    let (mut a, mut b) = (c0 - 2.0 * g.h, c0 + 2.0 * g.h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = reflection_residual(w, x1);
    let mut f2 = reflection_residual(w, x2);
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = reflection_residual(w, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = reflection_residual(w, x2);
        }
        if b - a < 1e-12 * g.h {
            break;
        }
    }
    let f0 = reflection_residual(w, c0);
    let (c, f) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if f0 <= f {
        (c0, f0)
    } else {
        (c, f)
    }
}

/// `(angular_fraction, s_symmetry_residual)` of a field.
pub fn symmetry_diagnostics(w: &CylinderField) -> (f64, f64) {
    let e = energies_of(w);
    (e.angular_fraction(), s_symmetry(w).1)
}

/// Discrete monotonicity of the angular average on `s > center`.
pub fn is_single_peaked(w: &CylinderField, center: f64, slack: f64) -> bool {
    let avg = w.radial_average();
    let scale = avg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let s = &w.grid.s;
    let right = (1..avg.len()).filter(|&i| s[i - 1] >= center);
    let left = (1..avg.len()).filter(|&i| s[i] <= center);
    right.into_iter().all(|i| avg[i] <= avg[i - 1] + slack * scale)
        && left.into_iter().all(|i| avg[i] >= avg[i - 1] - slack * scale)
}

/// `w_σ(s, φ) = w(σ s, φ)` on the same grid.
pub fn rescale(w: &CylinderField, sigma: f64) -> Result<CylinderField> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return invalid(format!("sigma must be > 0, got {sigma}"));
    }
    let g = &w.grid;
    let n = g.n_phi;
    let mut values = Vec::with_capacity(g.len());
    for &s in &g.s {
        for j in 0..n {
            values.push(w.interp_s(sigma * s, j));
        }
    }
    let out = CylinderField::new(g.clone(), values)?;
    if sigma < 1.0 && out.tail_ratio() > 1e-8 {
        return invalid(format!(
            "sigma = {sigma} stretches the field past the grid (tail ratio {:.2e})",
            out.tail_ratio()
        ));
    }
    Ok(out)
}

/// Relative defect of the dilation identity
/// `F_{σ²Λ}[w_σ] = σ^{2-1/θ+2/(pθ)} F_Λ[w] - σ^{-1/θ+2/(pθ)} (σ² - 1) A[w]`,
/// where `A[w]` is `F` with the numerator replaced by `‖∇_ω w‖²`.
pub fn scaling_identity_residual(
    w: &CylinderField,
    sigma: f64,
    theta: f64,
    p: f64,
    lambda: f64,
) -> Result<f64> {
    let ws = rescale(w, sigma)?;
    let lhs = eval_f(&ws, theta, p, sigma * sigma * lambda)?;
    let f = eval_f(w, theta, p, lambda)?;
    let e = energies_of(w);
    let angular = f * e.kinetic_phi / (e.kinetic() + lambda * e.mass);
    let base = -1.0 / theta + 2.0 / (p * theta);
    let rhs = sigma.powf(2.0 + base) * f - sigma.powf(base) * (sigma * sigma - 1.0) * angular;
    Ok((lhs - rhs).abs() / lhs.abs())
}

/// Factor `c` with `(‖∇(cw)‖² + Λ‖cw‖²)^θ ‖cw‖²^{1-θ} = ‖cw‖_p^p`.
pub fn normalization_factor(w: &CylinderField, theta: f64, p: f64, lambda: f64) -> f64 {
    let e = energies_of(w);
    let g = &w.grid;
    let n = g.n_phi;
    let pint: f64 = w
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| g.unit_weights[i % n] * v.abs().powf(p))
        .sum::<f64>()
        * g.h;
    let q = e.kinetic() + lambda * e.mass;
    ((theta * q.ln() + (1.0 - theta) * e.mass.ln() - pint.ln()) / (p - 2.0)).exp()
}

/// Margin of the necessary condition for a non-`s`-symmetric extremal:
/// `(t+Λ)^{1-θ}(p-1)‖w*‖_∞^{p-2} - (θ(d-1) + (1-θ)t + Λ)`.
pub fn poincare_margin(w: &CylinderField, theta: f64, p: f64, lambda: f64) -> f64 {
    let e = energies_of(w);
    let t = e.t();
    let c = normalization_factor(w, theta, p, lambda);
    let sup = c * w.max_abs();
    let d = w.grid.d as f64;
    (t + lambda).powf(1.0 - theta) * (p - 1.0) * sup.powf(p - 2.0)
        - (theta * (d - 1.0) + (1.0 - theta) * t + lambda)
}

/// Relative `L²` residual of
/// `-θΔw + ((1-θ)t + Λ)w = (t+Λ)^{1-θ}|w|^{p-2}w` for the normalized field.
pub fn euler_lagrange_residual(w: &CylinderField, theta: f64, p: f64, lambda: f64) -> f64 {
    let g = &w.grid;
    let n = g.n_phi;
    let c = normalization_factor(w, theta, p, lambda);
    let ws: Vec<f64> = w.values.iter().map(|v| c * v).collect();
    let len = ws.len();
    let mut gm = vec![0.0; len];
    let mut gk = vec![0.0; len];
    let e: Energies = energies(g, &ws, Some((&mut gm, &mut gk)));
    let t = e.t();
    let shift = (1.0 - theta) * t + lambda;
    let amp = (t + lambda).powf(1.0 - theta);
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..len {
        let wt = g.h * g.unit_weights[idx % n];
        let v = ws[idx];
        let lap = gk[idx] / (2.0 * wt);
        let rhs = amp * v.abs().powf(p - 2.0) * v;
        let r = theta * lap + shift * v - rhs;
        num += wt * r * r;
        den += wt * rhs * rhs;
    }
    (num / den).sqrt()
}

/// Shifts a field in `s` by interpolation (for translation checks).
pub fn translate(w: &CylinderField, shift: f64) -> Result<CylinderField> {
    let g: &Arc<_> = &w.grid;
    let n = g.n_phi;
    let mut values = Vec::with_capacity(g.len());
    for &s in &g.s {
        for j in 0..n {
            values.push(w.interp_s(s - shift, j));
        }
    }
    CylinderField::new(g.clone(), values)
}
