//! Preconditioned nonlinear conjugate gradients (Polak-Ribière+) with a
//! strong-Wolfe line search, for scale-invariant quotients.

/// What the driver needs from a problem.
pub(crate) trait Problem {
    type Aux: Copy;

    /// Value at `x`, gradient written to `g`.
    fn eval(&self, x: &[f64], g: &mut [f64]) -> Option<(f64, Self::Aux)>;

    /// `z ≈ H⁻¹ g` at `x` with auxiliary data `aux` from [`Problem::eval`].
    fn precondition(&self, x: &[f64], aux: &Self::Aux, g: &[f64], z: &mut [f64]);

    /// Rescales `x` in place, returning the factor applied.
    fn normalize(&self, x: &mut [f64]) -> f64;

    fn needs_normalize(&self, x: &[f64]) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub struct NcgOptions {
    pub max_iter: usize,
    /// Stop when `sqrt(g · H⁻¹g)` falls below this.
    pub grad_tol: f64,
    /// Stop when the value moved less than this over `stall_window` iterations.
    pub stall_tol: f64,
    pub stall_window: usize,
}

impl Default for NcgOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            grad_tol: 1e-9,
            stall_tol: 1e-14,
            stall_window: 25,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NcgReport {
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Trial<A> {
    alpha: f64,
    value: f64,
    slope: f64,
    aux: A,
}

/// Fills `xt = x + α d` and evaluates there.
fn probe<P: Problem>(
    problem: &P,
    x: &[f64],
    d: &[f64],
    alpha: f64,
    xt: &mut [f64],
    gt: &mut [f64],
) -> Option<Trial<P::Aux>> {
    for i in 0..x.len() {
        xt[i] = x[i] + alpha * d[i];
    }
    let (value, aux) = problem.eval(xt, gt)?;
    if !value.is_finite() {
        return None;
    }
    Some(Trial {
        alpha,
        value,
        slope: dot(gt, d),
        aux,
    })
}

const C1: f64 = 1e-4;
const C2: f64 = 0.1;

/// Strong-Wolfe search; leaves the accepted point in `xt`/`gt`.
#[allow(clippy::too_many_arguments)]
fn line_search<P: Problem>(
    problem: &P,
    x: &[f64],
    d: &[f64],
    f0: f64,
    slope0: f64,
    alpha0: f64,
    xt: &mut [f64],
    gt: &mut [f64],
) -> Option<Trial<P::Aux>> {
    // slack for Armijo once differences reach round-off
    let slack = 1e-14 * f0.abs().max(1.0);
    let armijo = |t: &Trial<P::Aux>| t.value <= f0 + C1 * t.alpha * slope0 + slack;
    let curvature = |t: &Trial<P::Aux>| t.slope.abs() <= -C2 * slope0;

    let mut prev_alpha = 0.0;
    let mut prev_value = f0;
    let mut prev_slope = slope0;
    let mut alpha = alpha0;
    let (mut lo, mut hi);
    let mut iter = 0;
    loop {
        let t = match probe(problem, x, d, alpha, xt, gt) {
            Some(t) => t,
            None => {
                // step left the domain; shrink
                alpha = 0.5 * (prev_alpha + alpha);
                iter += 1;
                if iter > 60 {
                    return None;
                }
                continue;
            }
        };
        if !armijo(&t) || (iter > 0 && t.value > prev_value + slack) {
            lo = (prev_alpha, prev_value, prev_slope);
            hi = (t.alpha, t.value, t.slope);
            break;
        }
        if curvature(&t) {
            return Some(t);
        }
        if t.slope >= 0.0 {
            lo = (t.alpha, t.value, t.slope);
            hi = (prev_alpha, prev_value, prev_slope);
            break;
        }
        prev_alpha = t.alpha;
        prev_value = t.value;
        prev_slope = t.slope;
        alpha *= 2.0;
        iter += 1;
        if iter > 60 {
            return Some(t);
        }
    }
    // zoom
    let mut best: Option<Trial<P::Aux>> = None;
    for _ in 0..60 {
        let (a_lo, f_lo, s_lo) = lo;
        let (a_hi, f_hi, s_hi) = hi;
        let width = a_hi - a_lo;
        if width.abs() <= 1e-16 * a_lo.abs().max(a_hi.abs()) {
            break;
        }
        // cubic interpolant minimizer, safeguarded
        let d1 = s_lo + s_hi - 3.0 * (f_lo - f_hi) / (a_lo - a_hi);
        let disc = d1 * d1 - s_lo * s_hi;
        let mut a = f64::NAN;
        if disc >= 0.0 {
            let d2 = width.signum() * disc.sqrt();
            a = a_hi - (a_hi - a_lo) * (s_hi + d2 - d1) / (s_hi - s_lo + 2.0 * d2);
        }
        let (min_a, max_a) = if a_lo < a_hi { (a_lo, a_hi) } else { (a_hi, a_lo) };
        let margin = 0.1 * (max_a - min_a);
        if !a.is_finite() || a < min_a + margin || a > max_a - margin {
            a = 0.5 * (a_lo + a_hi);
        }
        let t = match probe(problem, x, d, a, xt, gt) {
            Some(t) => t,
            None => {
                hi = (a, f64::INFINITY, f64::INFINITY);
                continue;
            }
        };
        if !armijo(&t) || t.value > f_lo + slack {
            hi = (t.alpha, t.value, t.slope);
        } else {
            if curvature(&t) {
                return Some(t);
            }
            if t.slope * (a_hi - a_lo) >= 0.0 {
                hi = lo;
            }
            lo = (t.alpha, t.value, t.slope);
            // among acceptable points keep the flattest
            if best.as_ref().is_none_or(|b| t.slope.abs() < b.slope.abs()) {
                best = Some(Trial { ..t });
            }
        }
    }
    // accept the best decrease found, re-evaluated so xt/gt match it
    let b = best?;
    probe(problem, x, d, b.alpha, xt, gt)
}

/// Minimizes from `x` in place. `observe` sees every accepted iterate.
pub(crate) fn minimize<P: Problem>(
    problem: &P,
    x: &mut [f64],
    opts: &NcgOptions,
    mut observe: impl FnMut(&[f64]),
) -> Option<NcgReport> {
    let n = x.len();
    problem.normalize(x);
    let mut g = vec![0.0; n];
    let (mut f, mut aux) = problem.eval(x, &mut g)?;
    let mut z = vec![0.0; n];
    problem.precondition(x, &aux, &g, &mut z);
    let mut gz = dot(&g, &z);
    let mut d: Vec<f64> = z.iter().map(|v| -v).collect();
    let mut xt = vec![0.0; n];
    let mut gt = vec![0.0; n];
    let mut zt = vec![0.0; n];
    let mut history = vec![f];
    let mut alpha_prev = 1.0;
    let mut slope_prev = -gz;
    let mut steepest = true;

    for iter in 0..opts.max_iter {
        let gnorm = gz.max(0.0).sqrt();
        if gnorm <= opts.grad_tol {
            return Some(NcgReport {
                iterations: iter,
                converged: true,
                grad_norm: gnorm,
            });
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            d.iter_mut().zip(&z).for_each(|(di, zi)| *di = -zi);
            slope = -gz;
            steepest = true;
        }
        let alpha0 = if iter == 0 {
            1.0
        } else {
            (alpha_prev * slope_prev / slope).clamp(1e-10, 1e10)
        };
        let trial = match line_search(problem, x, &d, f, slope, alpha0, &mut xt, &mut gt) {
            Some(t) => t,
            None if !steepest => {
                d.iter_mut().zip(&z).for_each(|(di, zi)| *di = -zi);
                steepest = true;
                continue;
            }
            None => {
                return Some(NcgReport {
                        iterations: iter,
                    converged: false,
                    grad_norm: gnorm,
                });
            }
        };
        alpha_prev = trial.alpha;
        slope_prev = slope;
        x.copy_from_slice(&xt);
        f = trial.value;
        aux = trial.aux;
        // the quotient is 0-homogeneous: rescale only when the norm drifts
        if problem.needs_normalize(x) {
            let c = problem.normalize(x);
            d.iter_mut().for_each(|v| *v *= c);
            z.iter_mut().for_each(|v| *v *= c);
            let (fv, a) = problem.eval(x, &mut gt)?;
            f = fv;
            aux = a;
        }
        observe(x);

        problem.precondition(x, &aux, &gt, &mut zt);
        let gz_new = dot(&gt, &zt);
        let y_dot = gz_new - dot(&gt, &z);
        let mut beta = (y_dot / gz).max(0.0);
        // restart when successive gradients lose conjugacy
        if dot(&gt, &z).abs() >= 0.5 * gz_new {
            beta = 0.0;
        }
        if !beta.is_finite() {
            beta = 0.0;
        }
        for i in 0..n {
            d[i] = -zt[i] + beta * d[i];
        }
        steepest = beta == 0.0;
        std::mem::swap(&mut g, &mut gt);
        std::mem::swap(&mut z, &mut zt);
        gz = gz_new;

        history.push(f);
        if history.len() > opts.stall_window {
            let old = history[history.len() - 1 - opts.stall_window];
            if (old - f).abs() <= opts.stall_tol * f.abs().max(1.0) {
                return Some(NcgReport {
                        iterations: iter + 1,
                    converged: true,
                    grad_norm: gz.max(0.0).sqrt(),
                });
            }
        }
    }
    Some(NcgReport {
        iterations: opts.max_iter,
        converged: false,
        grad_norm: gz.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rayleigh quotient of a diagonal matrix; min = smallest entry.
    struct Rayleigh(Vec<f64>);

    impl Problem for Rayleigh {
        type Aux = f64;
        fn eval(&self, x: &[f64], g: &mut [f64]) -> Option<(f64, f64)> {
            let m: f64 = x.iter().map(|v| v * v).sum();
            let k: f64 = x.iter().zip(&self.0).map(|(v, a)| a * v * v).sum();
            let r = k / m;
            for i in 0..x.len() {
                g[i] = 2.0 * (self.0[i] - r) * x[i] / m;
            }
            Some((r, m))
        }
        fn precondition(&self, _x: &[f64], m: &f64, g: &[f64], z: &mut [f64]) {
            for i in 0..g.len() {
                z[i] = 0.5 * m * g[i] / self.0[i];
            }
        }
        fn normalize(&self, x: &mut [f64]) -> f64 {
            let m: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= m);
            1.0 / m
        }
        fn needs_normalize(&self, x: &[f64]) -> bool {
            let m: f64 = x.iter().map(|v| v * v).sum();
            (m - 1.0).abs() > 1e-2
        }
    }

    #[test]
    fn finds_smallest_eigenvalue() {
        let diag: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 0.5).collect();
        let p = Rayleigh(diag);
        let mut x: Vec<f64> = (0..200).map(|i| 1.0 + (i % 3) as f64).collect();
        let rep = minimize(&p, &mut x, &NcgOptions::default(), |_| {}).unwrap();
        assert!(rep.converged);
        let mut g = vec![0.0; 200];
        let (value, _) = p.eval(&x, &mut g).unwrap();
        assert!((value - 1.0).abs() < 1e-12, "{value}");
    }
}
