use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    a_bar, a_fs, a_minus, classify_ckn, classify_wlh, lambda_sb, lambda_tilde, schwarz_boundary,
    theta_big, RegionVerdict,
};
use crate::constants::big_l;
use crate::error::{Error, Result};
use crate::params::{a_crit, a_of_lambda, lambda_of_a, theta_min};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ckn,
    Wlh,
}

/// Parameter a sweep axis can drive. `ThetaFrac` places θ at
/// `ϑ(d,p) + frac (1 - ϑ(d,p))`, which keeps a rectangular grid inside the
/// p-dependent admissible θ-range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    D,
    P,
    Theta,
    ThetaFrac,
    Gamma,
    A,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linspace(param: AxisParam, start: f64, end: f64, n: usize) -> Self {
        let values = match n {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..n)
                .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        Self { param, values }
    }
}

/// Fixed parameter values; axes override these per point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Bindings {
    pub d: Option<u32>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub theta_frac: Option<f64>,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub lambda: Option<f64>,
}

impl Bindings {
    fn set(&mut self, param: AxisParam, v: f64) -> Result<()> {
        match param {
            AxisParam::D => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "d must be a positive integer, got {v}"
                    )));
                }
                self.d = Some(v as u32);
            }
            AxisParam::P => self.p = Some(v),
            AxisParam::Theta => self.theta = Some(v),
            AxisParam::ThetaFrac => self.theta_frac = Some(v),
            AxisParam::Gamma => self.gamma = Some(v),
            AxisParam::A => self.a = Some(v),
            AxisParam::Lambda => self.lambda = Some(v),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub family: Family,
    pub fixed: Bindings,
    pub axes: [Axis; 2],
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidParameter(
                "sweep axes must drive different parameters".into(),
            ));
        }
        for ax in &self.axes {
            if ax.values.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "sweep axis {:?} has no values",
                    ax.param
                )));
            }
            if ax.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "sweep axis {:?} has a non-finite value",
                    ax.param
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes[0].values.len() * self.axes[1].values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Boundary curve values at a sweep point; `None` where a curve is undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Boundaries {
    pub a_c: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_big: Option<f64>,
    pub a_bar: Option<f64>,
    pub a_fs: Option<f64>,
    pub a_minus: Option<f64>,
    pub a0: Option<f64>,
    pub big_l: Option<f64>,
    pub lambda_tilde: Option<f64>,
    pub lambda_sb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub i: usize,
    pub j: usize,
    pub params: Bindings,
    pub verdict: Option<RegionVerdict>,
    pub boundaries: Boundaries,
    pub error: Option<String>,
}

fn resolve(b: &mut Bindings) -> Result<u32> {
    let d = b
        .d
        .ok_or_else(|| Error::InvalidParameter("d is not bound".into()))?;
    let df = d as f64;
    match (b.a, b.lambda) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParameter(
                "both a and lambda are bound".into(),
            ))
        }
        (None, Some(l)) => b.a = Some(a_of_lambda(df, l)?),
        (Some(a), None) => b.lambda = Some(lambda_of_a(df, a)),
        (None, None) => {}
    }
    if let Some(frac) = b.theta_frac {
        if b.theta.is_some() {
            return Err(Error::InvalidParameter(
                "both theta and theta_frac are bound".into(),
            ));
        }
        let p = b
            .p
            .ok_or_else(|| Error::InvalidParameter("theta_frac needs p".into()))?;
        let vt = theta_min(df, p)?;
        b.theta = Some(vt + frac * (1.0 - vt));
    }
    Ok(d)
}

fn ckn_point(b: &Bindings, d: u32) -> Result<(Boundaries, Option<RegionVerdict>)> {
    let df = d as f64;
    let p = b
        .p
        .ok_or_else(|| Error::InvalidParameter("p is not bound".into()))?;
    let theta = b
        .theta
        .ok_or_else(|| Error::InvalidParameter("theta is not bound".into()))?;
    let mut bd = Boundaries {
        a_c: Some(a_crit(df)),
        theta_min: theta_min(df, p).ok(),
        ..Default::default()
    };
    if d >= 2 {
        bd.a_fs = Some(a_fs(p, df));
        bd.a_minus = Some(a_minus(p, df));
        bd.a_bar = a_bar(theta, p, df).ok();
        bd.theta_big = b.a.map(|a| theta_big(a, p, df));
        bd.big_l = big_l(p, df).ok().map(|c| c.value);
    }
    if d >= 3 {
        bd.a0 = schwarz_boundary(theta, p, d).ok();
    }
    let verdict = match b.a {
        Some(a) => Some(classify_ckn(theta, p, a, d)?),
        None => None,
    };
    Ok((bd, verdict))
}

fn wlh_point(b: &Bindings, d: u32) -> Result<(Boundaries, Option<RegionVerdict>)> {
    let df = d as f64;
    let gamma = b
        .gamma
        .ok_or_else(|| Error::InvalidParameter("gamma is not bound".into()))?;
    let bd = Boundaries {
        a_c: Some(a_crit(df)),
        lambda_tilde: Some(lambda_tilde(gamma, df)),
        lambda_sb: lambda_sb(gamma, df).ok(),
        ..Default::default()
    };
    let verdict = match b.a {
        Some(a) => Some(classify_wlh(gamma, a, d)?),
        None => None,
    };
    Ok((bd, verdict))
}

fn eval_point(spec: &GridSpec, i: usize, j: usize) -> SweepRow {
    let mut params = spec.fixed;
    let mut run = || -> Result<(Boundaries, Option<RegionVerdict>)> {
        params.set(spec.axes[0].param, spec.axes[0].values[i])?;
        params.set(spec.axes[1].param, spec.axes[1].values[j])?;
        let d = resolve(&mut params)?;
        match spec.family {
            Family::Ckn => ckn_point(&params, d),
            Family::Wlh => wlh_point(&params, d),
        }
    };
    let outcome = run();
    match outcome {
        Ok((boundaries, verdict)) => SweepRow {
            i,
            j,
            params,
            verdict,
            boundaries,
            error: None,
        },
        Err(e) => SweepRow {
            i,
            j,
            params,
            verdict: None,
            boundaries: Boundaries::default(),
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates every grid point, row-major in (first axis, second axis).
/// Per-point failures are recorded in the row; the sweep itself fails only on
/// a malformed grid. Points run on the ambient rayon pool.
pub fn sweep(spec: &GridSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let n1 = spec.axes[1].values.len();
    Ok((0..spec.len())
        .into_par_iter()
        .map(|k| eval_point(spec, k / n1, k % n1))
        .collect())
}
