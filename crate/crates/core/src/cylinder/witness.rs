//! Numerical symmetry-breaking witnesses: radial vs non-radial minima across
//! grid refinements.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::grid::{build_grid, CylinderGrid};
use super::minimize::{
    minimize_f_with, minimize_g_with, Init, MinimizationResult, MinimizeOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WitnessKind {
    Ckn { theta: f64, p: f64, lambda: f64 },
    Wlh { gamma: f64, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub s_max: f64,
    pub n_s: usize,
    pub n_phi: usize,
}

impl GridLevel {
    pub fn new(s_max: f64, n_s: usize, n_phi: usize) -> Self {
        Self { s_max, n_s, n_phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessVerdict {
    Broken,
    NotObserved,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub grid: GridLevel,
    pub radial_value: f64,
    pub nonradial_value: f64,
    /// `radial_value - nonradial_value`.
    pub gap: f64,
    pub angular_fraction: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub verdict: WitnessVerdict,
    pub levels: Vec<LevelReport>,
    /// Largest change of either minimum between consecutive levels.
    pub discrepancy: f64,
    /// `min gap - 3 * discrepancy`; positive exactly when `Broken`.
    pub margin: f64,
    #[serde(skip)]
    pub best_profile: Option<MinimizationResult>,
}

fn run(
    kind: &WitnessKind,
    grid: &Arc<CylinderGrid>,
    init: &Init,
    opts: &MinimizeOptions,
) -> Result<MinimizationResult> {
    match *kind {
        WitnessKind::Ckn { theta, p, lambda } => minimize_f_with(theta, p, lambda, grid, init, opts),
        WitnessKind::Wlh { gamma, lambda } => minimize_g_with(gamma, lambda, grid, init, opts),
    }
}

/// Default starting points tried on the coarsest level.
pub fn default_inits() -> Vec<Init> {
    vec![
        Init::Perturbed { delta: 0.1 },
        Init::Concentrated { kappa: 2.0 },
        Init::Concentrated { kappa: 8.0 },
    ]
}

/// Compares radial and non-radial minima over `levels` (at least two).
/// Non-radial runs start from every entry of `inits` on the first level and
/// from the previous level's best profile afterwards.
pub fn breaking_witness(
    kind: WitnessKind,
    d: u32,
    levels: &[GridLevel],
    inits: &[Init],
    opts: &MinimizeOptions,
) -> Result<WitnessReport> {
    if levels.len() < 2 {
        return invalid("breaking_witness needs at least two refinement levels");
    }
    if inits.is_empty() {
        return invalid("breaking_witness needs at least one initialization");
    }
    let mut reports = Vec::with_capacity(levels.len());
    let mut prev: Option<MinimizationResult> = None;
    for level in levels {
        let radial_grid = Arc::new(build_grid(level.s_max, level.n_s, 1, d)?);
        let grid = Arc::new(build_grid(level.s_max, level.n_s, level.n_phi, d)?);
        let radial = run(&kind, &radial_grid, &Init::Radial, opts)?;
        let best = match prev.take() {
            None => {
                let mut best: Option<MinimizationResult> = None;
                for init in inits {
                    let r = run(&kind, &grid, init, opts)?;
                    if best.as_ref().is_none_or(|b| r.value < b.value) {
                        best = Some(r);
                    }
                }
                best.expect("inits is non-empty")
            }
            Some(p) => run(&kind, &grid, &Init::Supplied(p.profile.clone()), opts)?,
        };
        reports.push(LevelReport {
            grid: *level,
            radial_value: radial.value,
            nonradial_value: best.value,
            gap: radial.value - best.value,
            angular_fraction: best.angular_fraction,
            iterations: best.iterations,
        });
        prev = Some(best);
    }
    let discrepancy = reports
        .windows(2)
        .map(|w| {
            (w[1].radial_value - w[0].radial_value)
                .abs()
                .max((w[1].nonradial_value - w[0].nonradial_value).abs())
        })
        .fold(0.0f64, f64::max);
    let min_gap = reports.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let margin = min_gap - 3.0 * discrepancy;
    let verdict = if margin > 0.0 {
        WitnessVerdict::Broken
    } else {
        WitnessVerdict::NotObserved
    };
    Ok(WitnessReport {
        verdict,
        levels: reports,
        discrepancy,
        margin,
        best_profile: prev,
    })
}
