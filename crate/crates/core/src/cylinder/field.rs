use std::sync::Arc;

use crate::error::{invalid, Error, Result};

use super::grid::CylinderGrid;

/// A function `w(s, φ)` sampled on a [`CylinderGrid`], stored row-major in `s`.
#[derive(Debug, Clone)]
pub struct CylinderField {
    pub grid: Arc<CylinderGrid>,
    pub values: Vec<f64>,
}

impl CylinderField {
    pub fn new(grid: Arc<CylinderGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("field values must be finite");
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<CylinderGrid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for &s in &grid.s {
            for &phi in &grid.phi {
                values.push(f(s, phi));
            }
        }
        Self::new(grid, values)
    }

    /// Broadcasts a profile in `s` to every azimuthal node.
    pub fn from_radial(grid: Arc<CylinderGrid>, profile: &[f64]) -> Result<Self> {
        if profile.len() != grid.n_s {
            return invalid(format!(
                "profile has {} values, grid has {} s nodes",
                profile.len(),
                grid.n_s
            ));
        }
        let values = profile
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, grid.n_phi))
            .collect();
        Self::new(grid, values)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_phi + j]
    }

    /// True when every row is constant in `φ`.
    pub fn radial_flag(&self) -> bool {
        let n = self.grid.n_phi;
        self.values.chunks(n).all(|row| {
            let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            row.iter().all(|v| (v - row[0]).abs() <= 1e-14 * scale)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn check_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroField)
        } else {
            Ok(())
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Angular quadrature average of each row.
    pub fn radial_average(&self) -> Vec<f64> {
        let g = &self.grid;
        self.values
            .chunks(g.n_phi)
            .map(|row| row.iter().zip(&g.unit_weights).map(|(v, w)| v * w).sum())
            .collect()
    }

    /// `max(|w(±s_max, ·)|) / max |w|`.
    pub fn tail_ratio(&self) -> f64 {
        let n = self.grid.n_phi;
        let first = &self.values[..n];
        let last = &self.values[self.values.len() - n..];
        let edge = first.iter().chain(last).fold(0.0f64, |m, v| m.max(v.abs()));
        let max = self.max_abs();
        if max == 0.0 {
            0.0
        } else {
            edge / max
        }
    }

    /// Value at arbitrary `s` on azimuthal node `j` by cubic convolution;
    /// zero outside the grid, matching the Dirichlet ghosts.
    pub fn interp_s(&self, s: f64, j: usize) -> f64 {
        interp_column(&self.values, &self.grid, s, j)
    }

    /// Transfers the field to another grid: cubic in `s`, modal in `φ`.
    pub fn resample(&self, grid: Arc<CylinderGrid>) -> Result<Self> {
        let src = &self.grid;
        let modal = src.to_modal(&self.values);
        let n_modes = src.n_phi.min(grid.n_phi.max(1));
        let basis: Vec<Vec<f64>> = grid
            .phi
            .iter()
            .map(|&phi| src.zonal_at(n_modes, phi))
            .collect();
        let mut values = Vec::with_capacity(grid.len());
        for &s in &grid.s {
            let c: Vec<f64> = (0..n_modes)
                .map(|k| interp_column(&modal, src, s, k))
                .collect();
            for b in &basis {
                values.push(b.iter().zip(&c).map(|(x, y)| x * y).sum());
            }
        }
        Self::new(grid, values)
    }
}

/// Keys cubic convolution kernel (a = -1/2).
fn keys(t: f64) -> f64 {
    let t = t.abs();
    if t < 1.0 {
        (1.5 * t - 2.5) * t * t + 1.0
    } else if t < 2.0 {
        ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    } else {
        0.0
    }
}

pub(crate) fn interp_column(values: &[f64], grid: &CylinderGrid, s: f64, j: usize) -> f64 {
    let n = grid.n_phi;
    let u = (s + grid.s_max) / grid.h;
    let base = u.floor() as i64;
    let mut acc = 0.0;
    for i in base - 1..=base + 2 {
        if i < 0 || i >= grid.n_s as i64 {
            continue;
        }
        acc += keys(u - i as f64) * values[i as usize * n + j];
    }
    acc
}
