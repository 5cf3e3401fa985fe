//! Data tables behind the four figures. Column schemas:
//!
//! 1. `p, theta, a0, a_bar, a_c`: Schwarz and instability curves, d = 5 by default.
//! 2. `d, p, big_l`: L(p, d) near p = 2 for d = 3..=10.
//! 3. `d, c_wlh_star, c_ls, ratio`: radial WLH constant at γ = d/4, a = -1/2, over C_LS.
//! 4. `d, gamma, lambda_sb, lambda_tilde, ratio`: Λ_SB / Λ̃ for d = 2..=6.

use cknsym_core::constants::{big_l, c_ls, c_wlh_star};
use cknsym_core::params::{critical_exponent, lambda_of_a};
use cknsym_core::regions::{
    lambda_sb, lambda_tilde, sweep, Axis, AxisParam, Bindings, Family, GridSpec,
};

use crate::config::RunConfig;
use crate::emit::{Output, Table};
use crate::error::{invalid, Result};

pub fn figure(which: u8, points: usize, cfg: &RunConfig) -> Result<Output> {
    if points < 2 {
        return invalid("--points must be at least 2");
    }
    let table = match which {
        1 => figure1(points, cfg.params.d.unwrap_or(5))?,
        2 => figure2(points, cfg.params.d)?,
        3 => figure3(points)?,
        4 => figure4(points, cfg.params.d)?,
        _ => return invalid(format!("unknown figure {which}")),
    };
    Ok(Output::from_table(table))
}

/// The same sweep as `sweep --x p=2.1:3.2:12 --y theta_frac=0:1:n`.
fn figure1(points: usize, d: u32) -> Result<Table> {
    if d < 3 {
        return invalid("figure 1 needs d >= 3");
    }
    let spec = GridSpec {
        family: Family::Ckn,
        fixed: Bindings {
            d: Some(d),
            ..Default::default()
        },
        axes: [
            Axis::linspace(AxisParam::P, 2.1, 3.2, 12),
            Axis::linspace(AxisParam::ThetaFrac, 0.0, 1.0, points),
        ],
    };
    let mut table = Table::new(vec!["p", "theta", "a0", "a_bar", "a_c"]);
    for r in sweep(&spec)? {
        if r.params.p.is_some_and(|p| p >= critical_exponent(d as f64)) {
            continue;
        }
        let b = r.boundaries;
        table.push(vec![
            r.params.p.into(),
            r.params.theta.into(),
            b.a0.into(),
            b.a_bar.into(),
            b.a_c.into(),
        ]);
    }
    Ok(table)
}

fn figure2(points: usize, only: Option<u32>) -> Result<Table> {
    let dims: Vec<u32> = match only {
        Some(d) if d >= 2 => vec![d],
        Some(d) => return invalid(format!("figure 2 needs d >= 2, got {d}")),
        None => (3..=10).collect(),
    };
    let mut table = Table::new(vec!["d", "p", "big_l"]);
    for d in dims {
        let df = d as f64;
        let top = 2.5f64.min(critical_exponent(df) - 1e-3);
        // first sample sits next to p = 2, where L tends to 1
        let ps = std::iter::once(2.0 + 1e-6)
            .chain((1..points).map(|k| 2.0 + (top - 2.0) * k as f64 / (points - 1) as f64));
        for p in ps {
            table.push(vec![d.into(), p.into(), big_l(p, df)?.value.into()]);
        }
    }
    Ok(table)
}

fn figure3(points: usize) -> Result<Table> {
    let mut table = Table::new(vec!["d", "c_wlh_star", "c_ls", "ratio"]);
    for k in 0..points {
        let d = 2.0 + 8.0 * k as f64 / (points - 1) as f64;
        let wlh = c_wlh_star(d / 4.0, lambda_of_a(d, -0.5), d)?.value;
        let ls = c_ls(d).value;
        table.push(vec![d.into(), wlh.into(), ls.into(), (wlh / ls).into()]);
    }
    Ok(table)
}

fn figure4(points: usize, only: Option<u32>) -> Result<Table> {
    let dims: Vec<u32> = match only {
        Some(d) if d >= 2 => vec![d],
        Some(d) => return invalid(format!("figure 4 needs d >= 2, got {d}")),
        None => (2..=6).collect(),
    };
    let mut table = Table::new(vec!["d", "gamma", "lambda_sb", "lambda_tilde", "ratio"]);
    for d in dims {
        let df = d as f64;
        // admissible range: γ >= d/4, and γ > 1/2 in dimension 2
        let lo = (df / 4.0).max(0.5) * 1.001;
        let hi = 20.0f64;
        for k in 0..points {
            let gamma = lo * (hi / lo).powf(k as f64 / (points - 1) as f64);
            let sb = lambda_sb(gamma, df)?;
            let lt = lambda_tilde(gamma, df);
            table.push(vec![d.into(), gamma.into(), sb.into(), lt.into(), (sb / lt).into()]);
        }
    }
    Ok(table)
}
