use std::path::Path;
use std::sync::Arc;

use cknsym_core::constants::{
    big_l, c_ckn_star, c_ls, c_wlh_star, gaussian_h, sobolev_star, ConstantValue,
};
use cknsym_core::cylinder::{
    build_grid, minimize_f_with, minimize_g_with, Init, MinimizationResult, MinimizeOptions,
};
use cknsym_core::params::{validate_ckn, validate_wlh, CknParams, WlhParams};
use cknsym_core::regions::{
    sweep, Axis, AxisParam, Bindings, Family, GridSpec, Mechanism, SweepRow,
};

use crate::args::{FamilyArg, InitArg};
use crate::config::{RunConfig, DEFAULT_N_PHI, DEFAULT_N_S, DEFAULT_S_MAX};
use crate::emit::{emit, write_table, Cell, Output, Table};
use crate::error::{invalid, CliError, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantsSelection {
    pub ckn: bool,
    pub wlh: bool,
    pub ls: bool,
    pub sobolev: bool,
    pub gaussian: bool,
    pub big_l: bool,
}

impl ConstantsSelection {
    fn any(&self) -> bool {
        self.ckn || self.wlh || self.ls || self.sobolev || self.gaussian || self.big_l
    }
}

pub fn constants(cfg: &RunConfig, sel: ConstantsSelection) -> Result<Output> {
    let explicit = sel.any();
    let want = |flag: bool| flag || !explicit;
    let p = &cfg.params;
    let mut out: Vec<(&'static str, ConstantValue)> = Vec::new();

    // In automatic mode a quantity is skipped when its inputs are unbound.
    let mut run = |flag: bool,
                   name: &'static str,
                   ready: bool,
                   f: &dyn Fn() -> Result<ConstantValue>|
     -> Result<()> {
        if !want(flag) || (!explicit && !ready) {
            return Ok(());
        }
        out.push((name, f()?));
        Ok(())
    };

    let has_lambda = p.lambda.is_some() || (p.a.is_some() && p.d.is_some());
    run(
        sel.ckn,
        "c_ckn_star",
        p.theta.is_some() && p.p.is_some() && has_lambda,
        &|| {
            let theta = cfg.require("theta", p.theta)?;
            let pp = cfg.require("p", p.p)?;
            Ok(c_ckn_star(theta, pp, cfg.lambda()?)?)
        },
    )?;
    run(sel.wlh, "c_wlh_star", p.gamma.is_some() && p.d.is_some(), &|| {
        let gamma = cfg.require("gamma", p.gamma)?;
        let d = cfg.require_d()?;
        // at γ = 1/4 the constant does not depend on Λ
        let lambda = if gamma == 0.25 && !has_lambda {
            1.0
        } else {
            cfg.lambda()?
        };
        Ok(c_wlh_star(gamma, lambda, d as f64)?)
    })?;
    run(sel.ls, "c_ls", p.d.is_some(), &|| Ok(c_ls(cfg.require_d()? as f64)))?;
    run(
        sel.sobolev,
        "sobolev_star",
        p.d.is_some_and(|d| d >= 3),
        &|| Ok(sobolev_star(cfg.require_d()? as f64)?),
    )?;
    run(sel.gaussian, "gaussian_h", p.p.is_some() && p.d.is_some(), &|| {
        Ok(gaussian_h(cfg.require("p", p.p)?, cfg.require_d()? as f64)?)
    })?;
    run(
        sel.big_l,
        "big_l",
        p.p.is_some() && p.d.is_some_and(|d| d >= 2),
        &|| Ok(big_l(cfg.require("p", p.p)?, cfg.require_d()? as f64)?),
    )?;

    if out.is_empty() {
        return invalid("no constant can be computed from the bound parameters");
    }
    let mut table = Table::new(vec!["quantity", "value", "log_value", "formula_id"]);
    for (name, c) in out {
        table.push(vec![
            name.into(),
            c.value.into(),
            c.log_value.into(),
            format!("{:?}", c.formula_id).into(),
        ]);
    }
    Ok(Output::from_table(table))
}

const SWEEP_HEADER: [&str; 25] = [
    "i",
    "j",
    "d",
    "p",
    "theta",
    "gamma",
    "a",
    "lambda",
    "verdict",
    "mechanisms",
    "margin_linear_instability",
    "margin_schwarz_curve",
    "margin_gn_comparison",
    "margin_ls_comparison",
    "a_c",
    "theta_min",
    "theta_big",
    "a_bar",
    "a_fs",
    "a_minus",
    "a0",
    "big_l",
    "lambda_tilde",
    "lambda_sb",
    "error",
];

fn sweep_cells(r: &SweepRow) -> Vec<Cell> {
    let b = &r.params;
    let v = r.verdict.as_ref();
    let margin = |m: Mechanism| v.and_then(|v| v.margin(m)).map(|m| m.margin);
    let bd = &r.boundaries;
    vec![
        r.i.into(),
        r.j.into(),
        b.d.into(),
        b.p.into(),
        b.theta.into(),
        b.gamma.into(),
        b.a.into(),
        b.lambda.into(),
        v.map_or(Cell::Empty, |v| format!("{:?}", v.verdict).into()),
        v.map_or(Cell::Empty, |v| {
            let names: Vec<String> = v.mechanisms.iter().map(|m| format!("{m:?}")).collect();
            names.join(";").into()
        }),
        margin(Mechanism::LinearInstability).into(),
        margin(Mechanism::SchwarzCurve).into(),
        margin(Mechanism::GnComparison).into(),
        margin(Mechanism::LsComparison).into(),
        bd.a_c.into(),
        bd.theta_min.into(),
        bd.theta_big.into(),
        bd.a_bar.into(),
        bd.a_fs.into(),
        bd.a_minus.into(),
        bd.a0.into(),
        bd.big_l.into(),
        bd.lambda_tilde.into(),
        bd.lambda_sb.into(),
        r.error.clone().map_or(Cell::Empty, Cell::Text),
    ]
}

pub fn sweep_output(rows: &[SweepRow]) -> Result<Output> {
    let mut table = Table::new(SWEEP_HEADER.to_vec());
    let mut json = Vec::with_capacity(rows.len());
    for r in rows {
        table.push(sweep_cells(r));
        json.push(serde_json::to_value(r).map_err(|e| CliError::Invalid(e.to_string()))?);
    }
    Ok(Output { table, json })
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Ckn => Family::Ckn,
        FamilyArg::Wlh => Family::Wlh,
    }
}

fn bindings(cfg: &RunConfig) -> Bindings {
    let p = &cfg.params;
    Bindings {
        d: p.d,
        p: p.p,
        theta: p.theta,
        theta_frac: None,
        gamma: p.gamma,
        a: p.a,
        lambda: p.lambda,
    }
}

fn single(param: AxisParam, v: f64) -> Axis {
    Axis {
        param,
        values: vec![v],
    }
}

/// One-point sweep, so `classify` and a degenerate `sweep` share their output.
pub fn classify(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    if p.a.is_none() && p.lambda.is_none() {
        return invalid("--a or --lambda is required");
    }
    let d = cfg.require_d()? as f64;
    let axes = match cfg.family {
        FamilyArg::Ckn => [
            single(AxisParam::P, cfg.require("p", p.p)?),
            single(AxisParam::Theta, cfg.require("theta", p.theta)?),
        ],
        FamilyArg::Wlh => [
            single(AxisParam::D, d),
            single(AxisParam::Gamma, cfg.require("gamma", p.gamma)?),
        ],
    };
    let spec = GridSpec {
        family: family(cfg.family),
        fixed: bindings(cfg),
        axes,
    };
    let rows = sweep(&spec)?;
    if let Some(e) = &rows[0].error {
        return Err(CliError::Invalid(e.clone()));
    }
    sweep_output(&rows)
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<Output> {
    let [Some(x), Some(y)] = &cfg.axes else {
        return invalid("sweep needs both --x and --y axes");
    };
    let spec = GridSpec {
        family: family(cfg.family),
        fixed: bindings(cfg),
        axes: [x.0.clone(), y.0.clone()],
    };
    sweep_output(&sweep(&spec)?)
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeArgs {
    pub init: InitArg,
    pub delta: f64,
    pub kappa: f64,
    pub max_iter: Option<usize>,
}

const MINIMIZE_HEADER: [&str; 19] = [
    "family",
    "d",
    "theta",
    "p",
    "gamma",
    "lambda",
    "s_max",
    "n_s",
    "n_phi",
    "value",
    "log_value",
    "t",
    "iterations",
    "converged",
    "angular_fraction",
    "s_symmetry_residual",
    "s_center",
    "grad_norm",
    "tail_ratio",
];

/// Runs the minimizer. The result is returned even when it did not converge;
/// the caller emits it before reporting the failure.
pub fn minimize(cfg: &RunConfig, args: MinimizeArgs) -> Result<(Output, MinimizationResult)> {
    let d = cfg.require_d()?;
    let lambda = cfg.lambda()?;
    let s_max = cfg.grid.s_max.unwrap_or(DEFAULT_S_MAX);
    let n_s = cfg.grid.n_s.unwrap_or(DEFAULT_N_S);
    let n_phi = cfg.grid.n_phi.unwrap_or(DEFAULT_N_PHI);
    let grid = Arc::new(build_grid(s_max, n_s, n_phi, d)?);
    let init = match (n_phi, args.init) {
        (1, _) | (_, InitArg::Radial) => Init::Radial,
        (_, InitArg::Perturbed) => Init::Perturbed { delta: args.delta },
        (_, InitArg::Concentrated) => Init::Concentrated { kappa: args.kappa },
    };
    let opts = MinimizeOptions {
        ncg: cfg.ncg(args.max_iter),
        allow_unconverged: true,
    };
    let p = &cfg.params;
    let (theta, pp, gamma, result) = match cfg.family {
        FamilyArg::Ckn => {
            let theta = cfg.require("theta", p.theta)?;
            let pp = cfg.require("p", p.p)?;
            validate_ckn(&CknParams::from_lambda(d, pp, theta, lambda)?).into_result()?;
            let r = minimize_f_with(theta, pp, lambda, &grid, &init, &opts)?;
            (Some(theta), Some(pp), None, r)
        }
        FamilyArg::Wlh => {
            let gamma = cfg.require("gamma", p.gamma)?;
            validate_wlh(&WlhParams::from_lambda(d, gamma, lambda)?).into_result()?;
            let r = minimize_g_with(gamma, lambda, &grid, &init, &opts)?;
            (None, None, Some(gamma), r)
        }
    };
    let fam = match cfg.family {
        FamilyArg::Ckn => "ckn",
        FamilyArg::Wlh => "wlh",
    };
    let r = &result;
    let mut table = Table::new(MINIMIZE_HEADER.to_vec());
    table.push(vec![
        fam.into(),
        d.into(),
        theta.into(),
        pp.into(),
        gamma.into(),
        lambda.into(),
        s_max.into(),
        n_s.into(),
        n_phi.into(),
        r.value.into(),
        r.log_value.into(),
        r.t.into(),
        r.iterations.into(),
        r.converged.into(),
        r.angular_fraction.into(),
        r.s_symmetry_residual.into(),
        r.s_center.into(),
        r.grad_norm.into(),
        r.tail_ratio.into(),
    ]);
    Ok((Output::from_table(table), result))
}

/// Profile as CSV with columns `s, phi, w`, `s` varying slowest.
pub fn write_profile(result: &MinimizationResult, path: &Path) -> Result<()> {
    let w = &result.profile;
    let g = &w.grid;
    let mut table = Table::new(vec!["s", "phi", "w"]);
    for (i, &s) in g.s.iter().enumerate() {
        for (j, &phi) in g.phi.iter().enumerate() {
            table.push(vec![s.into(), phi.into(), w.values[i * g.n_phi + j].into()]);
        }
    }
    write_table(&table, path)
}

pub fn finish_minimize(
    cfg: &RunConfig,
    out: &Output,
    result: &MinimizationResult,
    profile: Option<&Path>,
) -> Result<()> {
    emit(out, cfg.format, cfg.out.as_deref())?;
    if let Some(path) = profile {
        write_profile(result, path)?;
    }
    if !result.converged {
        return Err(CliError::NonConvergence {
            iterations: result.iterations,
        });
    }
    Ok(())
}
