use std::path::{Path, PathBuf};

use serde::Deserialize;

use cknsym_core::cylinder::NcgOptions;
use cknsym_core::params::{a_crit, lambda_of_a};

use crate::args::{AxisArg, CommonArgs, FamilyArg, Format};
use crate::error::{invalid, CliError, Result};

pub const DEFAULT_S_MAX: f64 = 20.0;
pub const DEFAULT_N_S: usize = 512;
pub const DEFAULT_N_PHI: usize = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub d: Option<u32>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOpts {
    pub s_max: Option<f64>,
    pub n_s: Option<usize>,
    pub n_phi: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    x: Option<AxisArg>,
    y: Option<AxisArg>,
}

/// Schema of the `--config` JSON document. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<FamilyArg>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    grid: GridOpts,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol: Option<f64>,
    #[serde(default)]
    sweep: SweepFile,
}

/// Fully merged settings of one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: FamilyArg,
    pub params: Params,
    pub grid: GridOpts,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
    pub axes: [Option<AxisArg>; 2],
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Config {
        path: path.to_owned(),
        source,
    })
}

impl RunConfig {
    pub fn build(
        family: Option<FamilyArg>,
        axes: [Option<AxisArg>; 2],
        cli: &CommonArgs,
    ) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let fp = file.params;
        let params = Params {
            d: cli.d.or(fp.d),
            p: cli.p.or(fp.p),
            theta: cli.theta.or(fp.theta),
            gamma: cli.gamma.or(fp.gamma),
            a: cli.a.or(fp.a),
            lambda: cli.lambda.or(fp.lambda),
        };
        let grid = GridOpts {
            s_max: cli.smax.or(file.grid.s_max),
            n_s: cli.grid_ns.or(file.grid.n_s),
            n_phi: cli.grid_nphi.or(file.grid.n_phi),
        };
        let [x, y] = axes;
        let cfg = RunConfig {
            family: family.or(file.family).unwrap_or(FamilyArg::Ckn),
            params,
            grid,
            out: cli.out.clone().or(file.out),
            format: cli.format.or(file.format).unwrap_or_default(),
            tol: cli.tol.or(file.tol),
            axes: [x.or(file.sweep.x), y.or(file.sweep.y)],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        let named = [
            ("p", p.p),
            ("theta", p.theta),
            ("gamma", p.gamma),
            ("a", p.a),
            ("lambda", p.lambda),
            ("smax", self.grid.s_max),
            ("tol", self.tol),
        ];
        for (name, v) in named {
            if let Some(v) = v {
                if !v.is_finite() {
                    return invalid(format!("--{name} must be finite, got {v}"));
                }
            }
        }
        if p.d == Some(0) {
            return invalid("--d must be >= 1");
        }
        if p.a.is_some() && p.lambda.is_some() {
            return invalid("bind at most one of --a and --lambda");
        }
        if let Some(t) = self.tol {
            if t <= 0.0 {
                return invalid(format!("--tol must be > 0, got {t}"));
            }
        }
        Ok(())
    }

    pub fn require_d(&self) -> Result<u32> {
        self.params.d.ok_or_else(|| CliError::Invalid("--d is required".into()))
    }

    pub fn require(&self, name: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| CliError::Invalid(format!("--{name} is required")))
    }

    /// `Λ` from `--lambda`, or from `--a` and `--d`.
    pub fn lambda(&self) -> Result<f64> {
        if let Some(l) = self.params.lambda {
            if l <= 0.0 {
                return invalid(format!("--lambda must be > 0, got {l}"));
            }
            return Ok(l);
        }
        match (self.params.a, self.params.d) {
            (Some(a), Some(d)) => {
                let ac = a_crit(d as f64);
                if a >= ac {
                    return invalid(format!("a = {a} must be < a_c = {ac}"));
                }
                Ok(lambda_of_a(d as f64, a))
            }
            (Some(_), None) => invalid("--a needs --d to define lambda"),
            _ => invalid("--lambda (or --a with --d) is required"),
        }
    }

    pub fn ncg(&self, max_iter: Option<usize>) -> NcgOptions {
        let mut o = NcgOptions::default();
        if let Some(t) = self.tol {
            o.grad_tol = t;
        }
        if let Some(m) = max_iter {
            o.max_iter = m;
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"family":"wlh","params":{"d":3,"gamma":1.0,"lambda":2.0},"grid":{"n_s":64},"format":"json"}"#,
        )
        .unwrap();
        let cli = CommonArgs {
            config: Some(path),
            lambda: Some(5.0),
            ..Default::default()
        };
        let cfg = RunConfig::build(None, [None, None], &cli).unwrap();
        assert_eq!(cfg.family, FamilyArg::Wlh);
        assert_eq!(cfg.params.d, Some(3));
        assert_eq!(cfg.params.lambda, Some(5.0));
        assert_eq!(cfg.grid.n_s, Some(64));
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"params":{"dd":3}}"#).unwrap();
        let cli = CommonArgs {
            config: Some(path),
            ..Default::default()
        };
        let err = RunConfig::build(None, [None, None], &cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn lambda_from_a() {
        let cli = CommonArgs {
            d: Some(3),
            a: Some(-0.5),
            ..Default::default()
        };
        let cfg = RunConfig::build(None, [None, None], &cli).unwrap();
        assert_eq!(cfg.lambda().unwrap(), 1.0);
    }
}
