use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use cknsym_core::regions::{Axis, AxisParam};

#[derive(Debug, Parser)]
#[command(name = "cknsym", version, about = "Sharp constants and symmetry breaking for CKN and weighted log-Hardy inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

/// Flags shared by every command. Values given here override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub d: Option<u32>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    #[arg(long, global = true)]
    pub grid_ns: Option<usize>,
    #[arg(long, global = true)]
    pub grid_nphi: Option<usize>,
    #[arg(long, global = true)]
    pub smax: Option<f64>,

    /// Output file (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Gradient tolerance of the minimizer.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Ckn,
    Wlh,
}

#[derive(Debug, Clone, Copy, Default, Args)]
#[group(multiple = false)]
pub struct FamilyFlags {
    /// Caffarelli-Kohn-Nirenberg family (default).
    #[arg(long)]
    pub ckn: bool,
    /// Weighted logarithmic Hardy family.
    #[arg(long)]
    pub wlh: bool,
}

impl FamilyFlags {
    pub fn get(self) -> Option<FamilyArg> {
        match (self.ckn, self.wlh) {
            (true, _) => Some(FamilyArg::Ckn),
            (_, true) => Some(FamilyArg::Wlh),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Radial,
    Perturbed,
    Concentrated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form constants for the bound parameters.
    Constants {
        /// Radial CKN constant (needs theta, p and lambda or a with d).
        #[arg(long)]
        ckn: bool,
        /// Radial WLH constant (needs gamma, d and lambda or a).
        #[arg(long)]
        wlh: bool,
        /// Euclidean log-Sobolev constant (needs d).
        #[arg(long)]
        ls: bool,
        /// Sharp Sobolev constant (needs d >= 3).
        #[arg(long)]
        sobolev: bool,
        /// Gaussian Gagliardo-Nirenberg quotient h(p, d).
        #[arg(long)]
        gaussian: bool,
        /// L(p, d).
        #[arg(long)]
        big_l: bool,
    },
    /// Region verdict at one parameter point.
    Classify {
        #[command(flatten)]
        family: FamilyFlags,
    },
    /// Data behind one of the four figures.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Samples along the continuous axis.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Minimizes F or G on the cylinder.
    Minimize {
        #[command(flatten)]
        family: FamilyFlags,
        #[arg(long, value_enum, default_value_t = InitArg::Perturbed)]
        init: InitArg,
        /// Amplitude of the cos φ perturbation.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Concentration of the exp(κ(cos φ - 1)) start.
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Writes the minimizer as CSV with columns s, phi, w.
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
    },
    /// Classifies every point of a two-axis grid.
    Sweep {
        #[command(flatten)]
        family: FamilyFlags,
        /// First axis, `param=start:end:n` or `param=v1,v2,...`.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<AxisArg>,
        /// Second axis, same syntax.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<AxisArg>,
    },
}

/// Sweep axis in the `param=start:end:n` or `param=v1,v2,...` form.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct AxisArg(pub Axis);

fn parse_param(name: &str) -> Result<AxisParam, String> {
    Ok(match name {
        "d" => AxisParam::D,
        "p" => AxisParam::P,
        "theta" => AxisParam::Theta,
        "theta_frac" => AxisParam::ThetaFrac,
        "gamma" => AxisParam::Gamma,
        "a" => AxisParam::A,
        "lambda" => AxisParam::Lambda,
        other => return Err(format!("unknown sweep parameter {other:?}")),
    })
}

impl FromStr for AxisArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, spec) = s
            .split_once('=')
            .ok_or_else(|| format!("axis {s:?} must look like param=start:end:n"))?;
        let param = parse_param(name.trim())?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {t:?} in axis {s:?}: {e}"))
        };
        let parts: Vec<&str> = spec.split(':').collect();
        let axis = match parts.as_slice() {
            [start, end, n] => {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad count {n:?} in axis {s:?}: {e}"))?;
                if n == 0 {
                    return Err(format!("axis {s:?} has no points"));
                }
                Axis::linspace(param, num(start)?, num(end)?, n)
            }
            [list] => Axis {
                param,
                values: list.split(',').map(num).collect::<Result<_, _>>()?,
            },
            _ => return Err(format!("axis {s:?} must look like param=start:end:n")),
        };
        Ok(AxisArg(axis))
    }
}

impl TryFrom<String> for AxisArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}
