mod args;
mod commands;
mod config;
mod emit;
mod error;
mod figures;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{ConstantsSelection, MinimizeArgs};
use config::RunConfig;
use error::{CliError, Result};

/// Caps the rayon pool when `CKNSYM_THREADS` is set.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CKNSYM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("CKNSYM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let common = &cli.common;
    match cli.command {
        Command::Constants {
            ckn,
            wlh,
            ls,
            sobolev,
            gaussian,
            big_l,
        } => {
            let cfg = RunConfig::build(None, [None, None], common)?;
            let sel = ConstantsSelection {
                ckn,
                wlh,
                ls,
                sobolev,
                gaussian,
                big_l,
            };
            emit::emit(&commands::constants(&cfg, sel)?, cfg.format, cfg.out.as_deref())
        }
        Command::Classify { family } => {
            let cfg = RunConfig::build(family.get(), [None, None], common)?;
            emit::emit(&commands::classify(&cfg)?, cfg.format, cfg.out.as_deref())
        }
        Command::Figure { which, points } => {
            let cfg = RunConfig::build(None, [None, None], common)?;
            emit::emit(&figures::figure(which, points, &cfg)?, cfg.format, cfg.out.as_deref())
        }
        Command::Minimize {
            family,
            init,
            delta,
            kappa,
            max_iter,
            profile,
        } => {
            let cfg = RunConfig::build(family.get(), [None, None], common)?;
            let args = MinimizeArgs {
                init,
                delta,
                kappa,
                max_iter,
            };
            let (out, result) = commands::minimize(&cfg, args)?;
            commands::finish_minimize(&cfg, &out, &result, profile.as_deref())
        }
        Command::Sweep { family, x, y } => {
            let cfg = RunConfig::build(family.get(), [x, y], common)?;
            emit::emit(&commands::sweep_cmd(&cfg)?, cfg.format, cfg.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
