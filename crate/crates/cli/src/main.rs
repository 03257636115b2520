mod commands;
mod hooks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Two-dimensional Ericksen–Leslie nematic flow on a periodic box.
#[derive(Debug, Parser)]
#[command(name = "nematic2d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write the ledger, snapshots and audits.
    Run {
        config: PathBuf,
        /// Accept coefficients that fail validation (warnings only).
        #[arg(long)]
        allow_invalid: bool,
        /// Output directory, overriding `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a config and report on its coefficients.
    Validate { config: PathBuf },
    /// Energy-concentration scan of one snapshot.
    Scan {
        snapshot: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 8.0 * std::f64::consts::PI)]
        threshold: f64,
        #[arg(long, default_value_t = 0.01)]
        flag_tol: f64,
    },
    /// Φ on a parabolic cylinder from a directory of snapshots.
    Phi {
        snapshot_dir: PathBuf,
        /// Ball centre as `X,Y`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        center: (f64, f64),
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        r: f64,
        /// Leslie coefficients `mu1,...,mu6`; defaults to the directory's `config.cfg`.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
    },
    /// Render a scalar field of a snapshot as a PPM image.
    Render {
        snapshot: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: PathBuf,
        /// `grayscale` or `signed`; defaults to the field's own palette.
        #[arg(long)]
        palette: Option<String>,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected X,Y")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            allow_invalid,
            out,
        } => commands::run(&config, allow_invalid, out),
        Command::Validate { config } => commands::validate(&config),
        Command::Scan {
            snapshot,
            radius,
            threshold,
            flag_tol,
        } => commands::scan(&snapshot, radius, threshold, flag_tol),
        Command::Phi {
            snapshot_dir,
            center,
            t0,
            r,
            mu,
        } => commands::phi(&snapshot_dir, center, t0, r, mu.as_deref()),
        Command::Render {
            snapshot,
            field,
            out,
            palette,
        } => commands::render(&snapshot, &field, &out, palette.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
