//! `reflectron`: command-line front end for the programmable-processor workbench.

mod angle;
mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use output::Format;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "reflectron",
    version,
    about = "Programmable reflections and rotations on qudits"
)]
pub struct Cli {
    /// Output format; defaults to CSV for tables and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Optimal,
    ThetaPi,
    EqualAngle,
    RTheta,
    Lmr,
    LmrImproved,
    Mr,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diamond distance of an approximate rotation algorithm to `R_ψ(α)`.
    Distance {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value = "pi", value_parser = angle::parse_angle)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "optimal")]
        algo: Algo,
        /// Angle for `--algo r-theta`.
        #[arg(long, value_parser = angle::parse_angle)]
        theta: Option<f64>,
        /// Cross-check against the state-vector channel at the maximizing probe.
        #[arg(long)]
        dense: bool,
    },
    /// Reflection distance over the `(r, u)` plane.
    Landscape {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 257)]
        grid: usize,
        #[arg(long)]
        grid_r: Option<usize>,
        #[arg(long)]
        grid_u: Option<usize>,
        /// Emit the Domain A/B boundary `(r, u)` instead of the grid.
        #[arg(long)]
        boundary: bool,
    },
    /// Optimal `θ*(α)` for the `r_θ` family.
    ThetaStar {
        #[arg(long)]
        n: usize,
        /// Comma-separated angles; overrides `--points`.
        #[arg(long, value_parser = angle::parse_angle_list)]
        alpha: Option<angle::AngleList>,
        /// Number of evenly spaced angles in `(0, π]`.
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sequential partial-swap protocol and its improved angle.
    Lmr {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "pi", value_parser = angle::parse_angle)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Random instances for the dense-vs-coefficient check.
        #[arg(long, default_value_t = 0)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure-and-reflect baseline.
    Mr {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Program-dimension lower bounds.
    Lowerbound {
        #[command(subcommand)]
        command: LowerboundCommand,
    },
    /// Universal processor budgets and verification.
    Universal {
        #[command(subcommand)]
        command: UniversalCommand,
    },
    /// Gate-level rotation circuits.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
    /// Runs the invariant suite.
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum LowerboundCommand {
    /// Solves the qubit flat-spectrum system for `q`.
    SolveQ {
        #[arg(long)]
        n: usize,
    },
    /// Entropy of the twirled reflection ensemble.
    Twirl {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// `f_d(ε, n)` and the asymptotic bound.
    Fd {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Copy count; defaults to `n*(ε)`.
        #[arg(long)]
        n: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum UniversalCommand {
    /// Copy counts, angle bits and program-qubit accounting.
    Budget {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        /// Rotation angles `α_1..α_{d−1}`; defaults to all `π`.
        #[arg(long, value_parser = angle::parse_angle_list)]
        alphas: Option<angle::AngleList>,
        /// Constant `C` in `(d+1)/2 · log₂(C d⁻⁵/ε)`.
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
    /// Sampled distance of assembled processors on Haar-random targets.
    Verify {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        targets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CircuitCommand {
    /// Writes the textual gate list.
    Emit {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = angle::parse_angle)]
        theta: f64,
    },
    /// Dense equivalence against the cyclic element.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "pi,pi/3,0.7,-1.9", value_parser = angle::parse_angle_list)]
        thetas: angle::AngleList,
        #[arg(long, default_value_t = 4)]
        inputs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn report(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report("usage", e.to_string().lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    let outcome = commands::run(&cli.command);
    let (out, failure) = match outcome {
        Ok(o) => o,
        Err(e) => {
            report(e.kind(), &e.to_string());
            return ExitCode::from(e.code());
        }
    };
    let text = out.render(cli.format.unwrap_or_else(|| out.default_format()));
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        report("io", &e.to_string());
        return ExitCode::from(1);
    }
    match failure {
        Some(msg) => {
            report("assertion", &msg);
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
