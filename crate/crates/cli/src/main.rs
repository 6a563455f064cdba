//! `nzbc`: construct, verify and audit exact NZBC Kundu-NLS solutions.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nzbc_core::io::ConventionSetting;

#[derive(Debug, Parser)]
#[command(name = "nzbc", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GlobalOpts {
    /// Worker threads for grid evaluation and residual sweeps.
    #[arg(long, global = true, env = "NZBC_THREADS")]
    threads: Option<usize>,
    /// Overrides the configuration's sign convention.
    #[arg(long, global = true, value_enum)]
    sign_convention: Option<ConventionArg>,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    A,
    B,
    Auto,
}

impl From<ConventionArg> for ConventionSetting {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::A => ConventionSetting::A,
            ConventionArg::B => ConventionSetting::B,
            ConventionArg::Auto => ConventionSetting::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChannelArg {
    AbsU,
    ReU,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the field on the configured grid and write CSV, JSON and PGM.
    Construct {
        /// Config file or bundled preset name.
        config: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "abs-u")]
        channel: ChannelArg,
        /// Fixed pixel range `lo,hi` instead of the grid min/max.
        #[arg(long, value_parser = parse_clamp)]
        clamp: Option<(f64, f64)>,
        /// Also write a gnuplot script for a colour panel.
        #[arg(long)]
        emit_gnuplot: bool,
    },
    /// Run the verification suite and print the report as JSON.
    Check { config: String },
    /// Split-step cross-check against the exact solution.
    Evolve {
        config: String,
        /// Directory for the evolved slice CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit-table audits: theta condition, symmetries, trace identities.
    Audit {
        config: String,
        /// Random off-contour points for `s11 s22 = 1`.
        #[arg(long, default_value_t = 100)]
        probes: usize,
    },
    /// List the bundled figure configurations.
    Presets,
}

fn parse_clamp(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("clamp bounds must be finite".into());
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
