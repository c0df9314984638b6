use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mss_tools::commands;
use mss_tools::settings::GridTarget;
use mss_tools::{Overrides, Result};

/// Minkowski symmetry sets of closed plane curves and their transitions.
#[derive(Parser)]
#[command(name = "mss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the symmetry set of one curve and write an analysis report.
    Analyze {
        #[arg(long)]
        curve: PathBuf,
        /// Family parameter.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Locate and classify transitions of a family over a range of u.
    Scan {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        u_max: f64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Dump the bitangency residual on a dense grid as CSV.
    Oracle {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Render an analysis report as SVG.
    Render {
        report: PathBuf,
        #[arg(long, alias = "out")]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Tuning {
    /// Trace grid size (512 unless a config file says otherwise); for scans,
    /// the grid of the per-step traces.
    #[arg(long)]
    grid: Option<usize>,
    /// Contact-order tolerance (default 1e-6).
    #[arg(long)]
    tol: Option<f64>,
    /// JSON config file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { curve, u, out, svg, tuning } => {
            let cfg = commands::load_config(tuning.config.as_deref(), &tuning.overrides(None), GridTarget::Trace)?;
            commands::analyze(&curve, u, &cfg, out.as_deref(), svg.as_deref())
        }
        Command::Scan { curve, u_min, u_max, steps, out, tuning } => {
            let cfg = commands::load_config(tuning.config.as_deref(), &tuning.overrides(steps), GridTarget::Scan)?;
            commands::scan(&curve, u_min, u_max, &cfg, out.as_deref())
        }
        Command::Oracle { curve, u, out, tuning } => {
            let cfg = commands::load_config(tuning.config.as_deref(), &tuning.overrides(None), GridTarget::Trace)?;
            commands::oracle(&curve, u, &cfg, out.as_deref())
        }
        Command::Render { report, svg } => commands::render_report(&report, svg.as_deref()),
    }
}

impl Tuning {
    fn overrides(&self, steps: Option<usize>) -> Overrides {
        Overrides { grid: self.grid, tol: self.tol, steps }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
