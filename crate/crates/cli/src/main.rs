//! `wentzell`: solve, refine, inspect graphs and check hypotheses from a TOML
//! problem file.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable that overrides the output directory of the config.
pub const OUT_DIR_ENV: &str = "WENTZELL_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "wentzell", version, about = "Heat equation with nonmonotone dynamic boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem file (TOML).
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output directory; beats both the config and WENTZELL_OUT_DIR.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Seed for the randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one problem and check the energy inequality.
    Solve(Common),
    /// Joint refinement study with all estimate checks.
    Study {
        #[command(flatten)]
        common: Common,
        /// Number of refinement levels (at least 2).
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Tabulate one-sided limits, the envelope and mollified values of a graph.
    Envelope(EnvelopeArgs),
    /// Check growth, sign and smallness conditions without solving.
    Check(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Which {
    Gamma1,
    Gamma2,
}

#[derive(Args, Debug)]
pub struct EnvelopeArgs {
    /// Graph spec: `sign`, `heaviside`, `zero`, `identity`, or
    /// `expr;upper;expr;...;expr` with pieces in `t` separated by breakpoints.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub graph: Option<String>,
    /// Take the graph from a problem file instead.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gamma2")]
    pub which: Which,
    /// Sampling interval `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Mollification radii, one output column each.
    #[arg(long, value_delimiter = ',')]
    pub eps_list: Vec<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(c) => commands::solve(&c),
        Command::Study { common, levels } => commands::study(&common, levels),
        Command::Envelope(a) => commands::envelope(&a),
        Command::Check(c) => commands::check(&c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
