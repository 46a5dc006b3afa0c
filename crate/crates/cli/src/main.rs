//! `conevolve` command-line front end.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use conevolve::groups::DEFAULT_GROUP_CAP;

#[derive(Debug, Parser)]
#[command(name = "conevolve", version, about = "Exact polyhedral projection and network coding rate regions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for double-description steps.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Abort when a double-description step would hold more rays than this.
    #[arg(long, global = true)]
    pub ray_cap: Option<usize>,
    /// Largest permutation group enumerated before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CAP)]
    pub group_cap: usize,
    /// Homogeneous entropy inequalities added to the outer bound, one per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub extra_inequalities: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate region of a network coding problem.
    RateRegion {
        problem: PathBuf,
        #[command(flatten)]
        symmetry: SymmetryArgs,
        /// Group on the region coordinates (cycle notation), replacing the network symmetry group.
        #[arg(long, value_name = "FILE")]
        group: Option<PathBuf>,
        /// Attach and check a derivation for every inequality.
        #[arg(long)]
        certify: bool,
        /// Compare the output lines against a stored transcript, ignoring order.
        #[arg(long, value_name = "FILE")]
        expect: Option<PathBuf>,
    },
    /// Network symmetry group of a problem.
    Nsg { problem: PathBuf },
    /// Upper bound on the weighted sum rate under fixed edge capacities.
    SumRate {
        problem: PathBuf,
        /// Comma-separated source weights (default all 1).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
        /// Comma-separated edge capacities (default all 1).
        #[arg(long, value_delimiter = ',')]
        capacities: Option<Vec<String>>,
    },
    /// Lower bound on the information ratio of a secret-sharing scheme.
    SecretSharing { access: PathBuf },
    /// Upper bound on the guessing number of a digraph.
    Guessing { graph: PathBuf },
    /// Project a polyhedron onto its first k coordinates.
    Project {
        input: PathBuf,
        k: usize,
        /// Symmetry of the projection on the first k coordinates (cycle notation).
        #[arg(long, value_name = "FILE")]
        group: Option<PathBuf>,
        /// Do not intersect cones with the bounding row before projecting.
        #[arg(long)]
        no_bounding_transform: bool,
    },
    /// Convert between inequality and vertex/ray descriptions.
    Convert { input: PathBuf },
    /// Face counts by dimension.
    Faces { input: PathBuf },
    /// Check inequalities over the outer bound of a problem and print their derivations.
    Certify {
        problem: PathBuf,
        /// Region inequalities to check, one per line; defaults to the computed region.
        #[arg(long, value_name = "FILE")]
        inequalities: Option<PathBuf>,
    },
    /// Solve an LP given as inequality rows plus an `objective` line (minimized).
    #[command(hide = true)]
    SolveLp { input: PathBuf },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SymmetryArgs {
    /// Exploit the network symmetry group.
    #[arg(long, conflicts_with = "no_symmetry")]
    pub symmetry: bool,
    #[arg(long)]
    pub no_symmetry: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONEVOLVE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
