//! Command-line surface. Every subcommand flag doubles as a config-file key
//! under its long name.

use std::path::PathBuf;

use cascade_core::Quadrature;
use clap::{Args, Parser, Subcommand};

pub const OUT_DIR_ENV: &str = "CASCADE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "cascade", version, about = "Height distribution of the continuum cascade model")]
pub struct Cli {
    /// Directory receiving the CSV artifacts and manifest.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,

    /// Flat key=value file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Base seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the recursion and write P_n snapshots.
    Recurse(RecurseArgs),
    /// Track the front and fit its velocity and logarithmic correction.
    Front(FrontArgs),
    /// Monte Carlo of the killed branching Poisson process.
    Simulate(SimulateArgs),
    /// Longest path from the first vertex of random cascade graphs.
    Graph(GraphArgs),
    /// Boundary-case branching random walk checks.
    Brw(BrwArgs),
    /// Discrete cascade graph against the continuum tree.
    Compare(CompareArgs),
    /// Search the probe factor that keeps P_{n-1}(alpha·x_f(n)) constant.
    AlphaScan(AlphaScanArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid spacing.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Right end of the grid; derived from nmax when omitted.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Number of generations.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// `trapezoid` or `riemann`.
    #[arg(long)]
    pub quadrature: Option<Quadrature>,
}

#[derive(Debug, Args)]
pub struct RecurseArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Generations to write, comma separated. Defaults to nmax.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Level defining the front.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub window_lo: Option<usize>,
    #[arg(long)]
    pub window_hi: Option<usize>,
    /// Base generation of the Richardson velocity (uses n, 2n, 4n).
    #[arg(long)]
    pub richardson_n: Option<usize>,
    #[arg(long)]
    pub fit_lo: Option<usize>,
    #[arg(long)]
    pub fit_hi: Option<usize>,
    /// Generations to align for the collapse check.
    #[arg(long, value_delimiter = ',')]
    pub collapse: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Barrier position.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest generation resolved.
    #[arg(long)]
    pub ncap: Option<usize>,
    #[arg(long)]
    pub particle_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Edge probability; defaults to x / vertices.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BrwArgs {
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Displacement cutoff of the offspring law.
    #[arg(long)]
    pub vmax: Option<f64>,
    #[arg(long)]
    pub particle_cap: Option<usize>,
    /// Grid spacing for the limit-law probe; the probe is skipped when absent.
    #[arg(long)]
    pub probe_delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub probe_generations: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probe_z: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub vertices: Option<usize>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AlphaScanArgs {
    /// Grid spacings, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub nmax: Option<usize>,
}
