use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::io::ProjectionSpec;

/// Alternating weighted residual flows and shorted operators.
#[derive(Debug, Parser)]
#[command(name = "wrflow", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the alternating flow and report its limit.
    Flow(FlowArgs),
    /// Compute the shorted operator to K by both methods.
    Short(ShortArgs),
    /// Run flow, shorting and intrinsic flow and measure the gap.
    Compare(FlowArgs),
    /// Sweep a seeded random ensemble and write one CSV row per trial.
    Ensemble(EnsembleArgs),
}

#[derive(Clone, Debug, Args)]
pub struct FlowArgs {
    /// Matrix file of kind psd.
    #[arg(long)]
    pub r0: PathBuf,
    /// Projection: file, `span:v1;v2`, `zero` or `identity`.
    #[arg(long)]
    pub pa: ProjectionSpec,
    #[arg(long)]
    pub pb: ProjectionSpec,
    /// Relative step size that counts as stalled.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Record the dissipation ledger and report the energy balance.
    #[arg(long)]
    pub ledger: bool,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ShortArgs {
    #[arg(long)]
    pub r0: PathBuf,
    /// With --pb, K = ker P_A ∩ ker P_B.
    #[arg(long, requires = "pb", conflicts_with = "k")]
    pub pa: Option<ProjectionSpec>,
    #[arg(long, requires = "pa", conflicts_with = "k")]
    pub pb: Option<ProjectionSpec>,
    /// K itself, as a projection spec; `span:` lists a basis.
    #[arg(long)]
    pub k: Option<ProjectionSpec>,
    #[arg(long, default_value_t = wrflow::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Draw R_0, P_A, P_B diagonal in one shared random basis.
    #[arg(long)]
    pub commuting: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}
