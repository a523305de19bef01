use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "vocra", version, about = "Robust correspondence-based rigid registration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register a correspondence file and write the result as JSON.
    Register(RegisterArgs),
    /// Run the synthetic benchmark and write per-trial records.
    Bench(BenchArgs),
    /// Write per-correspondence votes and ranks as CSV.
    VoteInspect(VoteInspectArgs),
    /// Write a synthetic correspondence file and its ground truth.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Per-component noise standard deviation.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Chordal radius of the rotation consensus.
    #[arg(long, default_value_t = 0.15)]
    pub theta: f64,
    /// Voting noise bound in multiples of sigma.
    #[arg(long, default_value_t = 3.0)]
    pub xi1_mult: f64,
    /// Consensus and refinement noise bound in multiples of sigma.
    #[arg(long, default_value_t = 5.0)]
    pub xi2_mult: f64,
    /// Leniency of the voting kernel.
    #[arg(long, default_value_t = 1.5)]
    pub vote_mu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// `sphere` or `on-surface`.
    #[arg(long, default_value = "sphere")]
    pub outlier_mode: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Model point cloud (`x y z` per line); the built-in surface otherwise.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Ground-truth sidecar; adds errors and inlier precision/recall.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    /// Result file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Comma-separated outlier rates; the default sweep when omitted.
    #[arg(long)]
    pub outlier_rate: Option<String>,
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    /// Comma-separated list of `vocra` and `ransac`.
    #[arg(long, default_value = "vocra")]
    pub solvers: String,
    #[arg(long, default_value_t = 3.0)]
    pub translation_bound: f64,
    #[arg(long, default_value_t = 1000)]
    pub ransac_iterations: usize,
    /// Write 0 for runtimes so that reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Run trials in parallel.
    #[arg(long)]
    pub parallel: bool,
    /// `.json` selects JSON, anything else CSV; CSV on stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VoteInspectArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// tb, zeroone, gm, cauchy, leclerc or tls.
    #[arg(long, default_value = "tb")]
    pub kernel: String,
    /// Ground-truth sidecar; fills the is_inlier column.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0.9)]
    pub outlier_rate: f64,
    #[arg(long, default_value_t = 3.0)]
    pub translation_bound: f64,
    /// Trial index within the seeded stream.
    #[arg(long, default_value_t = 0)]
    pub trial: usize,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Sidecar path; `<output>.gt.json` when omitted.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
}
