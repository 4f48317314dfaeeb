use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "lipext", version, about = "Lipschitz extension and convex-analysis toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Solver tolerance; for `extend`, the residual acceptance threshold (default 1e-6 there, 1e-9 elsewhere).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 200_000)]
    pub max_iters: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extend finite map data to query points.
    Extend(ExtendArgs),
    /// Intersection checks for a body family.
    Helly(HellyArgs),
    /// Evaluate or check a convex-function expression.
    Function(FunctionArgs),
    /// Checks, resolvents and autoconjugacy for a monotone graph.
    Monotone(MonotoneArgs),
    /// Generate datasets.
    Gen(GenArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtendMethod {
    Minimax,
    Proxavg,
    Mcshane,
    Coordinatewise,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, value_enum, default_value_t = ExtendMethod::Minimax)]
    pub method: ExtendMethod,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HellyMode {
    Verify,
    CommonPoint,
    KCheck,
}

#[derive(Debug, Args)]
pub struct HellyArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_enum, default_value_t = HellyMode::Verify)]
    pub mode: HellyMode,
    /// Subset size for k-check.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("action").required(true).args(["eval", "conjugate_check", "duality"])))]
pub struct FunctionArgs {
    #[arg(long)]
    pub function: PathBuf,
    /// CSV of evaluation points.
    #[arg(long)]
    pub eval: Option<PathBuf>,
    /// Biconjugate, self-conjugacy and Fenchel–Young report on seeded samples.
    #[arg(long)]
    pub conjugate_check: bool,
    /// Convex function h = −g for the pair (f, g).
    #[arg(long)]
    pub duality: Option<PathBuf>,
    /// Search box for conjugates built by the checks.
    #[arg(long = "box", default_value_t = 10.0)]
    pub search_box: f64,
    /// Number of seeded samples for --conjugate-check.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("action").required(true).args(["check", "resolvent", "autoconjugacy"])))]
pub struct MonotoneArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub check: bool,
    /// CSV of query points.
    #[arg(long)]
    pub resolvent: Option<PathBuf>,
    /// CSV of stacked (x, x*) samples.
    #[arg(long)]
    pub autoconjugacy: Option<PathBuf>,
    /// Box for the conjugate of Ψ_T.
    #[arg(long = "box", default_value_t = 1e3)]
    pub search_box: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    LipschitzData,
    BallFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    CommonCore,
    DisjointPair,
    Random,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    /// Domain dimension for lipschitz-data (defaults to n).
    #[arg(long)]
    pub m: Option<usize>,
    /// Points (lipschitz-data) or balls (ball-family).
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = GenMode::CommonCore)]
    pub mode: GenMode,
    #[arg(long)]
    pub out: PathBuf,
}
