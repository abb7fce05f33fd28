use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "parworks", version, about = "Partition numbers: witness search, exact values and bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a coloring file from a generator family.
    Gen(GenArgs),
    /// Run a finder or extraction pipeline on a coloring.
    Witness(WitnessArgs),
    /// Compute an exact partition number with a certificate.
    Exact(ExactArgs),
    /// Evaluate an upper bound.
    Bound(BoundArgs),
    /// Validate a witness, a coloring's invariance, or the singleton counterexample.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyName {
    Constant,
    Parity,
    Random,
}

/// A word coloring given by a generator family.
#[derive(Debug, Clone, Args)]
pub struct Generator {
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Ground length.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    /// Color of the constant family.
    #[arg(long, default_value_t = 0)]
    pub value: u32,
    /// Letter whose count the parity family reads.
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: Generator,
    /// Write the full color table instead of the generator.
    #[arg(long)]
    pub dense: bool,
    /// Emit a random coloring of subsets of `{0..n-1}` with these sizes
    /// (comma separated) instead of a word coloring.
    #[arg(long, value_delimiter = ',')]
    pub subset_levels: Option<Vec<usize>>,
    /// Ground size for `--subset-levels`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Finder {
    /// Monochromatic convex subspace (`--dim`).
    Subspace,
    /// Monochromatic grid pattern (`--side`).
    Grid,
    /// Partition witness (`--size`, `--equiv`).
    Par,
    /// Homogeneous set for a one-level subset coloring (`--target`).
    Homogeneous,
    /// Level-wise homogeneous set (`--target`).
    RamHomogeneous,
    /// Level-wise homogeneous set through the tuple coloring (`--l`).
    RamFromRamsey,
    /// Alpha witness by the classifying coloring (`--alpha`, `--size`).
    ParAlpha,
    /// Full-symmetry witness by the downward chain (`--sizes`).
    ParFull,
    /// Convex subspace from the three-stage extraction (`--dim`, `--n1`).
    Hj,
    /// Possibly interleaved subspace through the packed alphabet (`--dim`).
    DimReduce,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EquivName {
    Full,
    Alpha,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub find: Finder,
    /// Coloring file; when absent the generator flags describe the coloring.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub source: Generator,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub side: usize,
    /// Use the stricter grid bound `m_e + d·side < n`.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 2)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = EquivName::Full)]
    pub equiv: EquivName,
    /// Consider every injection rather than increasing ones.
    #[arg(long)]
    pub all_injections: bool,
    #[arg(long, default_value_t = 0)]
    pub alpha: usize,
    #[arg(long, default_value_t = 3)]
    pub target: usize,
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    /// Stage sizes for the chain, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    pub n1: usize,
    /// Write the stage trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExactKind {
    Hj,
    Vdw,
    Ramsey,
    Ram,
    F13Alpha,
    F13,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long, value_enum)]
    pub kind: ExactKind,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    /// Grid side for `vdw`.
    #[arg(long, default_value_t = 3)]
    pub side: usize,
    /// Target size for `ramsey` and `ram`, witness size for `f13*`.
    #[arg(long, default_value_t = 3)]
    pub target: usize,
    /// Tuple size for `ramsey`.
    #[arg(long, default_value_t = 2)]
    pub tuple: usize,
    /// Levels `1..below` for `ram`.
    #[arg(long, default_value_t = 2)]
    pub below: usize,
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 8)]
    pub prefix_depth: usize,
    #[arg(long, env = "PARWORKS_NODE_BUDGET")]
    pub node_budget: Option<u64>,
    /// Seconds.
    #[arg(long, env = "PARWORKS_TIME_BUDGET")]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Journal file; an existing journal for the same run is resumed.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Write the certificate here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundKind {
    E,
    Gowers,
    R,
    Ram,
    F13Alpha,
    F13,
    Hj,
    HjReduced,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// Index of `E_n`.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Arguments of `E_n`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub r: u64,
    #[arg(long, default_value_t = 3)]
    pub m: u64,
    #[arg(long, default_value_t = 2)]
    pub l: u64,
    #[arg(long, default_value_t = 2)]
    pub colors: u64,
    #[arg(long, default_value_t = 2)]
    pub alphabet: u64,
    #[arg(long, default_value_t = 1)]
    pub dim: u64,
    /// Exact value of the grid number used by `hj`.
    #[arg(long, conflicts_with_all = ["w_atom", "w_gowers"])]
    pub w: Option<u64>,
    /// Keep the grid number as a named atom.
    #[arg(long)]
    pub w_atom: Option<String>,
    /// Use the tower bound for the grid number (binary alphabet only).
    #[arg(long)]
    pub w_gowers: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub digit_budget: usize,
    /// Print the JSON form instead of the rendered value.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Check that no singleton-block subspace is monochromatic under parity.
    #[arg(long)]
    pub counterexample: bool,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    /// Witness file to validate against `--coloring`.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// Check the coloring is invariant under `--equiv`.
    #[arg(long)]
    pub invariant: bool,
    #[arg(long, value_enum, default_value_t = EquivName::Full)]
    pub equiv: EquivName,
}
