use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "knnlab", version, about = "k-NN consistency experiments and metric-geometry checks")]
pub struct Cli {
    /// Print progress and summaries to stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error curve of the k-NN classifier on a labelled space.
    Consistency(CurveArgs),
    /// Error curve on a truncated Preiss space (class-1 points drift to label 0).
    Preiss(PreissArgs),
    /// Hub counts of x_1 in the harmonic hub space.
    Hub(HubArgs),
    /// Stone counts over random or simplex instances.
    Stone(StoneArgs),
    /// Exhaustive search for a dimension-violation witness in a point file.
    DimWitness(WitnessArgs),
    /// Check the alpha-heavy ball count bound on a point file.
    HlCheck(HlArgs),
    /// Largest k-NN radius over test points as n grows.
    CoverHart(CurveArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with run parameters; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed; required unless the config file sets one.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// `sqrt`, `power:E` or `fixed:K`.
    #[arg(long)]
    pub k_rule: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
    #[arg(long, value_enum)]
    pub policy: Option<Policy>,
}

#[derive(Debug, Args)]
pub struct PreissArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Truncation depth K.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Fixed number of neighbours.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
    #[arg(long, value_enum)]
    pub policy: Option<Policy>,
}

#[derive(Debug, Args)]
pub struct HubArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Largest sample size; rows cover 2..=n.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StoneArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub family: Option<StoneKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Neighbour counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub policy: Option<Policy>,
    #[arg(long, value_enum)]
    pub placement: Option<PlacementArg>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// TOML point file (`space`, `points`).
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub delta: usize,
    /// Scale s; balls have radius < s. Defaults to infinity.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Largest point set searched.
    #[arg(long, default_value_t = knnlab::nagata_geometry::DEFAULT_WITNESS_CAP)]
    pub cap: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HlArgs {
    /// TOML point file with `subset` and `radii` (and optional `boundary`).
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub delta: usize,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Confirm the delta certificate by witness search first.
    #[arg(long)]
    pub certify: bool,
    #[arg(long, default_value_t = knnlab::nagata_geometry::DEFAULT_WITNESS_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Policy {
    IndexOrder,
    UniformRandom,
}

impl Policy {
    pub fn key(self) -> &'static str {
        match self {
            Policy::IndexOrder => "index-order",
            Policy::UniformRandom => "uniform-random",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StoneKind {
    /// Uniform points on [0, 1].
    Line,
    /// Equidistant points.
    Simplex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PlacementArg {
    InPlace,
    Front,
}

impl PlacementArg {
    pub fn key(self) -> &'static str {
        match self {
            PlacementArg::InPlace => "in-place",
            PlacementArg::Front => "front",
        }
    }
}
