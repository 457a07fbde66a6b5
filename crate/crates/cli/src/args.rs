use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Priorities, intransitivity and private-money elicitation for pairwise
/// comparison matrices.
///
/// Matrix inputs are read from a file or standard input (`-` or no path);
/// CSV and JSON are detected automatically. Output is JSON unless
/// `--format csv` is given.
#[derive(Debug, Parser)]
#[command(name = "pmahp", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,
    /// Human-readable tables instead of machine output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Eigen,
    Llsm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    SumOne,
    ProductOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RiSource {
    /// Estimated from random Saaty-scale matrices (`--ri-samples`, `--seed`).
    MonteCarlo,
    /// Saaty's published table (n ≤ 10).
    Saaty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InducedKind {
    Max,
    Integral,
    Both,
}

/// Seed for randomized verbs; echoed in their output.
#[derive(Debug, Clone, Args)]
pub struct SeedArg {
    #[arg(long, env = "PMAHP_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Acceptance threshold for the intransitivity √I.
    #[arg(long, default_value_t = pmm_ahp::priority::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = RiSource::MonteCarlo)]
    pub ri: RiSource,
    #[arg(long, default_value_t = 10_000)]
    pub ri_samples: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Priority weights by the eigenvector or log least-squares method.
    Weights {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Eigen)]
        method: Method,
        #[arg(long, value_enum, default_value_t = NormalizationArg::SumOne)]
        normalization: NormalizationArg,
    },
    /// λ_max, CI, RI, CR and intransitivity with the δ verdict.
    Consistency {
        input: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// The nearest transitive matrix in the log-Frobenius sense.
    Nearest { input: Option<PathBuf> },
    /// Log residuals against the nearest transitive matrix, with the entry
    /// most worth revising.
    Deviation { input: Option<PathBuf> },
    /// Full matrix and report from prices in a private coin.
    Coin {
        input: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Weighted geometric mean of a panel's coin vectors. JSON
    /// `{"importance": [...], "vectors": [[...]]}` or CSV rows
    /// `importance,price_1,...,price_n`.
    Aggregate { input: Option<PathBuf> },
    /// Global weights of a two-level hierarchy from JSON
    /// `{"criteria": [...], "alternatives": [[...], ...]}` (each summing to 1).
    Synthesize { input: Option<PathBuf> },
    /// Hilbert distance between two positive vectors, e.g. `1,2,3 2,4,7`.
    Hilbert { x: String, y: String },
    /// Distances between two positive matrices induced on portfolios.
    Induced {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = InducedKind::Both)]
        kind: InducedKind,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Skip the hill climb of each sampled portfolio.
        #[arg(long)]
        no_refine: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Split a matrix rate into flows and growths.
    Decompose { input: Option<PathBuf> },
    /// Complex eigenvalues and eigenvectors of a matrix rate.
    Eigenbasis { input: Option<PathBuf> },
    /// Fraction of random matrices whose CR falls below a threshold.
    Census {
        /// Dimensions: `5`, `3..10` or `3,5,7`.
        #[arg(long, default_value = "3..10")]
        n: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = pmm_ahp::montecarlo::DEFAULT_CR_THRESHOLD)]
        threshold: f64,
        /// Use 10⁷ samples per dimension (hours of CPU time).
        #[arg(long, conflicts_with = "samples")]
        full: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, default_value = "sessions")]
        data_dir: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        ri_samples: usize,
        #[arg(long, default_value_t = 0)]
        ri_seed: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weights { .. } => "weights",
            Command::Consistency { .. } => "consistency",
            Command::Nearest { .. } => "nearest",
            Command::Deviation { .. } => "deviation",
            Command::Coin { .. } => "coin",
            Command::Aggregate { .. } => "aggregate",
            Command::Synthesize { .. } => "synthesize",
            Command::Hilbert { .. } => "hilbert",
            Command::Induced { .. } => "induced",
            Command::Decompose { .. } => "decompose",
            Command::Eigenbasis { .. } => "eigenbasis",
            Command::Census { .. } => "census",
            Command::Serve { .. } => "serve",
        }
    }
}
