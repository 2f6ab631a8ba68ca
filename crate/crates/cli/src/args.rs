use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use weaklab_core::disambig::{AmOptions, IqpOptions, StepRule};
use weaklab_core::model::Solver;
use weaklab_core::weights::WeightScheme;

#[derive(Debug, Parser)]
#[command(name = "weaklab", version, about = "Learning structured outputs from partial labels")]
pub struct Cli {
    /// Service to talk to; an in-process server is started when absent.
    #[arg(long, global = true, env = "WEAKLAB_SERVER")]
    pub server: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Draw a synthetic or corrupted dataset and write it as CSV.
    Generate(GenerateArgs),
    /// Build the constant-norm quadratic decomposition of a loss matrix file.
    Decompose {
        #[arg(long)]
        loss: PathBuf,
    },
    /// Recover full labels from weak sets.
    Disambiguate(DisambiguateArgs),
    /// Train a model and write it as a WLB1 file.
    Fit(FitArgs),
    /// Predict labels for feature rows with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// CSV of feature rows; a header is optional and `x_*` columns are
        /// picked when present, so dataset files work as input.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark experiment.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightKindArg {
    Knn,
    Krr,
    Nw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Am,
    Iqp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StepArg {
    Harmonic,
    LineSearch,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long = "weights", value_enum, default_value = "knn")]
    pub kind: WeightKindArg,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Keep raw Nadaraya-Watson kernel values instead of normalizing them.
    #[arg(long)]
    pub unnormalized: bool,
}

impl WeightArgs {
    pub fn scheme(&self) -> WeightScheme {
        match self.kind {
            WeightKindArg::Knn => WeightScheme::Knn { k: self.k },
            WeightKindArg::Krr => WeightScheme::Krr { lambda: self.lambda, sigma: self.sigma },
            WeightKindArg::Nw => WeightScheme::NadarayaWatson { h: self.h, normalized: !self.unnormalized },
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "am")]
    pub solver: SolverArg,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Commit to the smallest candidate on ties instead of staying agnostic.
    #[arg(long)]
    pub strict_ties: bool,
    /// Frank-Wolfe step rule of the quadratic relaxation.
    #[arg(long, value_enum, default_value = "harmonic")]
    pub step: StepArg,
}

impl SolverArgs {
    pub fn solver(&self) -> Solver {
        match self.solver {
            SolverArg::Am => {
                Solver::Am(AmOptions { max_iter: self.max_iter, tol: self.tol, agnostic_ties: !self.strict_ties })
            }
            SolverArg::Iqp => Solver::Iqp(IqpOptions {
                steps: self.max_iter,
                step_rule: match self.step {
                    StepArg::Harmonic => StepRule::Harmonic,
                    StepArg::LineSearch => StepRule::LineSearch,
                },
                gap_tol: self.tol,
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct DisambiguateArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Loss matrix file; the natural loss of the label space otherwise.
    #[arg(long)]
    pub loss: Option<PathBuf>,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Where to write `index,label` rows (stdout otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write `step,objective` rows (stdout otherwise, after the labels).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "df")]
    pub method: String,
    #[arg(long)]
    pub loss: Option<PathBuf>,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenTask {
    Classification,
    Interval,
    Ranking,
    Circles,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub task: GenTask,
    /// LIBSVM file with the full labels (classification only); Gaussian
    /// blobs are drawn otherwise.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Corruption level (classification) or pair drop probability (ranking).
    #[arg(long, default_value_t = 0.5)]
    pub corruption: f64,
    /// Number of ranked items.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, env = "WEAKLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchTask {
    Classification,
    Interval,
    Circles,
    Ranking,
    Rate,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub task: Option<BenchTask>,
    /// TOML file with the experiment settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// LIBSVM file for the classification task.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Comma-separated methods among df, il and ac.
    #[arg(long)]
    pub method: Option<String>,
    /// Corruption grid as `start:step:stop` or a list.
    #[arg(long)]
    pub corruption: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Number of repetitions with consecutive seeds.
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Weight family searched by the classification and ranking tasks.
    #[arg(long, value_enum)]
    pub weights: Option<WeightKindArg>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub h: Option<String>,
    /// Non-ambiguity degree of the rate experiment.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Neighbourhood fraction `k = ceil(k0 n)` of the rate experiment.
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Sample sizes of the rate experiment.
    #[arg(long)]
    pub n_grid: Option<String>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    #[arg(long, env = "WEAKLAB_SEED")]
    pub seed: Option<u64>,
    /// Output file; `.svg` renders a plot, anything else writes CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every configuration instead of the best one per setting.
    #[arg(long)]
    pub all: bool,
}
