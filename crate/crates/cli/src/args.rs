use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const METHOD_LIST_HELP: &str = "Comma-separated methods, each `name` or `name-stop` \
(e.g. rboost-icm, pls-bic). Names: best, bem, iew, gem, ols, fsr, pcr, pls, caruana, boost, \
rboost. Stops: aic, aicc, bic, hqic, gmdl, icm (icm only with boost and rboost)";

pub const DEFAULT_METHODS: &str = "best,bem,iew,gem,ols,fsr,pcr,pls,caruana,boost-icm,rboost-icm";

#[derive(Debug, Parser)]
#[command(
    name = "stackboost",
    version,
    about = "Stacking meta-learners for ensembles of hyperparameter-search models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one meta-learner on a prediction-matrix CSV and write the model.
    Fit(FitArgs),
    /// Held-out relative MSE of several methods on one dataset CSV.
    Evaluate(EvaluateArgs),
    /// Friedman ranks and Nemenyi critical difference across datasets.
    Compare(CompareArgs),
    /// Variance inflation factors of a prediction matrix.
    Vif(VifArgs),
    /// Write synthetic datasets or Ridge prediction matrices.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Prediction-matrix CSV (model columns, then `__target__`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["best", "bem", "iew", "gem", "ols", "fsr", "pcr", "pls", "caruana", "boost", "rboost"])]
    pub method: String,
    /// Stop criterion for boost/rboost (default icm) or sweep criterion for
    /// fsr/pcr/pls (default aicc).
    #[arg(long, value_parser = ["aic", "aicc", "bic", "hqic", "gmdl", "icm"])]
    pub stop: Option<String>,
    /// Model document path; printed to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Hyperparameter sampler: gs (grid) or rs (random).
    #[arg(long, default_value = "gs", value_parser = ["gs", "rs"])]
    pub sampler: String,
    /// Number of Ridge trials.
    #[arg(long, default_value_t = 36)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset CSV (features, then the target as the last column).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = DEFAULT_METHODS, help = METHOD_LIST_HELP)]
    pub methods: String,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Dataset CSVs.
    #[arg(long, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Add this many generated collinear datasets.
    #[arg(long)]
    pub suite: Option<usize>,
    /// Seed of the generated suite.
    #[arg(long, default_value_t = 0)]
    pub suite_seed: u64,
    #[arg(long, default_value = DEFAULT_METHODS, help = METHOD_LIST_HELP)]
    pub methods: String,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Confidence level of the critical difference: 0.90 or 0.95.
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Per-cell CSV; a `.summary.csv` companion holds ranks and statistics.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VifArgs {
    /// Prediction-matrix CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Also write bucket percentages and per-column VIF as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Synthetic regression dataset CSV.
    Dataset(GenerateDatasetArgs),
    /// Out-of-fold Ridge prediction matrix built from a dataset CSV.
    Matrix(GenerateMatrixArgs),
}

#[derive(Debug, Args)]
pub struct GenerateDatasetArgs {
    #[arg(long, default_value = "redundant", value_parser = ["linear", "redundant", "underfit"])]
    pub kind: String,
    #[arg(long, default_value_t = 120)]
    pub rows: usize,
    #[arg(long, default_value_t = 8)]
    pub features: usize,
    /// Standard deviation of the target noise.
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateMatrixArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Cross-validation folds for the out-of-fold predictions.
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long)]
    pub output: PathBuf,
}
