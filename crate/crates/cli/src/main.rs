//! `drlcox`: fit, evaluate and benchmark distributionally robust Cox models.

mod commands;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drl_cox::benchmark::Method;
use drl_cox::NormOrder;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "drlcox",
    version,
    about = "Distributionally robust Cox regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one model and write it as JSON.
    Fit(FitArgs),
    /// Score a saved model on a dataset (C-index and iAUC).
    Evaluate(EvaluateArgs),
    /// Run a contamination benchmark described by a TOML config.
    #[command(after_help = commands::BENCHMARK_HELP)]
    Benchmark(BenchmarkArgs),
    /// Write a shifted or outlier-corrupted copy of a dataset.
    Contaminate(ContaminateArgs),
    /// Print the radius threshold B(α) and a CV grid around it.
    SuggestRadius(RadiusArgs),
    /// Select ε by k-fold cross-validation.
    CvEpsilon(CvArgs),
}

/// How a CSV file is read and rescaled.
#[derive(Debug, Clone, Args)]
struct DataArgs {
    /// Input CSV with a header row; every other column is a covariate.
    data: PathBuf,
    #[arg(long, default_value = "duration")]
    duration_col: String,
    #[arg(long, default_value = "event")]
    event_col: String,
    /// Keep covariates on their raw scale instead of standardizing them.
    #[arg(long)]
    raw: bool,
    /// Divide durations by their standard deviation. Only the robust model is
    /// sensitive to the unit of time.
    #[arg(long)]
    unit_durations: bool,
}

/// Settings of a single fit. Every field may also come from `--config`;
/// flags given on the command line take precedence.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FitSettings {
    /// cox, ridge_cox, lasso_cox, elastic_net_cox or drl_cox.
    #[arg(long)]
    #[serde(deserialize_with = "method_from_str")]
    method: Option<Method>,
    /// Ambiguity radius; selected by cross-validation when omitted.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Regularizer norm order (1, 2 or inf).
    #[arg(long)]
    q: Option<NormOrder>,
    /// Constraint window.
    #[arg(long)]
    gamma: Option<usize>,
    /// Final smoothing temperature.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Penalty weight of the penalized baselines; selected by
    /// cross-validation when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    /// Elastic-net mixing weight of the ℓ1 term.
    #[arg(long)]
    l1_ratio: Option<f64>,
    /// Candidate radii for cross-validation (comma separated).
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
    /// Candidate penalty weights for cross-validation (comma separated).
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long)]
    folds: Option<usize>,
    /// Significance level of the radius threshold used for derived ε grids.
    #[arg(long)]
    significance: Option<f64>,
    /// Seed of the cross-validation folds.
    #[arg(long)]
    seed: Option<u64>,
}

fn method_from_str<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Method>, D::Error> {
    let s = Option::<String>::deserialize(d)?;
    s.map(|s| s.parse().map_err(serde::de::Error::custom))
        .transpose()
}

impl FitSettings {
    /// Fills every unset field from `base`.
    fn or(self, base: FitSettings) -> FitSettings {
        FitSettings {
            method: self.method.or(base.method),
            epsilon: self.epsilon.or(base.epsilon),
            q: self.q.or(base.q),
            gamma: self.gamma.or(base.gamma),
            tau: self.tau.or(base.tau),
            tol: self.tol.or(base.tol),
            max_iter: self.max_iter.or(base.max_iter),
            lambda: self.lambda.or(base.lambda),
            l1_ratio: self.l1_ratio.or(base.l1_ratio),
            epsilon_grid: self.epsilon_grid.or(base.epsilon_grid),
            lambda_grid: self.lambda_grid.or(base.lambda_grid),
            folds: self.folds.or(base.folds),
            significance: self.significance.or(base.significance),
            seed: self.seed.or(base.seed),
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    settings: FitSettings,
    /// TOML file with default values for the fit settings (kebab-case keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the model JSON here; without it the JSON goes to stdout and the
    /// report to stderr.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Model JSON written by `fit`.
    #[arg(long)]
    model: PathBuf,
    /// Evaluation CSV on the raw scale of the training file.
    data: PathBuf,
    /// Training CSV used for the censoring distribution of the iAUC weights;
    /// defaults to the evaluation file.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long, default_value = "duration")]
    duration_col: String,
    #[arg(long, default_value = "event")]
    event_col: String,
    /// Also write the scores as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Benchmark configuration (TOML).
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Methods to run (comma separated); overrides the config.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Candidate radii for cross-validation (comma separated).
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
    /// Leave the wall-time column out of rows.csv.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Debug, Args)]
struct ContaminateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Replace this many randomly chosen columns by standard-normal noise.
    #[arg(
        long,
        conflicts_with = "outliers",
        required_unless_present = "outliers"
    )]
    shift: Option<usize>,
    /// Fraction of rows receiving additive outlier noise.
    #[arg(long)]
    outliers: Option<f64>,
    /// Outlier noise in column standard deviations (1 to 5).
    #[arg(long, default_value_t = 3)]
    severity: u32,
    /// Fraction of the columns perturbed in each outlier row.
    #[arg(long, default_value_t = drl_cox::contamination::DEFAULT_FEATURE_FRACTION)]
    feature_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the 0/1 outlier row mask (one line per output row) here.
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RadiusArgs {
    #[command(flatten)]
    data: DataArgs,
    /// α in B(α); the bound holds with probability at least 1 − α.
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Regularizer norm order; the diameter uses its conjugate.
    #[arg(long, default_value = "2")]
    q: NormOrder,
    /// Number of grid points.
    #[arg(long, default_value_t = 7)]
    points: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    settings: FitSettings,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

/// Failure split by exit code: 2 for bad input or configuration, 1 for
/// everything that goes wrong at run time.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<drl_cox::Error> for CliError {
    fn from(e: drl_cox::Error) -> Self {
        use drl_cox::error::{CvError, FitError};
        use drl_cox::Error as E;
        let usage = match &e {
            E::Data(_) | E::Config(_) | E::Contamination(_) => true,
            E::Fit(FitError::InvalidConfig(_) | FitError::DimensionMismatch { .. }) => true,
            E::Cv(c) => matches!(
                c,
                CvError::EmptyGrid
                    | CvError::InvalidGridValue(_)
                    | CvError::TooFewFolds(_)
                    | CvError::Fit(FitError::InvalidConfig(_))
            ),
            _ => false,
        };
        if usage {
            CliError::Usage(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

macro_rules! lift_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                drl_cox::Error::from(e).into()
            }
        }
    )*};
}
lift_error!(
    drl_cox::error::DataError,
    drl_cox::error::FitError,
    drl_cox::error::CvError,
    drl_cox::error::ContaminationError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::Contaminate(a) => commands::contaminate(a),
        Command::SuggestRadius(a) => commands::suggest_radius(a),
        Command::CvEpsilon(a) => commands::cv_epsilon(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
