//! `elicit`: batch front end to the elicitation engine.
//!
//! Exit codes: 0 ok, 2 usage, 3 domain or fit error, 4 I/O or parse error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elicit_core::ElicitError;

#[derive(Debug, Parser)]
#[command(name = "elicit", version, about = "Fit and check elicited priors for a normal population")]
pub struct Cli {
    /// Print results (and errors) in the service's JSON shapes.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a location prior to quantile judgements about the mean.
    FitMean(FitMean),
    /// Fit a variance prior to proportion judgements about an interval.
    FitPrecision(FitPrecision),
    /// Monte Carlo feedback on the implied population distribution.
    Feedback(Feedback),
    /// Check a session document against its invariants.
    Validate(SessionFile),
    /// Rebuild a session from its history and recompute every fit.
    Replay(SessionFile),
}

#[derive(Debug, Args)]
pub struct FitMean {
    /// Probability levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub probs: Vec<f64>,
    /// Judged quantile values, one per level.
    #[arg(long, value_delimiter = ',', required = true)]
    pub vals: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lower: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub upper: f64,
    /// normal, lognormal or beta (scaled to [lower, upper]).
    #[arg(long, default_value = "normal")]
    pub family: String,
    /// Report this lower quantile of the fitted prior.
    #[arg(long)]
    pub ql: Option<f64>,
    /// Report this upper quantile of the fitted prior.
    #[arg(long)]
    pub qu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitPrecision {
    /// Interval k1,k2 on the original scale.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true, allow_hyphen_values = true)]
    pub interval: Vec<f64>,
    /// Lower and upper quantiles of the proportion in the interval, e.g. 0.3,0.35 or 30%,35%.
    #[arg(long, value_delimiter = ',', required = true)]
    pub propvals: Vec<String>,
    /// inverse-gamma, gamma-precision or lognormal-precision.
    #[arg(long, default_value = "inverse-gamma")]
    pub family: String,
    #[arg(long, default_value = "identity")]
    pub transform: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Feedback {
    /// Session document with fitted priors.
    #[arg(long, conflicts_with_all = ["mean_fit", "mean", "precision_fit", "shape"])]
    pub session: Option<PathBuf>,

    /// Output of `fit-mean --json`.
    #[arg(long, conflicts_with = "mean")]
    pub mean_fit: Option<PathBuf>,
    /// Output of `fit-precision --json`.
    #[arg(long, conflicts_with = "shape")]
    pub precision_fit: Option<PathBuf>,

    /// Normal location prior mean.
    #[arg(long, requires = "variance", allow_hyphen_values = true)]
    pub mean: Option<f64>,
    /// Normal location prior variance.
    #[arg(long, requires = "mean")]
    pub variance: Option<f64>,
    /// Inverse-gamma shape for σ².
    #[arg(long, requires = "scale")]
    pub shape: Option<f64>,
    /// Inverse-gamma scale for σ².
    #[arg(long, requires = "shape")]
    pub scale: Option<f64>,
    /// Plausible bounds for the grid (required without --session).
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<f64>,
    #[arg(long)]
    pub transform: Option<String>,

    /// Seed; defaults to the session's seed, or 1.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "K", default_value_t = 300)]
    pub k: usize,
    #[arg(long = "J", default_value_t = 300)]
    pub j: usize,
    /// Population quantiles to report intervals for.
    #[arg(long, alias = "levels", value_delimiter = ',', default_values_t = [0.05, 0.95])]
    pub quantiles: Vec<f64>,
    /// Coverage of each quantile interval.
    #[arg(long, default_value_t = 0.90)]
    pub level: f64,
    /// Coverage of the pointwise CDF band.
    #[arg(long, default_value_t = 0.95)]
    pub band_level: f64,

    /// json: the full bundle; csv: grid and band columns.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SessionFile {
    pub file: PathBuf,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Engine(ElicitError),
}

impl From<ElicitError> for Failure {
    fn from(e: ElicitError) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Engine(ElicitError::Io(_) | ElicitError::NotFound(_) | ElicitError::Parse(_)) => 4,
            Failure::Engine(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match (&f, cli.json) {
                (Failure::Engine(e), true) => {
                    let body = elicit_core::report::ApiError::from(e);
                    eprintln!("{}", serde_json::to_string(&body).expect("error serializes"));
                }
                (Failure::Engine(e), false) => eprintln!("error [{}]: {e}", e.code()),
                (Failure::Usage(m), true) => {
                    eprintln!("{}", serde_json::json!({ "code": "usage", "message": m }))
                }
                (Failure::Usage(m), false) => eprintln!("usage error: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
