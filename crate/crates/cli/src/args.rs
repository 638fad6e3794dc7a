use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use plp_core::priors::PriorKind;

use crate::config::TableFormat;

#[derive(Debug, Parser)]
#[command(
    name = "plp",
    version,
    about = "Power Law Process reliability growth: MLEs, Higgins-Tsokos Bayes estimates, simulation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum likelihood estimates of beta and theta, with the MLE trajectory
    Mle(MleArgs),
    /// Higgins-Tsokos Bayes estimate of beta under one or more priors
    Bayes(BayesArgs),
    /// Run a simulation campaign from a TOML config
    Simulate(SimulateArgs),
    /// Tabulate fitted intensity curves from a saved report
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Failure-time file: one positive value per line, '#' comments allowed
    pub file: PathBuf,
    /// Sort unsorted input instead of rejecting it (duplicates still fail)
    #[arg(long)]
    pub sorted_ok: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct MleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Smallest truncation in the MLE trajectory
    #[arg(long, default_value_t = 5, value_parser = parse_at_least_two)]
    pub n_min: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Prior: burr, jeffreys, invgamma, kde-gauss or kde-epan (repeatable)
    #[arg(long = "prior", value_parser = parse_prior, default_value = "burr")]
    pub priors: Vec<PriorKind>,
    /// Loss weight on overestimation
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub f1: f64,
    /// Loss weight on underestimation
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub f2: f64,
    /// Known theta for the posterior (default: the MLE of theta)
    #[arg(long, value_parser = parse_positive)]
    pub theta: Option<f64>,
    /// Kernel bandwidth for the kde priors (default: AMISE against the Burr fit)
    #[arg(long, value_parser = parse_positive)]
    pub bandwidth: Option<f64>,
    /// Burr hyperparameters ALPHA,GAMMA,DELTA,KAPPA (default: fitted)
    #[arg(long, value_parser = parse_burr)]
    pub burr: Option<plp_core::BurrParams>,
    /// Inverted gamma hyperparameters V,MU (default: moment-matched)
    #[arg(long, value_parser = parse_invgamma)]
    pub invgamma: Option<plp_core::InvGammaParams>,
    /// Smallest truncation in the MLE trajectory that forms the prior sample
    #[arg(long, default_value_t = 5, value_parser = parse_at_least_two)]
    pub n_min: usize,
    /// Relative tolerance of the posterior quadrature
    #[arg(long, default_value_t = 1e-9, value_parser = parse_positive)]
    pub rel_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML run configuration
    pub config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Output prefix: writes PREFIX.csv and/or PREFIX.json
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// JSON report written by `plp mle` or `plp bayes`
    pub report: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub t_lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_hi: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_prior(s: &str) -> Result<PriorKind, String> {
    s.parse().map_err(|e: plp_core::Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be a positive number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_at_least_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        Ok(v) => Err(format!("must be >= 2, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

fn parse_burr(s: &str) -> Result<plp_core::BurrParams, String> {
    let [a, g, d, k] = parse_list::<4>(s)?;
    plp_core::BurrParams::new(a, g, d, k).map_err(|e| e.to_string())
}

fn parse_invgamma(s: &str) -> Result<plp_core::InvGammaParams, String> {
    let [v, mu] = parse_list::<2>(s)?;
    plp_core::InvGammaParams::new(v, mu).map_err(|e| e.to_string())
}
