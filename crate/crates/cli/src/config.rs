//! TOML run configuration for `plp simulate`.
//!
//! ```toml
//! theta_values = [0.5, 1.7441, 4.0]
//! sample_sizes = [40]
//! replicates = 500
//! master_seed = 2024
//! beta_source = { fixed = 0.7054 }
//! priors = ["burr", "jeffreys", "invgamma", "kde-gauss", "kde-epan"]
//! f1 = 1.0
//! f2 = 1.0
//! re_range = [0.7, 3256.3]
//!
//! [output]
//! prefix = "theta_sweep"
//! format = "both"
//! ```
//!
//! `priors` may instead be a table carrying hyperparameter overrides:
//! `priors = { use = ["burr", "kde-epan"], bandwidth_epan = 0.04 }`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use plp_core::montecarlo::PriorSample;
use plp_core::priors::{PriorKind, PriorOverrides};
use plp_core::quadrature::UpperLimit;
use plp_core::{BetaSource, BurrParams, HtLoss, InvGammaParams, QuadratureConfig, SimConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorsSection {
    List(Vec<PriorKind>),
    Table(PriorTable),
}

impl Default for PriorsSection {
    fn default() -> Self {
        PriorsSection::List(PriorKind::ALL.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorTable {
    #[serde(rename = "use")]
    pub kinds: Vec<PriorKind>,
    #[serde(default)]
    pub burr: Option<BurrParams>,
    #[serde(default)]
    pub invgamma: Option<InvGammaParams>,
    #[serde(default)]
    pub bandwidth_gauss: Option<f64>,
    #[serde(default)]
    pub bandwidth_epan: Option<f64>,
    #[serde(default)]
    pub sample: Option<PriorSample>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_refinements: Option<u32>,
    pub drop_nats: Option<f64>,
    pub lower: Option<f64>,
}

impl QuadratureSection {
    pub fn resolve(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            lower: self.lower,
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_refinements: self.max_refinements.unwrap_or(d.max_refinements),
            upper: match self.drop_nats {
                Some(drop_nats) => UpperLimit::Auto { drop_nats },
                None => d.upper,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub prefix: Option<PathBuf>,
    pub format: Option<TableFormat>,
}

fn one() -> f64 {
    1.0
}

fn crow_range() -> [f64; 2] {
    [0.7, 3256.3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theta_values: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub beta_source: BetaSource,
    #[serde(default)]
    pub priors: PriorsSection,
    #[serde(default = "one")]
    pub f1: f64,
    #[serde(default = "one")]
    pub f2: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    /// Time range of the relative-efficiency integrals.
    #[serde(default = "crow_range")]
    pub re_range: [f64; 2],
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("invalid config: {e}")))
    }

    /// Checks the whole configuration and converts it for the engine.
    pub fn to_sim_config(&self) -> CliResult<SimConfig> {
        let (kinds, overrides, sample) = match &self.priors {
            PriorsSection::List(kinds) => (kinds.clone(), PriorOverrides::default(), None),
            PriorsSection::Table(t) => (
                t.kinds.clone(),
                PriorOverrides {
                    burr: t.burr,
                    invgamma: t.invgamma,
                    bandwidth_gauss: t.bandwidth_gauss,
                    bandwidth_epan: t.bandwidth_epan,
                },
                t.sample.clone(),
            ),
        };
        let bad = |msg: String| CliError::Input(format!("invalid config: {msg}"));
        let loss = HtLoss::new(self.f1, self.f2).map_err(|e| bad(e.to_string()))?;
        let [lo, hi] = self.re_range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(bad(format!("re_range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
        }
        let sim = SimConfig {
            theta_values: self.theta_values.clone(),
            sample_sizes: self.sample_sizes.clone(),
            replicates: self.replicates,
            beta_source: self.beta_source,
            priors: kinds,
            prior_sample: sample.unwrap_or_default(),
            prior_overrides: overrides,
            loss,
            master_seed: self.master_seed,
            quad: self.quadrature.resolve(),
            threads: None,
            keep_replicates: false,
        };
        sim.validate().map_err(|e| bad(e.to_string()))?;
        plp_core::priors::PriorBuilder::new(Vec::new(), sim.prior_overrides)
            .map_err(|e| bad(e.to_string()))?;
        Ok(sim)
    }
}
