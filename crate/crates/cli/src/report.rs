//! Self-describing estimate reports.

use serde::{Deserialize, Serialize};

use plp_core::priors::ResolvedPrior;
use plp_core::{HtLoss, IntensityForm, PlpParams, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub n: usize,
    pub t_1: f64,
    pub t_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    Supplied,
    MleDerived,
}

/// `R(t | s) = exp{-rate · (t^power - s^power)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityForm {
    pub rate: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateBlock {
    pub estimator: String,
    pub beta: f64,
    pub theta: f64,
    /// `V(t) = coefficient · t^exponent`.
    pub intensity: IntensityForm,
    pub reliability: ReliabilityForm,
}

impl EstimateBlock {
    pub fn new(estimator: impl Into<String>, params: PlpParams) -> Self {
        Self {
            estimator: estimator.into(),
            beta: params.beta,
            theta: params.theta,
            intensity: params.intensity_form(),
            reliability: ReliabilityForm {
                rate: params.theta.powf(-params.beta),
                power: params.beta,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub n_min: usize,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub version: String,
    pub input: InputDigest,
    pub estimates: Vec<EstimateBlock>,
    /// How θ inside the posterior was chosen; absent for MLE-only reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_mode: Option<ThetaMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_theta: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub priors: Vec<ResolvedPrior>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_sample: Option<Trajectory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<HtLoss>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_trajectory: Option<Trajectory>,
}

impl EstimateReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "input {} (n = {}, t_1 = {}, t_n = {})\n",
            self.input.path, self.input.n, self.input.t_1, self.input.t_n
        );
        if let (Some(mode), Some(theta)) = (self.theta_mode, self.posterior_theta) {
            let mode = match mode {
                ThetaMode::Supplied => "supplied",
                ThetaMode::MleDerived => "mle-derived",
            };
            s.push_str(&format!("posterior theta {theta} ({mode})\n"));
        }
        for e in &self.estimates {
            s.push_str(&format!(
                "{:<10} beta {:.6}  theta {:.6}  V(t) = {:.6} t^{:.6}\n",
                e.estimator, e.beta, e.theta, e.intensity.coefficient, e.intensity.exponent
            ));
        }
        s
    }
}

/// The part of a report `curve` needs.
#[derive(Debug, Clone, Deserialize)]
pub struct CurveSource {
    pub estimates: Vec<EstimateBlock>,
}
