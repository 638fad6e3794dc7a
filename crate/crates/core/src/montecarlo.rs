//! Replicated simulation campaigns comparing the shape MLE with Bayes
//! estimates under each prior, and relative efficiency of fitted intensities.
//!
//! Replicate `k` of every `(θ, n)` cell draws from random stream `k` of the
//! master seed, so a campaign is reproducible bit for bit whatever the
//! thread count, and all priors score the same simulated dataset.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bayes::{adjusted_theta, ht_bayes_estimate, HtLoss, PosteriorSpec};
use crate::crow::crow_failure_times;
use crate::error::{domain, ensure_positive, Error, Result};
use crate::plp::{
    mle_beta, mle_beta_trajectory, mle_theta, simulate_failure_times, FailureTimes, IntensityForm,
    PlpParams,
};
use crate::priors::{BurrParams, PriorBuilder, PriorKind, PriorOverrides, ResolvedPrior};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::rng::replicate_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    Fixed(f64),
    /// A fresh β per replicate from a Burr distribution.
    BurrSampled(BurrParams),
}

/// Where the β sample behind fitted priors comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSample {
    /// Shape MLEs of Crow's data truncated at `n_min..=40` failures.
    CrowTrajectory { n_min: usize },
    Values(Vec<f64>),
}

impl Default for PriorSample {
    fn default() -> Self {
        PriorSample::CrowTrajectory { n_min: 5 }
    }
}

impl PriorSample {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            PriorSample::CrowTrajectory { n_min } => {
                mle_beta_trajectory(&crow_failure_times(), *n_min)
            }
            PriorSample::Values(v) => Ok(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub theta_values: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub beta_source: BetaSource,
    pub priors: Vec<PriorKind>,
    pub prior_sample: PriorSample,
    pub prior_overrides: PriorOverrides,
    pub loss: HtLoss,
    pub master_seed: u64,
    pub quad: QuadratureConfig,
    /// Worker threads; `None` uses the global pool. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Keep one record per replicate in the result.
    pub keep_replicates: bool,
}

impl SimConfig {
    /// The fixed-β, `θ = 1.7441`, `n = 40` setting with all five priors.
    pub fn crow_setting(replicates: usize, master_seed: u64) -> Self {
        Self {
            theta_values: vec![1.7441],
            sample_sizes: vec![40],
            replicates,
            beta_source: BetaSource::Fixed(0.7054),
            priors: PriorKind::ALL.to_vec(),
            prior_sample: PriorSample::default(),
            prior_overrides: PriorOverrides::default(),
            loss: HtLoss::default(),
            master_seed,
            quad: QuadratureConfig::default(),
            threads: None,
            keep_replicates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_values.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::Config("theta_values and sample_sizes must be non-empty".into()));
        }
        for &t in &self.theta_values {
            ensure_positive("theta", t).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("sample sizes must be >= 2, got {n}")));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        match &self.beta_source {
            BetaSource::Fixed(b) => ensure_positive("beta", *b),
            BetaSource::BurrSampled(p) => p.validate(),
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        HtLoss::new(self.loss.f1, self.loss.f2).map_err(|e| Error::Config(e.to_string()))?;
        self.quad.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        Ok(())
    }

    /// SHA-256 over the JSON form of the configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        hex_digest(json.as_bytes())
    }

    /// Estimator labels in output order: `beta:mle`, `theta:mle`, then
    /// `beta:<prior>` and `theta:<prior>` per configured prior.
    pub fn estimator_labels(&self) -> Vec<String> {
        let mut labels = vec!["beta:mle".to_string(), "theta:mle".to_string()];
        for p in &self.priors {
            labels.push(format!("beta:{p}"));
            labels.push(format!("theta:{p}"));
        }
        labels
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Content hash of a dataset (bit patterns of the failure times).
pub fn dataset_hash(data: &FailureTimes) -> String {
    let bytes: Vec<u8> = data.times().iter().flat_map(|t| t.to_bits().to_le_bytes()).collect();
    hex_digest(&bytes)[..16].to_string()
}

/// Aggregate of one estimator in one `(θ, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub theta: f64,
    pub n: usize,
    pub estimator: String,
    pub mean: f64,
    pub mse: f64,
    /// Always the configured replicate count.
    pub replicates: usize,
    /// Replicates excluded from `mean`/`mse` because estimation failed.
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub theta: f64,
    pub n: usize,
    pub index: usize,
    pub true_beta: f64,
    pub dataset_hash: String,
    /// Aligned with [`SimConfig::estimator_labels`]; `None` on failure.
    pub estimates: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignMeta {
    pub master_seed: u64,
    pub config_hash: String,
    pub wall_time_secs: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub cells: Vec<CellStats>,
    pub priors: Vec<ResolvedPrior>,
    pub metadata: CampaignMeta,
    pub records: Vec<ReplicateRecord>,
}

impl SimResult {
    pub fn cell(&self, theta: f64, n: usize, estimator: &str) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.theta == theta && c.n == n && c.estimator == estimator)
    }
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean squared deviation of `estimates` from the per-replicate `truths`.
pub fn mse(estimates: &[f64], truths: &[f64]) -> Result<f64> {
    if estimates.len() != truths.len() {
        return Err(domain(format!(
            "length mismatch: {} estimates vs {} truths",
            estimates.len(),
            truths.len()
        )));
    }
    if estimates.is_empty() {
        return Err(domain("mse of an empty sample"));
    }
    let sq: Vec<f64> = estimates.iter().zip(truths).map(|(e, t)| (e - t).powi(2)).collect();
    Ok(pairwise_sum(&sq) / sq.len() as f64)
}

/// `∫ [V̂(t) - V(t)]² dt` over `range`, integrated on a log-time axis.
pub fn imse(fitted: IntensityForm, truth: PlpParams, range: (f64, f64)) -> Result<f64> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(domain(format!("IMSE range must satisfy 0 < t_lo < t_hi, got ({lo}, {hi})")));
    }
    let truth_form = PlpParams::new(truth.beta, truth.theta)?.intensity_form();
    let integrand = |s: f64| {
        let t = s.exp();
        let d = fitted.eval(t) - truth_form.eval(t);
        d * d * t
    };
    integrate(integrand, lo.ln(), hi.ln(), 1e-12, 1e-300, 50)
        .map(|r| r.value)
        .map_err(|nc| Error::Quadrature {
            reason: "IMSE quadrature did not converge".into(),
            lower: lo,
            upper: hi,
            ln_numerator: nc.partial.value.ln(),
            ln_denominator: f64::NAN,
        })
}

/// `RE = IMSE(candidate) / IMSE(reference)`; below 1 favours the candidate.
pub fn relative_efficiency(imse_candidate: f64, imse_reference: f64) -> Result<f64> {
    if !(imse_candidate >= 0.0 && imse_candidate.is_finite()) {
        return Err(domain(format!("IMSE must be finite and >= 0, got {imse_candidate}")));
    }
    if !(imse_reference.is_finite() && imse_reference >= 0.0) {
        return Err(domain(format!("IMSE must be finite and >= 0, got {imse_reference}")));
    }
    if imse_reference == 0.0 {
        return Err(Error::Degenerate(
            "reference IMSE is 0: the reference fit is exact".into(),
        ));
    }
    Ok(imse_candidate / imse_reference)
}

struct Outcome {
    true_beta: f64,
    hash: String,
    estimates: Vec<Option<f64>>,
}

/// Regenerates the dataset of replicate `index` in cell `(theta, n)`.
pub fn replicate_dataset(config: &SimConfig, theta: f64, n: usize, index: usize) -> Result<(f64, FailureTimes)> {
    let mut rng = replicate_rng(config.master_seed, index as u64);
    let beta = match config.beta_source {
        BetaSource::Fixed(b) => b,
        BetaSource::BurrSampled(p) => p.sample(&mut rng),
    };
    let data = simulate_failure_times(PlpParams::new(beta, theta)?, n, &mut rng)?;
    Ok((beta, data))
}

fn run_replicate(
    config: &SimConfig,
    priors: &[ResolvedPrior],
    theta: f64,
    n: usize,
    index: usize,
) -> Outcome {
    let width = 2 + 2 * priors.len();
    let (true_beta, data) = match replicate_dataset(config, theta, n, index) {
        Ok(v) => v,
        Err(_) => {
            return Outcome {
                true_beta: f64::NAN,
                hash: String::new(),
                estimates: vec![None; width],
            }
        }
    };
    let mut estimates = Vec::with_capacity(width);
    let beta_hat = mle_beta(&data).ok();
    estimates.push(beta_hat);
    estimates.push(beta_hat.and_then(|b| mle_theta(&data, b).ok()));
    for p in priors {
        let bayes = PosteriorSpec::new(data.clone(), theta, p.prior.clone())
            .and_then(|spec| ht_bayes_estimate(&spec, config.loss, &config.quad))
            .ok();
        estimates.push(bayes);
        estimates.push(bayes.and_then(|b| adjusted_theta(&data, b).ok()));
    }
    Outcome {
        true_beta,
        hash: dataset_hash(&data),
        estimates,
    }
}

/// Allowed share of failed replicates before a campaign is abandoned.
pub const MAX_ERROR_FRACTION: f64 = 0.01;

/// Runs every `(θ, n)` cell of the campaign. Each replicate draws β (fixed
/// or Burr), simulates `n` failure times, and records the MLEs plus, per
/// prior, the Higgins-Tsokos Bayes estimate with θ known and the adjusted θ.
pub fn run_campaign(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();

    let mut builder = PriorBuilder::new(config.prior_sample.values()?, config.prior_overrides)?;
    let priors = config
        .priors
        .iter()
        .map(|&k| builder.build(k))
        .collect::<Result<Vec<_>>>()?;
    let labels = config.estimator_labels();

    let run_all = || -> Vec<(f64, usize, Vec<Outcome>)> {
        let mut out = Vec::new();
        for &theta in &config.theta_values {
            for &n in &config.sample_sizes {
                let outcomes: Vec<Outcome> = (0..config.replicates)
                    .into_par_iter()
                    .map(|k| run_replicate(config, &priors, theta, n, k))
                    .collect();
                out.push((theta, n, outcomes));
            }
        }
        out
    };
    let grouped = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    let mut cells = Vec::new();
    let mut records = Vec::new();
    for (theta, n, outcomes) in grouped {
        let failed = outcomes
            .iter()
            .filter(|o| o.estimates.iter().any(Option::is_none))
            .count();
        if failed as f64 > MAX_ERROR_FRACTION * config.replicates as f64 {
            return Err(Error::Estimation(format!(
                "{failed} of {} replicates failed at theta = {theta}, n = {n}",
                config.replicates
            )));
        }
        for (j, label) in labels.iter().enumerate() {
            let is_beta = label.starts_with("beta:");
            let (est, truth): (Vec<f64>, Vec<f64>) = outcomes
                .iter()
                .filter_map(|o| {
                    o.estimates[j].map(|e| (e, if is_beta { o.true_beta } else { theta }))
                })
                .unzip();
            let errors = config.replicates - est.len();
            let (mean, mse_value) = if est.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (pairwise_sum(&est) / est.len() as f64, mse(&est, &truth)?)
            };
            cells.push(CellStats {
                theta,
                n,
                estimator: label.clone(),
                mean,
                mse: mse_value,
                replicates: config.replicates,
                errors,
            });
        }
        if config.keep_replicates {
            records.extend(outcomes.into_iter().enumerate().map(|(index, o)| ReplicateRecord {
                theta,
                n,
                index,
                true_beta: o.true_beta,
                dataset_hash: o.hash,
                estimates: o.estimates,
            }));
        }
    }

    Ok(SimResult {
        cells,
        priors,
        metadata: CampaignMeta {
            master_seed: config.master_seed,
            config_hash: config.digest(),
            wall_time_secs: started.elapsed().as_secs_f64(),
            replicates: config.replicates,
        },
        records,
    })
}

/// A campaign scoring every simulated dataset with at least two priors,
/// keeping the per-replicate records for paired comparisons.
pub fn sensitivity_sweep(config: &SimConfig) -> Result<SimResult> {
    if config.priors.len() < 2 {
        return Err(Error::Config(format!(
            "a sensitivity sweep needs at least 2 priors, got {}",
            config.priors.len()
        )));
    }
    let config = SimConfig {
        keep_replicates: true,
        ..config.clone()
    };
    run_campaign(&config)
}

/// Relative efficiency of intensities built from averaged estimates of one
/// `(θ, n)` cell: the MLE pair, the Bayes β with the MLE θ, and the Bayes β
/// with the adjusted θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub prior: PriorKind,
    pub theta: f64,
    pub n: usize,
    pub range: (f64, f64),
    pub truth: IntensityForm,
    pub mle: IntensityForm,
    pub bayes_mle_theta: IntensityForm,
    pub bayes: IntensityForm,
    pub imse_mle: f64,
    pub imse_bayes_mle_theta: f64,
    pub imse_bayes: f64,
    /// `RE(V̂_B, V̂_MLE)`.
    pub re_bayes_vs_mle: f64,
    /// `RE(V̂_B, V̂*_B)` where `V̂*_B` pairs the Bayes β with the MLE θ.
    pub re_bayes_vs_mle_theta: f64,
}

pub fn efficiency_from_averages(
    result: &SimResult,
    theta: f64,
    n: usize,
    prior: PriorKind,
    true_beta: f64,
    range: (f64, f64),
) -> Result<EfficiencyReport> {
    let mean_of = |label: &str| {
        result
            .cell(theta, n, label)
            .map(|c| c.mean)
            .ok_or_else(|| domain(format!("no cell {label} at theta = {theta}, n = {n}")))
    };
    let beta_mle = mean_of("beta:mle")?;
    let theta_mle = mean_of("theta:mle")?;
    let beta_b = mean_of(&format!("beta:{prior}"))?;
    let theta_b = mean_of(&format!("theta:{prior}"))?;
    let truth = PlpParams::new(true_beta, theta)?;
    let mle = PlpParams::new(beta_mle, theta_mle)?.intensity_form();
    let star = PlpParams::new(beta_b, theta_mle)?.intensity_form();
    let bayes = PlpParams::new(beta_b, theta_b)?.intensity_form();
    let imse_mle = imse(mle, truth, range)?;
    let imse_star = imse(star, truth, range)?;
    let imse_bayes = imse(bayes, truth, range)?;
    Ok(EfficiencyReport {
        prior,
        theta,
        n,
        range,
        truth: truth.intensity_form(),
        mle,
        bayes_mle_theta: star,
        bayes,
        imse_mle,
        imse_bayes_mle_theta: imse_star,
        imse_bayes,
        re_bayes_vs_mle: relative_efficiency(imse_bayes, imse_mle)?,
        re_bayes_vs_mle_theta: relative_efficiency(imse_bayes, imse_star)?,
    })
}
