//! The Power Law Process (Crow-AMSAA) model for failure-truncated data.
//!
//! Intensity `V(t) = (β/θ)(t/θ)^(β-1)`, cumulative intensity `Λ(t) = (t/θ)^β`.
//! Everything that touches the likelihood stays in log space: the product form
//! overflows double precision long before realistic sample sizes.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Error, Result};

/// Strictly increasing, positive failure epochs observed until the `n`-th
/// failure. The stopping time is always the last entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureTimes {
    times: Vec<f64>,
}

impl FailureTimes {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(domain("failure times must be non-empty"));
        }
        for (i, &t) in times.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(domain(format!("failure time #{} must be finite and > 0, got {t}", i + 1)));
            }
            if i > 0 && t <= times[i - 1] {
                return Err(domain(format!(
                    "failure times must be strictly increasing: t[{}] = {} follows {}",
                    i + 1,
                    t,
                    times[i - 1]
                )));
            }
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    /// Stopping time `w = t_n` (failure truncation).
    pub fn stopping_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// The first `k` failures, as if observation had stopped at `t_k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(domain(format!("cannot truncate {} failures to {k}", self.len())));
        }
        Ok(Self {
            times: self.times[..k].to_vec(),
        })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ensure_positive("scale factor", factor)?;
        Self::new(self.times.iter().map(|t| t * factor).collect())
    }
}

/// Shape `beta` and scale `theta` of the intensity function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlpParams {
    pub beta: f64,
    pub theta: f64,
}

impl PlpParams {
    pub fn new(beta: f64, theta: f64) -> Result<Self> {
        ensure_positive("beta", beta)?;
        ensure_positive("theta", theta)?;
        Ok(Self { beta, theta })
    }

    fn validate(&self) -> Result<()> {
        ensure_positive("beta", self.beta)?;
        ensure_positive("theta", self.theta)
    }

    /// Coefficient-exponent form `a·t^b` of the intensity.
    pub fn intensity_form(&self) -> IntensityForm {
        IntensityForm {
            coefficient: self.beta / self.theta.powf(self.beta),
            exponent: self.beta - 1.0,
        }
    }
}

/// A fitted intensity written as `coefficient · t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityForm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl IntensityForm {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficient * t.powf(self.exponent)
    }
}

/// `V(t) = (β/θ)(t/θ)^(β-1)`.
pub fn intensity(params: PlpParams, t: f64) -> Result<f64> {
    params.validate()?;
    ensure_positive("t", t)?;
    let PlpParams { beta, theta } = params;
    Ok(beta / theta * ((beta - 1.0) * (t / theta).ln()).exp())
}

/// `Λ(t) = (t/θ)^β`, the expected number of failures in `(0, t]`.
pub fn cumulative_intensity(params: PlpParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((params.beta * (t / params.theta).ln()).exp())
}

/// Probability of exactly `n` failures in `(0, t]`.
pub fn count_pmf(params: PlpParams, n: u64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let lambda = cumulative_intensity(params, t)?;
    let n = n as f64;
    let log_p = -lambda + n * lambda.ln() - libm::lgamma(n + 1.0);
    Ok(log_p.exp())
}

/// `R(t | t_prev) = exp{-[Λ(t) - Λ(t_prev)]}`: probability of no failure in
/// `(t_prev, t]`.
pub fn conditional_reliability(params: PlpParams, t_prev: f64, t: f64) -> Result<f64> {
    if !(t_prev.is_finite() && t_prev >= 0.0) {
        return Err(domain(format!("t_prev must be finite and >= 0, got {t_prev}")));
    }
    if !(t.is_finite() && t >= t_prev) {
        return Err(domain(format!("t = {t} precedes t_prev = {t_prev}")));
    }
    let upper = cumulative_intensity(params, t)?;
    let lower = cumulative_intensity(params, t_prev)?;
    Ok((-(upper - lower)).exp())
}

/// Sufficient statistics of the failure-truncated likelihood: `n`, `t_n` and
/// `Σ ln t_i`. Evaluating the log-likelihood from these is O(1) per call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodStats {
    pub n: usize,
    pub last: f64,
    pub sum_ln: f64,
}

impl LikelihoodStats {
    pub fn from_data(data: &FailureTimes) -> Self {
        Self {
            n: data.len(),
            last: data.stopping_time(),
            sum_ln: data.times().iter().map(|t| t.ln()).sum(),
        }
    }

    /// `-(t_n/θ)^β + n ln(β/θ) + (β-1) Σ ln(t_i/θ)`, unchecked.
    #[inline]
    pub fn log_likelihood(&self, beta: f64, theta: f64) -> f64 {
        let n = self.n as f64;
        let ln_theta = theta.ln();
        -(beta * (self.last.ln() - ln_theta)).exp()
            + n * (beta.ln() - ln_theta)
            + (beta - 1.0) * (self.sum_ln - n * ln_theta)
    }
}

/// Log-likelihood of the first `n` failure times.
pub fn log_likelihood(data: &FailureTimes, params: PlpParams) -> Result<f64> {
    params.validate()?;
    let PlpParams { beta, theta } = params;
    let n = data.len() as f64;
    let sum_ln_ratio: f64 = data.times().iter().map(|t| (t / theta).ln()).sum();
    Ok(-(beta * (data.stopping_time() / theta).ln()).exp()
        + n * (beta / theta).ln()
        + (beta - 1.0) * sum_ln_ratio)
}

/// `β̂ = n / Σ ln(t_n / t_i)`.
pub fn mle_beta(data: &FailureTimes) -> Result<f64> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Estimation(format!(
            "the shape MLE needs at least 2 failures, got {n}"
        )));
    }
    let last = data.stopping_time();
    let denom: f64 = data.times().iter().map(|t| (last / t).ln()).sum();
    if !(denom > 0.0) {
        return Err(Error::Estimation(
            "the shape MLE is undefined: all failure times coincide with t_n".into(),
        ));
    }
    Ok(n as f64 / denom)
}

/// `θ̂ = t_n / n^(1/β̂)`.
pub fn mle_theta(data: &FailureTimes, beta_hat: f64) -> Result<f64> {
    ensure_positive("beta_hat", beta_hat)?;
    let n = data.len() as f64;
    Ok(data.stopping_time() / n.powf(1.0 / beta_hat))
}

/// Shape MLEs of every truncation `t_1..t_k` for `k = n_min..=n`.
pub fn mle_beta_trajectory(data: &FailureTimes, n_min: usize) -> Result<Vec<f64>> {
    if n_min < 2 || n_min > data.len() {
        return Err(domain(format!(
            "trajectory start must lie in [2, {}], got {n_min}",
            data.len()
        )));
    }
    (n_min..=data.len())
        .map(|k| mle_beta(&data.truncated(k)?))
        .collect()
}

/// Draws the first `n` failure times of a PLP by inverting the conditional
/// CDF of each gap: `Λ(t_i) = Λ(t_{i-1}) + E_i`, `E_i ~ Exp(1)`, `t_0 = 0`.
pub fn simulate_failure_times<R: Rng + ?Sized>(
    params: PlpParams,
    n: usize,
    rng: &mut R,
) -> Result<FailureTimes> {
    params.validate()?;
    if n == 0 {
        return Err(domain("cannot simulate zero failures"));
    }
    let inv_beta = 1.0 / params.beta;
    let mut times = Vec::with_capacity(n);
    let mut cumulative = 0.0_f64;
    let mut prev = 0.0_f64;
    while times.len() < n {
        let u: f64 = rng.sample(Open01);
        let next_cumulative = cumulative - (-u).ln_1p();
        let t = params.theta * next_cumulative.powf(inv_beta);
        cumulative = next_cumulative;
        // a gap below the float resolution at t_{i-1} is redrawn
        if t > prev && t.is_finite() {
            times.push(t);
            prev = t;
        } else if !t.is_finite() {
            return Err(Error::Estimation(format!(
                "simulated failure time overflowed at index {}",
                times.len() + 1
            )));
        }
    }
    FailureTimes::new(times)
}
