//! Bayes estimation of the shape parameter under the Higgins-Tsokos loss.
//!
//! For loss weights `(f₁, f₂)` the Bayes estimator minimising posterior risk is
//!
//! ```text
//! β̂ = 1/(f₁+f₂) · ln( ∫ e^{f₁β} h(β|t) dβ / ∫ e^{-f₂β} h(β|t) dβ )
//! ```
//!
//! Both integrals are evaluated on the log scale against an unnormalised
//! posterior; the normalising constant cancels in the ratio.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::plp::{
    conditional_reliability, mle_theta, FailureTimes, IntensityForm, LikelihoodStats, PlpParams,
};
use crate::priors::Prior;
use crate::quadrature::{effective_range, integrate_log, LogIntegral, QuadratureConfig, UpperLimit};

/// Weights of the Higgins-Tsokos loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtLoss {
    pub f1: f64,
    pub f2: f64,
}

impl HtLoss {
    pub fn new(f1: f64, f2: f64) -> Result<Self> {
        ensure_positive("f1", f1)?;
        ensure_positive("f2", f2)?;
        Ok(Self { f1, f2 })
    }
}

impl Default for HtLoss {
    fn default() -> Self {
        Self { f1: 1.0, f2: 1.0 }
    }
}

/// `[f₁ e^{f₂Δ} + f₂ e^{-f₁Δ}] / (f₁+f₂) - 1` with `Δ = estimate - truth`.
pub fn ht_loss(estimate: f64, truth: f64, loss: HtLoss) -> f64 {
    let HtLoss { f1, f2 } = loss;
    let d = estimate - truth;
    // expm1 keeps the small-Δ regime accurate; the sum is exactly 0 at Δ = 0
    (f1 * (f2 * d).exp_m1() + f2 * (-f1 * d).exp_m1()) / (f1 + f2)
}

/// An unnormalised log posterior density over β.
pub trait LogPosterior {
    fn log_density(&self, beta: f64) -> f64;
    fn support_lower(&self) -> f64;
}

/// Failure data, the (known) scale θ and a prior over β.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSpec {
    pub data: FailureTimes,
    pub theta: f64,
    pub prior: Prior,
}

impl PosteriorSpec {
    pub fn new(data: FailureTimes, theta: f64, prior: Prior) -> Result<Self> {
        ensure_positive("theta", theta)?;
        prior.validate()?;
        Ok(Self { data, theta, prior })
    }

    pub fn posterior(&self) -> PlpPosterior<'_> {
        PlpPosterior {
            stats: LikelihoodStats::from_data(&self.data),
            theta: self.theta,
            prior: &self.prior,
        }
    }
}

/// `log L(t; β, θ) + log g(β)`.
#[derive(Debug, Clone, Copy)]
pub struct PlpPosterior<'a> {
    pub stats: LikelihoodStats,
    pub theta: f64,
    pub prior: &'a Prior,
}

impl LogPosterior for PlpPosterior<'_> {
    #[inline]
    fn log_density(&self, beta: f64) -> f64 {
        if beta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lp = self.prior.log_density(beta);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        self.stats.log_likelihood(beta, self.theta) + lp
    }

    fn support_lower(&self) -> f64 {
        self.prior.support_lower()
    }
}

/// A log posterior given directly as a closure, supported on `[lower, ∞)`.
pub struct FnPosterior<F> {
    pub log_density: F,
    pub lower: f64,
}

impl<F: Fn(f64) -> f64> LogPosterior for FnPosterior<F> {
    fn log_density(&self, beta: f64) -> f64 {
        (self.log_density)(beta)
    }

    fn support_lower(&self) -> f64 {
        self.lower
    }
}

/// Unnormalised log posterior at `beta`; `-∞` outside the prior support.
pub fn posterior_log_unnorm(spec: &PosteriorSpec, beta: f64) -> Result<f64> {
    ensure_positive("beta", beta)?;
    Ok(spec.posterior().log_density(beta))
}

fn log_expectation<G: Fn(f64) -> f64>(
    log_integrand: G,
    lower: f64,
    quad: &QuadratureConfig,
) -> Result<std::result::Result<LogIntegral, (f64, f64, f64)>> {
    let drop = match quad.upper {
        UpperLimit::Auto { drop_nats } => drop_nats,
        UpperLimit::Fixed(_) => 45.0,
    };
    let range = effective_range(&log_integrand, lower, drop)?;
    let (lo, hi) = match quad.upper {
        UpperLimit::Auto { .. } => (range.lower, range.upper),
        UpperLimit::Fixed(u) => {
            if u <= lower {
                return Err(Error::Domain(format!(
                    "fixed upper limit {u} does not exceed the lower limit {lower}"
                )));
            }
            (lower, u)
        }
    };
    match integrate_log(&log_integrand, lo, hi, range.max_log, quad) {
        Ok(li) => {
            if !li.ln_value.is_finite() {
                return Err(Error::Estimation(format!(
                    "posterior mass is negligible on [{lo}, {hi}]"
                )));
            }
            Ok(Ok(li))
        }
        Err(nc) => Ok(Err((nc.partial.value.ln() + range.max_log, lo, hi))),
    }
}

fn ratio_of_expectations<P: LogPosterior, A: Fn(f64) -> f64, B: Fn(f64) -> f64>(
    post: &P,
    quad: &QuadratureConfig,
    numerator_tilt: A,
    denominator_tilt: B,
) -> Result<f64> {
    quad.validate()?;
    let lower = quad.lower.unwrap_or_else(|| post.support_lower());
    let num = log_expectation(|b| post.log_density(b) + numerator_tilt(b), lower, quad)?;
    let den = log_expectation(|b| post.log_density(b) + denominator_tilt(b), lower, quad)?;
    match (num, den) {
        (Ok(n), Ok(d)) => Ok(n.ln_value - d.ln_value),
        (n, d) => {
            let (ln_n, lo, hi) = n.map(|li| (li.ln_value, li.lower, li.upper)).unwrap_or_else(|e| e);
            let (ln_d, ..) = d.map(|li| (li.ln_value, li.lower, li.upper)).unwrap_or_else(|e| e);
            Err(Error::Quadrature {
                reason: format!(
                    "no convergence within {} refinement levels at rel_tol {:e}",
                    quad.max_refinements, quad.rel_tol
                ),
                lower: lo,
                upper: hi,
                ln_numerator: ln_n,
                ln_denominator: ln_d,
            })
        }
    }
}

/// Higgins-Tsokos Bayes estimate for an arbitrary unnormalised log posterior.
pub fn ht_estimate<P: LogPosterior>(post: &P, loss: HtLoss, quad: &QuadratureConfig) -> Result<f64> {
    HtLoss::new(loss.f1, loss.f2)?;
    let ln_ratio = ratio_of_expectations(post, quad, |b| loss.f1 * b, |b| -loss.f2 * b)?;
    Ok(ln_ratio / (loss.f1 + loss.f2))
}

/// Higgins-Tsokos Bayes estimate of β for failure data, known θ and a prior.
pub fn ht_bayes_estimate(spec: &PosteriorSpec, loss: HtLoss, quad: &QuadratureConfig) -> Result<f64> {
    ht_estimate(&spec.posterior(), loss, quad)
}

/// `∫ β h dβ / ∫ h dβ` for an arbitrary unnormalised log posterior.
pub fn mean_of<P: LogPosterior>(post: &P, quad: &QuadratureConfig) -> Result<f64> {
    let ln_ratio = ratio_of_expectations(post, quad, |b: f64| b.ln(), |_| 0.0)?;
    Ok(ln_ratio.exp())
}

pub fn posterior_mean(spec: &PosteriorSpec, quad: &QuadratureConfig) -> Result<f64> {
    mean_of(&spec.posterior(), quad)
}

/// `θ̂ = t_n / n^(1/β̂)` evaluated at a Bayes estimate of β.
pub fn adjusted_theta(data: &FailureTimes, beta_bayes: f64) -> Result<f64> {
    mle_theta(data, beta_bayes)
}

/// Intensity fitted from a Bayes estimate of β and the adjusted θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFit {
    pub params: PlpParams,
    pub form: IntensityForm,
}

impl BayesFit {
    pub fn intensity(&self, t: f64) -> f64 {
        self.form.eval(t)
    }
}

pub fn bayes_intensity(data: &FailureTimes, beta_bayes: f64) -> Result<BayesFit> {
    let theta = adjusted_theta(data, beta_bayes)?;
    let params = PlpParams::new(beta_bayes, theta)?;
    Ok(BayesFit {
        params,
        form: params.intensity_form(),
    })
}

/// Conditional reliability on `(t_prev, t]` under the Bayes intensity.
pub fn bayes_reliability(data: &FailureTimes, beta_bayes: f64, t_prev: f64, t: f64) -> Result<f64> {
    let fit = bayes_intensity(data, beta_bayes)?;
    conditional_reliability(fit.params, t_prev, t)
}
