//! Estimation of the Power Law Process (failure-truncated NHPP) for
//! software reliability growth.
//!
//! * [`plp`]: intensity, reliability, likelihood, MLEs and a sampler.
//! * [`priors`]: Burr XII, Jeffreys, inverted gamma and kernel priors over β.
//! * [`bayes`]: the Higgins-Tsokos loss and its Bayes estimator of β.
//! * [`montecarlo`]: replicated MSE / relative-efficiency studies.

pub mod bayes;
pub mod crow;
pub mod error;
pub mod montecarlo;
pub mod optim;
pub mod plp;
pub mod priors;
pub mod quadrature;
pub mod rng;

pub use bayes::{
    adjusted_theta, bayes_intensity, bayes_reliability, ht_bayes_estimate, ht_loss,
    posterior_log_unnorm, posterior_mean, BayesFit, HtLoss, PosteriorSpec,
};
pub use error::{Error, Result};
pub use montecarlo::{
    imse, mse, relative_efficiency, run_campaign, sensitivity_sweep, BetaSource, SimConfig,
    SimResult,
};
pub use plp::{
    conditional_reliability, count_pmf, cumulative_intensity, intensity, log_likelihood,
    mle_beta, mle_beta_trajectory, mle_theta, simulate_failure_times, FailureTimes,
    IntensityForm, PlpParams,
};
pub use priors::{BurrParams, InvGammaParams, Kernel, KernelSpec, Prior};
pub use quadrature::QuadratureConfig;
