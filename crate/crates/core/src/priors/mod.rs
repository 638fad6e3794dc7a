//! Prior densities over the shape parameter β.

mod burr;
mod invgamma;
mod kde;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use burr::{burr_fit, burr_fit_from, BurrFit, BurrParams};
pub use invgamma::InvGammaParams;
pub use kde::{amise_bandwidth, kde_build, Bandwidth, KdeBuild, Kernel, KernelSpec};

use crate::error::{domain, ensure_positive, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    Burr(BurrParams),
    /// `g(β) ∝ 1/β`; improper, stored unnormalised.
    Jeffreys,
    InvertedGamma(InvGammaParams),
    Kde(KernelSpec),
}

impl Prior {
    pub fn validate(&self) -> Result<()> {
        match self {
            Prior::Burr(p) => p.validate(),
            Prior::Jeffreys => Ok(()),
            Prior::InvertedGamma(p) => p.validate(),
            Prior::Kde(k) => k.validate(),
        }
    }

    /// Log-density without argument checks; `-∞` outside the support.
    #[inline]
    pub fn log_density(&self, beta: f64) -> f64 {
        match self {
            Prior::Burr(p) => p.log_pdf(beta),
            Prior::Jeffreys => -beta.ln(),
            Prior::InvertedGamma(p) => p.log_pdf(beta),
            Prior::Kde(k) => k.log_density(beta),
        }
    }

    /// Lower end of the support on the β axis.
    pub fn support_lower(&self) -> f64 {
        match self {
            Prior::Burr(p) => p.gamma,
            _ => 0.0,
        }
    }
}

/// Log prior density at `beta > 0`.
pub fn prior_log_density(prior: &Prior, beta: f64) -> Result<f64> {
    ensure_positive("beta", beta)?;
    prior.validate()?;
    Ok(prior.log_density(beta))
}

/// The five priors the tool knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PriorKind {
    #[serde(rename = "burr")]
    Burr,
    #[serde(rename = "jeffreys")]
    Jeffreys,
    #[serde(rename = "invgamma")]
    InvGamma,
    #[serde(rename = "kde-gauss")]
    KdeGauss,
    #[serde(rename = "kde-epan")]
    KdeEpan,
}

impl PriorKind {
    pub const ALL: [PriorKind; 5] = [
        PriorKind::Burr,
        PriorKind::Jeffreys,
        PriorKind::InvGamma,
        PriorKind::KdeGauss,
        PriorKind::KdeEpan,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            PriorKind::Burr => "burr",
            PriorKind::Jeffreys => "jeffreys",
            PriorKind::InvGamma => "invgamma",
            PriorKind::KdeGauss => "kde-gauss",
            PriorKind::KdeEpan => "kde-epan",
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PriorKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| {
                domain(format!(
                    "unknown prior '{s}' (expected one of burr, jeffreys, invgamma, kde-gauss, kde-epan)"
                ))
            })
    }
}

/// User-supplied hyperparameters that replace the fitted defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorOverrides {
    pub burr: Option<BurrParams>,
    pub invgamma: Option<InvGammaParams>,
    pub bandwidth_gauss: Option<f64>,
    pub bandwidth_epan: Option<f64>,
}

/// A prior ready for use, with the hyperparameters that were actually used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedPrior {
    pub kind: PriorKind,
    pub prior: Prior,
    /// Burr log-likelihood on the prior sample, when the Burr was fitted.
    pub fit_log_likelihood: Option<f64>,
    /// Burr density used for the AMISE bandwidth of kernel priors.
    pub bandwidth_reference: Option<BurrParams>,
    /// Whether the hyperparameters were derived from the prior sample.
    pub auto_fitted: bool,
}

/// Builds priors from a sample of β values (by default the MLE trajectory of
/// the data), fitting the Burr once and sharing it between the Burr prior
/// and the AMISE reference of the kernel priors.
#[derive(Debug, Clone)]
pub struct PriorBuilder {
    sample: Vec<f64>,
    overrides: PriorOverrides,
    burr: Option<BurrFit>,
}

impl PriorBuilder {
    pub fn new(sample: Vec<f64>, overrides: PriorOverrides) -> Result<Self> {
        if let Some(b) = &overrides.burr {
            b.validate()?;
        }
        if let Some(p) = &overrides.invgamma {
            p.validate()?;
        }
        for h in [overrides.bandwidth_gauss, overrides.bandwidth_epan].into_iter().flatten() {
            ensure_positive("bandwidth", h)?;
        }
        Ok(Self {
            sample,
            overrides,
            burr: None,
        })
    }

    pub fn sample(&self) -> &[f64] {
        &self.sample
    }

    fn fitted_burr(&mut self) -> Result<BurrFit> {
        if let Some(fit) = self.burr {
            return Ok(fit);
        }
        let fit = burr_fit(&self.sample)?;
        self.burr = Some(fit);
        Ok(fit)
    }

    fn burr_reference(&mut self) -> Result<(BurrParams, Option<f64>)> {
        match self.overrides.burr {
            Some(b) => Ok((b, None)),
            None => {
                let fit = self.fitted_burr()?;
                Ok((fit.params, Some(fit.log_likelihood)))
            }
        }
    }

    pub fn build(&mut self, kind: PriorKind) -> Result<ResolvedPrior> {
        let resolved = match kind {
            PriorKind::Burr => {
                let (params, ll) = self.burr_reference()?;
                ResolvedPrior {
                    kind,
                    prior: Prior::Burr(params),
                    fit_log_likelihood: ll,
                    bandwidth_reference: None,
                    auto_fitted: ll.is_some(),
                }
            }
            PriorKind::Jeffreys => ResolvedPrior {
                kind,
                prior: Prior::Jeffreys,
                fit_log_likelihood: None,
                bandwidth_reference: None,
                auto_fitted: false,
            },
            PriorKind::InvGamma => {
                let (params, auto) = match self.overrides.invgamma {
                    Some(p) => (p, false),
                    None => (InvGammaParams::moment_match(&self.sample)?, true),
                };
                ResolvedPrior {
                    kind,
                    prior: Prior::InvertedGamma(params),
                    fit_log_likelihood: None,
                    bandwidth_reference: None,
                    auto_fitted: auto,
                }
            }
            PriorKind::KdeGauss | PriorKind::KdeEpan => {
                let (kernel, fixed) = if kind == PriorKind::KdeGauss {
                    (Kernel::Gaussian, self.overrides.bandwidth_gauss)
                } else {
                    (Kernel::Epanechnikov, self.overrides.bandwidth_epan)
                };
                let bandwidth = match fixed {
                    Some(h) => Bandwidth::Fixed(h),
                    None => Bandwidth::Amise(Some(self.burr_reference()?.0)),
                };
                let built = kde_build(&self.sample, kernel, bandwidth)?;
                ResolvedPrior {
                    kind,
                    prior: Prior::Kde(built.spec),
                    fit_log_likelihood: None,
                    bandwidth_reference: built.reference,
                    auto_fitted: fixed.is_none(),
                }
            }
        };
        Ok(resolved)
    }
}
