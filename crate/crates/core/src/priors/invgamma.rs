use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Error, Result};

/// Inverted gamma with shape `v` and scale `μ`:
/// `g(β) = (μ/β)^(v+1) e^(-μ/β) / (μ Γ(v))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvGammaParams {
    pub shape_v: f64,
    pub scale_mu: f64,
}

impl InvGammaParams {
    pub fn new(shape_v: f64, scale_mu: f64) -> Result<Self> {
        let p = Self { shape_v, scale_mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("shape_v", self.shape_v)?;
        ensure_positive("scale_mu", self.scale_mu)
    }

    #[inline]
    pub fn log_pdf(&self, beta: f64) -> f64 {
        if beta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (v, mu) = (self.shape_v, self.scale_mu);
        (v + 1.0) * (mu / beta).ln() - mu.ln() - libm::lgamma(v) - mu / beta
    }

    /// Matches the mean and variance of `1/β`, which is Gamma(v, rate μ)
    /// distributed: `v = m²/s²`, `μ = m/s²`.
    pub fn moment_match(sample: &[f64]) -> Result<Self> {
        if sample.len() < 2 {
            return Err(Error::Estimation(
                "moment matching needs at least 2 observations".into(),
            ));
        }
        if let Some(bad) = sample.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(domain(format!("sample values must be finite and > 0, got {bad}")));
        }
        let inv: Vec<f64> = sample.iter().map(|b| 1.0 / b).collect();
        let n = inv.len() as f64;
        let mean = inv.iter().sum::<f64>() / n;
        let var = inv.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        if !(var > 0.0) {
            return Err(Error::Estimation("moment matching on a degenerate sample".into()));
        }
        Self::new(mean * mean / var, mean / var)
    }
}
