//! Four-parameter Burr type XII distribution: density, CDF, inverse-CDF
//! sampling, maximum-likelihood fitting, and the roughness of its second
//! derivative (needed by the AMISE bandwidth).

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::quadrature::integrate;

/// Shapes `alpha` and `kappa`, location (lower bound) `gamma`, scale `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurrParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub kappa: f64,
}

impl BurrParams {
    pub fn new(alpha: f64, gamma: f64, delta: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            alpha,
            gamma,
            delta,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("alpha", self.alpha)?;
        ensure_positive("delta", self.delta)?;
        ensure_positive("kappa", self.kappa)?;
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(domain(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Log-density; `-∞` below `gamma`.
    #[inline]
    pub fn log_pdf(&self, beta: f64) -> f64 {
        if beta < self.gamma {
            return f64::NEG_INFINITY;
        }
        let z = (beta - self.gamma) / self.delta;
        let ln_z = z.ln();
        let shape_term = if self.alpha == 1.0 { 0.0 } else { (self.alpha - 1.0) * ln_z };
        (self.alpha * self.kappa / self.delta).ln() + shape_term
            - (self.kappa + 1.0) * (self.alpha * ln_z).exp().ln_1p()
    }

    pub fn pdf(&self, beta: f64) -> f64 {
        self.log_pdf(beta).exp()
    }

    /// `1 - [1 + ((β-γ)/δ)^α]^(-κ)` above `gamma`, else 0.
    pub fn cdf(&self, beta: f64) -> f64 {
        if beta <= self.gamma {
            return 0.0;
        }
        let z = (beta - self.gamma) / self.delta;
        -(-self.kappa * z.powf(self.alpha).ln_1p()).exp_m1()
    }

    /// Inverse CDF: `γ + δ[(1-u)^(-1/κ) - 1]^(1/α)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let inner = (-(-u).ln_1p() / self.kappa).exp_m1();
        self.gamma + self.delta * inner.powf(1.0 / self.alpha)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.sample(Open01))
    }

    pub fn log_likelihood(&self, sample: &[f64]) -> f64 {
        sample.iter().map(|&x| self.log_pdf(x)).sum()
    }

    /// Second derivative of the density at `beta > gamma`.
    pub fn pdf_second_derivative(&self, beta: f64) -> f64 {
        let z = (beta - self.gamma) / self.delta;
        self.pdf(beta) * self.log_curvature_terms(z) / (self.delta * self.delta)
    }

    // (g² + g') with g = d ln f / dz, so that f'' = f (g² + g') / δ².
    fn log_curvature_terms(&self, z: f64) -> f64 {
        let (a, k) = (self.alpha, self.kappa);
        let za = z.powf(a);
        let g = (a - 1.0) / z - (k + 1.0) * a * za / (z * (1.0 + za));
        let dg = -(a - 1.0) / (z * z)
            - (k + 1.0) * a * (za / (z * z)) * (a - 1.0 - za) / ((1.0 + za) * (1.0 + za));
        g * g + dg
    }

    /// `R(f'') = ∫ f''(β)² dβ`, by adaptive quadrature of the analytic second
    /// derivative on `z = (β-γ)/δ ∈ (0, ∞)` mapped to `u = z/(1+z) ∈ (0, 1)`.
    ///
    /// Finite only for `alpha > 5/2`: below that `f''²` is not integrable at
    /// the lower support edge.
    pub fn second_derivative_roughness(&self) -> Result<f64> {
        self.validate()?;
        if self.alpha <= 2.5 {
            return Err(Error::Estimation(format!(
                "Burr reference with alpha = {} has a non-integrable squared second derivative (needs alpha > 2.5)",
                self.alpha
            )));
        }
        let d = self.delta;
        let integrand = |u: f64| {
            if u <= 0.0 || u >= 1.0 {
                return 0.0;
            }
            let z = u / (1.0 - u);
            let dz_du = 1.0 / ((1.0 - u) * (1.0 - u));
            let f2 = self.pdf(self.gamma + d * z) * self.log_curvature_terms(z) / (d * d);
            let v = f2 * f2 * d * dz_du;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let r = integrate(integrand, 0.0, 1.0, 1e-11, 1e-300, 60).map_err(|nc| {
            Error::Estimation(format!(
                "roughness quadrature did not converge (partial {:e} ± {:e})",
                nc.partial.value, nc.partial.error
            ))
        })?;
        if !(r.value.is_finite() && r.value > 0.0) {
            return Err(Error::Estimation(format!("roughness is not finite: {}", r.value)));
        }
        Ok(r.value)
    }
}

/// Outcome of a Burr maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurrFit {
    pub params: BurrParams,
    pub log_likelihood: f64,
}

const MIN_FIT_SAMPLE: usize = 8;

// Unconstrained coordinates: alpha = 1 + e^x0, gamma = min·σ(x1),
// delta = e^x2, kappa = e^x3.
fn decode(x: &[f64], min: f64) -> BurrParams {
    BurrParams {
        alpha: 1.0 + x[0].exp(),
        gamma: min / (1.0 + (-x[1]).exp()),
        delta: x[2].exp(),
        kappa: x[3].exp(),
    }
}

fn encode(p: &BurrParams, min: f64) -> Vec<f64> {
    let frac = (p.gamma / min).clamp(1e-12, 1.0 - 1e-12);
    vec![
        (p.alpha - 1.0).max(1e-12).ln(),
        (frac / (1.0 - frac)).ln(),
        p.delta.ln(),
        p.kappa.ln(),
    ]
}

fn check_sample(sample: &[f64]) -> Result<f64> {
    if sample.len() < MIN_FIT_SAMPLE {
        return Err(Error::Estimation(format!(
            "Burr fit needs at least {MIN_FIT_SAMPLE} observations, got {}",
            sample.len()
        )));
    }
    if let Some(bad) = sample.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(domain(format!("Burr fit sample values must be finite and > 0, got {bad}")));
    }
    let min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Err(Error::Estimation("Burr fit sample is degenerate (all values equal)".into()));
    }
    Ok(min)
}

fn quantile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Maximum-likelihood fit of all four parameters with `gamma < min(sample)`.
///
/// Runs the simplex search from 8 deterministic starts built from the sample
/// quantiles and keeps the best. `alpha` is held above 1: for `alpha < 1`
/// the likelihood is unbounded as `gamma` approaches the sample minimum.
pub fn burr_fit(sample: &[f64]) -> Result<BurrFit> {
    let min = check_sample(sample)?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile_of_sorted(&sorted, 0.5);
    let spread = quantile_of_sorted(&sorted, 0.9) - quantile_of_sorted(&sorted, 0.1);

    let mut best: Option<BurrFit> = None;
    for gamma_frac in [0.3, 0.8] {
        for (alpha, kappa) in [(2.0, 1.0), (5.0, 1.0), (2.0, 4.0), (5.0, 4.0)] {
            let gamma = gamma_frac * min;
            let delta = (median - gamma).max(spread).max(1e-6 * median);
            let start = BurrParams {
                alpha,
                gamma,
                delta,
                kappa,
            };
            let fit = fit_from_unchecked(sample, min, &start);
            if fit.log_likelihood.is_finite()
                && best.is_none_or(|b| fit.log_likelihood > b.log_likelihood)
            {
                best = Some(fit);
            }
        }
    }
    best.ok_or_else(|| Error::Estimation("Burr fit found no finite likelihood".into()))
}

/// Local fit started at `start`.
pub fn burr_fit_from(sample: &[f64], start: &BurrParams) -> Result<BurrFit> {
    let min = check_sample(sample)?;
    start.validate()?;
    Ok(fit_from_unchecked(sample, min, start))
}

fn fit_from_unchecked(sample: &[f64], min: f64, start: &BurrParams) -> BurrFit {
    let objective = |x: &[f64]| -decode(x, min).log_likelihood(sample);
    let opts = NelderMeadOptions {
        initial_step: 0.05,
        ..Default::default()
    };
    let m = nelder_mead(objective, &encode(start, min), &opts);
    let params = decode(&m.x, min);
    BurrFit {
        params,
        log_likelihood: -m.value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;

    fn unit() -> BurrParams {
        BurrParams::new(1.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn density_examples() {
        assert!((unit().log_pdf(1.0) - 0.25f64.ln()).abs() < 1e-15);
        let b = BurrParams::new(2.0, 0.3, 0.5, 1.5).unwrap();
        assert_eq!(b.log_pdf(0.2), f64::NEG_INFINITY);
        assert!(b.pdf(0.31) > 0.0);
        assert!(BurrParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(BurrParams::new(1.0, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        let b = BurrParams::new(2.0, 0.3, 0.5, 1.5).unwrap();
        assert_eq!(b.cdf(0.3), 0.0);
        assert_eq!(b.cdf(0.1), 0.0);
        assert!((unit().cdf(1.0) - 0.5).abs() < 1e-15);
        assert!(b.cdf(1e6) > 1.0 - 1e-12);
    }

    #[test]
    fn cdf_matches_integrated_pdf() {
        let b = BurrParams::new(2.0, 0.3, 0.5, 1.5).unwrap();
        for i in 1..=20 {
            let x = 0.3 + 0.1 * i as f64;
            let num = integrate(|t| b.pdf(t), b.gamma, x, 1e-12, 1e-300, 40).unwrap().value;
            assert!((num - b.cdf(x)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let b = BurrParams::new(3.0, 0.2, 0.4, 2.0).unwrap();
        let h = 1e-5;
        for i in 1..10 {
            let x = 0.25 + 0.1 * i as f64;
            let d = (b.cdf(x + h) - b.cdf(x - h)) / (2.0 * h);
            assert!((d - b.pdf(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn quantile_roundtrip() {
        let b = BurrParams::new(2.0, 0.3, 0.5, 1.5).unwrap();
        for u in [0.1, 0.5, 0.9] {
            assert!((b.cdf(b.quantile(u)) - u).abs() < 1e-12);
        }
        assert!((b.quantile(1e-300) - b.gamma).abs() < 1e-100);
        let mut rng = replicate_rng(1, 0);
        assert!((0..1000).all(|_| b.sample(&mut rng) > b.gamma));
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let b = BurrParams::new(4.0, 0.2, 0.5, 1.5).unwrap();
        let h = 1e-4;
        for x in [0.4, 0.6, 0.7, 0.9, 1.3] {
            let fd = (b.pdf(x + h) - 2.0 * b.pdf(x) + b.pdf(x - h)) / (h * h);
            let an = b.pdf_second_derivative(x);
            assert!((fd - an).abs() < 1e-4 * (1.0 + an.abs()), "x={x}: {fd} vs {an}");
        }
    }

    #[test]
    fn roughness_against_riemann_sum() {
        let b = BurrParams::new(4.0, 0.2, 0.5, 1.5).unwrap();
        let r = b.second_derivative_roughness().unwrap();
        let n = 400_000;
        let (lo, hi) = (0.2, 20.0);
        let h = (hi - lo) / n as f64;
        let brute: f64 = (0..n)
            .map(|i| b.pdf_second_derivative(lo + (i as f64 + 0.5) * h).powi(2) * h)
            .sum();
        assert!((r - brute).abs() < 1e-6 * r, "{r} vs {brute}");
        assert!(BurrParams::new(2.5, 0.0, 1.0, 1.0).unwrap().second_derivative_roughness().is_err());
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(burr_fit(&[1.0; 5]).is_err());
        assert!(matches!(burr_fit(&[0.5; 10]), Err(Error::Estimation(_))));
        assert!(burr_fit(&[0.5, 0.6, 0.7, 0.8, -1.0, 1.0, 1.1, 1.2]).is_err());
    }
}
