//! Kernel density priors and AMISE-optimal bandwidths.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::burr::{burr_fit, BurrParams};
use crate::error::{domain, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-0.5 * u * u).exp() / (2.0 * PI).sqrt(),
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }

    /// `C(K) = ∫ K(u)² du`.
    pub fn roughness(&self) -> f64 {
        match self {
            Kernel::Gaussian => 1.0 / (2.0 * PI.sqrt()),
            Kernel::Epanechnikov => 0.6,
        }
    }

    /// `k₂ = ∫ u² K(u) du`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Kernel::Gaussian => 1.0,
            Kernel::Epanechnikov => 0.2,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "gauss" => Ok(Kernel::Gaussian),
            "epanechnikov" | "epan" => Ok(Kernel::Epanechnikov),
            other => Err(domain(format!("unknown kernel '{other}'"))),
        }
    }
}

/// A kernel density estimate `g(β) = (1/(nh)) Σ K((β - β_i)/h)`.
/// [`KernelSpec::new`] stores the sample sorted, so the density does not
/// depend on the order the sample was given in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub bandwidth: f64,
    pub sample: Vec<f64>,
}

impl KernelSpec {
    pub fn new(kernel: Kernel, bandwidth: f64, mut sample: Vec<f64>) -> Result<Self> {
        sample.sort_by(f64::total_cmp);
        let spec = Self {
            kernel,
            bandwidth,
            sample,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("bandwidth", self.bandwidth)?;
        if self.sample.is_empty() {
            return Err(domain("kernel density sample must be non-empty"));
        }
        if let Some(bad) = self.sample.iter().find(|x| !x.is_finite()) {
            return Err(domain(format!("kernel density sample contains {bad}")));
        }
        Ok(())
    }

    pub fn density(&self, beta: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self.sample.iter().map(|b| self.kernel.eval((beta - b) / h)).sum();
        sum / (self.sample.len() as f64 * h)
    }

    /// Log-density. The Gaussian case goes through log-sum-exp so far tails
    /// stay finite instead of underflowing to `-∞`.
    pub fn log_density(&self, beta: f64) -> f64 {
        let h = self.bandwidth;
        let norm = (self.sample.len() as f64 * h).ln();
        match self.kernel {
            Kernel::Gaussian => {
                let mut max = f64::NEG_INFINITY;
                for b in &self.sample {
                    let u = (beta - b) / h;
                    max = max.max(-0.5 * u * u);
                }
                let sum: f64 = self
                    .sample
                    .iter()
                    .map(|b| {
                        let u = (beta - b) / h;
                        (-0.5 * u * u - max).exp()
                    })
                    .sum();
                max + sum.ln() - 0.5 * (2.0 * PI).ln() - norm
            }
            Kernel::Epanechnikov => {
                let sum: f64 = self
                    .sample
                    .iter()
                    .map(|b| self.kernel.eval((beta - b) / h))
                    .sum();
                if sum > 0.0 {
                    sum.ln() - norm
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

/// `h* = [C(K) / (k₂² R(f''))]^(1/5) · n^(-1/5)` with `f` the Burr
/// `reference` density.
pub fn amise_bandwidth(kernel: Kernel, reference: &BurrParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("AMISE bandwidth needs n >= 1"));
    }
    let roughness = reference.second_derivative_roughness()?;
    Ok(amise_scale(kernel, roughness) * inv_fifth_root(n))
}

/// `n^(-1/5)`, with factors of 32 taken out as exact halvings so that
/// `inv_fifth_root(32 n) = inv_fifth_root(n) / 2` holds bit for bit.
fn inv_fifth_root(mut n: usize) -> f64 {
    let mut halvings = 0;
    while n.is_multiple_of(32) {
        n /= 32;
        halvings += 1;
    }
    (n as f64).powf(-0.2) * 0.5f64.powi(halvings)
}

fn amise_scale(kernel: Kernel, roughness: f64) -> f64 {
    let k2 = kernel.second_moment();
    (kernel.roughness() / (k2 * k2 * roughness)).powf(0.2)
}

/// How to choose the bandwidth in [`kde_build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Fixed(f64),
    /// AMISE-optimal against a Burr reference; fitted from the sample when
    /// `None`.
    Amise(Option<BurrParams>),
}

/// A built KDE together with the Burr reference used for its bandwidth, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeBuild {
    pub spec: KernelSpec,
    pub reference: Option<BurrParams>,
}

pub fn kde_build(sample: &[f64], kernel: Kernel, bandwidth: Bandwidth) -> Result<KdeBuild> {
    if sample.is_empty() {
        return Err(domain("kernel density sample must be non-empty"));
    }
    let (h, reference) = match bandwidth {
        Bandwidth::Fixed(h) => (h, None),
        Bandwidth::Amise(reference) => {
            let reference = match reference {
                Some(r) => r,
                None => burr_fit(sample)?.params,
            };
            (amise_bandwidth(kernel, &reference, sample.len())?, Some(reference))
        }
    };
    Ok(KdeBuild {
        spec: KernelSpec::new(kernel, h, sample.to_vec())?,
        reference,
    })
}
