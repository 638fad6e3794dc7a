//! One-dimensional adaptive Gauss-Kronrod quadrature and the log-space
//! integration used for posterior expectations over β.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights; every other
// abscissa starting at index 1 is a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper integration limit for integrals written over `[lower, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperLimit {
    /// Walk outward from the mode until the log-integrand has dropped this
    /// many nats below its maximum.
    Auto { drop_nats: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Overrides the prior's support lower bound when set.
    pub lower: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_refinements: u32,
    pub upper: UpperLimit,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            lower: None,
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_refinements: 30,
            upper: UpperLimit::Auto { drop_nats: 45.0 },
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(domain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_refinements == 0 {
            return Err(domain("max_refinements must be >= 1"));
        }
        if let Some(lo) = self.lower {
            if !(lo >= 0.0 && lo.is_finite()) {
                return Err(domain(format!("lower must be finite and >= 0, got {lo}")));
            }
        }
        match self.upper {
            UpperLimit::Auto { drop_nats } if !(drop_nats > 0.0 && drop_nats.is_finite()) => {
                Err(domain(format!("drop_nats must be > 0, got {drop_nats}")))
            }
            UpperLimit::Fixed(u) if !u.is_finite() => Err(domain("fixed upper limit must be finite")),
            _ => Ok(()),
        }
    }
}

/// Result of a converged (or abandoned) adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Why an adaptive integration stopped without meeting its tolerance; carries
/// the partial estimate reached so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonConvergence {
    pub partial: Integral,
    pub lower: f64,
    pub upper: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the summed
/// error falls below `max(abs_tol, rel_tol·|I|)`. Fails once a segment that
/// still needs splitting has been bisected `max_depth` times.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> std::result::Result<Integral, NonConvergence> {
    const MAX_SEGMENTS: usize = 200_000;
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(NonConvergence {
                partial: Integral {
                    value: total,
                    error: total_err,
                    evaluations,
                },
                lower: a,
                upper: b,
            });
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = heap.pop().expect("at least one segment");
        if worst.depth >= max_depth || heap.len() >= MAX_SEGMENTS {
            heap.push(worst);
            return Err(NonConvergence {
                partial: Integral {
                    value: total,
                    error: total_err,
                    evaluations,
                },
                lower: a,
                upper: b,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod(&f, mid, worst.b);
        evaluations += 30;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        for (sa, sb, v, e) in [(worst.a, mid, lv, le), (mid, worst.b, rv, re)] {
            heap.push(Segment {
                a: sa,
                b: sb,
                value: v,
                error: e,
                depth: worst.depth + 1,
            });
        }
    }
    // re-sum to shed drift from the running updates
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// `[lower, upper]` outside of which a log-density lies more than
/// `drop_nats` below its maximum, plus the location and value of that maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRange {
    pub lower: f64,
    pub upper: f64,
    pub mode: f64,
    pub max_log: f64,
}

const SCAN_POINTS: usize = 241;
const SCAN_MIN_OFFSET: f64 = 1e-6;
const SCAN_MAX_OFFSET: f64 = 1e3;
const RANGE_CAP: f64 = 1e8;

/// Locates the mode of `log_f` on `(support_lower, ∞)` by a geometric scan
/// plus golden-section refinement, then walks outward by doubling steps until
/// the log-density has fallen `drop_nats` below the mode (or the support
/// bound is reached).
pub fn effective_range<F: Fn(f64) -> f64>(
    log_f: F,
    support_lower: f64,
    drop_nats: f64,
) -> Result<EffectiveRange> {
    let ratio = (SCAN_MAX_OFFSET / SCAN_MIN_OFFSET).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|j| support_lower + SCAN_MIN_OFFSET * ratio.powi(j as i32))
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (j, &x) in grid.iter().enumerate() {
        let v = log_f(x);
        if v.is_nan() {
            return Err(Error::Estimation(format!("log-density is NaN at {x}")));
        }
        if v > f64::NEG_INFINITY && best.is_none_or(|(_, b)| v > b) {
            best = Some((j, v));
        }
    }
    let Some((j, _)) = best else {
        return Err(Error::Estimation(
            "posterior mass vanishes on the whole scan grid".into(),
        ));
    };
    let lo = if j == 0 { support_lower } else { grid[j - 1] };
    let hi = if j + 1 == SCAN_POINTS { grid[j] } else { grid[j + 1] };
    let (mode, max_log) = golden_max(&log_f, lo, hi, grid[j]);
    let threshold = max_log - drop_nats;

    let base_step = ((hi - lo) * 1e-3).max(mode.abs() * 1e-9).max(1e-12);
    let mut step = base_step;
    let mut upper = mode + step;
    while log_f(upper) > threshold {
        step *= 2.0;
        upper = mode + step;
        if upper > RANGE_CAP {
            return Err(Error::Estimation(format!(
                "log-density does not fall {drop_nats} nats below its mode before {RANGE_CAP}"
            )));
        }
    }
    let mut step = base_step;
    let mut lower = (mode - step).max(support_lower);
    while lower > support_lower && log_f(lower) > threshold {
        step *= 2.0;
        lower = (mode - step).max(support_lower);
    }
    Ok(EffectiveRange {
        lower,
        upper,
        mode,
        max_log,
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, seed: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
            break;
        }
    }
    let (x, v) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let fs = f(seed);
    if fs > v {
        (seed, fs)
    } else {
        (x, v)
    }
}

/// `ln ∫ exp(log_f(x)) dx` over `[lower, upper]`, evaluated as
/// `offset + ln ∫ exp(log_f(x) - offset) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral {
    pub ln_value: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn integrate_log<F: Fn(f64) -> f64>(
    log_f: F,
    lower: f64,
    upper: f64,
    offset: f64,
    cfg: &QuadratureConfig,
) -> std::result::Result<LogIntegral, NonConvergence> {
    let scaled = |x: f64| {
        let v = log_f(x) - offset;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let integral = integrate(
        scaled,
        lower,
        upper,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_refinements,
    )?;
    Ok(LogIntegral {
        ln_value: integral.value.ln() + offset,
        lower,
        upper,
    })
}
