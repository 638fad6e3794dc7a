#![allow(dead_code)]

use plp_core::quadrature::integrate;

/// Two-sided one-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_test(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += 2.0 * sign * (-2.0 * k * k * lambda * lambda).exp();
    }
    (d, p.clamp(0.0, 1.0))
}

/// `∫_lo^∞ f` through `x = lo + scale·u/(1-u)`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, lo: f64, scale: f64) -> f64 {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let x = lo + scale * u / (1.0 - u);
        let v = f(x) * scale / ((1.0 - u) * (1.0 - u));
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, 1e-12, 1e-300, 60).expect("converges").value
}

pub fn integrate_finite(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    integrate(f, lo, hi, 1e-12, 1e-300, 60).expect("converges").value
}
