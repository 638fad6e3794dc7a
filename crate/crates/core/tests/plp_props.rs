mod common;

use common::ks_test;
use plp_core::plp::LikelihoodStats;
use plp_core::rng::replicate_rng;
use plp_core::{
    conditional_reliability, intensity, log_likelihood, mle_beta, mle_beta_trajectory, mle_theta,
    simulate_failure_times, FailureTimes, PlpParams,
};
use proptest::prelude::*;

fn increasing_times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, 2..60).prop_map(|gaps| {
        let mut t = 0.0;
        gaps.into_iter()
            .map(|g| {
                t += g;
                t
            })
            .collect()
    })
}

#[test]
fn homogeneous_interarrivals_are_exponential() {
    let theta = 2.5;
    let mut rng = replicate_rng(99, 0);
    let data = simulate_failure_times(PlpParams::new(1.0, theta).unwrap(), 10_000, &mut rng).unwrap();
    let mut prev = 0.0;
    let gaps: Vec<f64> = data
        .times()
        .iter()
        .map(|&t| {
            let g = t - prev;
            prev = t;
            g
        })
        .collect();
    let (_, p) = ks_test(gaps, |x| 1.0 - (-x / theta).exp());
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn simulated_trajectories_are_finite() {
    for seed in 0..100 {
        let mut rng = replicate_rng(seed, 3);
        let data =
            simulate_failure_times(PlpParams::new(0.7054, 1.7441).unwrap(), 40, &mut rng).unwrap();
        let traj = mle_beta_trajectory(&data, 5).unwrap();
        assert_eq!(traj.len(), 36);
        assert!(traj.iter().all(|b| b.is_finite() && *b > 0.0), "seed {seed}");
    }
}

proptest! {
    #[test]
    fn scale_invariance(times in increasing_times(), c in 0.01f64..100.0) {
        let data = FailureTimes::new(times).unwrap();
        let scaled = data.scaled(c).unwrap();
        let b = mle_beta(&data).unwrap();
        let bs = mle_beta(&scaled).unwrap();
        prop_assert!((bs / b - 1.0).abs() < 1e-12);
        let th = mle_theta(&data, b).unwrap();
        let ths = mle_theta(&scaled, b).unwrap();
        prop_assert!((ths / (c * th) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reliability_is_multiplicative(
        beta in 0.1f64..4.0, theta in 0.1f64..10.0,
        a in 0.0f64..5.0, d1 in 0.0f64..5.0, d2 in 0.0f64..5.0,
    ) {
        let p = PlpParams::new(beta, theta).unwrap();
        let (b, c) = (a + d1, a + d1 + d2);
        let lhs = conditional_reliability(p, a, b).unwrap() * conditional_reliability(p, b, c).unwrap();
        let rhs = conditional_reliability(p, a, c).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300) + 1e-300);
    }

    #[test]
    fn likelihood_is_order_free(times in increasing_times(), beta in 0.2f64..3.0, theta in 0.5f64..20.0) {
        let data = FailureTimes::new(times.clone()).unwrap();
        let p = PlpParams::new(beta, theta).unwrap();
        let forward = log_likelihood(&data, p).unwrap();
        let n = times.len() as f64;
        let last = *times.last().unwrap();
        let backward: f64 = times.iter().rev().map(|t| (t / theta).ln()).sum::<f64>() * (beta - 1.0);
        let backward = backward - (last / theta).powf(beta) + n * (beta / theta).ln();
        prop_assert!(((forward - backward) / forward.abs().max(1.0)).abs() < 1e-10);
        let stats = LikelihoodStats::from_data(&data).log_likelihood(beta, theta);
        prop_assert!(((forward - stats) / forward.abs().max(1.0)).abs() < 1e-10);
    }

    #[test]
    fn homogeneous_intensity(theta in 0.01f64..100.0, t in 1e-6f64..1e6) {
        let v = intensity(PlpParams::new(1.0, theta).unwrap(), t).unwrap();
        prop_assert!((v - 1.0 / theta).abs() <= 1e-15 / theta);
    }
}
