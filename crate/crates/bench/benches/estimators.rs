use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use plp_core::crow::crow_failure_times;
use plp_core::priors::{amise_bandwidth, burr_fit, PriorBuilder, PriorKind, PriorOverrides};
use plp_core::rng::replicate_rng;
use plp_core::{
    ht_bayes_estimate, mle_beta, mle_beta_trajectory, mle_theta, run_campaign,
    simulate_failure_times, HtLoss, Kernel, PlpParams, PosteriorSpec, QuadratureConfig, SimConfig,
};

fn mle(c: &mut Criterion) {
    let data = crow_failure_times();
    c.bench_function("mle/crow", |b| {
        b.iter(|| {
            let beta = mle_beta(black_box(&data)).unwrap();
            mle_theta(&data, beta).unwrap()
        })
    });
    c.bench_function("mle/trajectory", |b| {
        b.iter(|| mle_beta_trajectory(black_box(&data), 5).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let params = PlpParams::new(0.7054, 1.7441).unwrap();
    let mut group = c.benchmark_group("simulate");
    for n in [40usize, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = replicate_rng(1, 0);
            b.iter(|| simulate_failure_times(params, n, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn priors(c: &mut Criterion) {
    let data = crow_failure_times();
    let sample = mle_beta_trajectory(&data, 5).unwrap();
    c.bench_function("prior/burr_fit", |b| b.iter(|| burr_fit(black_box(&sample)).unwrap()));
    let fit = burr_fit(&sample).unwrap().params;
    c.bench_function("prior/amise", |b| {
        b.iter(|| amise_bandwidth(Kernel::Gaussian, black_box(&fit), sample.len()).unwrap())
    });
}

fn bayes(c: &mut Criterion) {
    let data = crow_failure_times();
    let theta = mle_theta(&data, mle_beta(&data).unwrap()).unwrap();
    let sample = mle_beta_trajectory(&data, 5).unwrap();
    let mut builder = PriorBuilder::new(sample, PriorOverrides::default()).unwrap();
    let loss = HtLoss::new(1.0, 1.0).unwrap();
    let quad = QuadratureConfig::default();
    let mut group = c.benchmark_group("ht_bayes_estimate");
    for kind in PriorKind::ALL {
        let prior = builder.build(kind).unwrap().prior;
        let spec = PosteriorSpec::new(data.clone(), theta, prior).unwrap();
        group.bench_function(kind.label(), |b| {
            b.iter(|| ht_bayes_estimate(black_box(&spec), loss, &quad).unwrap())
        });
    }
    group.finish();
}

fn campaign(c: &mut Criterion) {
    let config = SimConfig::crow_setting(20, 20240601);
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    group.bench_function("crow_20_replicates", |b| b.iter(|| run_campaign(black_box(&config)).unwrap()));
    group.finish();
}

criterion_group!(benches, mle, sampling, priors, bayes, campaign);
criterion_main!(benches);
