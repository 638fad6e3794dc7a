use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use plp_core::montecarlo::{efficiency_from_averages, CampaignMeta, CellStats, EfficiencyReport};
use plp_core::priors::{PriorBuilder, PriorKind, PriorOverrides, ResolvedPrior};
use plp_core::{
    bayes_intensity, ht_bayes_estimate, mle_beta, mle_beta_trajectory, mle_theta, run_campaign,
    BetaSource, FailureTimes, HtLoss, PlpParams, PosteriorSpec, QuadratureConfig, SimResult,
};

use crate::args::{BayesArgs, CurveArgs, MleArgs, ReportFormat, SimulateArgs};
use crate::config::{RunConfig, TableFormat};
use crate::error::{CliError, CliResult};
use crate::format::format_sig;
use crate::input::parse_failure_file;
use crate::report::{
    CurveSource, EstimateBlock, EstimateReport, InputDigest, ThetaMode, Trajectory,
};

/// Something to emit once every computation has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub enum Emission {
    Stdout(String),
    Stderr(String),
    File(PathBuf, String),
}

fn digest(path: &Path, data: &FailureTimes) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        n: data.len(),
        t_1: data.first(),
        t_n: data.stopping_time(),
    }
}

fn emit_report(report: &EstimateReport, format: ReportFormat, out: Option<PathBuf>) -> Emission {
    let text = match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serialises") + "\n"
        }
        ReportFormat::Text => report.to_text(),
    };
    match out {
        Some(p) => Emission::File(p, text),
        None => Emission::Stdout(text),
    }
}

fn warnings(list: Vec<String>) -> Vec<Emission> {
    list.into_iter()
        .map(|w| Emission::Stderr(format!("warning: {w}\n")))
        .collect()
}

pub fn cmd_mle(args: MleArgs) -> CliResult<Vec<Emission>> {
    let parsed = parse_failure_file(&args.data.file, args.data.sorted_ok)?;
    let data = parsed.data;
    let beta = mle_beta(&data)?;
    let theta = mle_theta(&data, beta)?;
    let n_min = args.n_min.min(data.len());
    let report = EstimateReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: digest(&args.data.file, &data),
        estimates: vec![EstimateBlock::new("mle", PlpParams::new(beta, theta)?)],
        theta_mode: None,
        posterior_theta: None,
        priors: Vec::new(),
        prior_sample: None,
        loss: None,
        quadrature: None,
        mle_trajectory: Some(Trajectory {
            n_min,
            beta: mle_beta_trajectory(&data, n_min)?,
        }),
    };
    let mut out = warnings(parsed.warnings);
    out.push(emit_report(&report, args.output.format, args.output.out));
    Ok(out)
}

pub fn cmd_bayes(args: BayesArgs) -> CliResult<Vec<Emission>> {
    let parsed = parse_failure_file(&args.data.file, args.data.sorted_ok)?;
    let data = parsed.data;
    let beta_mle = mle_beta(&data)?;
    let theta_mle = mle_theta(&data, beta_mle)?;
    let (theta, mode) = match args.theta {
        Some(t) => (t, ThetaMode::Supplied),
        None => (theta_mle, ThetaMode::MleDerived),
    };
    let n_min = args.n_min.min(data.len());
    let sample = mle_beta_trajectory(&data, n_min)?;
    let overrides = PriorOverrides {
        burr: args.burr,
        invgamma: args.invgamma,
        bandwidth_gauss: args.bandwidth,
        bandwidth_epan: args.bandwidth,
    };
    let mut builder = PriorBuilder::new(sample.clone(), overrides)?;
    let loss = HtLoss::new(args.f1, args.f2)?;
    let quad = QuadratureConfig {
        rel_tol: args.rel_tol,
        ..QuadratureConfig::default()
    };

    let mut kinds: Vec<PriorKind> = Vec::new();
    for k in args.priors {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    let mut estimates = vec![EstimateBlock::new("mle", PlpParams::new(beta_mle, theta_mle)?)];
    let mut priors: Vec<ResolvedPrior> = Vec::new();
    for kind in kinds {
        let resolved = builder.build(kind)?;
        let spec = PosteriorSpec::new(data.clone(), theta, resolved.prior.clone())?;
        let beta = ht_bayes_estimate(&spec, loss, &quad)
            .map_err(|e| CliError::Numerical(format!("{kind} prior: {e}")))?;
        let fit = bayes_intensity(&data, beta)?;
        estimates.push(EstimateBlock::new(kind.label(), fit.params));
        priors.push(resolved);
    }
    let report = EstimateReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: digest(&args.data.file, &data),
        estimates,
        theta_mode: Some(mode),
        posterior_theta: Some(theta),
        priors,
        prior_sample: Some(Trajectory { n_min, beta: sample }),
        loss: Some(loss),
        quadrature: Some(quad),
        mle_trajectory: None,
    };
    let mut out = warnings(parsed.warnings);
    out.push(emit_report(&report, args.output.format, args.output.out));
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SimulateReport<'a> {
    version: &'a str,
    config: &'a RunConfig,
    metadata: &'a CampaignMeta,
    priors: &'a [ResolvedPrior],
    cells: &'a [CellStats],
    efficiency: Vec<EfficiencyReport>,
}

pub fn render_csv(result: &SimResult) -> String {
    let mut s = String::from("theta,n,estimator,mean,mse,replicates,errors\n");
    for c in &result.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            format_sig(c.theta, 6),
            c.n,
            c.estimator,
            format_sig(c.mean, 6),
            format_sig(c.mse, 6),
            c.replicates,
            c.errors
        );
    }
    s
}

pub fn cmd_simulate(args: SimulateArgs) -> CliResult<Vec<Emission>> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let mut sim = config.to_sim_config()?;
    sim.threads = args.threads.map(|t| t as usize);

    let prefix = args.out.or_else(|| config.output.prefix.clone());
    let format = args
        .format
        .or(config.output.format)
        .unwrap_or(if prefix.is_some() { TableFormat::Both } else { TableFormat::Csv });
    if format == TableFormat::Both && prefix.is_none() {
        return Err(CliError::Usage(
            "--format both needs an output prefix (--out or output.prefix)".into(),
        ));
    }

    let result = run_campaign(&sim)?;
    let mut efficiency = Vec::new();
    if let BetaSource::Fixed(beta) = sim.beta_source {
        let range = (config.re_range[0], config.re_range[1]);
        for &theta in &sim.theta_values {
            for &n in &sim.sample_sizes {
                for &kind in &sim.priors {
                    efficiency.push(efficiency_from_averages(&result, theta, n, kind, beta, range)?);
                }
            }
        }
    }

    let csv = render_csv(&result);
    let json = serde_json::to_string_pretty(&SimulateReport {
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        metadata: &result.metadata,
        priors: &result.priors,
        cells: &result.cells,
        efficiency,
    })
    .expect("result serialises")
        + "\n";

    let with_ext = |ext: &str| {
        let p = prefix.clone().expect("prefix checked");
        let mut name = p.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(format!(".{ext}"));
        p.with_file_name(name)
    };
    let out = match (format, &prefix) {
        (TableFormat::Csv, None) => vec![Emission::Stdout(csv)],
        (TableFormat::Json, None) => vec![Emission::Stdout(json)],
        (TableFormat::Csv, Some(_)) => vec![Emission::File(with_ext("csv"), csv)],
        (TableFormat::Json, Some(_)) => vec![Emission::File(with_ext("json"), json)],
        (TableFormat::Both, _) => vec![
            Emission::File(with_ext("csv"), csv),
            Emission::File(with_ext("json"), json),
        ],
    };
    Ok(out)
}

/// `points` log-spaced times from `lo` to `hi`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn cmd_curve(args: CurveArgs) -> CliResult<Vec<Emission>> {
    let (lo, hi) = (args.t_lo, args.t_hi);
    if !(lo > 0.0 && lo.is_finite()) {
        return Err(CliError::Usage(format!("--t-lo must be positive, got {lo}")));
    }
    if !(hi > lo && hi.is_finite()) {
        return Err(CliError::Usage(format!("--t-hi must exceed --t-lo, got {hi}")));
    }
    if args.points < 2 {
        return Err(CliError::Usage(format!("--points must be >= 2, got {}", args.points)));
    }
    let text = fs::read_to_string(&args.report)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.report.display())))?;
    let source: CurveSource = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: not a report: {e}", args.report.display())))?;
    if source.estimates.is_empty() {
        return Err(CliError::Input("report contains no fitted intensity".into()));
    }
    let mut s = String::from("t");
    for e in &source.estimates {
        s.push(',');
        s.push_str(&e.estimator);
    }
    s.push('\n');
    for t in log_grid(lo, hi, args.points) {
        s.push_str(&format!("{t}"));
        for e in &source.estimates {
            let _ = write!(s, ",{}", e.intensity.eval(t));
        }
        s.push('\n');
    }
    Ok(vec![match args.out {
        Some(p) => Emission::File(p, s),
        None => Emission::Stdout(s),
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = log_grid(0.7, 3256.3, 2);
        assert_eq!(g, vec![0.7, 3256.3]);
        let g = log_grid(1.0, 1000.0, 4);
        assert_eq!((g[0], g[3]), (1.0, 1000.0));
        assert!((g[1] - 10.0).abs() < 1e-12 && (g[2] - 100.0).abs() < 1e-10);
    }
}
