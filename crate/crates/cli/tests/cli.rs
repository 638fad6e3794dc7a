use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

use plp_core::crow::crow_failure_times;
use plp_core::priors::{amise_bandwidth, burr_fit, Kernel};
use plp_core::{
    bayes_intensity, mle_beta_trajectory, posterior_mean, BurrParams, PosteriorSpec, Prior,
    QuadratureConfig,
};

const CROW_SHA256: &str = "9b5bc2756b3b2decf73d6281e28e0c9b12292b0f9ce242cfb4842d056a1cb3bf";

fn crate_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn crow() -> PathBuf {
    crate_path("data/crow.txt")
}

fn plp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plp"))
        .args(args)
        .output()
        .expect("runs plp")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn json_ok(args: &[&str]) -> Value {
    let out = plp(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn estimates(report: &Value) -> Vec<Value> {
    report["estimates"].as_array().expect("estimates").clone()
}

fn assert_self_describing(report: &Value) {
    for e in estimates(report) {
        let beta = e["beta"].as_f64().unwrap();
        let theta = e["theta"].as_f64().unwrap();
        let a = e["intensity"]["coefficient"].as_f64().unwrap();
        let b = e["intensity"]["exponent"].as_f64().unwrap();
        assert!((a - beta / theta.powf(beta)).abs() < 1e-9, "{e}");
        assert!((b - (beta - 1.0)).abs() < 1e-9, "{e}");
        let rate = e["reliability"]["rate"].as_f64().unwrap();
        assert!((rate - a / beta).abs() < 1e-9 * rate, "{e}");
    }
}

#[test]
fn fixture_is_unchanged() {
    let bytes = fs::read(crow()).unwrap();
    let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, CROW_SHA256, "data/crow.txt was edited");
    let parsed = plp_cli::input::parse_failure_file(&crow(), false).unwrap();
    assert_eq!(parsed.data.times(), crow_failure_times().times());
    assert_eq!((parsed.data.first(), parsed.data.stopping_time()), (0.7, 3256.3));
}

#[test]
fn mle_on_crow() {
    let r = json_ok(&["mle", path_str(&crow())]);
    let e = &estimates(&r)[0];
    assert_eq!(e["estimator"], "mle");
    let beta = e["beta"].as_f64().unwrap();
    assert_eq!((beta * 100.0).round() / 100.0, 0.49);
    assert!((e["theta"].as_f64().unwrap() - 1.7441).abs() < 0.01);
    assert_eq!(r["input"]["n"], 40);
    assert_eq!(r["input"]["t_n"], 3256.3);
    let traj = r["mle_trajectory"]["beta"].as_array().unwrap();
    assert_eq!(traj.len(), 36);
    assert_eq!(traj.last().unwrap().as_f64().unwrap(), beta);
    assert_self_describing(&r);
}

#[test]
fn mle_on_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("two.txt");
    fs::write(&f, format!("1\n{}\n", std::f64::consts::E)).unwrap();
    let r = json_ok(&["mle", path_str(&f)]);
    assert!((estimates(&r)[0]["beta"].as_f64().unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn malformed_input_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    for (name, body, needle) in [
        ("dup.txt", "1.0\n1.0\n", "line 2"),
        ("word.txt", "# c\n0.5\nfoo\n", "line 3"),
        ("neg.txt", "0.5\n-2\n", "line 2"),
        ("empty.txt", "# nothing\n", "no failure times"),
        ("unsorted.txt", "2\n1\n", "line 2"),
    ] {
        let f = dir.path().join(name);
        fs::write(&f, body).unwrap();
        for cmd in ["mle", "bayes"] {
            let o = plp(&[cmd, path_str(&f), "--out", path_str(&out)]);
            assert_eq!(o.status.code(), Some(2), "{name}");
            assert!(o.stdout.is_empty());
            assert!(!out.exists(), "{name}: partial output");
            assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{name}");
        }
    }
    let o = plp(&["mle", path_str(&dir.path().join("missing.txt"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sorted_ok_sorts_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("u.txt");
    fs::write(&f, "3\n1\n2\n").unwrap();
    let o = plp(&["mle", path_str(&f), "--sorted-ok"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let f = dir.path().join("d.txt");
    fs::write(&f, "3\n1\n3\n").unwrap();
    assert_eq!(plp(&["mle", path_str(&f), "--sorted-ok"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["bayes", "x.txt", "--prior", "gamma"],
        vec!["mle"],
        vec!["frobnicate"],
        vec!["bayes", "x.txt", "--f1", "0"],
        vec!["bayes", "x.txt", "--theta", "-1"],
        vec!["mle", "x.txt", "--bogus"],
        vec![],
    ] {
        assert_eq!(plp(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(plp(&["--help"]).status.code(), Some(0));
    assert_eq!(plp(&["--version"]).status.code(), Some(0));
}

#[test]
fn bayes_burr_report_is_consistent() {
    let r = json_ok(&["bayes", path_str(&crow())]);
    assert_eq!(r["theta_mode"], "mle-derived");
    let est = estimates(&r);
    assert_eq!(est.len(), 2);
    let bayes = &est[1];
    assert_eq!(bayes["estimator"], "burr");
    let beta = bayes["beta"].as_f64().unwrap();
    let theta = bayes["theta"].as_f64().unwrap();
    assert!((theta - 3256.3 / 40f64.powf(1.0 / beta)).abs() < 1e-9);
    assert!(beta > 0.45 && beta < 0.55, "{beta}");
    assert_self_describing(&r);
    let prior = &r["priors"][0];
    assert_eq!(prior["auto_fitted"], true);
    assert!(prior["prior"]["alpha"].as_f64().unwrap() > 2.5);
    assert_eq!(r["loss"]["f1"], 1.0);
    assert_eq!(r["quadrature"]["rel_tol"], 1e-9);
    assert!(r["version"].is_string());
}

#[test]
fn bayes_supplied_theta_is_recorded() {
    let r = json_ok(&["bayes", path_str(&crow()), "--theta", "1.7441", "--prior", "jeffreys"]);
    assert_eq!(r["theta_mode"], "supplied");
    assert_eq!(r["posterior_theta"], 1.7441);
}

#[test]
fn kde_bandwidth_is_the_amise_value() {
    let r = json_ok(&[
        "bayes",
        path_str(&crow()),
        "--prior",
        "kde-epan",
        "--prior",
        "kde-gauss",
    ]);
    let sample = mle_beta_trajectory(&crow_failure_times(), 5).unwrap();
    let fit = burr_fit(&sample).unwrap().params;
    for (i, kernel) in [Kernel::Epanechnikov, Kernel::Gaussian].into_iter().enumerate() {
        let reported = r["priors"][i]["prior"]["bandwidth"].as_f64().unwrap();
        assert_eq!(reported, amise_bandwidth(kernel, &fit, sample.len()).unwrap());
        let reference: BurrParams =
            serde_json::from_value(r["priors"][i]["bandwidth_reference"].clone()).unwrap();
        assert_eq!(reference, fit);
    }
    assert_self_describing(&r);
}

#[test]
fn fixed_bandwidth_flag() {
    let r = json_ok(&["bayes", path_str(&crow()), "--prior", "kde-gauss", "--bandwidth", "0.02"]);
    assert_eq!(r["priors"][0]["prior"]["bandwidth"], 0.02);
    assert_eq!(r["priors"][0]["auto_fitted"], false);
}

#[test]
fn tiny_loss_weights_give_the_posterior_mean() {
    let r = json_ok(&["bayes", path_str(&crow()), "--f1", "1e-4", "--f2", "1e-4"]);
    let beta = estimates(&r)[1]["beta"].as_f64().unwrap();
    let theta = r["posterior_theta"].as_f64().unwrap();
    let prior: Prior = serde_json::from_value(r["priors"][0]["prior"].clone()).unwrap();
    assert!(matches!(prior, Prior::Burr(_)));
    let spec = PosteriorSpec::new(crow_failure_times(), theta, prior).unwrap();
    let mean = posterior_mean(&spec, &QuadratureConfig::default()).unwrap();
    assert!((beta - mean).abs() < 1e-4, "{beta} vs {mean}");
}

#[test]
fn hyperparameter_flags_override_fits() {
    let r = json_ok(&[
        "bayes",
        path_str(&crow()),
        "--prior",
        "burr",
        "--prior",
        "invgamma",
        "--burr",
        "5,0.4,0.16,1.7",
        "--invgamma",
        "178,96",
    ]);
    assert_eq!(r["priors"][0]["prior"]["alpha"], 5.0);
    assert_eq!(r["priors"][0]["auto_fitted"], false);
    assert_eq!(r["priors"][1]["prior"]["shape_v"], 178.0);
    assert_eq!(plp(&["bayes", path_str(&crow()), "--burr", "5,0.4"]).status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_3() {
    let o = plp(&["bayes", path_str(&crow()), "--rel-tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("quadrature") && msg.contains("ln numerator"), "{msg}");
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("short.txt");
    fs::write(&f, "1\n2\n3\n").unwrap();
    assert_eq!(plp(&["bayes", path_str(&f)]).status.code(), Some(3));
    assert_eq!(plp(&["mle", path_str(&dir.path().join("one.txt"))]).status.code(), Some(2));
    fs::write(dir.path().join("one.txt"), "4\n").unwrap();
    assert_eq!(plp(&["mle", path_str(&dir.path().join("one.txt"))]).status.code(), Some(3));
}

#[test]
fn text_format() {
    let o = plp(&["bayes", path_str(&crow()), "--format", "text", "--prior", "jeffreys"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("jeffreys") && s.contains("mle-derived"), "{s}");
}

fn write_report(dir: &Path, name: &str, blocks: &[(String, f64, f64)]) -> PathBuf {
    let est: Vec<plp_cli::report::EstimateBlock> = blocks
        .iter()
        .map(|(n, b, t)| {
            plp_cli::report::EstimateBlock::new(n.clone(), plp_core::PlpParams::new(*b, *t).unwrap())
        })
        .collect();
    let p = dir.join(name);
    fs::write(&p, serde_json::json!({ "estimates": est }).to_string()).unwrap();
    p
}

fn curve_rows(args: &[&str]) -> Vec<Vec<String>> {
    let o = plp(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn curve_at_the_published_fit() {
    let dir = tempfile::tempdir().unwrap();
    let fit = bayes_intensity(&crow_failure_times(), 0.501199).unwrap();
    let report = write_report(
        dir.path(),
        "r.json",
        &[("burr".into(), fit.params.beta, fit.params.theta)],
    );
    let rows = curve_rows(&["curve", path_str(&report), "--t-lo", "1", "--t-hi", "3256.3", "--points", "5"]);
    assert_eq!(rows[0], vec!["t", "burr"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1][0], "1");
    let v: f64 = rows[1][1].parse().unwrap();
    assert!((v - 0.347933).abs() < 1e-5, "{v}");
}

#[test]
fn curve_from_a_bayes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bayes.json");
    let o = plp(&["bayes", path_str(&crow()), "--out", path_str(&report)]);
    assert!(o.status.success() && o.stdout.is_empty());
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let rows = curve_rows(&["curve", path_str(&report), "--t-lo", "0.7", "--t-hi", "3256.3", "--points", "2"]);
    assert_eq!(rows[0], vec!["t", "mle", "burr"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 0.7);
    assert_eq!(rows[2][0].parse::<f64>().unwrap(), 3256.3);
    let a = r["estimates"][1]["intensity"]["coefficient"].as_f64().unwrap();
    let b = r["estimates"][1]["intensity"]["exponent"].as_f64().unwrap();
    assert_eq!(rows[2][2].parse::<f64>().unwrap(), a * 3256.3f64.powf(b));
}

#[test]
fn curve_of_a_homogeneous_fit_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let report = write_report(dir.path(), "h.json", &[("flat".into(), 1.0, 4.0)]);
    let rows = curve_rows(&["curve", path_str(&report), "--t-lo", "0.5", "--t-hi", "50", "--points", "7"]);
    for row in &rows[1..] {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.25);
    }
}

#[test]
fn curve_rejects_bad_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let report = write_report(dir.path(), "h.json", &[("flat".into(), 1.0, 4.0)]);
    for (lo, hi, pts) in [("0", "10", "5"), ("-1", "10", "5"), ("5", "1", "5"), ("1", "10", "1")] {
        let o = plp(&["curve", path_str(&report), "--t-lo", lo, "--t-hi", hi, "--points", pts]);
        assert_eq!(o.status.code(), Some(1), "{lo} {hi} {pts}");
        assert!(o.stdout.is_empty());
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"estimates\": []}").unwrap();
    assert_eq!(
        plp(&["curve", path_str(&bad), "--t-lo", "1", "--t-hi", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_smoke_emits_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("smoke");
    let o = plp(&[
        "simulate",
        path_str(&crate_path("configs/smoke.toml")),
        "--out",
        path_str(&prefix),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("smoke.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "theta,n,estimator,mean,mse,replicates,errors");
    assert_eq!(lines.count(), 12);
    let json: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("smoke.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["replicates"], 1);
    assert_eq!(json["metadata"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(json["cells"].as_array().unwrap().len(), 12);
    assert_eq!(json["efficiency"].as_array().unwrap().len(), 5);
    assert_eq!(json["priors"].as_array().unwrap().len(), 5);
}

#[test]
fn simulate_csv_is_reproducible() {
    let config = path_str(&crate_path("configs/smoke.toml")).to_string();
    let a = plp(&["simulate", &config, "--seed", "9"]);
    let b = plp(&["simulate", &config, "--seed", "9", "--threads", "3"]);
    let c = plp(&["simulate", &config, "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let j = plp(&["simulate", &config, "--format", "json"]);
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["config"]["master_seed"], 1);
    assert_eq!(plp(&["simulate", &config, "--format", "both"]).status.code(), Some(1));
}

#[test]
fn simulate_csv_uses_six_significant_digits() {
    let o = plp(&["simulate", path_str(&crate_path("configs/smoke.toml"))]);
    let csv = String::from_utf8(o.stdout).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        for num in [cols[3], cols[4]] {
            let digits = num
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .trim_start_matches(['0', '.'])
                .replace('.', "");
            assert!(digits.len() <= 6, "{num}");
        }
    }
}

#[test]
fn simulate_schema_errors_exit_2_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("out");
    for body in [
        "theta_values = [1.0]\nsample_sizes = [40]\nreplicates = 5\nmaster_seed = 1\nbeta_source = { fixed = 0.7 }\ncolour = 3\n",
        "theta_values = [1.0]\nsample_sizes = [40]\nreplicates = 0\nmaster_seed = 1\nbeta_source = { fixed = 0.7 }\n",
        "theta_values = [1.0]\nsample_sizes = [40]\nmaster_seed = 1\nbeta_source = { fixed = 0.7 }\n",
        "this is not toml",
    ] {
        let cfg = dir.path().join("bad.toml");
        fs::write(&cfg, body).unwrap();
        let o = plp(&["simulate", path_str(&cfg), "--out", path_str(&prefix)]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(!dir.path().join("out.csv").exists());
        assert!(!dir.path().join("out.json").exists());
    }
}

#[test]
fn theta_sweep_config_favours_the_bayes_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ts");
    let o = plp(&[
        "simulate",
        path_str(&crate_path("configs/theta_sweep.toml")),
        "--out",
        path_str(&prefix),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ts.json")).unwrap()).unwrap();
    let cells = json["cells"].as_array().unwrap();
    let mse = |theta: f64, est: &str| {
        cells
            .iter()
            .find(|c| c["theta"] == theta && c["estimator"] == est)
            .unwrap()["mse"]
            .as_f64()
            .unwrap()
    };
    for theta in [0.5, 1.7441, 4.0] {
        let ratio = mse(theta, "beta:burr") / mse(theta, "beta:mle");
        assert!(ratio < 0.5, "theta {theta}: ratio {ratio}");
    }
    for e in json["efficiency"].as_array().unwrap() {
        let re = e["re_bayes_vs_mle"].as_f64().unwrap();
        assert!(re.is_finite() && re > 0.0, "{e}");
    }
}

#[test]
fn shipped_configs_parse() {
    for name in ["smoke", "theta_sweep", "sensitivity", "burr_sampled"] {
        let text = fs::read_to_string(crate_path(&format!("configs/{name}.toml"))).unwrap();
        plp_cli::config::RunConfig::parse(&text)
            .and_then(|c| c.to_sim_config())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
