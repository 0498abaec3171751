//! End-to-end harness checks: artifact shape, byte-level determinism and
//! parallel/sequential agreement.

use std::fs;
use std::path::Path;

use vbrecover::config::{ExperimentConfig, Profile};
use vbrecover::runner::run_experiment;

fn base_config(experiment: &str, extra: &str) -> String {
    format!(
        r#"
experiment = "{experiment}"
alg = "sbb"
trials = 40
seed = 11

[graph]
n = 1200
d_v = 3
d_c = 6

[signal]
alpha = 0.2
{extra}
"#
    )
}

fn strip_timestamps(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.contains("generated_unix"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn run_into(cfg_text: &str, dir: &Path) -> Vec<std::path::PathBuf> {
    let mut cfg = ExperimentConfig::from_toml(cfg_text).unwrap();
    cfg.output_dir = dir.to_path_buf();
    run_experiment(&cfg).unwrap()
}

#[test]
fn recover_artifacts_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let text = base_config("recover", "");
    let files_a = run_into(&text, &tmp.path().join("a"));
    let files_b = run_into(&text, &tmp.path().join("b"));
    assert_eq!(files_a.len(), 2);
    for (a, b) in files_a.iter().zip(&files_b) {
        assert_eq!(strip_timestamps(a), strip_timestamps(b));
    }
    let trials = fs::read_to_string(&files_a[0]).unwrap();
    assert_eq!(trials.lines().count(), 40);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files_a[1]).unwrap()).unwrap();
    let rate = summary["success_rate"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&rate));
    assert_eq!(
        summary["successes"].as_u64().unwrap() as f64 / 40.0,
        rate
    );
}

#[test]
fn parallel_matches_sequential() {
    let text = base_config("recover", "");
    let tmp = tempfile::tempdir().unwrap();
    let par = run_into(&text, &tmp.path().join("par"));
    let seq_dir = tmp.path().join("seq");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let seq: Vec<std::path::PathBuf> =
        pool.install(|| run_into(&text, &seq_dir));
    for (a, b) in par.iter().zip(&seq) {
        assert_eq!(strip_timestamps(a), strip_timestamps(b));
    }
}

#[test]
fn evolution_writes_snapshot_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let files = run_into(&base_config("evolution", ""), tmp.path());
    let csv_text = fs::read_to_string(&files[0]).unwrap();
    let mut lines = csv_text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    // ell, alpha, delta, r, 7x7 n_ij, 4 k_i, k1_hat
    assert_eq!(header.len(), 4 + 49 + 4 + 1);
    assert_eq!(&header[..4], &["ell", "alpha", "delta", "r"]);
    assert_eq!(header[4], "n_0_0");
    assert_eq!(*header.last().unwrap(), "k1_hat");
    let first: Vec<f64> = csv_text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] + first[2] + first[3] - 1.0).abs() < 1e-9);
    // alpha column is non-increasing
    let alphas: Vec<f64> = csv_text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(alphas.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files[1]).unwrap()).unwrap();
    assert_eq!(summary["verdict"], "success"); // alpha0 = 0.2 < threshold
}

#[test]
fn stop_map_respects_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let extra = "\n[sweep]\nalpha_start = 0.1\nalpha_end = 0.9\nstep = 0.2\n";
    let files = run_into(&base_config("stop_map", extra), tmp.path());
    let text = fs::read_to_string(&files[0]).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let alpha0: f64 = f[0].parse().unwrap();
        let alpha_stop: f64 = f[1].parse().unwrap();
        // Binomial noise of the initial support fraction, averaged over the
        // default 3 seeds at n = 1200.
        let noise = 5.0 * (alpha0 * (1.0 - alpha0) / (3.0 * 1200.0)).sqrt();
        assert!(alpha_stop <= alpha0 + noise, "{alpha_stop} vs {alpha0}");
        assert!(alpha_stop >= 0.0);
    }
}

#[test]
fn concentration_csv_shapes() {
    let tmp = tempfile::tempdir().unwrap();
    let extra = "\n[concentration]\nn_list = [600, 1200]\nell = 2\n";
    let files = run_into(&base_config("concentration", extra), tmp.path());
    let agg = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(agg.lines().count(), 3); // header + 2 sizes
    let samples = fs::read_to_string(&files[1]).unwrap();
    assert_eq!(samples.lines().count(), 1 + 2 * 40);
}

#[test]
fn threshold_experiment_writes_json() {
    let tmp = tempfile::tempdir().unwrap();
    let text = base_config("threshold", "\n[threshold]\nresolution = 0.05\n")
        .replace("n = 1200", "n = 6000");
    let files = run_into(&text, tmp.path());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    let lo = v["lo"].as_f64().unwrap();
    let hi = v["hi"].as_f64().unwrap();
    assert!(lo < hi && hi - lo <= 0.05 + 1e-12);
    assert!(v["probes"].as_array().unwrap().len() >= 2);
}

#[test]
fn ci_profile_shrinks_work() {
    let mut cfg = ExperimentConfig::from_toml(&base_config("recover", "")).unwrap();
    cfg.graph.n = 100_000;
    cfg.trials = 1000;
    cfg.apply_overrides(None, None, None, Some(Profile::Ci));
    assert!(cfg.trials <= 100 && cfg.graph.n <= 10_002);
    cfg.validate().unwrap();
}
