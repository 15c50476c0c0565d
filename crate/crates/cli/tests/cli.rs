use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[run]
T = 1000.0
G = 4.0
n_t = 10
n_rand = 10
P = 10000
seed = 5
specs = ["zeta", "dirichlet:q=4:index=1"]
"#;

fn lcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcrit")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sample_is_reproducible_at_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let out = dir.path().join(name);
        let res = lcrit(&["sample", "--config", &config, "--out", out.to_str().unwrap(), "--workers", workers]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let files: Vec<Vec<u8>> = ["deterministic.csv", "random.csv", "sample.csv", "sample.json", "sample.config.toml"]
            .iter()
            .map(|f| fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let text = String::from_utf8(outputs[0][0].clone()).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("log_abs_1,arg_1,log_abs_2,arg_2"));
    assert_eq!(lines.count(), 10);
    assert!(text.contains("# config_hash="));
    assert!(text.contains("# seed=5"));
}

#[test]
fn identical_measures_have_zero_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().to_str().unwrap();
    assert!(lcrit(&["sample", "--config", &config, "--out", out]).status.success());
    let det = dir.path().join("deterministic.csv");
    let det = det.to_str().unwrap();
    let res = lcrit(&["discrepancy", det, det, "--config", &config, "--out", out, "--format", "json"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("discrepancy.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "lcrit-lab/1");
    assert_eq!(report["summary"]["d_hat"], 0.0);
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn seed_flag_overrides_config_and_changes_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(lcrit(&["sample", "--config", &config, "--out", a.to_str().unwrap()]).status.success());
    assert!(lcrit(&["sample", "--config", &config, "--out", b.to_str().unwrap(), "--seed", "6"]).status.success());
    let ja: serde_json::Value = serde_json::from_slice(&fs::read(a.join("sample.json")).unwrap()).unwrap();
    let jb: serde_json::Value = serde_json::from_slice(&fs::read(b.join("sample.json")).unwrap()).unwrap();
    assert_eq!(jb["seed"], 6);
    assert_ne!(ja["config_hash"], jb["config_hash"]);
    assert_ne!(fs::read(a.join("random.csv")).unwrap(), fs::read(b.join("random.csv")).unwrap());
}

#[test]
fn failing_checks_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // a synthetic Gaussian fitted with an impossible tolerance
    let config = write_config(dir.path(), "[run]\nn_rand = 2000\n[clt]\nsynthetic = true\nks_tolerance = 1e-9\n");
    let res = lcrit(&["clt", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("ks_log_abs_1"));

    let text = "[run]\nn_rand = 10000\n[clt]\nsynthetic = true\n[[clt.coefficients]]\nk = [2]\nl = [0]\nvalue = 0.0\n";
    let config = write_config(dir.path(), text);
    let res = lcrit(&["clt", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("clt.json")).unwrap()).unwrap();
    let boxes = report["summary"]["boxes"].as_array().unwrap();
    let expansion = report["summary"]["expansion_predictions"].as_array().unwrap();
    // a zero higher-order term leaves the leading prediction unchanged
    assert_eq!(boxes.len(), expansion.len());
    assert_eq!(boxes[0]["predicted"], expansion[0]);
}

#[test]
fn bs_check_small_batch_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[bs_check]\nbatch = 500\nfourier_instances = 2\nfourier_points = 3\n");
    let res = lcrit(&["bs-check", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("bs-check.csv")).unwrap();
    assert!(csv.contains("check,trials,violations,worst,tolerance\r\n"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[run]\nunknown_key = 1\n");
    let res = lcrit(&["sample", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}
