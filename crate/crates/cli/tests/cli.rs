//! End-to-end runs of the `dispmap` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dispmap"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_config(cmd: &str, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SYSTEM: &str = r#""system": {
    "delta_ad_mhz": -2005.0, "delta_cd_mhz": 0.0, "alpha_a_mhz": -300.0, "chi_ac_mhz": -2.0,
    "kappa_c_mhz": 1.0, "n_a": 2, "n_c": 6, "pulse": {"kind": "constant", "omega_c_mhz": 10.0}
}"#;

#[test]
fn output_is_byte_identical_without_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("benchmark_eig.json");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = run_config("benchmark-eig", &cfg, &["--no-header", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("omega_c_mhz,n_c_photons,re_E_mhz,im_E_mhz,stark_mhz,gamma_phi_mhz,overlap"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12);
    assert_eq!(&rows[0][4..6], &[0.0, 0.0]);
    assert!((rows[11][1] - 4.0).abs() < 0.01);
    for r in rows.iter().skip(1).filter(|r| r[1] <= 0.5) {
        let ratio = r[5] / r[8];
        assert!((0.95..=1.05).contains(&ratio));
    }
}

#[test]
fn header_comment_is_optional() {
    let cfg = configs().join("spectrum_grid.json");
    let with = run_config("spectrum-grid", &cfg, &[]);
    let without = run_config("spectrum-grid", &cfg, &["--no-header"]);
    let with = String::from_utf8(with.stdout).unwrap();
    let without = String::from_utf8(without.stdout).unwrap();
    assert!(with.starts_with("# dispmap spectrum-grid"));
    assert_eq!(with.lines().skip(1).collect::<Vec<_>>(), without.lines().collect::<Vec<_>>());
    let rows = csv_rows(&without);
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert_eq!(r[0] == r[1], r[2] == 0.0 && r[3] == 0.0);
        if r[0] != r[1] {
            assert!(r[3] < 0.0);
        }
    }
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{{ {SYSTEM}, \"delta_cd_mhz\": {{\"start\": 0, \"stop\": 1, \"points\": 3}}, \"bogus_key\": 1 }}");
    let cfg = write_config(dir.path(), "bad.json", &body);
    let out = run_config("rates-sweep", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
}

#[test]
fn empty_sweep_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{{ {SYSTEM}, \"delta_cd_mhz\": {{\"start\": 0, \"stop\": 1, \"points\": 0}} }}");
    let cfg = write_config(dir.path(), "empty.json", &body);
    let out = run_config("rates-sweep", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config error") && err.contains("delta_cd_mhz.points"), "{err}");
}

#[test]
fn unwritable_output_fails() {
    let cfg = configs().join("spectrum_grid.json");
    let out = run_config("spectrum-grid", &cfg, &["--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write output"));
}

#[test]
fn missing_config_is_reported() {
    let out = run(&["rates-sweep"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config"));
}

#[test]
fn rate_sweeps_show_single_and_split_peaks() {
    for (name, split) in [("rates_sweep_narrow.json", false), ("rates_sweep_split.json", true)] {
        let out = run_config("rates-sweep", &configs().join(name), &["--no-header"]);
        assert!(out.status.success());
        let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
        let gamma: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let peaks: Vec<f64> = (1..gamma.len() - 1)
            .filter(|&k| gamma[k] > gamma[k - 1] && gamma[k] >= gamma[k + 1])
            .map(|k| rows[k][0])
            .collect();
        if split {
            assert_eq!(peaks.len(), 2, "{peaks:?}");
            let mid = rows.iter().find(|r| r[0].abs() < 1e-9 || (r[0] - 2.0).abs() < 1e-9).unwrap();
            assert!(mid[2] > 0.0 || rows.iter().any(|r| r[0] > 0.0 && r[0] < 4.0 && r[2] > 0.0));
        } else {
            assert_eq!(peaks.len(), 1, "{peaks:?}");
            assert!((peaks[0] - 0.1).abs() <= 0.0100001);
        }
    }
}

#[test]
fn gambetta_columns_coincide_after_shift() {
    let out = run_config("compare-gambetta", &configs().join("compare_gambetta.json"), &["--no-header"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    for r in rows {
        assert!((r[1] - r[3]).abs() <= 1e-12 * r[1]);
    }
}

#[test]
fn crosstalk_transient_plateau() {
    let out = run_config("transient", &configs().join("transient_crosstalk.json"), &["--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let plateau = &rows[5000];
    assert!((plateau[1] - 0.0201).abs() < 5e-4);
    assert!((plateau[10] + 0.040).abs() < 0.003);
}

#[test]
fn validate_defaults_pass() {
    let out = run(&["validate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn dump_lists_nonzero_triplets() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{{ {} }}", SYSTEM.replace("\"n_c\": 6", "\"n_c\": 3"));
    let cfg = write_config(dir.path(), "dump.json", &body);
    let out = run_config("dump-hu", &cfg, &["--no-header"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("row,col,re,im\n"));
    let rows = csv_rows(&text);
    assert!(rows.iter().all(|r| r[0] < 36.0 && r[1] < 36.0 && (r[2] != 0.0 || r[3] != 0.0)));
    assert!(rows.windows(2).all(|w| (w[0][0], w[0][1]) < (w[1][0], w[1][1])));
}
