use std::process::{Command, Output};

use serde_json::Value;

fn symspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symspace")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = symspace(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn roots_of_sl3() {
    let v = json(&["roots", "SL3"]);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["roots"].as_array().unwrap().len(), 3);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["normalization"], "unit_root");
}

#[test]
fn einstein_spectra_on_h3() {
    let v = json(&["spectra", "H3", "--bundle", "sym2", "--variant", "einstein", "--normalize", "unit_root"]);
    assert!(v["lambda_l"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(v["nullspace"]["dim"], 2);
    assert_eq!(v["normalization"], "unit_root");
}

#[test]
fn killing_normalization_is_tagged() {
    let v = json(&["spectra", "--space", "H3", "--bundle", "one_forms", "--normalize", "killing"]);
    assert_eq!(v["normalization"], "killing");
    assert!((v["lambda_l"].as_f64().unwrap() - 0.25).abs() < 1e-10);
}

#[test]
fn nullspace_of_octonionic_model() {
    let v = json(&["nullspace", "OH16"]);
    assert_eq!(v["nullspace"]["dim"], 0);
    assert_eq!(v["nilpotent_dim"], 15);
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        vec!["spectra", "H9"],
        vec!["spectra", "H3", "--bundle", "sym3"],
        vec!["heatsim", "H3", "--dr", "0.1", "--t0", "0.01"],
        vec!["regions", "SL3", "--sigma", "5"],
        vec!["heatsim", "SL3", "--bundle", "one_forms"],
        vec!["spectra"],
        vec!["frobnicate"],
    ] {
        let out = symspace(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["regions", "SL3", "--samples", "2000", "--seed", "5"],
        &["sector", "--dims", "2,3", "--emit", "both", "--samples", "1000"],
        &["heatsim", "H3", "--bundle", "scalar", "--dr", "0.1", "--t0", "0.04", "--tmax", "1", "--emit", "both"],
    ];
    for args in cases {
        let a = symspace(args);
        let b = symspace(args);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn heat_csv_columns() {
    let out = symspace(&["heatsim", "H3", "--bundle", "scalar", "--dr", "0.1", "--t0", "0.04", "--tmax", "1", "--emit", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,H1,H2,sup_envelope_ratio");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.04);
    assert_eq!(first[3], 1.0);
}

#[test]
fn config_file_sections_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 4\n[sector]\ndims = [2]\nemit = \"csv\"\nsamples = 800\n[regions]\nsigma = 15.0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = symspace(&["sector", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("sector.csv")).unwrap();
    assert!(csv.starts_with("n,d,alpha,r0,complement_volume,bound,ratio\n"));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("2,")));
    assert!(!out_dir.join("sector.json").exists());

    let v = json(&["regions", "SL3", "--config", cfg.to_str().unwrap(), "--samples", "500"]);
    assert_eq!(v["report"]["sigma"], 15.0);
    assert_eq!(v["report"]["seed"], 4);
    let v = json(&["regions", "SL3", "--config", cfg.to_str().unwrap(), "--samples", "500", "--sigma", "20"]);
    assert_eq!(v["report"]["sigma"], 20.0);

    std::fs::write(&cfg, "[sector]\nunknown_key = 1\n").unwrap();
    assert_eq!(symspace(&["sector", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
