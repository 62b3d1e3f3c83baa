// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use superabsorb_cli::config::{parse_toml, resolve, RawConfig};

const SMALL: &str = r#"
seed = 11

[system]
n_atoms = 3
g = "2pi*256 kHz"
gamma_c = "2pi*131 kHz"
gamma_a = "2pi*25 kHz"

[pump]
theta = "pi/2"

[field]
kind = "opposed"
n0 = 1.5

[run]
duration = "300 ns"
samples = 60

[imperfections]
coupling_spread = 0.1
phase_spread = "0.2 rad"
samples = 4
"#;

const LOSSLESS: &str = r#"
[system]
n_atoms = 4
g = "2pi*256 kHz"
gamma_c = "0 rad/s"
gamma_a = "0 rad/s"

[pump]
theta = "pi/2"

[field]
kind = "vacuum"

[run]
duration = "150 ns"
samples = 50
"#;

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

fn run_into(config: &Path, out: &Path, scenario: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        scenario,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    simulate(&args)
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a_{format}"));
        let b = dir.path().join(format!("b_{format}"));
        for out in [&a, &b] {
            let o = run_into(&cfg, out, "superabsorb", &["--format", format]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let mut names: Vec<_> = fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "wall_time.json")
            .collect();
        names.sort();
        let expected: &[&str] = if format == "csv" {
            &["meta.json", "series.csv", "summary.json"]
        } else {
            &["result.json"]
        };
        assert_eq!(names, expected);
        for n in &names {
            assert_eq!(
                fs::read(a.join(n)).unwrap(),
                fs::read(b.join(n)).unwrap(),
                "{format}/{n}"
            );
        }
        let wall = read_json(&a.join("wall_time.json"));
        assert!(wall["wall_time_s"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn seed_changes_monte_carlo_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run_into(&cfg, &a, "superabsorb", &[]).status.success());
    assert!(run_into(&cfg, &b, "superabsorb", &["--seed", "12"])
        .status
        .success());
    assert_ne!(
        fs::read(a.join("series.csv")).unwrap(),
        fs::read(b.join("series.csv")).unwrap()
    );
    assert_eq!(read_json(&b.join("meta.json"))["seed"], 12);
}

#[test]
fn metadata_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    assert!(run_into(&cfg, &a, "superabsorb", &[]).status.success());
    let meta = read_json(&a.join("meta.json"));
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["scenario"], "superabsorb");
    let columns: Vec<&str> = meta["series_columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(
        columns,
        [
            "t_ns",
            "mean_n",
            "mean_Jz",
            "re_mean_a",
            "im_mean_a",
            "trace",
            "tail"
        ]
    );

    let echoed: RawConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    let original = resolve(&parse_toml(SMALL).unwrap(), None).unwrap();
    let again = resolve(&echoed, None).unwrap();
    assert_eq!(original.spec, again.spec);
    assert_eq!(original.seed, again.seed);

    // the echo written back as TOML drives an identical run
    let b = dir.path().join("b");
    let cfg2 = dir.path().join("echo.cfg");
    fs::write(&cfg2, toml::to_string(&echoed).unwrap()).unwrap();
    assert!(run_into(&cfg2, &b, "superabsorb", &[]).status.success());
    assert_eq!(
        fs::read(a.join("series.csv")).unwrap(),
        fs::read(b.join("series.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("summary.json")).unwrap(),
        fs::read(b.join("summary.json")).unwrap()
    );
}

#[test]
fn empty_config_reports_every_missing_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, "superradiance", &[]);
    assert_eq!(o.status.code(), Some(1));
    let record = read_json(&out.join("error.json"));
    assert_eq!(record["error"]["kind"], "missing_keys");
    assert_eq!(record["error"]["missing"].as_array().unwrap().len(), 7);
    let stderr: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(stderr, record);
}

#[test]
fn invalid_value_names_its_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &LOSSLESS.replace("gamma_c = \"0 rad/s\"", "gamma_c = \"-1 rad/s\""),
    );
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, "superradiance", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        read_json(&out.join("error.json"))["error"]["field"],
        "system.gamma_c"
    );
}

#[test]
fn unknown_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), LOSSLESS);
    let o = run_into(&cfg, &dir.path().join("out"), "teleport", &[]);
    assert!(!o.status.success());
}

#[test]
fn reversal_check_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), LOSSLESS);
    let out = dir.path().join("exact");
    let o = run_into(&cfg, &out, "reversal-check", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&out.join("summary.json"));
    assert!(s["final_mean_n"].as_f64().unwrap() < 1e-6);

    // the coherent approximation leaves photons behind and fails the check
    let cfg = write_config(dir.path(), &format!("{LOSSLESS}reversal = \"coherent\"\n"));
    let out = dir.path().join("coherent");
    let o = run_into(&cfg, &out, "reversal-check", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        read_json(&out.join("error.json"))["error"]["kind"],
        "check_failed"
    );
    assert!(out.join("summary.json").exists());

    // lossy parameters are refused rather than checked
    let cfg = write_config(
        dir.path(),
        &LOSSLESS.replace("gamma_c = \"0 rad/s\"", "gamma_c = \"2pi*131 kHz\""),
    );
    let o = run_into(&cfg, &dir.path().join("lossy"), "reversal-check", &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_check_passes_for_small_ensembles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &LOSSLESS.replace("n_atoms = 4", "n_atoms = 3"));
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, "oracle-check", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&out.join("summary.json"))["passed"], true);
}

#[test]
fn scaling_output_layout() {
    let dir = tempfile::tempdir().unwrap();
    let text = LOSSLESS.replace("kind = \"vacuum\"", "kind = \"opposed\"\nn0 = 1")
        + "\n[scaling]\nn_values = [2, 3, 4]\nt0 = \"60 ns\"\n";
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, "scaling", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("scaling.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n_atoms,n0,turning_time_ns,turning_mean_n,n_absorbed")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!((row[2] - 60.0).abs() < 0.06, "turning time {}", row[2]);
    }
    let s = read_json(&out.join("summary.json"));
    assert!(s["fit"]["q"].as_f64().unwrap() > 1.0);
    assert!(s["points"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["status"] == "ok"));
}

#[test]
fn aperture_scan_table() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        LOSSLESS.replace("n_atoms = 4", "n_atoms = 2") + "\n[scan]\nwavelength = \"791 nm\"\npoints = 5\n";
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    assert!(run_into(&cfg, &out, "aperture-scan", &[]).status.success());
    let csv = fs::read_to_string(out.join("scan.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    // quarter-wave offsets decouple the atoms entirely
    assert!(rows[1][2] < 1e-20 && rows[3][2] < 1e-20);
    assert!(rows[2][3] == 1.0);
}

#[test]
fn presets_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let raw = parse_toml(&fs::read_to_string(&path).unwrap()).unwrap();
        resolve(&raw, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert_eq!(count, 4);
}
