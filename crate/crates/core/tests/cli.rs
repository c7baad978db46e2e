use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn exitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exitlab"))
        .args(args)
        .env_remove("EXITLAB_OUTPUT_DIR")
        .output()
        .expect("run exitlab")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const INTERVAL: &str = r#"{
  "schema_version": 1,
  "space": {"variant": "euclidean", "d": 1},
  "domain": {"variant": "interval", "a": -1, "b": 1},
  "start": [0.0],
  "sim": {"step_size": 1e-3, "t_max": 10, "n_paths": 20000, "seed": 1},
  "solver": {"h": 1e-3},
  "estimate": {"grid": [0.1, 3.0, 59]}
}"#;

/// Runs simulate, solve and estimate for the interval into `out`.
fn interval_pipeline(dir: &Path, out: &Path) -> PathBuf {
    let cfg = write_config(dir, "interval.json", INTERVAL);
    let c = cfg.to_str().unwrap();
    let o = out.to_str().unwrap();
    for cmd in ["simulate", "solve", "estimate"] {
        let r = exitlab(&[cmd, "-c", c, "-o", o]);
        assert!(r.status.success(), "{cmd}: {}", stderr(&r));
    }
    cfg
}

#[test]
fn interval_pipeline_verifies_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("interval");
    let cfg = interval_pipeline(tmp.path(), &out);
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());

    let est = read_json(&out.join("estimate.json"));
    let mean = est["mean_tau"].as_f64().unwrap();
    assert!((mean - 1.0).abs() < 0.03, "mean exit {mean}");
    let solve = read_json(&out.join("solve.json"));
    let lambda = solve["lambda"].as_f64().unwrap();
    assert!((lambda / (std::f64::consts::PI.powi(2) / 8.0) - 1.0).abs() < 1e-3, "{lambda}");

    let ok = exitlab(&["verify", "-c", c, "-o", o]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let report = read_json(&out.join("verification.json"));
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(out.join("verification.md").exists());

    let rep_dir = tmp.path().join("report");
    let r = exitlab(&["report", o, "-o", rep_dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", stderr(&r));
    let overlay = fs::read_dir(&rep_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_str().unwrap().starts_with("overlay_"))
        .expect("overlay csv");
    let text = fs::read_to_string(overlay).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# exitlab-overlay v1"));
    assert_eq!(lines.next(), Some("t,S,se,lower_bound,envelope"));
    let mut rows = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        let (s, se, lower, env) = (v[1], v[2], v[3], v[4]);
        // the lower bound holds within the verification tolerance
        assert!(lower <= s * 1.05 + 3.0 * se, "row {l}");
        assert!(s <= env * (1.0 + 1e-12), "row {l}");
        rows += 1;
    }
    assert_eq!(rows, 59);

    // negative control: a deflated rate in the lower bound must fail
    let bad = exitlab(&["verify", "-c", c, "-o", o, "--perturb-lambda", "1.2"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = read_json(&out.join("verification.json"));
    let lb = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check_id"] == "lower_bound")
        .unwrap()
        .clone();
    assert_eq!(lb["pass"], false);

    let empty = exitlab(&["verify", "-c", c, "-o", o, "--suite", ""]);
    assert_eq!(empty.status.code(), Some(2));
    let unknown = exitlab(&["verify", "-c", c, "-o", o, "--suite", "lower_bound,bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr(&unknown).contains("bogus"));
}

#[test]
fn simulate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", INTERVAL);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let r = exitlab(&["simulate", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap(), "--paths", "2000"]);
        assert!(r.status.success(), "{}", stderr(&r));
        (fs::read(out.join("batch.bin")).unwrap(), fs::read(out.join("batch.csv")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
    let single = tmp.path().join("single");
    let r = exitlab(&[
        "--threads",
        "1",
        "simulate",
        "-c",
        cfg.to_str().unwrap(),
        "-o",
        single.to_str().unwrap(),
        "--paths",
        "2000",
    ]);
    assert!(r.status.success());
    assert_eq!(fs::read(single.join("batch.bin")).unwrap(), run("c").0);
}

#[test]
fn configuration_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_start = INTERVAL.replace("\"start\": [0.0]", "\"start\": [2.0]");
    let cfg = write_config(tmp.path(), "bad.json", &bad_start);
    let r = exitlab(&["simulate", "-c", cfg.to_str().unwrap(), "-o", tmp.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("start"), "{}", stderr(&r));

    let corrupt = write_config(tmp.path(), "corrupt.json", "{ not json");
    let r = exitlab(&["solve", "-c", corrupt.to_str().unwrap(), "-o", tmp.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("corrupt.json"), "{}", stderr(&r));

    let r = exitlab(&["verify", "-c", write_config(tmp.path(), "ok.json", INTERVAL).to_str().unwrap(), "-o",
        tmp.path().join("empty").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("estimate.json"), "{}", stderr(&r));
}

#[test]
fn gasket_solve_counts_vertices() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "g.json",
        r#"{"schema_version": 1, "space": {"variant": "gasket", "m": 5},
            "domain": {"variant": "gasket_subset", "region": "whole"}}"#,
    );
    let out = tmp.path().join("g");
    let r = exitlab(&["solve", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", stderr(&r));
    let s = read_json(&out.join("solve.json"));
    // (3^{m+1} + 3) / 2 vertices at level m
    assert_eq!(s["vertices"], 366);
    assert!(s["lambda"].as_f64().unwrap() > 0.0);
}

#[test]
fn unit_square_hot_spots_and_mixed_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sq.json",
        r#"{"schema_version": 1, "space": {"variant": "euclidean", "d": 2},
            "domain": {"variant": "box", "lower": [0, 0], "upper": [1, 1]},
            "hotspots": {"h": 0.03125}}"#,
    );
    let out = tmp.path().join("sq");
    let r = exitlab(&["hotspots", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let hs = read_json(&out.join("hotspots.json"));
    // φ₂ = cos(πx) attains its maximum on the boundary
    assert!((hs["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-6, "{hs}");

    let interval = tmp.path().join("interval");
    let icfg = interval_pipeline(tmp.path(), &interval);
    let v = exitlab(&["verify", "-c", icfg.to_str().unwrap(), "-o", interval.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));

    let rep = tmp.path().join("rep");
    let r = exitlab(&["report", out.to_str().unwrap(), interval.to_str().unwrap(), "-o", rep.to_str().unwrap()]);
    assert!(r.status.success(), "{}", stderr(&r));
    let j = read_json(&rep.join("report.json"));
    assert_eq!(j["sections"].as_array().unwrap().len(), 2);

    let mut stale = read_json(&out.join("verification.json"));
    stale["schema_version"] = 99.into();
    let stale_path = tmp.path().join("stale.json");
    fs::write(&stale_path, stale.to_string()).unwrap();
    let r = exitlab(&["report", stale_path.to_str().unwrap(), "-o", rep.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("schema"), "{}", stderr(&r));
}
