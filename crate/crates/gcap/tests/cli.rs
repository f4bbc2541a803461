use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcap"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn spec(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn analyze_identity_and_thermal() {
    let dir = TempDir::new().unwrap();
    let id = spec(&dir, "id.json", r#"{"n_modes":1,"kind":"identity"}"#);
    let out = gcap(&["analyze", "--channel", p(&id), "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["records"][0]["xi_p"], 1.0);
    assert_eq!(r["records"][0]["s_min"], 0.0);
    assert_eq!(r["records"][0]["closed_form"], true);

    let th = spec(&dir, "th.json", r#"{"n_modes":1,"kind":"thermal","eta":[0.5],"nbar":[1]}"#);
    let out = gcap(&["analyze", "--channel", p(&th), "--p", "2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let xi = r["records"][0]["xi_p"].as_f64().unwrap();
    assert!((xi - 2.0 / 8f64.sqrt()).abs() < 1e-15);
    let s = r["records"][0]["s_min"].as_f64().unwrap();
    let s2 = 1.5 * 1.5f64.ln() - 0.5 * 0.5f64.ln();
    assert!((s - s2).abs() < 1e-15);
    assert_eq!(r["records"].as_array().unwrap().len(), 2);
}

#[test]
fn input_errors_exit_2_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = spec(&dir, "bad.json", r#"{"n_modes":1,"kind":"classical","Y":[[1,0.5],[0,1]]}"#);
    let out = gcap(&["analyze", "--channel", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`Y`"));
    assert!(out.stdout.is_empty());

    let missing = dir.path().join("missing.json");
    assert_eq!(gcap(&["analyze", "--channel", p(&missing)]).status.code(), Some(2));

    let id = spec(&dir, "id.json", r#"{"n_modes":1,"kind":"identity"}"#);
    assert_eq!(gcap(&["analyze", "--channel", p(&id), "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(gcap(&["capacity", "--channel", p(&id), "--energy", "1", "--omega", "1,2"]).status.code(), Some(2));
    assert_eq!(gcap(&["verify", "theorem1", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(gcap(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn custom_channels_need_numeric() {
    let dir = TempDir::new().unwrap();
    let cu = spec(&dir, "cu.json", r#"{"n_modes":1,"kind":"custom","X":[1,0,0,1],"Y":[1,0,0,1]}"#);
    let out = gcap(&["analyze", "--channel", p(&cu)]);
    assert_eq!(out.status.code(), Some(3));
    let out = gcap(&["analyze", "--channel", p(&cu), "--numeric", "--budget", "4000"]);
    assert_eq!(out.status.code(), Some(0));
    let fp = json(&out)["records"][0]["min_output_fp"].as_f64().unwrap();
    assert!((fp - 8.0).abs() < 1e-6, "{fp}");
    assert_eq!(gcap(&["capacity", "--channel", p(&cu), "--energy", "2"]).status.code(), Some(3));
}

#[test]
fn capacity_reports() {
    let dir = TempDir::new().unwrap();
    let id = spec(&dir, "id.json", r#"{"n_modes":1,"kind":"identity"}"#);
    let out = gcap(&["capacity", "--channel", p(&id), "--energy", "1.5", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out)["records"][0]["capacity"].as_f64().unwrap();
    assert!((c - 2.0 * std::f64::consts::LN_2).abs() < 1e-3);

    let out = gcap(&["capacity", "--channel", p(&id), "--energy", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["records"][0]["capacity"], 0.0);
    assert_eq!(r["records"][0]["status"], "infeasible");
    assert_eq!(r["records"][0]["infeasible"], true);
}

#[test]
fn reports_are_deterministic_and_record_the_seed() {
    let dir = TempDir::new().unwrap();
    let th = spec(&dir, "th.json", r#"{"n_modes":2,"kind":"thermal","eta":[0.5,0.8],"nbar":[1,0.2],"omega":[1,2]}"#);
    let args = ["capacity", "--channel", p(&th), "--energy", "3", "--seed", "11", "--budget", "3000"];
    let a = gcap(&args);
    let b = gcap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["tool"], "gcap");
    assert!(r["tolerances"]["phys"].is_number());
    assert!(r.get("wall_time_seconds").is_none());

    let timed = json(&gcap(&[&args[..], &["--timing"]].concat()));
    assert!(timed["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_targets_pass() {
    for args in [
        &["verify", "theorem1", "--trials", "500", "--seed", "23"][..],
        &["verify", "schur", "--trials", "200"],
        &["verify", "concavity"],
        &["verify", "lemma1", "--instances", "3", "--trials", "500"],
    ] {
        let out = gcap(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["pass"], true);
    }
}

#[test]
fn negation_hook_fails_with_counterexample() {
    let out = gcap(&["verify", "theorem1", "--trials", "30", "--self-test-negate"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    let rec = &r["records"][0];
    assert_eq!(rec["failures"], 30);
    assert_eq!(rec["counterexample"]["index"], 0);
    assert!(rec["counterexample"]["instance"]["b"]["data"].is_array());

    let out = gcap(&["verify", "concavity", "--self-test-negate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_output_to_file() {
    let dir = TempDir::new().unwrap();
    let th = spec(
        &dir,
        "pair.json",
        r#"{"channels":[{"name":"a","n_modes":1,"kind":"lossy","eta":[0.5]},{"name":"b","n_modes":1,"kind":"classical","Y":[1,0,0,1]}]}"#,
    );
    let out_path = dir.path().join("report.csv");
    let out = gcap(&["analyze", "--channel", p(&th), "--p", "2", "--format", "csv", "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"xi_p") && header.contains(&"seed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",a,") && rows[1].contains(",b,"));
}

#[test]
fn multiplicativity_from_spec_file() {
    let dir = TempDir::new().unwrap();
    let pair = spec(
        &dir,
        "pair.json",
        r#"[{"n_modes":1,"kind":"classical","Y":[[2,0],[0,2]]},{"n_modes":1,"kind":"thermal","eta":[0.5],"nbar":[1]}]"#,
    );
    let out = gcap(&["verify", "multiplicativity", "--channel", p(&pair), "--p", "2", "--budget", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json(&out)["records"][0];
    assert_eq!(rec["product"], 96.0);
    assert!(rec["excess"].as_f64().unwrap() >= -1e-6);
}
