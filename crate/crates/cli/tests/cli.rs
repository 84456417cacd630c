use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scalecalc::io;
use serde_json::Value;
use tempfile::TempDir;

const TAKAGI_16: &str = r#"{"name":"takagi","alpha":0.5,"dt":1.52587890625e-05,"length":65537}"#;
const TAKAGI_10: &str = r#"{"name":"takagi","alpha":0.5,"dt":0.0009765625,"length":1025}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scalecalc"));
    c.env_remove("SCALECALC_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn summary(o: &Output) -> Value {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn manifest(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn scalelaw_manifest_recovers_exponent() {
    let d = TempDir::new().unwrap();
    let json = d.path().join("fit.json");
    let m = manifest(
        d.path(),
        "m.json",
        &format!(
            r#"{{"op":"scalelaw","gen":{TAKAGI_16},"eps_min":0.000244140625,"eps_max":0.03125,"out_json":"{}"}}"#,
            json.display()
        ),
    );
    let o = run(&["run", "--manifest", &m]);
    assert!(o.status.success());
    let s = summary(&o);
    let a = s["result"]["alpha_hat"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&a), "{a}");
    let fit: Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    for key in ["alpha_hat", "intercept", "residual", "eps", "lengths"] {
        assert!(fit.get(key).is_some(), "{key}");
    }
    assert_eq!(fit["eps"].as_array().unwrap().len(), 8);
}

#[test]
fn principal_manifest_passes_condition() {
    let d = TempDir::new().unwrap();
    let m = manifest(
        d.path(),
        "m.json",
        r#"{"op":"schrod-check","gen":{"name":"principal","hbar_over_m":1,"eps":0.0078125,"amplitude":0.3,"dt":0.0009765625,"length":1025},"eps":0.0078125}"#,
    );
    let o = run(&["run", "--manifest", &m]);
    assert!(o.status.success());
    assert_eq!(summary(&o)["result"]["verdict"], Value::Bool(true));
}

#[test]
fn empty_sweep_is_a_validation_error() {
    let d = TempDir::new().unwrap();
    let m = manifest(
        d.path(),
        "m.json",
        &format!(r#"{{"op":"scalelaw","gen":{TAKAGI_10},"eps":[]}}"#),
    );
    let o = run(&["run", "--manifest", &m]);
    assert_eq!(o.status.code(), Some(2));
    let s = summary(&o);
    assert!(s["message"].as_str().unwrap().contains("eps"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eps: sweep grid is empty"));
}

#[test]
fn schema_violations_name_the_field() {
    let d = TempDir::new().unwrap();
    let m = manifest(
        d.path(),
        "m.json",
        &format!(r#"{{"op":"dim","gen":{TAKAGI_10},"box_size":[0.1]}}"#),
    );
    let o = run(&["run", "--manifest", &m]);
    assert_eq!(o.status.code(), Some(2));
    assert!(summary(&o)["message"]
        .as_str()
        .unwrap()
        .contains("box_size"));
    let m = manifest(
        d.path(),
        "n.json",
        r#"{"op":"heisenberg","gen":{"name":"takagi","alpha":"x"}}"#,
    );
    let o = run(&["run", "--manifest", &m]);
    assert_eq!(o.status.code(), Some(2));
    assert!(summary(&o)["message"].as_str().unwrap().contains("gen"));
    let m = manifest(d.path(), "o.json", r#"{"op":"fly"}"#);
    assert_eq!(run(&["run", "--manifest", &m]).status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_three() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("f.csv");
    assert!(
        run(&["gen", "--gen", TAKAGI_10, "--out", f.to_str().unwrap()])
            .status
            .success()
    );
    let o = run(&[
        "deriv",
        "--input",
        f.to_str().unwrap(),
        "--eps",
        "0.001",
        "--out",
        d.path().join("d.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(summary(&o)["message"]
        .as_str()
        .unwrap()
        .contains("multiple of the grid step"));
    assert!(!d.path().join("d.csv").exists());
}

#[test]
fn deriv_writes_complex_path() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("f.csv");
    let g = r#"{"name":"polynomial","coeffs":[0,0,1],"dt":0.01,"length":101}"#;
    assert!(run(&["gen", "--gen", g, "--out", f.to_str().unwrap()])
        .status
        .success());
    let out = d.path().join("d.csv");
    let o = run(&[
        "deriv",
        "--input",
        f.to_str().unwrap(),
        "--eps",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let p = io::read_complex_path(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(p.len(), 99);
    for (t, z) in p.times().zip(p.values()) {
        assert!((z.re - 2.0 * t).abs() < 1e-9 && (z.im + 0.01).abs() < 1e-9);
    }
}

#[test]
fn algebra_check_reports_small_error() {
    let o = run(&["algebra-check", "--max-word-len", "3", "--trials", "100"]);
    assert!(o.status.success());
    let s = summary(&o);
    assert!(s["result"]["max_error"].as_f64().unwrap() <= 1e-10);
    assert_eq!(s["result"]["passed"], Value::Bool(true));
}

#[test]
fn dim_of_takagi_is_three_halves() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("takagi.csv");
    assert!(
        run(&["gen", "--gen", TAKAGI_16, "--out", f.to_str().unwrap()])
            .status
            .success()
    );
    let o = run(&["dim", "--input", f.to_str().unwrap()]);
    let dim = summary(&o)["result"]["dimension"].as_f64().unwrap();
    assert!((1.4..=1.6).contains(&dim), "{dim}");
}

#[test]
fn outputs_are_deterministic_across_job_counts() {
    let d = TempDir::new().unwrap();
    let (a, b) = (d.path().join("a.csv"), d.path().join("b.csv"));
    let args = |p: &Path| {
        vec![
            "fracscan".to_string(),
            "--gen".into(),
            TAKAGI_10.into(),
            "--alpha".into(),
            "0.5".into(),
            "--count".into(),
            "32".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    assert!(bin()
        .args(args(&a))
        .arg("--jobs")
        .arg("1")
        .output()
        .unwrap()
        .status
        .success());
    assert!(bin()
        .args(args(&b))
        .env("SCALECALC_JOBS", "4")
        .output()
        .unwrap()
        .status
        .success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let rows = io::read_scan(fs::File::open(&a).unwrap()).unwrap();
    assert_eq!(rows.len(), 32);
    let o = bin()
        .args(args(&b))
        .env("SCALECALC_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn written_csvs_round_trip() {
    let d = TempDir::new().unwrap();
    let p = |n: &str| d.path().join(n).display().to_string();
    assert!(run(&["gen", "--gen", TAKAGI_10, "--out", &p("f.csv")])
        .status
        .success());
    let f = io::read_sampled_path(fs::File::open(p("f.csv")).unwrap()).unwrap();
    let mut buf = Vec::new();
    io::write_sampled_path(&mut buf, &f).unwrap();
    assert_eq!(buf, fs::read(p("f.csv")).unwrap());

    let field = r#"{"name":"gaussian","sigma":1,"k":1,"x":[-4,0.1,81],"t":[0,0.05,11]}"#;
    let o = run(&[
        "gse-residual",
        "--field",
        field,
        "--compare-classical",
        "--out",
        &p("r.csv"),
    ]);
    assert!(o.status.success());
    assert_eq!(
        summary(&o)["result"]["identical_to_classical"],
        Value::Bool(true)
    );
    let g = io::read_complex_grid(fs::File::open(p("r.csv")).unwrap()).unwrap();
    assert_eq!((g.nx, g.nt), (79, 9));
    let mut buf = Vec::new();
    io::write_complex_grid(&mut buf, &g).unwrap();
    assert_eq!(buf, fs::read(p("r.csv")).unwrap());

    assert!(
        run(&["scalelaw", "--input", &p("f.csv"), "--out-csv", &p("l.csv")])
            .status
            .success()
    );
    let rows = io::read_log_rows(fs::File::open(p("l.csv")).unwrap()).unwrap();
    let mut buf = Vec::new();
    io::write_log_rows(&mut buf, &rows).unwrap();
    assert_eq!(buf, fs::read(p("l.csv")).unwrap());

    let o = run(&[
        "ito-check",
        "--input",
        &p("f.csv"),
        "--eps",
        "0.0078125",
        "--out",
        &p("i.csv"),
    ]);
    assert!(o.status.success());
    assert_eq!(summary(&o)["result"]["exact_remainder"].as_f64(), Some(0.0));
    let rows = io::read_ito_comparison(fs::File::open(p("i.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|(_, a, b)| (a - b).norm() < 1e-10));
}

#[test]
fn quantize_routes_agree() {
    let o = run(&[
        "quantize",
        "--gen",
        TAKAGI_10,
        "--eps",
        "0.0078125",
        "--m",
        "2",
        "--potential",
        r#"{"name":"harmonic","k":1}"#,
    ]);
    assert!(o.status.success());
    let s = summary(&o);
    assert_eq!(s["result"]["coherent"], Value::Bool(true));
    assert_eq!(s["result"]["operator"], "scale");
}

#[test]
fn unwritable_output_fails_before_work() {
    let o = run(&["gen", "--gen", TAKAGI_10, "--out", "/nonexistent/dir/f.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(summary(&o)["message"].as_str().unwrap().starts_with("out:"));
}
