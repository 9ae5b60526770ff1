use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spt_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spt-sim"))
        .args(args)
        .env("SPT_SIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn phase_example_is_superradiant() {
    let out = spt_sim(&[
        "phase",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--lambda-tilde",
        "0.2",
    ]);
    assert_eq!(json_stdout(&out)["phase"], "SP");
}

#[test]
fn zpf_of_bare_oscillator_is_one_half() {
    let v = json_stdout(&spt_sim(&["zpf", "--xi-over-omega", "0", "--boson-dim", "64"]));
    assert!((v["zpf"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn scaling_exponent_in_band() {
    let v = json_stdout(&spt_sim(&[
        "scaling",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--ratios",
        "10,20,50,100,200",
    ]));
    let gamma = v["gamma"].as_f64().unwrap();
    assert!((-0.75..=-0.58).contains(&gamma), "gamma = {gamma}");
    assert!(v["r_squared"].as_f64().unwrap() >= 0.98);
}

#[test]
fn negative_boson_dim_is_one_diagnostic() {
    let out = spt_sim(&["zpf", "--xi-over-omega", "0.1", "--boson-dim", "-4"]);
    assert_eq!(out.status.code(), Some(1));
    let lines: Vec<_> = stderr(&out).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].contains("boson_dim"));
}

#[test]
fn unstable_point_warns_but_runs() {
    let out = spt_sim(&[
        "phase",
        "--xi-over-omega",
        "0.3",
        "--lambda-tilde",
        "0.1",
        "--alpha",
        "1.1",
    ]);
    assert!(stderr(&out).contains("parameter point is UNSTABLE (UP)"));
    assert_eq!(json_stdout(&out)["phase"], "UP");
}

#[test]
fn empty_config_reports_every_required_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, "{}").unwrap();
    let out = spt_sim(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    for f in [
        "command",
        "ratio",
        "lambda_tilde",
        "alpha",
        "xi_over_omega",
        "boson_dim",
    ] {
        assert!(err.contains(&format!("{f}:")), "{f} not reported in:\n{err}");
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"command":"zpf","params":{"xi_over_omega":0,"boson_dim":8},"colour":"red"}"#,
    )
    .unwrap();
    let out = spt_sim(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command":"zpf","params":{"xi_over_omega":0.1,"boson_dim":8}}"#,
    )
    .unwrap();
    let v = json_stdout(&spt_sim(&["--config", cfg.to_str().unwrap(), "--boson-dim", "96"]));
    assert_eq!(v["boson_dim"], 96);
    assert_eq!(v["xi_over_omega"], 0.1);
}

#[test]
fn validate_only_does_not_run() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("z.json");
    let out = spt_sim(&[
        "zpf",
        "--xi-over-omega",
        "0",
        "--boson-dim",
        "8",
        "--validate-only",
        "--output",
        art.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!art.exists());
}

#[test]
fn precondition_failure_exits_one() {
    // A cat state only exists in the superradiant phase.
    let out = spt_sim(&[
        "wigner",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--lambda-tilde",
        "1",
        "--ratio",
        "25",
        "--boson-dim",
        "64",
        "--state",
        "cat-even",
        "--nx",
        "3",
        "--np",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error"));
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn manifest_round_trip_reproduces_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("sweep.csv");
    let out = spt_sim(&[
        "sweep",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--ratio",
        "20",
        "--boson-dim",
        "24",
        "--axis1",
        "lambda_tilde=0.3:0.9:7",
        "--output",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest_path = dir.path().join("sweep.csv.manifest.json");
    let manifest = read_json(&manifest_path);
    assert_eq!(manifest["manifest_version"], 1);
    assert_eq!(manifest["config"]["command"], "sweep");
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["version"].is_string());

    let second = dir.path().join("again.csv");
    let out = spt_sim(&[
        "--config",
        manifest_path.to_str().unwrap(),
        "--output",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let csv = String::from_utf8(std::fs::read(&first).unwrap()).unwrap();
    assert!(csv.starts_with("axis1,axis2,phase,phi_analytic,phi_numeric,gap,entropy,r_tilde,lambda_tilde_s,m_used\n"));
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = [
        "adiabatic",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--lambda-tilde",
        "1",
        "--ratio",
        "25",
        "--boson-dim",
        "4",
        "--steps",
        "20",
    ];
    let a = spt_sim(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_spt-sim"))
        .args(args)
        .env("SPT_SIM_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("l,s,energy,fidelity\n"));
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn noise_study_reports_both_order_parameters() {
    let v = json_stdout(&spt_sim(&[
        "noise-study",
        "--alpha",
        "1.1",
        "--xi-over-omega",
        "0.26",
        "--lambda-tilde",
        "0.3",
        "--ratio",
        "25",
        "--boson-dim",
        "8",
        "--t1",
        "100",
        "--t2",
        "50",
        "--exposure",
        "2",
    ]));
    assert!(v["phi_ideal"].as_f64().unwrap() > v["phi_noisy"].as_f64().unwrap());
    assert!(v["purity"].as_f64().unwrap() < 1.0);
    assert_eq!(v["n_qubits"], 4);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_spt-sim"))
        .args(["zpf", "--xi-over-omega", "0", "--boson-dim", "8"])
        .env("SPT_SIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
