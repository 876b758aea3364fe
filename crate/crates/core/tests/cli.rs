use std::path::Path;
use std::process::{Command, Output};

use nhqa::cli::{sweep, RunConfig, SweepAxis};
use serde_json::Value;

fn nhqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhqa"))
        .args(args)
        .env_remove("NHQA_DEFAULT_TOL")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = [
        "run", "--g", "2", "--delta", "0.01", "--tau", "500", "--log2n", "12",
    ];
    for p in [&a, &b] {
        let mut full = args.to_vec();
        full.extend(["--out", path_str(p)]);
        let out = nhqa(&full);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,t,re_c0,im_c0,re_c1,im_c1,p_tau,p_surv,re_e0,im_e0,re_e1,im_e1,gap"
    );
    assert_eq!(text.lines().count(), 2001);
    // 17 significant digits
    let first = lines.next().unwrap();
    let mantissa = first.split(',').nth(2).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
}

#[test]
fn run_summary_reports_the_configuration() {
    let v = json(&nhqa(&[
        "run",
        "--tau",
        "200",
        "--log2n",
        "8",
        "--samples",
        "50",
    ]));
    assert_eq!(v["config"]["params"]["tau"], 200.0);
    assert_eq!(v["config"]["integrator"]["output_samples"], 50);
    assert_eq!(v["n_items"], 256);
    let p = v["p_tau"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert!((v["p_surv"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_is_independent_of_parallelism() {
    let mut base = RunConfig::default();
    base.params.tau = 300.0;
    base.params.log2n = 10;
    base.integrator.output_samples = 10;
    let grid = [0.0, 1e-4, 1e-3, 0.01, 0.03, 0.1, 0.2, 0.5];
    let one = sweep(&base, SweepAxis::Delta, &grid, 1).unwrap();
    let eight = sweep(&base, SweepAxis::Delta, &grid, 8).unwrap();
    assert_eq!(one.to_csv(false), eight.to_csv(false));
    assert_eq!(one.rows.len(), grid.len());
    for (row, &x) in one.rows.iter().zip(&grid) {
        assert_eq!(row.value, x);
    }
}

#[test]
fn sweep_via_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = nhqa(&[
        "sweep",
        "--axis",
        "tau",
        "--grid",
        "50,100,200",
        "--log2n",
        "8",
        "--samples",
        "10",
        "--parallel",
        "3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("tau,p_tau,p_surv,min_gap,error,wall_time_s\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["run", "--bogus"],
        vec!["run", "--schedule", "cubic"],
        vec!["run", "--schedule", "nonlinear", "--delta", "0"],
        vec!["run", "--g", "-1"],
        vec!["run", "--tau", "0"],
        vec!["run", "--rel-tol", "1e-18"],
        vec!["figure", "--figure", "fig9"],
        vec!["sweep", "--axis", "g", "--grid", ""],
        vec!["sweep", "--axis", "mass", "--grid", "1,2"],
        vec!["sweep", "--axis", "log2n", "--grid", "4.5"],
        vec!["sweep", "--axis", "g", "--grid", "1,2", "--parallel", "0"],
        vec!["scaling", "--grid", "10"],
        vec!["scaling", "--grid", "10,12,14,16", "--target-p", "1.5"],
        vec![
            "compare-analytic",
            "--schedule",
            "nonlinear",
            "--delta",
            "0.01",
        ],
        vec![],
    ] {
        let out = nhqa(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numeric_failure_exits_3() {
    let out = nhqa(&[
        "run",
        "--g",
        "0.5",
        "--delta",
        "3",
        "--tau",
        "1e4",
        "--log2n",
        "1",
        "--abs-tol",
        "1e-300",
        "--rel-tol",
        "1e-8",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn io_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = nhqa(&[
        "run",
        "--tau",
        "10",
        "--log2n",
        "4",
        "--out",
        path_str(&missing),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = nhqa(&["run", "--config", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"params": {"g": 1.5, "delta": 0.02, "tau": 400, "log2n": 9},
            "integrator": {"output_samples": 20}, "emit_spectra": false}"#,
    )
    .unwrap();
    let v = json(&nhqa(&["run", "--config", path_str(&cfg), "--tau", "250"]));
    assert_eq!(v["config"]["params"]["g"], 1.5);
    assert_eq!(v["config"]["params"]["tau"], 250.0);
    assert_eq!(v["config"]["params"]["log2n"], 9);
    assert_eq!(v["config"]["integrator"]["output_samples"], 20);
    assert_eq!(v["config"]["emit_spectra"], false);

    std::fs::write(&cfg, r#"{"params": {"gee": 1.0}}"#).unwrap();
    assert_eq!(
        nhqa(&["run", "--config", path_str(&cfg)]).status.code(),
        Some(2)
    );
}

#[test]
fn environment_sets_the_default_tolerance() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nhqa"));
        cmd.args(["run", "--tau", "50", "--log2n", "6", "--samples", "5"])
            .args(extra);
        match env {
            Some(v) => cmd.env("NHQA_DEFAULT_TOL", v),
            None => cmd.env_remove("NHQA_DEFAULT_TOL"),
        };
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(None, &[])["config"]["integrator"]["rel_tol"], 1e-12);
    assert_eq!(
        run(Some("1e-9"), &[])["config"]["integrator"]["rel_tol"],
        1e-9
    );
    assert_eq!(
        run(Some("1e-9"), &["--rel-tol", "1e-11"])["config"]["integrator"]["rel_tol"],
        1e-11
    );
}

#[test]
fn figure_run_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    let v = json(&nhqa(&[
        "figure",
        "--figure",
        "fig1_left",
        "--out",
        path_str(&out),
    ]));
    let p = v["p_tau"].as_f64().unwrap();
    assert!((p / 4.21e-8 - 1.0).abs() < 0.01, "{p}");
    assert_eq!(v["config"]["params"]["log2n"], 40);
    assert!(out.exists());
}

#[test]
fn compare_analytic_agrees() {
    let v = json(&nhqa(&[
        "compare-analytic",
        "--g",
        "2",
        "--delta",
        "0",
        "--tau",
        "100",
        "--log2n",
        "10",
    ]));
    let integrator = v["integrator"].as_f64().unwrap();
    let weber = v["weber"].as_f64().unwrap();
    assert!((integrator / weber - 1.0).abs() < 1e-3);
    let lz = v["landau_zener"].as_f64().unwrap();
    assert!(lz > 0.0 && lz < 1.0);
    assert!(v["deviations"].as_array().unwrap().len() >= 3);
}

#[test]
fn scaling_writes_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scaling.csv");
    let v = json(&nhqa(&[
        "scaling",
        "--delta",
        "0",
        "--grid",
        "6,7,8,9",
        "--parallel",
        "4",
        "--out",
        path_str(&out),
    ]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(v["fit"]["slope"].as_f64().unwrap() > 0.0);
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 5);
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let out = nhqa(&[flag]);
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
}
