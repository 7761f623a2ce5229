//! End-to-end checks of the binary: exit codes, emitted files, and
//! determinism across thread counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stopgame"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stopgame-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn assert_status(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn solve_writes_roots_and_flow() {
    let dir = temp_dir("solve");
    let out = bin()
        .args(["solve", "--preset", "tent", "--grid", "0,0.5,1"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["roots"].as_array().unwrap().len(), 3);
    assert_eq!(report["quartet"]["u_m"], 0.0);
    let flow = std::fs::read_to_string(dir.join("flow.csv")).unwrap();
    let lines: Vec<&str> = flow.lines().collect();
    assert_eq!(lines[0], "t,rho_min,rho_max");
    assert_eq!(lines.len(), 4);
}

#[test]
fn config_file_model() {
    let dir = temp_dir("config");
    let cfg = dir.join("model.toml");
    std::fs::write(
        &cfg,
        "kind = \"uniform\"\na = 0.0\nb = 2.0\nr = 1.5\nc = 1.0\nhorizon = 1.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("solve.json")).unwrap()).unwrap();
    let roots = report["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0]["u"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn nplayer_csv_has_expected_shape() {
    let dir = temp_dir("nplayer");
    let out = bin()
        .args(["nplayer", "--preset", "uniform02", "--n", "50"])
        .args(["--seed", "11", "--samples", "4", "--emit", "csv"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let csv = std::fs::read_to_string(dir.join("nplayer.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sample,min,max,k,k_star");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 5, "row: {line}");
    }
}

#[test]
fn bad_inputs_exit_with_code_2() {
    let dir = temp_dir("bad");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--preset", "no-such-model"],
        vec!["solve"],
        vec!["reproduce", "no-such-model"],
        vec!["asymptotics"],
        vec!["asymptotics", "curve", "--alpha-grid", "2:1:0.5"],
    ];
    for args in cases {
        let out = bin()
            .args(&args)
            .args(["--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_status(&out, 2);
    }
}

#[test]
fn env_var_sets_output_dir() {
    let dir = temp_dir("env");
    let out = bin()
        .args(["asymptotics", "--alpha", "2"])
        .env("STOPGAME_OUT", &dir)
        .output()
        .unwrap();
    assert_status(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("asymptotics.json")).unwrap())
            .unwrap();
    assert!((report["theta"].as_f64().unwrap() - 0.40637574).abs() < 1e-6);
}

#[test]
fn simulation_reports_do_not_depend_on_thread_count() {
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = temp_dir(&format!("threads{threads}"));
        let out = bin()
            .args(["--threads", threads])
            .args(["simulate", "near", "--preset", "tent", "--n", "400"])
            .args(["--samples", "300", "--seed", "21", "--x", "0.5", "--eps", "0.05"])
            .args(["--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_status(&out, 0);
        outputs.push(std::fs::read(dir.join("near.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn histogram_svg_is_self_contained() {
    let dir = temp_dir("svg");
    let out = bin()
        .args(["simulate", "histogram", "--preset", "example-5.8", "--n", "100"])
        .args(["--samples", "50", "--seed", "31", "--svg"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let svg = std::fs::read_to_string(dir.join("histogram_counts.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("Locations k/n"));
    assert!(!svg.contains("href")); // no external assets
}
