use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schottky-zeta"))
        .args(args)
        .env("SCHOTTKY_ZETA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_and_delta() {
    let o = run(&["validate", "--fixture", "cylinder"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], true);
    let o = run(&["delta", "--fixture", "cylinder"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["delta"], 0.0);
}

#[test]
fn invalid_scheme_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // overlapping disks
    std::fs::write(
        &path,
        r#"{"m": 1, "disks": [{"center": -0.5, "radius": 1.0}, {"center": 0.5, "radius": 1.0}],
            "generators": [[[2.0, 0.0], [0.0, 0.5]]]}"#,
    )
    .unwrap();
    let o = run(&["validate", "--scheme", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["zeta", "--scheme", path.to_str().unwrap(), "--s", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pressure_csv() {
    let o = run(&["pressure", "--fixture", "cylinder", "--grid", "0:1:3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma,pressure");
    assert_eq!(lines.len(), 4);
    let p: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((p + 1.0).abs() < 1e-10);
}

#[test]
fn scan_cylinder_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&[
        "scan", "--fixture", "cylinder", "--rect", "-3.5,1,0.1,12", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",2")));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.json")).unwrap()).unwrap();
    assert_eq!(side["command"], "scan");
    assert_eq!(side["status"], "ok");
}

#[test]
fn counts_print_integer_then_json() {
    let o = run(&["count-n", "--fixture", "cylinder", "--r", "2.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("6"));
    let v: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(v["report"]["unresolved"], 0);
    let o = run(&["count-m", "--fixture", "cylinder", "--sigma", "-0.5", "--t", "3.14159"]);
    assert_eq!(stdout(&o).lines().next(), Some("2"));
}

#[test]
fn cover_report_and_factor_check() {
    let o = run(&["cover-report", "--fixture", "cylinder", "--regular", "Z3:1", "--max-word-len", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["degree"], 3);
    assert_eq!(v["girth"], 3);
    assert!((v["ell0"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    let o = run(&["factor-check", "--fixture", "cylinder", "--regular", "Z2:1", "--samples", "4", "--Q", "24"]);
    assert_eq!(o.status.code(), Some(0));
    let err: f64 = stdout(&o).lines().next().unwrap().parse().unwrap();
    assert!(err < 1e-8);
}

#[test]
fn cover_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cover.json");
    std::fs::write(&path, r#"{"degree": 3, "generator_perms": [[2, 3, 1]]}"#).unwrap();
    let o = run(&["zeta", "--fixture", "cylinder", "--cover", path.to_str().unwrap(), "--s", "0.5,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["degree"], 3);
    std::fs::write(&path, r#"{"degree": 2, "generator_perms": [[0, 1]]}"#).unwrap();
    let o = run(&["zeta", "--fixture", "cylinder", "--cover", path.to_str().unwrap(), "--s", "0.5,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run(&["count-n", "--fixture", "cylinder", "--r", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--fixture", "pants", "--congruence", "3,0", "--s", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--fixture", "nowhere", "--s", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["pressure", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_schottky-zeta"))
        .args(["validate", "--fixture", "cylinder"])
        .env("SCHOTTKY_ZETA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn experiment_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["experiment", "--print-config"]);
    let mut cfg: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let csv = dir.path().join("w.csv");
    cfg["output"]["csv"] = csv.to_str().unwrap().into();
    cfg["params"]["radii"] = serde_json::json!([5.5]);
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let o = run(&["experiment", "--config", path.to_str().unwrap(), "--kind", "weyl_scaling"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(first.lines().count(), 4);
    let o = run(&["experiment", "--config", path.to_str().unwrap(), "--kind", "weyl_scaling"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
    let o = run(&["experiment", "--config", path.to_str().unwrap(), "--kind", "congruence_l0"]);
    assert_eq!(o.status.code(), Some(2));
}
