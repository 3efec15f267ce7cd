//! Exit-code and file-format contract of the catq binary.

use std::io::Write;
use std::process::Command;

fn catq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catq"))
}

fn write_tmp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("catq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn demo_exits_zero_and_prints_json() {
    let out = catq().arg("demo").output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["pass"], serde_json::json!(true));
    assert_eq!(summary["kind"], serde_json::json!("demo"));
    // The worked example's metric, up to floating-point echo.
    let expected = [[1.0, -1.0], [-1.0, 3.0]];
    for (i, row) in expected.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got = summary["metric"][i][j].as_f64().unwrap();
            assert!((got - want).abs() < 1e-12, "metric[{i}][{j}] = {got}");
        }
    }
}

#[test]
fn unknown_config_key_exits_two() {
    let path = write_tmp("bad_key.json", r#"{"kind": "demo", "surprise": 1}"#);
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surprise"));
}

#[test]
fn malformed_json_exits_two() {
    let path = write_tmp("broken.json", "{nope");
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_two() {
    let out = catq().arg("run").arg("/nonexistent/cfg.json").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_failure_exits_one_with_summary() {
    // An impossible tolerance turns a healthy run into a reported failure.
    let path = write_tmp(
        "strict.json",
        r#"{"kind": "demo", "tolerances": {"metric_defect": 1e-30}}"#,
    );
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["pass"], serde_json::json!(false));
}

#[test]
fn defective_input_exits_one() {
    let matrix = write_tmp("jordan.mat", "2\n1,0 1,0\n0,0 1,0\n");
    let cfg = format!(
        r#"{{"kind": "max_bound",
            "hamiltonian": {{"source": "file", "path": {}}}}}"#,
        serde_json::json!(matrix.display().to_string())
    );
    let path = write_tmp("jordan.json", &cfg);
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["error"]
        .as_str()
        .unwrap()
        .contains("defective"));
}

#[test]
fn matrix_file_source_round_trips_through_run() {
    let matrix = write_tmp("tri.mat", "2\n1,0 1,0\n0,0 2,0\n");
    let cfg = format!(
        r#"{{"kind": "max_bound", "t_b": 1.0,
            "hamiltonian": {{"source": "file", "path": {}}}}}"#,
        serde_json::json!(matrix.display().to_string())
    );
    let path = write_tmp("tri.json", &cfg);
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // Real spectrum: bound is exp(0) = 1 and the pair saturates it.
    assert_eq!(summary["bound"], serde_json::json!(1.0));
}

#[test]
fn ragged_matrix_file_exits_two_naming_the_row() {
    let matrix = write_tmp("ragged.mat", "2\n1,0 0,0\n0,0\n");
    let cfg = format!(
        r#"{{"kind": "max_bound",
            "hamiltonian": {{"source": "file", "path": {}}}}}"#,
        serde_json::json!(matrix.display().to_string())
    );
    let path = write_tmp("ragged.json", &cfg);
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn seed_env_overrides_config() {
    let cfg = r#"{"kind": "max_bound", "t_b": 1.5,
                  "hamiltonian": {"source": "random", "dim": 4}, "seed": 1}"#;
    let path = write_tmp("seeded.json", cfg);
    let by_config = catq().arg("run").arg(&path).output().unwrap();
    let by_env = catq()
        .arg("run")
        .arg(&path)
        .env("CATQ_SEED", "2")
        .output()
        .unwrap();
    let direct: serde_json::Value = serde_json::from_slice(&by_config.stdout).unwrap();
    let overridden: serde_json::Value = serde_json::from_slice(&by_env.stdout).unwrap();
    assert_eq!(direct["seed"], serde_json::json!(1));
    assert_eq!(overridden["seed"], serde_json::json!(2));
    assert_ne!(direct["attained"], overridden["attained"]);

    let bad = catq()
        .arg("run")
        .arg(&path)
        .env("CATQ_SEED", "notanumber")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn artifacts_are_written_with_headers() {
    let dir = std::env::temp_dir().join(format!("catq-artifacts-{}", std::process::id()));
    let cfg = format!(
        r#"{{"kind": "max_bound", "t_b": 1.0, "seed": 5,
            "hamiltonian": {{"source": "random", "dim": 3}},
            "output_path": {}}}"#,
        serde_json::json!(dir.display().to_string())
    );
    let path = write_tmp("artifacts.json", &cfg);
    let out = catq().arg("run").arg(&path).output().unwrap();
    assert!(out.status.success());

    let summary = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    assert_eq!(summary.as_bytes(), out.stdout.as_slice());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap();
    assert!(meta["unix_time"].as_u64().is_some());
    assert!(!summary.contains("unix_time"), "summary must not carry timestamps");

    let csv = std::fs::read_to_string(dir.join("max_bound.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,amplitude_re,amplitude_im,modulus,bound"
    );
    assert!(lines.count() >= 2);
    assert!(!csv.contains('\r'), "LF line endings required");

    // The generated Hamiltonian is exported in the text matrix format.
    let mat = std::fs::read_to_string(dir.join("hamiltonian.mat")).unwrap();
    assert_eq!(mat.lines().next().unwrap(), "3");
}

#[test]
fn help_documents_the_interface() {
    let out = catq().arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["run", "demo", "verify", "CATQ_SEED"] {
        assert!(text.contains(needle), "--help missing {needle}");
    }
}
