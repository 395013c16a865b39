use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wdvv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdvv")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn curve(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../curves").join(name).display().to_string()
}

#[test]
fn verify_from_config_file_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[model]\nname = \"example2\"\n\n[parameters]\nq = 0\n\n[sample]\ncount = 50\n\n[outputs]\nreport = \"out.json\"\n",
    )
    .unwrap();
    let out = wdvv(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["provenance"]["seed"], 42);
    assert_eq!(report["provenance"]["samples"], 50);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"oracle.prepotential"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&wdvv(&["verify", "--model", "example1", "--set", "a=1", "--set", "c=0.7071067811865476"])), 2);
    assert_eq!(code(&wdvv(&["verify", "--model", "example2", "--set", "tolerances.residual=1e-30"])), 1);
    assert_eq!(code(&wdvv(&["verify", "--model", "example3"])), 2);
    assert_eq!(code(&wdvv(&["verify", "--config", "/nonexistent.toml"])), 2);
    assert_eq!(code(&wdvv(&["verify", "--model", "example2", "--set", "tolerances.oracle=0"])), 2);
    assert_eq!(code(&wdvv(&["extend", "--model", "example1", "--set", "model.exponents=[1.0, 3.0]"])), 2);
    assert_eq!(code(&wdvv(&["extend", "--model", "example2"])), 0);
    assert_eq!(code(&wdvv(&["extend", "--model", "example1"])), 0);
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out =
            wdvv(&["verify", "--model", "example1", "--seed", "7", "--samples", "10", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = wdvv(&["verify", "--model", "example1", "--seed", "8", "--samples", "10"]);
    assert_ne!(c.stdout, fs::read(&a).unwrap());
}

#[test]
fn correlators_csv() {
    let out = wdvv(&["correlators", "--model", "example2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "x1,x2,c111,c112,c122,c222,status");
    assert!(lines[1].starts_with("1.0,1.0,-0.5,"));

    let empty = wdvv(&["correlators", "--model", "example2", "--set", "sample.grid_steps=0"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);

    let crossing = wdvv(&[
        "correlators",
        "--model",
        "example1",
        "--set",
        "sample.grid_min=[-1.0, 0.5]",
        "--set",
        "sample.grid_max=[1.0, 1.5]",
    ]);
    assert_eq!(code(&crossing), 0);
    assert!(String::from_utf8(crossing.stdout).unwrap().contains("domain:"));
}

#[test]
fn curve_files() {
    for name in ["example1.toml", "example2.toml"] {
        let path = curve(name);
        assert_eq!(code(&wdvv(&["curve-validate", "--model", &path])), 0);
        assert_eq!(code(&wdvv(&["verify", "--model", &path, "--samples", "5"])), 0);
    }
    let metric = wdvv(&["correlators", "--model", &curve("example2.toml"), "--set", "sample.source=metric"]);
    assert_eq!(code(&metric), 0);
    let prepotential = wdvv(&["correlators", "--model", &curve("example2.toml")]);
    assert_eq!(code(&prepotential), 2);
}

#[test]
fn broken_curve_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    // the pole sits on the node and the divisor has the wrong degree
    fs::write(
        &path,
        r#"
[[components]]
id = 1
p = [{ index = 0, at = "inf" }]
q = [{ index = 0, at = 0.0 }]

[[components]]
id = 2
poles = [1.0, 3.0]
normalization = [2.0]
p = [{ index = 1, at = "inf" }]
q = [{ index = 1, at = 0.0 }]

[[intersections]]
component_a = 1
at_a = 1.0
component_b = 2
at_b = 1.0

[[intersections]]
component_a = 1
at_a = -1.0
component_b = 2
at_b = -1.0
"#,
    )
    .unwrap();
    let out = wdvv(&["curve-validate", "--model", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let details = &report["checks"][0]["details"];
    assert!(details["violation_00"].is_string());
    assert_eq!(code(&wdvv(&["verify", "--model", path.to_str().unwrap()])), 2);
}
