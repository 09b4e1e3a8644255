use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn elastica(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastica")).current_dir(dir).args(args).env_remove("ELASTICA_THREADS").output().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const WAVE: &str = "# x, y\n0,0\n0.5,0.2\n1,0.35\n1.5,0.3\n2,0.1\n2.5,-0.1\n3,-0.2\n3.5,-0.1\n4,0.1\n4.5,0.3\n";

#[test]
fn distance_to_itself_is_zero_and_echoes_the_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.csv", WAVE);
    let r = report(&elastica(dir.path(), &["distance", "wave.csv", "wave.csv", "--mu", "2", "--lambda-w", "0.02"]));
    assert!(r["result"]["distance"].as_f64().unwrap() < 1e-10);
    let cfg = &r["config"];
    for key in ["mu", "nu", "lambda", "lambda_w", "n", "rotations", "reparam", "shift_samples", "steps", "seed", "out"] {
        assert!(cfg.get(key).is_some(), "missing {key}");
    }
    assert_eq!(cfg["mu"], 2.0);
    assert_eq!(cfg["lambda_w"], 0.02);
    assert_eq!(cfg["subcommand"], "distance");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("elastica-out/report.json")).unwrap()).unwrap();
    assert_eq!(saved, r);
}

#[test]
fn registration_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.csv", WAVE);
    write(dir.path(), "line.csv", "0,0\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n8,0\n");
    let r = report(&elastica(dir.path(), &["distance", "wave.csv", "line.csv", "--no-rotations", "--no-reparam", "--n", "16"]));
    assert_eq!(r["config"]["rotations"], false);
    assert_eq!(r["config"]["reparam"], false);
    assert_eq!(r["config"]["n"], 16);
    let (d, plain) = (r["result"]["distance"].as_f64().unwrap(), r["result"]["unaligned"].as_f64().unwrap());
    assert!((d - plain).abs() < 1e-12 * plain);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.csv", WAVE);
    write(dir.path(), "broken.csv", "0,0\n1,1\n2,oops\n3,3\n");
    let cases: [&[&str]; 5] = [
        &["distance", "wave.csv", "wave.csv", "--mu", "0"],
        &["distance", "wave.csv", "wave.csv", "--n", "4"],
        &["geodesic", "wave.csv", "wave.csv", "--steps", "1"],
        &["distance", "wave.csv", "missing.csv"],
        &["distance", "wave.csv", "--bogus"],
    ];
    for args in cases {
        assert_eq!(elastica(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    let out = elastica(dir.path(), &["distance", "wave.csv", "broken.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("broken.csv") && msg.contains("line 3"), "{msg}");
}

#[test]
fn numerical_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wave.csv", WAVE);
    write(dir.path(), "point.csv", "1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n");
    let out = elastica(dir.path(), &["distance", "wave.csv", "point.csv"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn prop_check_on_the_straightening_curve() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&elastica(dir.path(), &["prop-check", "--a", "1", "--b", "0.5", "--amplitude", "1"]));
    assert!(r["result"]["max_abs_kappa_tilde_numeric"].as_f64().unwrap() < 1e-3);
    assert_eq!(r["config"]["samples"], 4096);
    let csv = std::fs::read_to_string(dir.path().join("elastica-out/prop_check.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,omega,kappa,omega_tilde_analytic,omega_tilde_numeric,kappa_tilde_analytic,kappa_tilde_numeric"
    );
    assert_eq!(lines.count(), 4096);
}

#[test]
fn hurricane_matrix_and_geodesic_export() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/three_storms.txt");
    let r = report(&elastica(dir.path(), &["hurricane", fixture.to_str().unwrap(), "--pair", "2,1", "--steps", "3"]));
    let m = r["result"]["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 3);
    for i in 0..3 {
        assert_eq!(m[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
    assert_eq!(r["result"]["geodesic"]["from"], "AL032005");
    for k in 0..3 {
        let step: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(format!("elastica-out/geodesic/step_{k:03}.json"))).unwrap())
                .unwrap();
        assert_eq!(step["dim"], "S2");
    }
    let cat5 = report(&elastica(dir.path(), &["hurricane", fixture.to_str().unwrap(), "--min-category", "5"]));
    assert_eq!(cat5["result"]["storms"].as_array().unwrap().len(), 1);
    assert_eq!(cat5["result"]["geodesic"], Value::Null);
}

#[test]
fn surface_geodesic_writes_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let tube = |r: f64| {
        let samples: Vec<String> = (0..12).map(|i| format!("[0, 0, {}]", i as f64 / 11.0)).collect();
        format!(r#"{{"class": "tube", "center": {{"closed": false, "dim": 3, "samples": [{}]}}, "radius": [{}]}}"#, samples.join(","), vec![r.to_string(); 12].join(","))
    };
    write(dir.path(), "a.json", &tube(0.1));
    write(dir.path(), "b.json", &tube(0.3));
    report(&elastica(dir.path(), &["geodesic", "a.json", "b.json", "--steps", "3", "--circle-samples", "6"]));
    let obj = std::fs::read_to_string(dir.path().join("elastica-out/step_001.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 72);
    assert!(obj.lines().any(|l| l.starts_with("f ")));
    let mid: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("elastica-out/step_001.json")).unwrap()).unwrap();
    assert!(mid["radius"].as_array().unwrap().iter().all(|r| (r.as_f64().unwrap() - 0.2).abs() < 1e-9));
    let out = elastica(dir.path(), &["geodesic", "a.json", "missing-class.json"]);
    assert_eq!(out.status.code(), Some(2));
}
