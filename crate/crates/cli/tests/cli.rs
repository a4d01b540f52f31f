use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(verb: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_breaklab"))
        .arg(verb)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const PL2: &str = r#"{ "family": "pl2", "breaks": [0.0, 0.5], "parameters": { "s1": 1.5 } }"#;

#[test]
fn rotation_family_tunes_to_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "rotation",
        &configs().join("rotation.json"),
        tmp.path(),
        &[],
    );
    assert!(o.status.success());
    let r = read_json(&tmp.path().join("rotation.json"));
    let t = r[0]["t"].as_f64().unwrap();
    assert!((t - 0.618034).abs() < 1e-6, "{t}");
}

#[test]
fn pl2_return_times_are_fibonacci() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{ "schema_version": 1, "maps": [{PL2}], "target": {{ "depth": 12 }}, "levels": [1, 10] }}"#
        ),
    );
    let o = run("rotation", &cfg, &tmp.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&tmp.path().join("out/rotation.json"));
    let q: Vec<u64> = serde_json::from_value(r[0]["return_times"].clone()).unwrap();
    let mut fib = vec![1u64, 2];
    while fib.len() < 12 {
        fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
    }
    assert_eq!(q, fib);
}

#[test]
fn infeasible_depth_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{ "schema_version": 1, "maps": [{PL2}], "target": {{ "depth": 60 }}, "levels": [1, 14] }}"#
        ),
    );
    let o = run("rotation", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("depth 60 unachievable"));
}

#[test]
fn bad_precision_and_schema_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "constants",
        &configs().join("pl2_golden.json"),
        tmp.path(),
        &["--precision", "64"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("53-bit"));
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{ "schema_version": 2, "maps": [{PL2}], "target": {{ "depth": 24 }}, "levels": [1, 14] }}"#
        ),
    );
    let o = run("constants", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version"));
}

#[test]
fn verify_rotation_bounds_are_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run("verify", &configs().join("rotation.json"), tmp.path(), &[]);
    assert!(o.status.success());
    let rows = read_json(&tmp.path().join("verify.json"));
    for r in rows.as_array().unwrap() {
        assert_eq!(r["pass"], true);
        if ["denjoy", "denjoy_inverse", "finzi", "oscillation"]
            .contains(&r["check"].as_str().unwrap())
        {
            assert_eq!(r["observed_max"].as_f64(), Some(0.0), "{r}");
        }
    }
}

#[test]
fn verify_pl2_golden_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "verify",
        &configs().join("pl2_golden.json"),
        tmp.path(),
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_json(&tmp.path().join("manifest.json"));
    assert_eq!(m["failed_checks"].as_array().unwrap().len(), 0);
}

#[test]
fn corrupted_fixture_fails_coverage() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "verify",
        &configs().join("corrupt_fixture.json"),
        tmp.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().all(|l| l.starts_with("FAIL coverage")), "{err}");
    assert!(!err.is_empty());
}

#[test]
fn identity_pair_measures_vanish() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "singularity",
        &configs().join("identity_pair.json"),
        tmp.path(),
        &[],
    );
    assert!(o.status.success());
    let s = read_json(&tmp.path().join("singularity.json"));
    assert_eq!(s["case"], "undetermined");
    for m in s["measures"].as_array().unwrap() {
        assert_eq!(m["measure"].as_f64(), Some(0.0));
    }
}

#[test]
fn singular_pair_signal() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "singularity",
        &configs().join("singular_pair.json"),
        tmp.path(),
        &[],
    );
    assert!(o.status.success());
    let s = read_json(&tmp.path().join("singularity.json"));
    assert_eq!(s["case"], "distinct");
    for m in s["measures"].as_array().unwrap() {
        assert!(m["measure"].as_f64().unwrap() >= 0.01, "{m}");
    }
    let profiles = s["profiles"].as_array().unwrap();
    let half = |p: &Value| {
        let eps = p["eps"].as_array().unwrap();
        let k = eps.iter().position(|e| e.as_f64() == Some(0.5)).unwrap();
        p["m_of_eps"][k].as_f64().unwrap()
    };
    assert!(half(profiles.last().unwrap()) > half(&profiles[0]));
    let csv = std::fs::read_to_string(tmp.path().join("measures.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7);
}

#[test]
fn outputs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("singular_pair.json");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run("singularity", &cfg, &a, &["--levels", "8..10"])
        .status
        .success());
    assert!(run("singularity", &cfg, &b, &["--levels", "8..10"])
        .status
        .success());
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 3);
    for n in &names {
        assert_eq!(
            std::fs::read(a.join(n)).unwrap(),
            std::fs::read(b.join(n)).unwrap(),
            "{n:?}"
        );
    }
    let m = read_json(&a.join("manifest.json"));
    let digest: String = Sha256::digest(std::fs::read(&cfg).unwrap())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(m["config_sha256"], digest.as_str());
    assert_eq!(m["levels"], serde_json::json!([8, 10]));
    let files = m["files"].as_object().unwrap();
    assert_eq!(files.len(), names.len() - 1);
}

#[test]
fn partition_and_conjugacy_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        "partition",
        &configs().join("moebius2_golden.json"),
        tmp.path(),
        &["--levels", "3..5"],
    );
    assert!(o.status.success());
    for n in 3..=5 {
        let p = std::fs::read_to_string(tmp.path().join(format!("partition_m0_P{n}.csv"))).unwrap();
        let d = std::fs::read_to_string(tmp.path().join(format!("partition_m0_D{n}.csv"))).unwrap();
        assert!(d.lines().count() > p.lines().count());
    }
    let out = tmp.path().join("c");
    let o = run(
        "conjugacy",
        &configs().join("singular_pair.json"),
        &out,
        &["--levels", "8..9"],
    );
    assert!(o.status.success());
    let c = read_json(&out.join("conjugacy.json"));
    assert!(c["residual"].as_f64().unwrap() <= 2.0 * c["mesh"].as_f64().unwrap());
    assert!(out.join("h_knots.csv").exists());
}
