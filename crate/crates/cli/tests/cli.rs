use std::process::{Command, Output};

use serde_json::Value;
use superint_core::{derive_dso_sector, derive_kc_sector, dso_energy, kc_energy_branch, Branch, DsoParams, KcParams};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superint")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn physical_energies(doc: &Value) -> Vec<f64> {
    doc["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["physical"].as_bool().unwrap())
        .map(|r| r["energy"].as_f64().unwrap())
        .collect()
}

#[test]
fn oscillator_limit_spectrum() {
    let doc = json(&[
        "dso", "spectrum", "--N", "4", "--n", "2", "--c1", "1e-12", "--c2", "1e-12", "--omega", "1", "--hbar", "1",
        "--l1", "0", "--l2", "0", "--pmax", "2",
    ]);
    let e = physical_energies(&doc);
    assert_eq!(e.len(), 3);
    for (got, want) in e.iter().zip([2.0, 4.0, 6.0]) {
        assert!((got - want).abs() < 1e-5, "{got} vs {want}");
    }
    let mult: Vec<u64> = doc["spectrum"].as_array().unwrap().iter().map(|r| r["multiplicity"].as_u64().unwrap()).collect();
    assert_eq!(mult, [1, 2, 3]);
}

#[test]
fn hydrogen_limit_spectrum() {
    let doc = json(&[
        "kc", "spectrum", "--N", "3", "--c0", "1", "--c1", "1e-12", "--c2", "1e-12", "--l", "0", "--pmax", "1", "--hbar", "1",
    ]);
    let e = physical_energies(&doc);
    assert_eq!(e.len(), 2);
    assert!((e[0] + 1.0).abs() < 1e-5 && (e[1] + 0.25).abs() < 1e-5, "{e:?}");
    // all four sign branches are listed and labelled
    assert_eq!(doc["spectrum"].as_array().unwrap().len(), 8);
    assert!(doc["spectrum"].as_array().unwrap().iter().any(|r| r["branch"] == "(-,-)" && r["physical"] == false));
}

#[test]
fn json_spectrum_round_trips() {
    let doc = json(&["dso", "spectrum", "--N", "6", "--n", "3", "--c1", "0.5", "--c2", "1.5", "--omega", "2", "--hbar", "0.5", "--l1", "2", "--l2", "1"]);
    let params = DsoParams::new(6, 3, 0.5, 1.5, 2.0, 0.5).unwrap();
    let sector = derive_dso_sector(&params, 2, 1).unwrap();
    for row in doc["spectrum"].as_array().unwrap() {
        let p = row["p"].as_u64().unwrap() as u32;
        let want = dso_energy(&sector, p, &params);
        assert!((row["energy"].as_f64().unwrap() - want).abs() <= 1e-12 * want.abs());
    }

    let doc = json(&["kc", "spectrum", "--pmax", "4"]);
    let params = KcParams::new(5, 1.0, 1.0, 2.0, 1.0).unwrap();
    let sector = derive_kc_sector(&params, 1).unwrap();
    for row in doc["spectrum"].as_array().unwrap().iter().filter(|r| r["branch"] == "(+,+)") {
        let p = row["p"].as_u64().unwrap() as u32;
        let want = kc_energy_branch(&sector, p, Branch::PHYSICAL, &params).unwrap();
        assert!((row["energy"].as_f64().unwrap() - want).abs() <= 1e-12 * want.abs());
    }
}

#[test]
fn report_fields() {
    let doc = json(&["kc", "verify", "--no-timing"]);
    for key in ["schema_version", "tool_version", "model", "params", "sector", "spectrum", "checks"] {
        assert!(!doc[key].is_null(), "missing {key}");
    }
    assert!(doc.get("timing_ms").is_none());
    assert_eq!(doc["model"], "kc");
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn default_verify_passes() {
    let out = run(&["verify", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("== dso verify ==") && text.contains("== kc verify =="));
    assert!(!text.contains("FAIL"));
}

#[test]
fn mutation_exits_two_and_names_identity() {
    let out = run(&["dso", "verify", "--mutate", "alpha1", "1e-3", "--no-timing"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL dso: cubic algebra"), "{stderr}");
    assert!(stderr.contains("at state |"), "{stderr}");
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&Value> = doc["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["witness"].is_string()));
}

#[test]
fn output_is_deterministic_without_timing() {
    let args = ["verify", "--model", "all", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_configuration_exits_one() {
    for args in [
        &["dso", "spectrum", "--N", "1"][..],
        &["dso", "spectrum", "--n", "5", "--N", "5"],
        &["kc", "spectrum", "--c1", "-1"],
        &["kc", "verify", "--gamma", "0"],
        &["dso", "spectrum", "--l", "1"],
        &["dso", "verify", "--mutate", "nonsense", "1e-3"],
        &["dso", "verify", "--mutate", "alpha1", "abc"],
        &["dso", "spectrum", "--format", "yaml"],
        &["kc", "spectrum", "--l", "-1"],
        &["verify", "--grid-points", "1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = run(&["kc", "spectrum", "--pmax", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,p,branch,energy,multiplicity,physical"));
    assert_eq!(lines.count(), 3 * 4);
}

#[test]
fn oracle_reports_slopes_and_refinement_helps() {
    let doc = json(&["kc", "oracle", "--no-timing"]);
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().contains("slope")));
    assert!(checks.iter().all(|c| c["status"] == "pass"));

    let coarse = json(&["dso", "oracle", "--no-timing"]);
    let fine = json(&["dso", "oracle", "--no-timing", "--refine"]);
    let rows = |d: &Value| d["oracle"].as_array().unwrap().clone();
    for (c, f) in rows(&coarse).iter().zip(rows(&fine)) {
        let exact = c["exact"].as_f64().unwrap();
        let ec = (c["raw"][0].as_f64().unwrap() - exact).abs();
        let ef = (f["raw"][0].as_f64().unwrap() - exact).abs();
        assert!(ef * 3.0 <= ec, "{c} vs {f}");
    }
}
