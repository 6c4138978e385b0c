//! End-to-end tests of the command-line interface, driving the compiled
//! binary exactly as a shell user would.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mhdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdlab"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn temp_path(tag: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("mhdlab-cli-{tag}-{}", std::process::id()));
    p
}

#[test]
fn list_table_covers_the_whole_catalogue() {
    let out = mhdlab(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    for group in ["G1", "G2", "G3", "G4", "G5", "G6", "G7", "G8", "G9", "G10"] {
        assert!(text.contains(&format!("== {group} ==")), "missing group {group}");
    }
    for id in ["G1/gamma=2", "G3/case4", "G6/alpha2=0", "G10/case2"] {
        assert!(text.contains(id), "missing id {id}");
    }
}

#[test]
fn list_json_is_machine_readable() {
    let out = mhdlab(&["list", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let entries = parsed.as_array().expect("top-level array");
    assert_eq!(entries.len(), 20);
    for e in entries {
        assert!(e["id"].is_string());
        assert!(e["combo"].is_string());
        assert!(e["gamma"].is_number());
    }
}

#[test]
fn sample_grids_are_deterministic_and_complete() {
    let out1 = temp_path("sample-a.csv");
    let out2 = temp_path("sample-b.csv");
    fn args(path: &str) -> Vec<&str> {
        vec![
            "sample",
            "--family",
            "G8",
            "--grid",
            "t=0.5:1.5:3",
            "--grid",
            "x=-1:1:4",
            "--fix",
            "y=0.25",
            "--fix",
            "z=0.5",
            "--out",
            path,
        ]
    }
    let r1 = mhdlab(&args(out1.to_str().unwrap()));
    let r2 = mhdlab(&args(out2.to_str().unwrap()));
    assert_eq!(code(&r1), 0);
    assert_eq!(code(&r2), 0);
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "repeated runs must emit identical bytes");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,y,z,rho,p,vx,vy,vz,Bx,By,Bz,J_mag,force_mag,vorticity_mag"
    );
    // 3 x 4 grid, no point on the excluded plane.
    assert_eq!(lines.count(), 12);
    let _ = std::fs::remove_file(out1);
    let _ = std::fs::remove_file(out2);
}

#[test]
fn sample_json_carries_the_grid_metadata() {
    let out = mhdlab(&[
        "sample", "--family", "G7", "--format", "json", "--grid", "t=0:1:3", "--fix", "x=0.1",
        "--fix", "y=0.2", "--fix", "z=0.3",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["family"], "G7");
    assert_eq!(parsed["points_requested"], 3);
    assert_eq!(parsed["points_skipped"], 0);
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 3);
    assert_eq!(parsed["columns"].as_array().unwrap().len(), 15);
}

#[test]
fn usage_errors_exit_with_one() {
    // Missing required argument.
    assert_eq!(code(&mhdlab(&["sample"])), 1);
    // Unknown family.
    assert_eq!(code(&mhdlab(&["sample", "--family", "G99"])), 1);
    // Unknown grid axis.
    assert_eq!(
        code(&mhdlab(&["sample", "--family", "G7", "--grid", "w=0:1:2"])),
        1
    );
    // Unknown parameter name.
    assert_eq!(
        code(&mhdlab(&["verify", "--family", "G4", "--param", "nope=1"])),
        1
    );
    // Parameter override without a family.
    assert_eq!(code(&mhdlab(&["verify", "--param", "alpha=2"])), 1);
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(code(&mhdlab(&["--help"])), 0);
    assert_eq!(code(&mhdlab(&["--version"])), 0);
    assert_eq!(code(&mhdlab(&["verify", "--help"])), 0);
}

#[test]
fn verify_single_family_passes_and_reports() {
    let out = mhdlab(&["verify", "--family", "G4", "--no-ledger", "--points", "200"]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["passed"], 1);
    assert_eq!(parsed["failed"], 0);
    assert_eq!(parsed["families"][0]["id"], "G4");
    assert_eq!(parsed["families"][0]["pass"], true);
}

#[test]
fn verify_failure_exits_two_and_records_a_ledger_entry() {
    let ledger = temp_path("ledger.json");
    let out = mhdlab(&[
        "verify",
        "--family",
        "G3/case4",
        "--points",
        "120",
        "--ledger",
        ledger.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["failed"], 1);
    let recorded = std::fs::read_to_string(&ledger).unwrap();
    assert!(recorded.contains("residual-suite"));
    assert!(recorded.contains("G3/case4"));
    assert!(recorded.contains("induction"));
    let _ = std::fs::remove_file(ledger);
}

#[test]
fn verify_respects_parameter_overrides() {
    // An invalid override must be rejected up front, not sampled.
    let out = mhdlab(&[
        "verify", "--family", "G4", "--no-ledger", "--param", "alpha1=1",
    ]);
    assert_eq!(code(&out), 1);
    // A valid override still verifies.
    let out = mhdlab(&[
        "verify", "--family", "G4", "--no-ledger", "--points", "100", "--param", "alpha1=-2",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn flow_confirms_a_defining_symmetry() {
    let out = mhdlab(&[
        "flow", "--family", "G8", "--combo", "F+G", "--points", "100",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["invariant"], true);
    assert_eq!(parsed["pass"], true);
    assert!(parsed["invariance_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn flow_moves_the_field_under_a_foreign_generator() {
    let out = mhdlab(&[
        "flow", "--family", "G8", "--combo", "P1", "--points", "100",
    ]);
    // The translated field is still an exact solution, merely different.
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["invariant"], false);
    assert_eq!(parsed["pass"], true);
    assert!(parsed["invariance_deviation"].as_f64().unwrap() > 1e-3);
}

#[test]
fn circulate_verdicts_match_the_catalogue() {
    let out = mhdlab(&[
        "circulate",
        "--family",
        "G1/gamma=2",
        "--loop",
        "center=0.8,0.3,0.5,radius=0.35,n=64",
        "--grid",
        "t=1:2:5",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["conserved_expected"], true);
    assert_eq!(parsed["conserved_observed"], true);
    assert_eq!(parsed["consistent"], true);

    let out = mhdlab(&[
        "circulate",
        "--family",
        "G7",
        "--loop",
        "center=0,0,0.2,radius=0.4,normal=1,0,0,n=64",
        "--grid",
        "t=0:2:5",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["conserved_expected"], false);
    assert_eq!(parsed["conserved_observed"], false);
    assert_eq!(parsed["consistent"], true);
}

#[test]
fn malformed_loop_specs_are_usage_errors() {
    for spec in [
        "radius=0.3",
        "center=0,0,0,radius=-1",
        "center=0,0,0,radius=0.3,n=2",
        "center=0,0,radius=0.3",
    ] {
        let out = mhdlab(&[
            "circulate", "--family", "G7", "--loop", spec, "--grid", "t=0:1:2",
        ]);
        assert_eq!(code(&out), 1, "spec `{spec}` should be rejected");
    }
}
