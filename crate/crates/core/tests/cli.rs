use std::path::PathBuf;
use std::process::{Command, Output};

use asg1_core::geometry::{builtin, save_geometry};
use asg1_core::harness::CSV_HEADER;

fn asg1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asg1"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("asg1-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn list_geometries() {
    let out = asg1(&["list-geometries"]);
    assert_eq!(out.status.code(), Some(0));
    let names = String::from_utf8(out.stdout).unwrap();
    assert!(names.lines().count() >= 3);
    assert!(names.lines().any(|l| l == "three_patch_L"));
}

#[test]
fn gluing_report() {
    let out = asg1(&["gluing", "--geometry", "two_patch_square"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let i = &v["interfaces"][0];
    assert_eq!(i["left"]["alpha"]["c0"], 1.0);
    assert_eq!(i["left"]["alpha"]["c1"], 0.0);
    assert_eq!(i["left"]["beta"]["c0"], 0.0);
    assert_eq!(i["pass"], true);

    let out = asg1(&["gluing", "--geometry", "three_patch_L", "--fit"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "fit");
    assert_eq!(v["interfaces"].as_array().unwrap().len(), 2);
}

#[test]
fn convergence_csv() {
    let path = scratch("r.csv");
    let out = asg1(&[
        "convergence",
        "--geometry",
        "two_patch_square",
        "--function",
        "sinsin",
        "--p",
        "3",
        "--k",
        "1",
        "--levels",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4);
}

#[test]
fn p_sweep_to_stdout() {
    let out = asg1(&[
        "p-sweep",
        "--geometry",
        "unit_square",
        "--function",
        "cubic",
        "--p-list",
        "3,4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    for row in csv.lines().skip(1) {
        let h2: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert!(h2 < 1e-9, "{row}");
    }
}

#[test]
fn project_and_check_from_file() {
    let geo = scratch("skew.json");
    save_geometry(&builtin("two_patch_skew", 8).unwrap(), &geo).unwrap();
    let out = asg1(&[
        "project",
        "--geometry",
        geo.to_str().unwrap(),
        "--function",
        "expxy",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["conformity"]["pass"], true);
    assert!(v["errors"]["global"]["h2_semi"].as_f64().unwrap() > 0.0);

    let report = scratch("c1.json");
    let out = asg1(&[
        "check-c1",
        "--geometry",
        geo.to_str().unwrap(),
        "--p",
        "4",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["interfaces"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(asg1(&["--help"]).status.code(), Some(0));
    assert_eq!(
        asg1(&["project", "--geometry", "nowhere"]).status.code(),
        Some(2)
    );
    assert_eq!(
        asg1(&["project", "--geometry", "unit_square", "--frob"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        asg1(&[
            "project",
            "--geometry",
            "unit_square",
            "--p",
            "3",
            "--k",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        asg1(&["project", "--geometry", "unit_square", "--function", "nope"])
            .status
            .code(),
        Some(2)
    );
    let bad = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/not_asg1.json");
    let out = asg1(&["gluing", "--geometry", bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn convergence_is_deterministic() {
    let args = [
        "convergence",
        "--geometry",
        "two_patch_skew",
        "--function",
        "expxy",
        "--levels",
        "2",
    ];
    let a = asg1(&args);
    let b = asg1(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
