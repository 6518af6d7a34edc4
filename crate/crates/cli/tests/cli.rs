use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use geogirth::gallai::{verify_certificate, Check, GallaiCertificate};
use geogirth::{GeoGraph, Scene};
use serde_json::Value;

fn geogirth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geogirth"))
        .args(args)
        .env_remove("GEOGIRTH_BUDGET_SCALE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn build_boxes_writes_all_files_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = geogirth(&[
        "--json",
        "build",
        "boxes",
        "--g",
        "6",
        "--k",
        "3",
        "--provider",
        "pigeonhole",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["verification"]["objects"], 9);
    assert_eq!(r["verification"]["girth"]["girth"], 9);
    assert_eq!(r["verification"]["chroma"]["chi"], 3);
    for f in ["scene.json", "graph.dimacs", "labels.json", "report.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let g = GeoGraph::from_dimacs(&read(&out.join("graph.dimacs"))).unwrap();
    assert_eq!((g.n(), g.edge_count()), (9, 9));

    let scene = out.join("scene.json");
    let v = geogirth(&["--json", "verify", scene.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert_eq!(json(&v)["status"], "ok");
}

#[test]
fn every_kind_of_build_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["build", "boxes", "--g", "5", "--k", "3"],
        &["build", "lines", "--g", "5", "--k", "3"],
        &["build", "lines", "--g", "6", "--k", "3", "--provider", "pigeonhole"],
        &["build", "shift", "--n", "6", "--seed", "4"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let mut a = args.to_vec();
        a.extend(["--out", out.to_str().unwrap()]);
        let o = geogirth(&a);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
        let v = geogirth(&["verify", out.join("scene.json").to_str().unwrap()]);
        assert_eq!(code(&v), 0, "{args:?}");
    }
}

#[test]
fn builds_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [["lines", "--g", "6"], ["shift", "--n", "7"]] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for out in [&a, &b] {
            let mut v = vec!["build"];
            v.extend(args);
            v.extend(["--provider", "pigeonhole", "--out", out.to_str().unwrap()]);
            assert_eq!(code(&geogirth(&v)), 0);
        }
        for f in ["scene.json", "graph.dimacs", "labels.json", "report.json"] {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn corrupted_scene_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(
        code(&geogirth(&[
            "build",
            "boxes",
            "--g",
            "6",
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let path = out.join("scene.json");
    let mut scene: Value = serde_json::from_str(&read(&path)).unwrap();
    // push the last box up out of reach of its neighbours
    scene["boxes"][8]["z"] = serde_json::json!(["100", "101"]);
    fs::write(&path, serde_json::to_string(&scene).unwrap()).unwrap();
    assert!(Scene::from_json(&read(&path)).is_ok());
    let o = geogirth(&["--json", "verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["status"], "assertion-failed");
}

#[test]
fn tiny_chroma_budget_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(
        code(&geogirth(&[
            "build",
            "boxes",
            "--g",
            "6",
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let o = geogirth(&[
        "--json",
        "verify",
        out.join("scene.json").to_str().unwrap(),
        "--chroma-budget",
        "1",
    ]);
    assert_eq!(code(&o), 3);
    let r = json(&o);
    assert_eq!(r["status"], "budget-exhausted");
    assert_eq!(r["verification"]["chroma"]["status"], "inconclusive");
}

#[test]
fn gallai_make_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = geogirth(&[
        "gallai",
        "make",
        "--T",
        "0,1,2",
        "--k",
        "2",
        "--g",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let cert: GallaiCertificate = serde_json::from_str(&read(&path)).unwrap();
    let nine: Vec<String> = (1..=9).map(|i| i.to_string()).collect();
    assert_eq!(cert.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(), nine);
    assert!(verify_certificate(&cert, u64::MAX).all_passed());
    let c = geogirth(&["--json", "gallai", "check", path.to_str().unwrap()]);
    assert_eq!(code(&c), 0);

    let mut v: Value = serde_json::from_str(&read(&path)).unwrap();
    v["copies"].as_array_mut().unwrap().remove(0);
    fs::write(&path, v.to_string()).unwrap();
    let c = geogirth(&["--json", "gallai", "check", path.to_str().unwrap()]);
    assert_eq!(code(&c), 2);
    let r = json(&c);
    assert_eq!(
        r["certificate"]["copies_complete"],
        serde_json::to_value(Check::Failed).unwrap()
    );
}

#[test]
fn refusals_and_budgets_have_their_exit_codes() {
    let o = geogirth(&[
        "--json", "gallai", "search", "--T", "0,1,2", "--k", "2", "--g", "9", "--budget", "small",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["status"], "budget-exhausted");

    let o = geogirth(&["--json", "gallai", "make", "--T", "0,1,2", "--k", "2", "--g", "9"]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["status"], "provider-refused");

    let o = geogirth(&["--json", "build", "boxes", "--g", "6", "--k", "4"]);
    assert_eq!(code(&o), 4);

    let o = geogirth(&["gallai", "check", "/nonexistent/cert.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn failed_build_still_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = geogirth(&[
        "build",
        "boxes",
        "--g",
        "9",
        "--k",
        "4",
        "--provider",
        "search",
        "--budget",
        "small",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let r: Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert_eq!(r["status"], "budget-exhausted");
    assert!(r["error"].is_string());
    assert!(!out.join("scene.json").exists());
}

#[test]
fn budget_scale_reaches_presets() {
    let o = Command::new(env!("CARGO_BIN_EXE_geogirth"))
        .args([
            "--json", "gallai", "search", "--T", "0,1,2", "--k", "2", "--g", "9", "--budget", "small",
        ])
        .env("GEOGIRTH_BUDGET_SCALE", "0.5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["parameters"]["budget"], 50_000);
}
