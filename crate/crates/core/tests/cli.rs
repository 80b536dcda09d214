//! Exit-code and output contract of the command line binary.

use std::process::{Command, Output};

fn rainbow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rainbow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_then_verify_rainbow_free_family() {
    let dir = std::env::temp_dir().join("rainbow-cli-test-1");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("sf23.json");
    let out = rainbow(&[
        "generate",
        "simple-F",
        "--r",
        "2",
        "--t",
        "3",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let verify = rainbow(&["verify", file.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    assert!(stdout(&verify).contains("no rainbow matching"));
}

#[test]
fn verify_reports_rainbow_with_exit_one() {
    let dir = std::env::temp_dir().join("rainbow-cli-test-2");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("random.json");
    let out = rainbow(&[
        "generate", "random", "--r", "2", "--t", "2", "--vertices", "8", "--n", "36", "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let verify = rainbow(&["verify", file.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
    assert!(stdout(&verify).contains("rainbow matching found"));
    // the constructive engine agrees
    let find = rainbow(&[
        "find",
        file.to_str().unwrap(),
        "--engine",
        "constructive",
    ]);
    assert_eq!(find.status.code(), Some(1));
}

#[test]
fn corrupted_file_exits_four() {
    let dir = std::env::temp_dir().join("rainbow-cli-test-3");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.json");
    std::fs::write(&file, "{ not json").unwrap();
    let out = rainbow(&["verify", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let missing = rainbow(&["verify", dir.join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn bounds_json_round_trips() {
    let out = rainbow(&["bounds", "--r", "2", "--t", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["upper_general"], "30");
    assert_eq!(v["upper_partite"], "18");
    assert_eq!(v["best_lower"]["value"], "4");
}

#[test]
fn exact_small_case() {
    let out = rainbow(&[
        "exact", "--r", "2", "--t", "2", "--universe", "4", "--partite", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n_max"], 2);
    assert_eq!(v["complete"], true);
}

#[test]
fn probe_exact_counts() {
    let out = rainbow(&["probe", "--r", "2", "--t", "3", "--prime", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(v["hyperplane_size"], 16807);
    assert_eq!(v["candidate_count"], v["expected_candidates"]);
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = rainbow(&["repro", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prob_construct_writes_valid_instance() {
    let dir = std::env::temp_dir().join("rainbow-cli-test-4");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("prob.json");
    let out = rainbow(&[
        "prob-construct", "--r", "3", "--t", "3", "--prime", "7", "--seed", "1", "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = std::fs::read_to_string(&file).unwrap();
    let inst = rainbow_core::instance::decode(&text).unwrap();
    assert_eq!(inst.metadata.get("generator").map(String::as_str), Some("prob-f"));
    assert_eq!(inst.metadata.get("seed").map(String::as_str), Some("1"));
}
