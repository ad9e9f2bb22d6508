use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn glab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glab")).args(args).env_remove("GLAB_CAP").output().expect("binary runs")
}

fn glab_data(args: &[&str]) -> Output {
    let owned: Vec<String> =
        args.iter().map(|a| if a.ends_with(".json") { data(a).display().to_string() } else { a.to_string() }).collect();
    let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
    glab(&refs)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_bundled_files() {
    for name in ["r2", "z2", "z3", "z2_z3", "z2_swap", "s3_on_3"] {
        let out = glab_data(&["validate", &format!("{name}.json")]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(json(&out)["pass"].as_bool().unwrap());
    }
}

#[test]
fn bundled_files_match_the_built_in_corpus() {
    for name in ["r2", "z2", "z3", "z2_z3", "z2_swap", "s3_on_3"] {
        let out = glab(&["export", name]);
        let exported = &json(&out)["instances"][0]["groupoid"];
        let on_disk: Value = serde_json::from_str(&fs::read_to_string(data(&format!("{name}.json"))).unwrap()).unwrap();
        assert_eq!(exported, &on_disk, "{name}");
    }
}

#[test]
fn transform_reproduces_bundled_groupoids() {
    let dir = tempfile::tempdir().unwrap();
    for (action, groupoid) in [("z2_swap_action.json", "z2_swap.json"), ("s3_on_3_action.json", "s3_on_3.json")] {
        let out_path = dir.path().join(groupoid);
        let out = glab(&["transform", data(action).to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let written: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
        let bundled: Value = serde_json::from_str(&fs::read_to_string(data(groupoid)).unwrap()).unwrap();
        assert_eq!(written, bundled);
    }
}

#[test]
fn invalid_and_malformed_groupoids() {
    let dir = tempfile::tempdir().unwrap();
    let invalid = dir.path().join("invalid.json");
    fs::write(
        &invalid,
        r#"{"arrows":["x","y"],"source":{"x":"x","y":"x"},"range":{"x":"x","y":"x"},"inverse":{"x":"x","y":"y"},"compose":[["x","x","x"]]}"#,
    )
    .unwrap();
    let out = glab(&["validate", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!json(&out)["instances"][0]["violations"].as_array().unwrap().is_empty());

    let malformed = dir.path().join("malformed.json");
    fs::write(&malformed, "{\"arrows\": [").unwrap();
    assert_eq!(glab(&["validate", malformed.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(glab(&["norm", invalid.to_str().unwrap(), data("r2_function.json").to_str().unwrap()]).status.code(), Some(2));

    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"coeffs": {"nope": [1, 0]}}"#).unwrap();
    assert_eq!(glab(&["norm", data("r2.json").to_str().unwrap(), unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn galois_on_pair_groupoid_is_deterministic() {
    let args = ["galois", "r2.json", "--trials", "64", "--seed", "7"];
    let first = glab_data(&args);
    assert_eq!(first.status.code(), Some(0));
    let report = json(&first);
    let census = report["instances"].as_array().unwrap().iter().find_map(|i| i.get("census")).unwrap();
    assert_eq!(census["subgroupoids"].as_array().unwrap().len(), 2);
    assert_eq!(census["algebras"], 2);
    assert_eq!(glab_data(&args).stdout, first.stdout);
    assert_ne!(glab_data(&["galois", "r2.json", "--trials", "64", "--seed", "8"]).stdout, first.stdout);
}

#[test]
fn cbnorm_prints_twelve_decimals() {
    let out = glab_data(&["cbnorm", "r2.json", "r2_one.json"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"value_fmt\": \"1.000000000000\""));
    for (g, h) in [("r2.json", "r2_unit_indicator.json"), ("z2.json", "z2_sign.json")] {
        let out = glab_data(&["cbnorm", g, h]);
        assert_eq!(json(&out)["instances"][0]["value_fmt"], "1.000000000000");
    }
}

#[test]
fn fejer_verdicts() {
    let out = glab_data(&["fejer", "r2.json", "r2_net.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["instances"][0]["final_distance"], 0.0);
    let out = glab_data(&["fejer", "z2.json", "z2_half_net.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(glab_data(&["fejer", "z2.json", "z2_half_net.json", "--eps", "2"]).status.code(), Some(0));
}

#[test]
fn theorem_pipelines() {
    let out = glab_data(&["innerexact", "z2_z3.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["instances"].as_array().unwrap().len(), 4);

    assert_eq!(glab_data(&["bimodule", "z2_swap.json", "--trials", "16"]).status.code(), Some(0));
    let out = glab_data(&["bimodule", "z2.json", "--trials", "16", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["instances"].as_array().unwrap().iter().all(|i| i["principal"] == false));

    assert_eq!(glab_data(&["decompose", "r2.json", "r2_function.json"]).status.code(), Some(0));
}

#[test]
fn census_respects_cap() {
    let out = glab_data(&["census", "r2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["instances"][0]["census"]["algebras"], 2);
    assert_eq!(glab_data(&["census", "s3_on_3.json"]).status.code(), Some(3));
    let lowered = Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(["census", data("z2_z3.json").to_str().unwrap()])
        .env("GLAB_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(lowered.status.code(), Some(3));
}

#[test]
fn summary_goes_to_stderr() {
    let out = glab_data(&["innerexact", "z2_z3.json", "--summary"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("inner exact"));
    assert_eq!(json(&glab_data(&["innerexact", "z2_z3.json"])), json(&out));
}

#[test]
fn every_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 10] = [
        &["validate", "r2.json"],
        &["norm", "r2.json", "r2_function.json"],
        &["cbnorm", "z2.json", "z2_sign.json"],
        &["fejer", "r2.json", "r2_net.json"],
        &["innerexact", "z2_z3.json"],
        &["galois", "r2.json", "--trials", "8"],
        &["bimodule", "r2.json", "--trials", "8"],
        &["transform", "z2_swap_action.json"],
        &["decompose", "r2.json", "r2_function.json"],
        &["census", "z2_z3.json"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut with_check = args.to_vec();
        with_check.push("--check-report");
        let out = glab_data(&with_check);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let path = dir.path().join(format!("report{k}.json"));
        fs::write(&path, &out.stdout).unwrap();
        let back = glab(&["check-report", path.to_str().unwrap()]);
        assert_eq!(back.status.code(), Some(0), "{args:?}");
        assert_eq!(back.stdout, out.stdout, "{args:?}");
    }
}
