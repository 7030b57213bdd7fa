use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/examples")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn avqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avqc"))
        .args(args)
        .env_remove("AVQC_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.code() != Some(1),
        "failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

#[test]
fn erasure_pair_capacity_is_point_four() {
    let out = avqc(&["capacity", "--channels", &example("erasure_pair.json"), "--l", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "capacity");
    assert_eq!(r["status"], "ok");
    let v = r["summary"]["value_bits"].as_f64().unwrap();
    assert!((v - 0.4).abs() < 1e-6, "{v}");
    assert_eq!(r["summary"]["erasure_closed_form"].as_f64().unwrap(), 0.4);
    assert!(r["budget"]["restarts"].is_u64());
    assert_eq!(r["tol"].as_f64().unwrap(), 1e-6);
}

#[test]
fn erasure_pair_is_not_symmetrizable() {
    let r = json(&avqc(&["symmetrize", "--channels", &example("erasure_pair.json")]));
    assert_eq!(r["summary"]["average_error"], "non-symmetrizable (witnessed at l=1)");
    assert!(r["records"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x["test"] == "l_symmetrizable" && x["verdict"] == "infeasible"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for cmd in ["capacity", "symmetrize", "analyze"] {
        let args = [cmd, "--channels", &example("depolarizing.json"), "--seed", "5"];
        let a = avqc(&args);
        let b = avqc(&args);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let file = example("identity.json");
    let a = avqc(&["capacity", "--channels", &file, "--out", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout.is_empty());
    let b = avqc(&["capacity", "--channels", &file]);
    assert_eq!(std::fs::read(&path).unwrap(), b.stdout);
}

#[test]
fn canonical_json_has_sorted_keys() {
    let out = avqc(&["analyze", "--channels", &example("erasure_pair.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
    assert!(text.ends_with('\n'));
}

#[test]
fn csv_has_one_row_per_record() {
    let args = ["verify-code", "--channels", &example("dephasing.json"), "--code", &example("code_classical.json")];
    let r = json(&avqc(&args));
    let n = r["records"].as_array().unwrap().len();
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = avqc(&csv_args);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(reader.records().count(), n);
    assert!(reader.headers().unwrap().iter().any(|h| h == "maximal_error"));
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("range.json", r#"{"schema_version":1,"channels":[{"builtin":"erasure","p":1.3,"d":2}]}"#, "channels[0]"),
        ("truncated.json", r#"{"schema_version":1,"channels":["#, "line"),
        ("version.json", r#"{"schema_version":9,"channels":[{"builtin":"identity","d":2}]}"#, "schema"),
        ("mixed.json", r#"{"schema_version":1,"channels":[{"builtin":"identity","d":2},{"builtin":"identity","d":3}]}"#, "channels[1]"),
        ("unknown.json", r#"{"schema_version":1,"channels":[{"builtin":"amplitude","g":0.1,"d":2}]}"#, "line"),
        (
            "non_tp.json",
            r#"{"schema_version":1,"channels":[{"dim_in":2,"dim_out":2,"kraus":[[[[0.5,0],[0,0]],[[0,0],[1,0]]]]}]}"#,
            "channels[0]",
        ),
    ];
    for (name, text, needle) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = avqc(&["capacity", "--channels", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
        assert!(out.stdout.is_empty(), "{name}");
    }
    let missing = avqc(&["capacity", "--channels", "/nonexistent/set.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(avqc(&["capacity"]).status.code(), Some(1));
    assert_eq!(avqc(&["capacity", "--bogus"]).status.code(), Some(1));
    assert_eq!(avqc(&["--help"]).status.code(), Some(0));
    assert_eq!(avqc(&["--version"]).status.code(), Some(0));
    let bad_tol = avqc(&["capacity", "--channels", &example("identity.json"), "--tol", "2"]);
    assert_eq!(bad_tol.status.code(), Some(1));
    // a reduction that cannot reach its target reports Undecided
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(examples().join("simulate_random_code.json"))
        .unwrap()
        .replace("\"random_code\"", "\"reduce\"");
    let path = dir.path().join("reduce.json");
    std::fs::write(&path, cfg).unwrap();
    let out = avqc(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "undecided");
}

#[test]
fn tolerance_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_avqc"))
        .args(["capacity", "--channels", &example("identity.json")])
        .env("AVQC_TOL", "1e-4")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tol"].as_f64().unwrap(), 1e-4);
}

#[test]
fn every_channel_example_is_accepted() {
    let mut seen = 0;
    for entry in std::fs::read_dir(examples()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        if doc.get("channels").is_none() {
            continue;
        }
        let out = avqc(&["analyze", "--channels", path.to_str().unwrap()]);
        assert_ne!(out.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn code_examples_verify() {
    let r = json(&avqc(&[
        "verify-code",
        "--channels",
        &example("erasure_pair.json"),
        "--code",
        &example("code_erasure_decoder.json"),
    ]));
    // E_p followed by the flag-to-|0⟩ decoder: F_e = 1 − 0.75p
    let w = r["summary"]["worst_fidelity"].as_f64().unwrap();
    assert!((w - 0.775).abs() < 1e-9, "{w}");
    for code in ["code_identity.json", "code_random.json", "code_classical.json"] {
        let out = avqc(&["verify-code", "--channels", &example("dephasing.json"), "--code", &example(code)]);
        assert_eq!(out.status.code(), Some(0), "{code}");
    }
    let z = json(&avqc(&[
        "zero-error",
        "--channels",
        &example("identity.json"),
        "--code",
        &example("code_identity.json"),
    ]));
    assert_eq!(z["summary"]["zero_error_code"], true);
    assert!((z["records"][0]["theta"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-6);
}

#[test]
fn simulate_examples_pass() {
    for (file, key) in [
        ("simulate_haar_twirl.json", "all_agree"),
        ("simulate_derandomize.json", "holds"),
    ] {
        let r = json(&avqc(&["simulate", "--config", &example(file)]));
        assert_eq!(r["summary"][key], true, "{file}");
    }
    let r = json(&avqc(&["simulate", "--config", &example("simulate_robustification.json")]));
    assert_eq!(r["summary"]["sweep"]["violations"], 0);
    let r = json(&avqc(&["simulate", "--config", &example("simulate_random_code.json")]));
    assert_eq!(r["records"].as_array().unwrap().len(), 2);
}
