use std::path::PathBuf;
use std::process::{Command, Output};

fn ddrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddrs")).args(args).output().expect("run ddrs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn scratch_file(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ddrs-cli-{}-{name}", std::process::id()))
}

#[test]
fn normalize_prints_the_canonical_form() {
    let o = ddrs(&["normalize", "--system", "Z_bud", "--term", "S(S(S(0)))"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1 :b1");
}

#[test]
fn normalize_json_is_stable() {
    let args = ["normalize", "--system", "Z_bud", "--term", "S(S(S(0)))", "--format", "json"];
    let (a, b) = (ddrs(&args), ddrs(&args));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["normal_form"], "1 :b1");
    assert_eq!(v["outcome"], "normal-form");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn loop_search_reports_the_decimal_cycle() {
    let o = ddrs(&["loops", "--system", "Z_dub", "--variant", "unedited"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("period 2"), "{out}");
    assert!(out.contains("d9.0") && out.contains("d2.0"), "{out}");
    assert!(out.contains("1 + 0"), "{out}");
}

#[test]
fn loop_search_from_given_seed() {
    let o = ddrs(&["loops", "--system", "Z_dt", "--variant", "unedited", "--term=-(1) + 0"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("period 3"), "{}", stdout(&o));
}

#[test]
fn ring_confluence_fails_with_the_double_negation_peak() {
    let o = ddrs(&["confluence", "--system", "Z_r", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["verdict"], "non-confluent");
    let peaks: Vec<&str> = v["counterexamples"].as_array().unwrap().iter().filter_map(|c| c["peak"].as_str()).collect();
    assert!(peaks.contains(&"-(-(x)) + -(y)"), "{peaks:?}");
}

#[test]
fn binary_termination_proof() {
    let o = ddrs(&["termination", "--system", "N_bud", "--weights", "natural"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ProvenRTO"), "{}", stdout(&o));
}

#[test]
fn weight_alias_is_accepted() {
    assert_eq!(code(&ddrs(&["termination", "--system", "N_bud", "--weights", "table7"])), 0);
}

#[test]
fn unprovable_termination_is_unknown() {
    let o = ddrs(&["termination", "--system", "N_bud", "--variant", "unedited", "--weights", "natural"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn natural_binary_confluence_holds() {
    let o = ddrs(&["confluence", "--system", "N_bud", "--weights", "natural"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn ground_check_is_clean_and_writes_csv() {
    let csv = scratch_file("failures.csv");
    let o = ddrs(&["ground-check", "--system", "Z_dub", "--variant", "unedited", "--size", "3", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 1, "{text}");
    std::fs::remove_file(csv).ok();

    let o = ddrs(&["ground-check", "--system", "N_bud", "--size", "4", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn completion_exit_codes() {
    assert_eq!(code(&ddrs(&["complete", "--system", "N_bud", "--weights", "natural", "--max-iter", "1"])), 0);
    assert_eq!(code(&ddrs(&["complete", "--system", "Z_r"])), 2);
}

#[test]
fn export_then_load_from_file() {
    let path = scratch_file("zr.trs");
    let o = ddrs(&["export", "--system", "Z_r", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = ddrs(&["show", "--from-file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["rules"].as_array().unwrap().len(), 15);
    let o = ddrs(&["normalize", "--from-file", path.to_str().unwrap(), "--term", "-(-(1))"]);
    assert_eq!(stdout(&o).trim(), "1");
    std::fs::remove_file(path).ok();
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&ddrs(&["frobnicate"])), 64);
    assert_eq!(code(&ddrs(&["normalize", "--system", "Nope", "--term", "0"])), 64);
    assert_eq!(code(&ddrs(&["normalize", "--system", "Z_bud", "--term", "S("])), 64);
    assert_eq!(code(&ddrs(&["normalize", "--system", "Z_bud", "--term", "0", "--strategy", "sideways"])), 64);
    assert_eq!(code(&ddrs(&["termination", "--system", "Z_bud", "--weights", "/no/such/file"])), 64);
    assert_eq!(code(&ddrs(&["--help"])), 0);
}

#[test]
fn systems_and_fixtures() {
    let o = ddrs(&["systems"]);
    assert_eq!(code(&o), 0);
    for name in ["N_bud", "Z_bud", "N_dub", "Z_dub", "N_bt", "Z_bt", "N_dt", "Z_dt", "Z_r"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
    let o = ddrs(&["fixtures"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
