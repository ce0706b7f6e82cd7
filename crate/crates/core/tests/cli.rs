mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const KLEIN: &str = r#"{"name":"V4","elements":["e","a","b","c"],"units":["e"],
 "r":{"e":"e","a":"e","b":"e","c":"e"},"s":{"e":"e","a":"e","b":"e","c":"e"},
 "inv":{"e":"e","a":"a","b":"b","c":"c"},
 "compose":[["e","e","e"],["e","a","a"],["e","b","b"],["e","c","c"],
  ["a","e","a"],["a","a","e"],["a","b","c"],["a","c","b"],
  ["b","e","b"],["b","a","c"],["b","b","e"],["b","c","a"],
  ["c","e","c"],["c","a","b"],["c","b","a"],["c","c","e"]]}"#;

fn gind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gind")).args(args).env_remove("GIND_CORPUS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn corpus_file(stem: &str) -> String {
    common::corpus_dir().join(format!("{stem}.json")).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn validate_accepts_a_well_formed_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = gind(&["validate", &write(dir.path(), "v4.json", KLEIN)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("valid groupoid `V4`"));

    let out = gind(&["--format", "json", "validate", &corpus_file("z4_on_z2")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["elements"], 8);
    assert_eq!(v["subgroupoids"], serde_json::json!(["H", "K"]));
}

#[test]
fn validate_names_the_failing_triple() {
    let dir = tempfile::tempdir().unwrap();
    let broken = KLEIN.replace(r#"["b","a","c"]"#, r#"["b","a","a"]"#).replace(r#"["b","c","a"]"#, r#"["b","c","c"]"#);
    let out = gind(&["validate", &write(dir.path(), "broken.json", &broken)]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("associativity fails on (`a`, `b`, `a`)"), "{err}");
}

#[test]
fn malformed_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gind(&["validate", &write(dir.path(), "x.json", "{\"elements\": [")])), 3);
    assert_eq!(code(&gind(&["validate", &dir.path().join("missing.json").display().to_string()])), 3);
    assert_eq!(code(&gind(&["frobnicate"])), 3);
    assert_eq!(code(&gind(&["--null-tol", "-1", "validate", &corpus_file("z2")])), 3);
    assert_eq!(code(&gind(&["--help"])), 0);
}

#[test]
fn induce_from_an_isotropy_group() {
    let out = gind(&["--format", "json", "induce", &corpus_file("z4_on_z2"), "--unit", "0", "--irrep", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["induced_dim"], 2);
    assert_eq!(v["commutant_dim"], 1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"].as_u64().unwrap(), groupoid_induce::spectrum::DEFAULT_SEED);
    assert!(v["tolerances"]["null_tol"].is_f64());

    let out = gind(&["induce", &corpus_file("pair2"), "--unit", "1", "--irrep", "0"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("induced_dim       2"));
}

#[test]
fn induce_rejects_bad_requests() {
    let file = corpus_file("z4_on_z2");
    assert_eq!(code(&gind(&["induce", &file, "--unit", "(1,0)", "--irrep", "0"])), 2);
    assert_eq!(code(&gind(&["induce", &file, "--unit", "0", "--irrep", "7"])), 2);
    assert_eq!(code(&gind(&["induce", &file, "--unit", "0"])), 3);
}

#[test]
fn stages_over_a_chain_and_a_trivial_chain() {
    let file = corpus_file("z4_on_z2");
    let out = gind(&["--format", "json", "stages", &file, "--chain", "H,K"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["report"]["direct_dim"], v["report"]["staged_dim"]);
    assert!(v["report"]["unitarity_defect"].as_f64().unwrap() <= 1e-10);

    assert_eq!(code(&gind(&["stages", &file, "--chain", "K,K"])), 0);
    assert_eq!(code(&gind(&["stages", &file, "--chain", "K,H"])), 2);
    assert_eq!(code(&gind(&["stages", &file, "--chain", "H,Q"])), 2);
}

#[test]
fn harness_over_the_shipped_corpus() {
    let out = gind(&["--format", "json", "harness", &common::corpus_dir().display().to_string()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() > 0);
    assert_eq!(v["file_errors"], serde_json::json!([]));
}

#[test]
fn harness_reads_the_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus_file("z2"), dir.path().join("z2.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gind"))
        .args(["--format", "json", "harness"])
        .env("GIND_CORPUS", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["passed"], 2);
}

#[test]
fn harness_on_an_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = gind(&["harness", &dir.path().display().to_string()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 rows, 0 passed, 0 failed, 0 files flagged"));
}

#[test]
fn harness_flags_a_corrupt_file_and_checks_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus_file("z3"), dir.path().join("z3.json")).unwrap();
    write(dir.path(), "corrupt.json", "not json");
    let out = gind(&["--format", "json", "harness", &dir.path().display().to_string()]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["passed"], 3);
    assert_eq!(v["file_errors"][0]["file"], "corrupt.json");
}

#[test]
fn corpus_command_reproduces_the_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = gind(&["corpus", "--out", &dir.path().display().to_string()]);
    assert_eq!(code(&out), 0);
    for entry in std::fs::read_dir(common::corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        let fresh = std::fs::read_to_string(dir.path().join(path.file_name().unwrap())).unwrap();
        assert_eq!(fresh, std::fs::read_to_string(&path).unwrap(), "{}", path.display());
    }
}
