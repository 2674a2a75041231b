use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use morse_cup::cli::Report;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_morse-cup"));
    c.env_remove("MORSE_SEED");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn cuplength_of_the_product_example() {
    let out = run(&["cuplength", "--format", "json"], &configs().join("product_n2.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let section = report.cup_length.unwrap();
    assert_eq!(section.relative.unwrap().value, 3);
    let abs = section.absolute.unwrap();
    assert!(abs.positive_products_vanish);
    let bound = section.bound.unwrap();
    assert!(bound.satisfied && bound.equality);
    assert!(section.remark.unwrap().holds);
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = bin()
        .args(["complex", "--config"])
        .arg(configs().join("projective_n3.json"))
        .arg("--json-out")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&target).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(report.schema_version, morse_cup::cli::SCHEMA_VERSION);
    assert_eq!(report.command, "complex");
    assert!(report.complexes.iter().all(|c| c.betti == vec![1; 4]));
    let again: Report = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let config = configs().join("product_n2.json");
    let a = run(&["verify", "--format", "json", "--seed", "7"], &config);
    let b = run(&["verify", "--format", "json", "--seed", "7"], &config);
    assert_eq!(a.status.code(), Some(0));
    let (a, b): (Value, Value) = (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(without_timings(a), without_timings(b));
}

#[test]
fn seed_flag_beats_the_environment() {
    let config = configs().join("sphere_n2.json");
    let flag = bin().args(["complex", "--format", "json", "--seed", "3", "--config"]).arg(&config).env("MORSE_SEED", "9").output().unwrap();
    let env = bin().args(["complex", "--format", "json", "--config"]).arg(&config).env("MORSE_SEED", "9").output().unwrap();
    let seed_of = |o: &Output| -> u64 {
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&flag), 3);
    assert_eq!(seed_of(&env), 9);
    let bad = bin().args(["complex", "--config"]).arg(&config).env("MORSE_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mutation_fails_verification() {
    let out = run(&["verify", "--mutate-cup-entry", "--format", "json"], &configs().join("sphere_n2.json"));
    assert_eq!(out.status.code(), Some(1));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let failures: Vec<_> = report.verification.as_ref().unwrap().failures().collect();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].name, "leibniz after mutation");
    assert!(failures[0].counterexample.is_some());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["complex"], &dir.path().join("missing.json")).status.code(), Some(4));
    assert_eq!(run(&["complex"], &configs().join("repeated_eigenvalues.json")).status.code(), Some(3));

    let no_partner = write_config(dir.path(), r#"{"n": 2, "data": [{"label": "a", "seed": 1}], "alpha_label": "a"}"#);
    assert_eq!(run(&["cuplength"], &no_partner).status.code(), Some(2));

    let unknown = write_config(dir.path(), r#"{"n": 2, "data": [], "colour": 1}"#);
    assert_eq!(run(&["complex"], &unknown).status.code(), Some(2));

    let z_projective = write_config(dir.path(), r#"{"n": 2, "ring": "z", "data": [{"label": "a", "space": "projective", "seed": 1}]}"#);
    assert_eq!(run(&["complex"], &z_projective).status.code(), Some(2));

    let asymmetric = write_config(dir.path(), r#"{"n": 1, "data": [{"label": "a", "matrix": [[1, 2], [0, 3]]}]}"#);
    assert_eq!(run(&["complex"], &asymmetric).status.code(), Some(2));

    let out = dir.path().join("no/such/dir/report.json");
    let code = bin().args(["complex", "--config"]).arg(configs().join("minimal_n1.json")).arg("--json-out").arg(&out).output().unwrap();
    assert_eq!(code.status.code(), Some(4));
}

#[test]
fn text_output_names_the_products() {
    let out = run(&["cuplength"], &configs().join("product_n2.json"));
    let text = String::from_utf8(out.stdout).unwrap().split(' ').filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ");
    assert!(text.contains("η^{x1^alpha} ⌣ η^{x1^beta} = η^{x2^alpha}"), "{text}");
    assert!(text.contains("Relative cup-length of alpha against beta: 3"), "{text}");
}
