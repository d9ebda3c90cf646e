use std::path::PathBuf;
use std::process::{Command, Output};

use epistemic_core::report::{emit, run, Command as Verb, Format, ReportDocument, RunConfig};
use proptest::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epistemic"))
}

fn exec(args: &[&str]) -> Output {
    bin().args(args).env_remove("EPISTEMIC_REPORT_DIR").output().expect("binary runs")
}

fn report_of(out: &Output) -> ReportDocument {
    ReportDocument::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

fn validator() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_schema_valid(text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    let validator = validator();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn toy_born_passes_all_triples() {
    let out = exec(&["verify", "toy-born"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    assert_eq!(r.checks.iter().filter(|c| c.name.starts_with("born ")).count(), 36);
    assert!(r.passed);
    assert_schema_valid(std::str::from_utf8(&out.stdout).unwrap());
}

#[test]
fn mz_both_models_agree() {
    let out = exec(&["simulate", "mz", "--phase", "pi", "--model", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    let toy = r.checks.iter().find(|c| c.name == "toy final state").unwrap();
    assert_eq!(toy.observed, "3∨4");
    let ket = r.checks.iter().find(|c| c.name == "quantum final ket").unwrap();
    assert!(ket.pass);
    let out = exec(&["simulate", "mz", "--phase", "0", "--model", "toy", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("observed 1∨2"));
}

#[test]
fn pbr_expected_infeasible_is_success() {
    let out = exec(&["nogo", "pbr", "--q", "1/4", "--null-budget", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    assert_eq!(r.details["forced_overlap"]["status"], "infeasible");
    assert!(r.details["forced_overlap"]["certificate"].is_object());
    assert_eq!(r.details["no_overlap"]["status"], "feasible");
}

#[test]
fn hardy_reports_certificate() {
    let out = exec(&["nogo", "hardy", "--lambda-size", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    assert_eq!(r.details["overlap_possible"], false);
    assert_eq!(r.details["certificate"]["lambda"], 1);
    let out = exec(&["nogo", "hardy", "--drop-invar"]);
    assert_eq!(report_of(&out).details["overlap_possible"], true);
}

#[test]
fn gaussian_momentum_anticorrelates() {
    let out = exec(&["gaussian", "epr", "--squeeze", "3", "--lambda", "1", "--measure", "p", "--value", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    let mean = r.details["bob_posterior"]["mean"][1].as_f64().unwrap();
    assert!((mean + 0.5).abs() < 1e-4);
    assert_eq!(exec(&["gaussian", "suite"]).status.code(), Some(0));
}

#[test]
fn remaining_verbs_pass() {
    for suite in ["noncomm", "combine-table", "steering", "no-signaling", "chsh"] {
        let out = exec(&["verify", suite, "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert_schema_valid(std::str::from_utf8(&out.stdout).unwrap());
    }
}

#[test]
fn bad_input_fails() {
    assert_eq!(exec(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(exec(&["nogo", "pbr", "--q", "abc"]).status.code(), Some(1));
    let out = exec(&["nogo", "hardy", "--lambda-size", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!report_of(&out).passed);
    assert_eq!(exec(&["verify", "chsh", "--tolerance=-1"]).status.code(), Some(1));
}

#[test]
fn same_seed_gives_identical_json() {
    let a = report_of(&exec(&["verify", "noncomm", "--seed", "11"]));
    let b = report_of(&exec(&["verify", "noncomm", "--seed", "11"]));
    assert_eq!(emit(&a.without_timing(), Format::Json), emit(&b.without_timing(), Format::Json));
}

#[test]
fn report_dir_and_output_and_replay() {
    let dir = std::env::temp_dir().join(format!("epistemic-cli-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let out = bin().args(["verify", "chsh", "--seed", "3"]).env("EPISTEMIC_REPORT_DIR", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let file = dir.join("chsh-seed3.json");
    let text = std::fs::read_to_string(&file).unwrap();
    assert_schema_valid(&text);

    let explicit = dir.join("nested/out.txt");
    let out = exec(&["verify", "steering", "--format", "text", "--output", explicit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&explicit).unwrap().starts_with("steering: "));

    let out = exec(&["replay", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("matches"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn empty_report_is_schema_valid() {
    let r = ReportDocument::new(RunConfig::new(Verb::Chsh), vec![], Value::Null, 0);
    assert_schema_valid(&emit(&r, Format::Json));
}

#[test]
fn every_verb_emits_schema_valid_reports() {
    for command in Verb::all_defaults() {
        let r = run(&RunConfig::new(command));
        assert!(r.passed);
        let text = emit(&r, Format::Json);
        assert_schema_valid(&text);
        assert_eq!(ReportDocument::from_json(&text).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn replay_is_deterministic(seed in any::<u64>(), verb in 0usize..4) {
        let command = [Verb::Noncomm, Verb::Steering, Verb::NoSignaling, Verb::CombineTable][verb].clone();
        let mut config = RunConfig::new(command);
        config.seed = seed;
        let a = run(&config);
        let b = run(&config);
        prop_assert_eq!(a.without_timing(), b.without_timing());
        prop_assert_eq!(a.exit_code() == 0, a.checks.iter().all(|c| c.pass));
        let back = ReportDocument::from_json(&emit(&a, Format::Json)).unwrap();
        prop_assert_eq!(back, a);
    }
}
