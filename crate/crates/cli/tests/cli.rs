use std::path::PathBuf;
use std::process::Command;

use num_bigint::BigUint;
use proptest::prelude::*;
use serde_json::Value;

use morphic_core::dekking::Dfao;
use morphic_gate::app::exit_code;
use morphic_gate::{parse_input, run, verify_certificate, InputDocument, ParseErrorKind};

const GOLDENS: [&str; 6] = ["return", "gaps", "kolam", "optimal", "matrix", "spectral"];

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn input(name: &str) -> String {
    data(&format!("{name}.txt"))
}

fn gate(args: &[&str]) -> morphic_gate::Outcome {
    run(std::iter::once("morphic-gate").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let out = gate(args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn golden_files_round_trip() {
    for name in GOLDENS {
        let text = std::fs::read_to_string(input(name)).unwrap();
        let doc = parse_input(&text).unwrap();
        assert_eq!(parse_input(&doc.print()).unwrap(), doc, "{name}");
    }
    let gaps = parse_input(&std::fs::read_to_string(input("gaps")).unwrap()).unwrap();
    assert_eq!(gaps.letters, ["a", "abar", "b", "c"]);
    assert_eq!(gaps.coding.unwrap(), ["3", "3", "4", "2"]);
}

#[test]
fn certificates_verify_and_are_stable() {
    for name in GOLDENS {
        let first = gate(&["--json", "analyze", &input(name)]);
        let second = gate(&["--json", "analyze", &input(name)]);
        assert_eq!(first, second, "{name}");
        let checks = verify_certificate(&first.stdout).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!checks.is_empty(), "{name}");
    }
    let general = gate(&["--json", "--path", "general", "analyze", &input("gaps")]);
    verify_certificate(&general.stdout).unwrap();
}

#[test]
fn return_certificate_matches_frozen_copy() {
    let out = gate(&["--json", "analyze", &input("return")]);
    let frozen = std::fs::read_to_string(data("return.certificate.json")).unwrap();
    assert_eq!(out.stdout, frozen);
}

fn tamper(json: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(json).unwrap();
    edit(&mut v);
    serde_json::to_string(&v).unwrap()
}

#[test]
fn tampered_certificates_are_rejected() {
    let automatic = gate(&["--json", "analyze", &input("return")]).stdout;
    let not_automatic = gate(&["--json", "analyze", &input("gaps")]).stdout;
    let cases = [
        tamper(&automatic, |v| v["verdict"]["k"] = "5".into()),
        tamper(&automatic, |v| v["v_s"][1] = "5".into()),
        tamper(&automatic, |v| v["return_system"]["tau"][0][2] = 1.into()),
        tamper(&automatic, |v| v["s"] = 1.into()),
        tamper(&automatic, |v| v["verdict"]["minimal_root"] = "4".into()),
        tamper(&automatic, |v| {
            v["input"]["rules"][0]["image"][1] = "b".into()
        }),
        tamper(&not_automatic, |v| {
            v["verdict"]["kind"] = "Automatic".into()
        }),
        tamper(&not_automatic, |v| v["v_s_times_m"][2] = "20".into()),
        tamper(&not_automatic, |v| v["matrix"][0][0] = "2".into()),
    ];
    for (i, c) in cases.iter().enumerate() {
        assert!(verify_certificate(c).is_err(), "case {i} verified");
    }
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = std::env::temp_dir().join(format!("morphic-gate-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "letters = a b\na -> ab\nb -> \n").unwrap();
    let out = gate(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    assert_eq!(
        parse_input("letters = a b\na -> ab\nb -> \n")
            .unwrap_err()
            .kind,
        ParseErrorKind::EmptyImage("b".into())
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(gate(&["analyze", &input("not_primitive")]).code, 3);
    assert_eq!(gate(&["--strict", "analyze", &input("return")]).code, 4);
    assert_eq!(
        gate(&[
            "--strict",
            "--assume-nonperiodic",
            "analyze",
            &input("return")
        ])
        .code,
        0
    );
    assert_eq!(gate(&["analyze", &data("missing.txt")]).code, 1);
    assert_eq!(gate(&["--seed", "z", "analyze", &input("return")]).code, 2);
    assert_eq!(
        gate(&["--path", "left-proper", "analyze", &input("return")]).code,
        2
    );
    assert_eq!(gate(&["frobnicate"]).code, 2);
    assert_eq!(
        exit_code(&morphic_core::Error::ContractViolation("x".into())),
        5
    );
    // Not automatic is an answer, not an error.
    assert_eq!(gate(&["dekking", &input("gaps")]).code, 0);
}

#[test]
fn binary_reads_environment_and_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_morphic-gate");
    let out = Command::new(bin)
        .args(["--json", "analyze", &input("return")])
        .env("MORPHIC_GATE_PERIODICITY_BOUND", "12")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["periodicity"]["bound"], 12);
    assert_eq!(v["periodicity"]["complexity"].as_array().unwrap().len(), 12);

    let out = Command::new(bin)
        .args(["analyze", &input("not_primitive")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn analyze_reports() {
    let v = json(&["--json", "analyze", &input("return")]);
    assert_eq!(v["verdict"]["kind"], "Automatic");
    assert_eq!(v["verdict"]["k"], "4");
    assert_eq!(v["verdict"]["minimal_root"], "2");

    let text = gate(&["analyze", &input("gaps")]).stdout;
    assert!(text.contains("v_s * M = (16,16,21,11)"), "{text}");
    assert!(text.contains("(16,16,20,12)"), "{text}");
    assert!(text.contains("verdict: NotAutomatic"), "{text}");
}

#[test]
fn two_sided_seed_from_file() {
    let out = json(&["--json", "analyze", &data("kolam_two_sided.txt")]);
    assert_eq!(out["seed"]["letter"], "G");
    assert_eq!(out["seed"]["power"], 2);
    assert_eq!(out["seed"]["two_sided_left"], "D");
    assert_eq!(out["verdict"]["kind"], "NotAutomatic");
}

#[test]
fn dekking_writes_the_golden_table() {
    let dir = std::env::temp_dir().join(format!("morphic-gate-dfao-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("return.dfao");
    let out = gate(&[
        "dekking",
        "--dfao-out",
        out_path.to_str().unwrap(),
        &input("return"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        written,
        std::fs::read_to_string(data("return.dfao")).unwrap()
    );
    std::fs::remove_dir_all(&dir).unwrap();

    let v = json(&["--json", "dekking", "--no-merge", &input("return")]);
    assert_eq!(v["presentation"]["letters"].as_array().unwrap().len(), 6);
    assert_eq!(v["presentation"]["merged"], false);
    verify_certificate(&serde_json::to_string(&v).unwrap()).unwrap();

    let v = json(&["--json", "dekking", &input("optimal")]);
    assert_eq!(v["presentation"]["factor_set"], "letters");
    assert_eq!(v["presentation"]["k"], 8);
}

#[test]
fn eval_agrees_with_expand_and_the_automaton() {
    let prefix = gate(&["expand", "--length", "300", &input("return")]).stdout;
    let prefix = prefix.trim();
    for n in [0usize, 1, 2, 7, 64, 299] {
        let out = gate(&["eval", "--index", &n.to_string(), &input("return")]).stdout;
        assert_eq!(out.trim(), &prefix[n..n + 1], "index {n}");
    }
    let dfao = Dfao::from_table(&std::fs::read_to_string(data("return.dfao")).unwrap()).unwrap();
    let big: BigUint = "123456789012345678901234567890".parse().unwrap();
    for offset in 0u32..20 {
        let index = &big + offset;
        let out = gate(&["eval", "--index", &index.to_string(), &input("return")]).stdout;
        assert_eq!(out.trim(), dfao.evaluate(&index));
    }
    let coded = gate(&["expand", "--length", "12", &input("gaps")]).stdout;
    assert_eq!(coded.trim(), "334233243342");
}

#[test]
fn spectral_and_complexity_commands() {
    let v = json(&[
        "--json",
        "spectral",
        "--prime-bound",
        "7",
        "--exponent-bound",
        "4",
        &input("spectral"),
    ]);
    let passing: Vec<&str> = v["tested"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["eigenvalue"] == true)
        .map(|t| t["q"].as_str().unwrap())
        .collect();
    assert_eq!(passing, ["2", "4", "8", "16"]);

    let v = json(&["--json", "complexity", "--max", "6", &input("return")]);
    assert_eq!(v["status"], "evidence");
    assert_eq!(v["complexity"].as_array().unwrap().len(), 6);
    let text = gate(&["complexity", "--max", "4", &input("kolam")]).stdout;
    assert!(text.starts_with("p(1) = 2\n"), "{text}");
}

#[test]
fn return_words_command() {
    let v = json(&["--json", "return-words", &input("return")]);
    assert_eq!(
        v["return_system"]["words"],
        serde_json::json!([["a", "c"], ["a", "c", "b", "c"]])
    );
    let text = gate(&["return-words", &input("return")]).stdout;
    assert!(text.contains("M_tau = [[2,2],[1,3]]"), "{text}");
}

fn token() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,3}"
}

fn document() -> impl Strategy<Value = InputDocument> {
    prop::collection::btree_set(token(), 1..5)
        .prop_flat_map(|letters| {
            let letters: Vec<String> = letters.into_iter().collect();
            let d = letters.len();
            (
                Just(letters),
                prop::collection::vec(prop::collection::vec(0..d, 1..5), d),
                prop::option::of(prop::collection::vec("[0-9A-Z]{1,2}", d)),
                prop::option::of(0..d),
            )
        })
        .prop_map(|(letters, rules, coding, seed)| InputDocument {
            rules: rules
                .into_iter()
                .map(|r| r.into_iter().map(|i| letters[i].clone()).collect())
                .collect(),
            seed: seed.map(|i| letters[i].clone()),
            two_sided: None,
            coding,
            letters,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(doc in document()) {
        prop_assert_eq!(parse_input(&doc.print()).unwrap(), doc);
    }
}
