//! End-to-end tests of the command-line contract: document parsing with
//! located errors, report round-trips, determinism and exit codes.

use std::process::Command;

use homsys_cli::doc::{parse_session, Document};
use homsys_cli::report::Report;

fn bundled_document() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/a3_example.json")).unwrap()
}

fn parse(text: &str) -> anyhow::Result<homsys_cli::doc::Session> {
    let doc: Document = serde_json::from_str(text)?;
    parse_session(&doc, None, None)
}

fn parse_err(text: &str) -> String {
    match parse(text) {
        Ok(_) => panic!("expected a parse error"),
        Err(e) => format!("{e:#}"),
    }
}

#[test]
fn bundled_example_parses_to_the_shifted_system() {
    let session = parse(&bundled_document()).unwrap();
    assert_eq!(session.seed, 42);
    assert_eq!(session.quiver.vertices, 3);
    assert_eq!(session.reps.len(), 1);
    assert_eq!(session.objects.len(), 3);
    let theta = session.theta.expect("system present");
    assert_eq!(theta.size(), 3);
    let shifts: Vec<i64> = theta.theta.iter().flat_map(|o| o.shifts()).collect();
    assert_eq!(shifts, vec![0, 2, 4]);
}

#[test]
fn cycles_are_rejected() {
    let text = r#"{ "quiver": { "vertices": 1, "arrows": [[1, 1]] } }"#;
    let err = parse_err(text);
    assert!(err.contains("quiver"), "{err}");
}

#[test]
fn matrix_shape_mismatch_is_located() {
    let text = r#"{
      "quiver": { "vertices": 3, "arrows": [[1, 2], [2, 3]] },
      "reps": { "Bad": { "dims": [1, 1, 0], "maps": [[["1", "2", "3"], ["4", "5", "6"]], []] } }
    }"#;
    let err = parse_err(text);
    assert!(err.contains("reps.Bad.maps[0]"), "{err}");
}

#[test]
fn unknown_names_are_rejected() {
    let text = r#"{
      "quiver": { "vertices": 3, "arrows": [[1, 2], [2, 3]] },
      "objects": { "X": [{ "rep": "Missing", "shift": 0 }] }
    }"#;
    let err = parse_err(text);
    assert!(err.contains("Missing"), "{err}");
    let text = r#"{
      "quiver": { "vertices": 3, "arrows": [[1, 2], [2, 3]] },
      "theta": { "order": [1], "objects": ["Nope"] }
    }"#;
    let err = parse_err(text);
    assert!(err.contains("Nope"), "{err}");
}

#[test]
fn float_entries_are_rejected() {
    let text = r#"{
      "quiver": { "vertices": 2, "arrows": [[1, 2]] },
      "reps": { "R": { "dims": [1, 1], "maps": [[[0.5]]] } }
    }"#;
    let err = parse_err(text);
    assert!(err.contains("exact"), "{err}");
}

#[test]
fn report_round_trip_is_identity() {
    let rep = homsys_cli::commands::demo("a3", homsys::field::FieldCfg::Rational, 42).unwrap();
    let emitted = rep.to_json();
    let parsed: Report = serde_json::from_str(&emitted).unwrap();
    assert_eq!(parsed, rep);
    assert_eq!(parsed.to_json(), emitted);
}

#[test]
fn identical_inputs_give_byte_identical_reports() {
    let a = homsys_cli::commands::demo("simples", homsys::field::FieldCfg::Rational, 7)
        .unwrap()
        .to_json();
    let b = homsys_cli::commands::demo("simples", homsys::field::FieldCfg::Rational, 7)
        .unwrap()
        .to_json();
    assert_eq!(a, b);
}

fn run_binary(args: &[&str]) -> (String, Option<i32>) {
    let exe = env!("CARGO_BIN_EXE_homsys");
    let out = Command::new(exe).args(args).output().unwrap();
    (String::from_utf8_lossy(&out.stdout).into_owned(), out.status.code())
}

#[test]
fn binary_demo_a3_is_green() {
    let (stdout, code) = run_binary(&["demo", "a3", "--format", "json"]);
    assert_eq!(code, Some(0));
    let rep: Report = serde_json::from_str(&stdout).unwrap();
    assert!(rep.all_pass());
    assert_eq!(rep.seed, 42);
}

#[test]
fn binary_runs_against_the_bundled_document() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/a3_example.json");
    let (stdout, code) = run_binary(&["check-theta", "--input", path, "--format", "json"]);
    assert_eq!(code, Some(0), "{stdout}");
    let rep: Report = serde_json::from_str(&stdout).unwrap();
    assert!(rep.all_pass());
    // the shifted family is not an exceptional sequence: nonzero exit
    let (stdout, code) = run_binary(&["exceptional", "--input", path, "--format", "json"]);
    assert_eq!(code, Some(1));
    let rep: Report = serde_json::from_str(&stdout).unwrap();
    assert!(!rep.all_pass());
    let es3 = rep.verdicts.iter().find(|v| v.anchor == "ES3").unwrap();
    assert!(!es3.pass);
}

#[test]
fn reordered_simples_document_fails_the_ext_axiom() {
    // the simple representations listed with the middle one first: the
    // Ext-direction axiom must fail and name the violating pair
    let text = r#"{
      "field": { "type": "rational" },
      "seed": 5,
      "quiver": { "vertices": 3, "arrows": [[1, 2], [2, 3]] },
      "reps": {
        "S1": { "dims": [1, 0, 0], "maps": [[], []] },
        "S2": { "dims": [0, 1, 0], "maps": [[], []] },
        "S3": { "dims": [0, 0, 1], "maps": [[], []] }
      },
      "objects": {
        "T1": [{ "rep": "S2", "shift": 0 }],
        "T2": [{ "rep": "S1", "shift": 0 }],
        "T3": [{ "rep": "S3", "shift": 0 }]
      },
      "theta": { "order": [1, 2, 3], "objects": ["T1", "T2", "T3"] }
    }"#;
    let tmp = std::env::temp_dir().join("homsys_cli_reordered.json");
    std::fs::write(&tmp, text).unwrap();
    let (stdout, code) = run_binary(&["check-theta", "--input", tmp.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, Some(1), "{stdout}");
    let rep: Report = serde_json::from_str(&stdout).unwrap();
    let s4 = rep.verdicts.iter().find(|v| v.anchor == "S4").unwrap();
    assert!(!s4.pass);
    let w = s4.witness.as_deref().unwrap();
    assert!(w.contains("Theta(2)") && w.contains("Theta(1)"), "{w}");
}

#[test]
fn demo_pipelines_run_over_the_prime_field() {
    for which in ["a3", "simples", "strongly-exceptional"] {
        let (stdout, code) = run_binary(&["demo", which, "--field", "p:101", "--format", "json"]);
        assert_eq!(code, Some(0), "{which}: {stdout}");
        let rep: Report = serde_json::from_str(&stdout).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.field.p, Some(101));
    }
}

#[test]
fn multiplicity_rejects_non_members_with_nonzero_exit() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/a3_example.json");
    // an object outside the filtration class: the solver screen rejects it
    let doc = bundled_document().replace(
        "\"theta\":",
        "\"bad\": 0, \"theta\":",
    );
    let tmp = std::env::temp_dir().join("homsys_cli_test_doc.json");
    let with_bad = doc.replace(
        "\"Theta3\": [{ \"rep\": \"I2\", \"shift\": 4, \"mult\": 1 }]",
        "\"Theta3\": [{ \"rep\": \"I2\", \"shift\": 4, \"mult\": 1 }],\n    \"Stray\": [{ \"rep\": \"I2\", \"shift\": 1, \"mult\": 1 }]",
    );
    std::fs::write(&tmp, with_bad).unwrap();
    let (stdout, code) = run_binary(&[
        "multiplicity",
        "--object",
        "Stray",
        "--input",
        tmp.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, Some(1), "{stdout}");
    let rep: Report = serde_json::from_str(&stdout).unwrap();
    let v = rep.verdicts.iter().find(|v| v.anchor == "multiplicities").unwrap();
    assert!(!v.pass);
    assert!(v.witness.as_ref().is_some_and(|w| !w.is_empty()));
    let _ = path;
}
