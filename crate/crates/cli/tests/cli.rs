use std::path::PathBuf;
use std::process::{Command, Output};

use discreta_core::exercise::SolutionDocument;
use discreta_core::{load_exercises, verify_document, Limits};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_discreta"));
    cmd.args(args).env_remove("DISCRETA_VAR_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

type Case<'a> = (Vec<&'a str>, &'a [(&'a str, &'a str)], i32);

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let bad_trace = dir.path().join("bad.derivation.json");
    std::fs::write(
        &bad_trace,
        r#"{"start": "P ∨ ¬P", "goal": "T", "steps": [{"law": "Dominación", "result": "T"}]}"#,
    )
    .unwrap();
    let wrong = dir.path().join("wrong.exercise.json");
    std::fs::write(
        &wrong,
        r#"{"id": "w", "kind": "classify", "statement": "P ∨ ¬P", "expected": {"classification": "Contradicción"}}"#,
    )
    .unwrap();
    let trace = corpus().join("traces/anexo4-ej1.derivation.json");
    let exercise = corpus().join("exercises/anexo5-ej1.exercise.json");
    let trace = trace.to_str().unwrap();
    let exercise = exercise.to_str().unwrap();
    let bad_trace = bad_trace.to_str().unwrap();
    let wrong = wrong.to_str().unwrap();
    let wide = (0..13).map(|i| format!("X{i}")).collect::<Vec<_>>().join(" ∨ ");

    let cases: Vec<Case> = vec![
        // valid or successful
        (vec!["classify", "P ∨ ¬P"], &[], 0),
        (vec!["table", "P -> Q"], &[], 0),
        (vec!["nf", "--kind", "cnf", "~(P <-> Q)"], &[], 0),
        (vec!["prove", "--method", "resolution", "P, P -> Q => Q"], &[], 0),
        (vec!["check", trace], &[], 0),
        (vec!["solve", exercise], &[], 0),
        // invalid, failed check, mismatch
        (vec!["prove", "--method", "definition", "P -> Q, Q => P"], &[], 1),
        (vec!["prove", "--method", "indirect", "P -> Q, ~P => Q"], &[], 1),
        (vec!["check", bad_trace], &[], 1),
        (vec!["check", "--strict", trace], &[], 1),
        (vec!["solve", wrong], &[], 1),
        // parse or usage errors
        (vec!["classify", "P ->"], &[], 2),
        (vec!["prove", "--method", "direct", "P, Q"], &[], 2),
        (vec!["indices", "--order", "P", "P & Q"], &[], 2),
        (vec!["check", "/no/such/file.json"], &[], 2),
        (vec!["frobnicate"], &[], 2),
        (vec!["nf", "--kind", "weird", "P"], &[], 2),
        // resource limits
        (vec!["classify", "A & B & C & D"], &[("DISCRETA_VAR_CAP", "3")], 3),
        (vec!["nf", "--kind", "fndp", &wide], &[], 3),
        (
            vec!["prove", "--method", "definition", "A, B => C | D"],
            &[("DISCRETA_VAR_CAP", "2")],
            3,
        ),
    ];
    for (args, env, want) in &cases {
        let o = run_env(args, env);
        assert_eq!(code(&o), *want, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn documented_examples() {
    let o = run(&["classify", "(P ∧ (P -> Q)) -> Q"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Tautología"));

    let o = run(&["prove", "--method", "definition", "P, P -> (Q | R), (Q | R) -> S => S"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("∴ CL válida"));

    let o = run(&["indices", "--order", "p,q,r", "(~p | ~q) & (p | r)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "Σm(1,3,4,5) ΠM(0,2,6,7)");

    let o = run(&["parse", "A | ~B & C"]);
    assert_eq!(stdout(&o).trim(), "A ∨ ¬B ∧ C");
    let o = run(&["parse", "--style", "polish", "A | ~B & C"]);
    assert_eq!(stdout(&o).trim(), "∨ A ∧ ¬ B C");
    let o = run(&["--ascii", "parse", "A ∨ ¬B ∧ C"]);
    assert_eq!(stdout(&o).trim(), "A | ~B & C");
}

#[test]
fn normal_form_text_ends_with_indices() {
    let o = run(&["nf", "--kind", "fndp", "--order", "A,B,C", "A | ~B & C"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().last().unwrap(), "Σm(1,4,5,6,7)");
    assert!(out.lines().nth(1).unwrap().starts_with("≡ "));
}

#[test]
fn json_round_trip_verifies() {
    for (path, e) in load_exercises(&corpus().join("exercises")).unwrap() {
        let o = run(&["--json", "solve", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", path.display());
        let doc: SolutionDocument = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc.format, 1);
        verify_document(&e, &doc, &Limits::default()).unwrap_or_else(|err| panic!("{}: {err}", e.id));
    }
}

#[test]
fn solve_all_writes_documents() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve-all",
        corpus().join("exercises").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("24 exercises, 0 not solved cleanly"));
    let written = std::fs::read_dir(out.path()).unwrap().count();
    assert_eq!(written, 24);
    let text = std::fs::read_to_string(out.path().join("anexo5-ej1.solution.txt")).unwrap();
    assert!(text.contains("ΠM(0,2,3)"));
    assert!(text.contains("∴ Contingencia"));
}

#[test]
fn every_trace_checks() {
    for entry in std::fs::read_dir(corpus().join("traces")).unwrap() {
        let p = entry.unwrap().path();
        let o = run(&["check", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}: {}", p.display(), stdout(&o));
    }
}
