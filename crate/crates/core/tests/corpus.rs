use std::path::PathBuf;

use discreta_core::derivation::{validate_derivation, LawRef, Mode};
use discreta_core::exercise::Status;
use discreta_core::{load_exercises, solve, verify_document, Derivation, LawId, Limits};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn traces() -> Vec<(String, Derivation)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus().join("traces"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".derivation.json"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let d = Derivation::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, d)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn transcribed_traces_validate() {
    let all = traces();
    assert!(all.len() >= 20);
    for (name, d) in &all {
        let r = validate_derivation(d, Mode::Lenient);
        assert!(r.valid, "{name}: {:?}", r.first_failure());
        assert_eq!(r.goal_reached, Some(true), "{name}");
    }
}

/// One label per law family, as a student would write it.
fn families() -> Vec<(&'static str, Vec<LawId>)> {
    let mut out: Vec<(&'static str, Vec<LawId>)> = Vec::new();
    for id in LawId::ALL {
        match out.iter_mut().find(|(l, _)| *l == id.spanish()) {
            Some((_, ids)) => ids.push(id),
            None => out.push((id.spanish(), vec![id])),
        }
    }
    out
}

#[test]
fn any_wrong_law_is_rejected() {
    let fams = families();
    for (name, d) in traces() {
        for i in 0..d.steps.len() {
            let named: Vec<LawId> = d.steps[i].law.components().iter().flatten().copied().collect();
            for (label, ids) in &fams {
                if ids.iter().any(|id| named.contains(id)) {
                    continue;
                }
                let mut m = d.clone();
                m.steps[i].law = LawRef::parse(label).unwrap();
                let r = validate_derivation(&m, Mode::Lenient);
                assert!(!r.steps[i].ok, "{name} step {} accepted as {label}", i + 1);
            }
        }
    }
}

#[test]
fn exercises_solve_without_mismatch() {
    let loaded = load_exercises(&corpus().join("exercises")).unwrap();
    assert_eq!(loaded.len(), 24);
    for (path, e) in &loaded {
        let doc = solve(e);
        assert_eq!(doc.status(), Status::Solved, "{}: {:?}", path.display(), doc.mismatches);
        verify_document(e, &doc, &Limits::default()).unwrap_or_else(|err| panic!("{}: {err}", e.id));
    }
}
