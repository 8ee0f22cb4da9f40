use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use discreta_core::{equivalent, load_exercises, parse_infix};
use discreta_service::{router, ExerciseStore, Options};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn app() -> Router {
    let loaded = load_exercises(&corpus().join("exercises")).unwrap();
    router(
        ExerciseStore::new(loaded.into_iter().map(|(_, e)| e)),
        Options::default(),
    )
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(body)).await
}

fn trace(name: &str) -> Value {
    let text = std::fs::read_to_string(corpus().join("traces").join(format!("{name}.derivation.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[tokio::test]
async fn health() {
    let (s, v) = call(&app(), "GET", "/api/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({"status": "ok"}));
}

#[tokio::test]
async fn parse_renders_minimal_infix() {
    let (s, v) = post(&app(), "/api/parse", json!({"text": "A | ~B & C"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["rendered"]["minimal"], "A ∨ ¬B ∧ C");
    assert_eq!(v["rendered"]["full"], "(A ∨ (¬B ∧ C))");
    assert_eq!(v["atoms"], json!(["A", "B", "C"]));
}

#[tokio::test]
async fn parse_error_reports_end_position() {
    let (s, v) = post(&app(), "/api/parse", json!({"text": "P -> "})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["position"], 5);
    assert!(v["error"].is_string());
}

#[tokio::test]
async fn parse_polish() {
    let (s, v) = post(&app(), "/api/parse", json!({"text": "→ P Q", "notation": "polish"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["rendered"]["minimal"], "P → Q");
    assert_eq!(v["ast"]["op"], "implies");
}

#[tokio::test]
async fn malformed_json_is_400() {
    let app = app();
    let req = Request::builder()
        .method("POST")
        .uri("/api/parse")
        .header("content-type", "application/json")
        .body(Body::from("{"))
        .unwrap();
    assert_eq!(app.oneshot(req).await.unwrap().status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn oversized_body_is_rejected() {
    let text = "P ∨ ".repeat(20_000) + "P";
    let (s, _) = post(&app(), "/api/parse", json!({ "text": text })).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn options_menus() {
    let app = app();
    let (s, v) = post(&app, "/api/step/options", json!({"formula": "¬¬P", "path": []})).await;
    assert_eq!(s, StatusCode::OK);
    let moves = v["moves"].as_array().unwrap();
    assert!(moves
        .iter()
        .any(|m| m["law"] == "DoubleNegation" && m["preview"] == "P"));

    let (_, v) = post(&app, "/api/step/options", json!({"formula": "P → Q", "path": []})).await;
    assert!(v["moves"]
        .as_array()
        .unwrap()
        .iter()
        .any(|m| m["law"] == "EL1" && m["preview"] == "¬P ∨ Q"));

    let (s, _) = post(&app, "/api/step/options", json!({"formula": "P", "path": [3]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (s, v) = post(&app, "/api/step/options", json!({"formula": "P", "path": []})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["moves"], json!([]));
}

#[tokio::test]
async fn apply_moves_stay_equivalent() {
    let app = app();
    for text in ["(P ∧ (P → Q)) → Q", "¬(P ∨ ¬Q) ∧ (R ↔ P)", "(P ∨ Q) ∧ (P ∨ ¬Q) ∨ F"] {
        let f = parse_infix(text).unwrap();
        let (_, menu) = post(&app, "/api/step/options", json!({"formula": text, "path": []})).await;
        for m in menu["moves"].as_array().unwrap() {
            let body = json!({"formula": text, "path": [], "law": m["law"], "direction": m["direction"]});
            let (s, v) = post(&app, "/api/step/apply", body).await;
            assert_eq!(s, StatusCode::OK, "{text} {m}");
            assert_eq!(v["result"]["minimal"], m["preview"]);
            let g = parse_infix(v["result"]["minimal"].as_str().unwrap()).unwrap();
            assert!(equivalent(&f, &g).unwrap());
        }
    }
}

#[tokio::test]
async fn interactive_session_reaches_t() {
    let app = app();
    let steps = [
        ("(P ∧ (P → Q)) → Q", vec![0, 1], "EL1"),
        ("(P ∧ (¬P ∨ Q)) → Q", vec![], "EL1"),
        ("¬(P ∧ (¬P ∨ Q)) ∨ Q", vec![0, 0], "DistAndOverOr"),
        ("¬(P ∧ ¬P ∨ P ∧ Q) ∨ Q", vec![0, 0, 0], "Negation"),
        ("¬(F ∨ P ∧ Q) ∨ Q", vec![0, 0], "Identity"),
        ("¬(P ∧ Q) ∨ Q", vec![0], "DeMorganAnd"),
        ("¬P ∨ ¬Q ∨ Q", vec![], "AssocOr"),
        ("¬P ∨ (¬Q ∨ Q)", vec![1], "Negation"),
        ("¬P ∨ T", vec![], "Domination"),
    ];
    let mut last = Value::Null;
    for (formula, path, law) in steps {
        let (s, v) = post(
            &app,
            "/api/step/apply",
            json!({"formula": formula, "path": path, "law": law, "goal": "T"}),
        )
        .await;
        assert_eq!(s, StatusCode::OK, "{formula} {law}: {v}");
        last = v;
    }
    assert_eq!(last["result"]["minimal"], "T");
    assert_eq!(last["goalReached"], true);
}

#[tokio::test]
async fn apply_rejects_bundles_and_mismatches() {
    let app = app();
    let (s, _) = post(
        &app,
        "/api/step/apply",
        json!({"formula": "P ∨ Q", "law": "Asociativa, Conmutativa"}),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/api/step/apply", json!({"formula": "P ∨ Q", "law": "EL1"})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn validate_derivation_endpoint() {
    let app = app();
    let (s, v) = post(
        &app,
        "/api/derivation/validate",
        json!({"derivation": trace("anexo4-ej1"), "mode": "lenient"}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["overall"], true);
    assert_eq!(v["goalReached"], true);
    assert_eq!(v["perStep"].as_array().unwrap().len(), 6);

    let (_, v) = post(
        &app,
        "/api/derivation/validate",
        json!({"derivation": trace("anexo4-ej1"), "mode": "strict"}),
    )
    .await;
    assert_eq!(v["overall"], false);
    assert_eq!(v["perStep"][2]["kind"], "bundle_needs_lenient");
}

#[tokio::test]
async fn exercise_listing_and_lookup() {
    let app = app();
    let (s, v) = call(&app, "GET", "/api/exercises", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["exercises"].as_array().unwrap().len(), 24);
    let (s, v) = call(&app, "GET", "/api/exercises/anexo5-ej1", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["statement"], "A ∨ ¬B ∧ C");
    let (s, _) = call(&app, "GET", "/api/exercises/unknown", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = post(
        &app,
        "/api/exercises/unknown/submit",
        json!({"answer": {"classification": "Tautología"}}),
    )
    .await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn submit_transcribed_trace() {
    let (s, v) = post(
        &app(),
        "/api/exercises/anexo4-ej1/submit",
        json!({"derivation": trace("anexo4-ej1")}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdict"], "valid", "{v}");
}

#[tokio::test]
async fn submit_normal_form_trace() {
    let (_, v) = post(
        &app(),
        "/api/exercises/anexo5-ej4/submit",
        json!({"derivation": trace("anexo5-ej4-fncp")}),
    )
    .await;
    assert_eq!(v["verdict"], "valid", "{v}");
}

#[tokio::test]
async fn submit_wrong_classification() {
    let app = app();
    let (s, v) = post(
        &app,
        "/api/exercises/anexo5-ej1/submit",
        json!({"answer": {"classification": "Tautología"}}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdict"], "incorrect");
    assert_eq!(v["expected"], "Contingencia");

    let (_, v) = post(
        &app,
        "/api/exercises/anexo5-ej1/submit",
        json!({"answer": {"classification": "contingency", "minterms": [7, 1, 4, 5, 6]}}),
    )
    .await;
    assert_eq!(v["verdict"], "correct");
}

#[tokio::test]
async fn submit_consequence() {
    let app = app();
    let (_, v) = post(
        &app,
        "/api/exercises/anexo5-arg3-direct/submit",
        json!({"answer": {"verdict": "CL válida"}}),
    )
    .await;
    assert_eq!(v["verdict"], "correct");
    let (_, v) = post(
        &app,
        "/api/exercises/anexo5-arg3-direct/submit",
        json!({"answer": {"verdict": "invalid"}}),
    )
    .await;
    assert_eq!(v["verdict"], "incorrect");

    let proof = json!([
        {"formula": "P → Q", "justification": {"kind": "premise"}},
        {"formula": "Q → R", "justification": {"kind": "premise"}},
        {"formula": "¬R", "justification": {"kind": "premise"}},
        {"formula": "¬Q", "justification": {"kind": "rule", "rule": "MT", "lines": [2, 3]}},
        {"formula": "¬P", "justification": {"kind": "rule", "rule": "MT", "lines": [1, 4]}}
    ]);
    let (_, v) = post(
        &app,
        "/api/exercises/anexo5-arg3-direct/submit",
        json!({ "proof": proof }),
    )
    .await;
    assert_eq!(v["verdict"], "valid", "{v}");
}

#[tokio::test]
async fn identical_requests_identical_responses() {
    let app = app();
    let reqs = [
        ("/api/parse", json!({"text": "P <-> Q"})),
        ("/api/step/options", json!({"formula": "¬(P ∧ Q)", "path": []})),
        (
            "/api/exercises/anexo5-ej1/submit",
            json!({"answer": {"classification": "Tautología"}}),
        ),
    ];
    let mut first = Vec::new();
    for (uri, body) in &reqs {
        first.push(post(&app, uri, body.clone()).await);
    }
    for (i, (uri, body)) in reqs.iter().enumerate().rev() {
        assert_eq!(post(&app, uri, body.clone()).await, first[i]);
    }
}
