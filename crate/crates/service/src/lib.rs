//! Stateless HTTP JSON API over the logic engine: parse formulas, list and
//! apply equivalence-law moves, validate derivations, and serve exercises.
//!
//! Every request carries its full state; the only shared data is the
//! read-only exercise store loaded at startup.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, FromRequest, Path as UrlPath, Request, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

use discreta_core::derivation::{validate_derivation_with, Derivation, Goal, LawRef, Mode, StepVerdict};
use discreta_core::exercise::{Exercise, ExerciseKind};
use discreta_core::inference::{check_rules_proof, Argument, ProofLine};
use discreta_core::laws::{applicable_laws, apply_law_with, Direction, LawId};
use discreta_core::parser::{parse, print, print_with, Charset, ParseError, SyntaxStyle};
use discreta_core::semantics::{classify_with, countermodel, equivalent_with, index_sets_with, Classification};
use discreta_core::{Formula, Limits, Path};

pub const BODY_LIMIT: usize = 64 * 1024;
pub const NODE_LIMIT: usize = 2000;

/// Exercises by id, immutable once built.
#[derive(Debug, Default, Clone)]
pub struct ExerciseStore {
    by_id: BTreeMap<String, Exercise>,
}

impl ExerciseStore {
    pub fn new(exercises: impl IntoIterator<Item = Exercise>) -> Self {
        ExerciseStore {
            by_id: exercises.into_iter().map(|e| (e.id.clone(), e)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&Exercise> {
        self.by_id.get(id)
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Origins allowed by CORS; empty disables the CORS layer.
    pub allow_origins: Vec<String>,
    pub limits: Limits,
}

struct AppState {
    store: ExerciseStore,
    limits: Limits,
}

type Shared = State<Arc<AppState>>;

/// An error answered as `{"error": ...}` plus optional extra fields.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn bad(msg: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": msg.into() }),
        }
    }

    fn not_found(what: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            body: json!({ "error": format!("{what} not found") }),
        }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({
                "error": e.to_string(),
                "position": e.position,
                "expected": e.expected,
                "found": e.found,
            }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(self.body)).into_response()
    }
}

/// JSON body whose rejections come back as 400 (or 413) with our error shape.
struct ApiJson<T>(T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        match axum::Json::<T>::from_request(req, state).await {
            Ok(axum::Json(v)) => Ok(ApiJson(v)),
            Err(e) => {
                let status = match &e {
                    JsonRejection::BytesRejection(_) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => {
                        StatusCode::PAYLOAD_TOO_LARGE
                    }
                    _ => StatusCode::BAD_REQUEST,
                };
                Err(ApiError {
                    status,
                    body: json!({ "error": e.body_text() }),
                })
            }
        }
    }
}

type Reply = Result<axum::Json<Value>, ApiError>;

fn ok(v: Value) -> Reply {
    Ok(axum::Json(v))
}

fn parse_formula(text: &str) -> Result<Formula, ApiError> {
    let f = discreta_core::parse_infix(text)?;
    if f.size() > NODE_LIMIT {
        return Err(ApiError::bad(format!(
            "formula has {} nodes; the limit is {NODE_LIMIT}",
            f.size()
        )));
    }
    Ok(f)
}

fn rendered(f: &Formula) -> Value {
    json!({
        "minimal": print(f, SyntaxStyle::InfixMinimal),
        "full": print(f, SyntaxStyle::InfixFull),
        "polish": print(f, SyntaxStyle::Polish),
        "ascii": print_with(f, SyntaxStyle::InfixMinimal, Charset::Ascii),
    })
}

#[derive(Deserialize)]
struct ParseReq {
    text: String,
    #[serde(default)]
    notation: Option<String>,
}

async fn parse_handler(ApiJson(req): ApiJson<ParseReq>) -> Reply {
    let style = match req.notation.as_deref().unwrap_or("infix") {
        "infix" => SyntaxStyle::InfixMinimal,
        "polish" | "prefix" => SyntaxStyle::Polish,
        other => return Err(ApiError::bad(format!("unknown notation {other:?}"))),
    };
    let f = parse(&req.text, style)?;
    if f.size() > NODE_LIMIT {
        return Err(ApiError::bad(format!(
            "formula has {} nodes; the limit is {NODE_LIMIT}",
            f.size()
        )));
    }
    ok(json!({
        "ast": f,
        "atoms": f.atoms(),
        "rendered": rendered(&f),
    }))
}

#[derive(Serialize)]
struct Move {
    law: LawId,
    label: &'static str,
    direction: Direction,
    preview: String,
}

fn moves(f: &Formula, path: &Path, expansions: bool) -> Result<Vec<Move>, ApiError> {
    let menu = applicable_laws(f, path, expansions).map_err(|e| ApiError::bad(e.to_string()))?;
    Ok(menu
        .into_iter()
        .filter_map(|(law, direction)| {
            let out = apply_law_with(f, law, direction, path, &BTreeMap::new()).ok()?;
            Some(Move {
                law,
                label: law.spanish(),
                direction,
                preview: out.to_string(),
            })
        })
        .collect())
}

#[derive(Deserialize)]
struct OptionsReq {
    formula: String,
    #[serde(default)]
    path: Path,
    #[serde(default)]
    expansions: bool,
}

async fn options_handler(ApiJson(req): ApiJson<OptionsReq>) -> Reply {
    let f = parse_formula(&req.formula)?;
    ok(json!({ "moves": moves(&f, &req.path, req.expansions)? }))
}

#[derive(Deserialize)]
struct ApplyReq {
    formula: String,
    #[serde(default)]
    path: Path,
    law: String,
    #[serde(default = "left_to_right")]
    direction: Direction,
    /// Values for metavariables that only occur on the produced side.
    #[serde(default)]
    bindings: BTreeMap<String, String>,
    #[serde(default)]
    goal: Option<Goal>,
}

fn left_to_right() -> Direction {
    Direction::LeftToRight
}

async fn apply_handler(State(app): Shared, ApiJson(req): ApiJson<ApplyReq>) -> Reply {
    let f = parse_formula(&req.formula)?;
    let law = LawRef::parse(&req.law).map_err(|e| ApiError::bad(e.to_string()))?;
    let mut extra = BTreeMap::new();
    for (k, v) in &req.bindings {
        extra.insert(k.clone(), parse_formula(v)?);
    }
    let mut last = None;
    let mut result = None;
    for id in law.components().iter().flatten() {
        match apply_law_with(&f, *id, req.direction, &req.path, &extra) {
            Ok(out) => {
                result = Some((*id, out));
                break;
            }
            Err(e) => last = Some(e),
        }
    }
    let Some((id, out)) = result else {
        return Err(ApiError::bad(last.map(|e| e.to_string()).unwrap_or_default()));
    };
    if law.is_bundle() {
        return Err(ApiError::bad("apply one law at a time"));
    }
    if out.size() > NODE_LIMIT {
        return Err(ApiError::bad("result exceeds the formula size limit"));
    }
    // Laws are sound; this guards against catalog bugs reaching a student.
    if let Ok(false) = equivalent_with(&f, &out, &app.limits) {
        return Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: json!({ "error": "rewrite changed the meaning of the formula" }),
        });
    }
    let goal_reached = req.goal.as_ref().map(|g| g.reached_by(&out, &f));
    ok(json!({
        "law": id,
        "result": rendered(&out),
        "moves": moves(&out, &Path::root(), false)?,
        "goalReached": goal_reached,
    }))
}

#[derive(Deserialize)]
struct ValidateReq {
    derivation: Value,
    #[serde(default)]
    mode: Mode,
}

fn read_derivation(v: Value) -> Result<Derivation, ApiError> {
    let d = Derivation::from_json(&v.to_string()).map_err(|e| ApiError::bad(e.to_string()))?;
    let big = std::iter::once(&d.start)
        .chain(d.steps.iter().map(|s| &s.result))
        .any(|f| f.size() > NODE_LIMIT);
    if big {
        return Err(ApiError::bad("derivation exceeds the formula size limit"));
    }
    Ok(d)
}

fn report_json(mode: Mode, valid: bool, steps: &[StepVerdict], goal: Option<bool>, last: &str) -> Value {
    json!({
        "mode": mode,
        "overall": valid,
        "perStep": steps,
        "goalReached": goal,
        "finalFormula": last,
    })
}

async fn validate_handler(State(app): Shared, ApiJson(req): ApiJson<ValidateReq>) -> Reply {
    let d = read_derivation(req.derivation)?;
    let r = validate_derivation_with(&d, req.mode, &app.limits);
    ok(report_json(r.mode, r.valid, &r.steps, r.goal_reached, &r.final_formula))
}

async fn list_handler(State(app): Shared) -> Reply {
    let items: Vec<Value> = app
        .store
        .by_id
        .values()
        .map(|e| {
            let kind = serde_json::to_value(&e.kind).ok().and_then(|v| v.get("kind").cloned());
            json!({ "id": e.id, "kind": kind, "statement": e.statement })
        })
        .collect();
    ok(json!({ "exercises": items }))
}

async fn get_handler(State(app): Shared, UrlPath(id): UrlPath<String>) -> Reply {
    let e = app.store.get(&id).ok_or_else(|| ApiError::not_found("exercise"))?;
    ok(serde_json::to_value(e).expect("exercise serializes"))
}

#[derive(Deserialize, Default)]
struct Answer {
    #[serde(default)]
    classification: Option<String>,
    #[serde(default)]
    minterms: Option<Vec<u64>>,
    #[serde(default)]
    maxterms: Option<Vec<u64>>,
    #[serde(default)]
    verdict: Option<String>,
}

#[derive(Deserialize)]
struct SubmitReq {
    #[serde(default)]
    derivation: Option<Value>,
    #[serde(default)]
    mode: Mode,
    #[serde(default)]
    answer: Option<Answer>,
    #[serde(default)]
    proof: Option<Vec<ProofLine>>,
}

fn engine_err(e: impl std::fmt::Display) -> ApiError {
    ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        body: json!({ "error": e.to_string() }),
    }
}

fn grade(feedback: Vec<String>, expected: Value) -> Reply {
    let correct = feedback.is_empty();
    ok(json!({
        "verdict": if correct { "correct" } else { "incorrect" },
        "feedback": feedback,
        "expected": if correct { Value::Null } else { expected },
    }))
}

fn check_derivation_submission(d: Derivation, f: &Formula, goal: Option<Goal>, mode: Mode, limits: &Limits) -> Reply {
    let mut d = d;
    let mut feedback = Vec::new();
    if &d.start != f {
        feedback.push(format!("the derivation must start at {f}"));
    }
    if goal.is_some() {
        d.goal = goal;
    }
    let r = validate_derivation_with(&d, mode, limits);
    if let Some(s) = r.first_failure() {
        feedback.push(format!("step {}: {}", s.index, s.error.clone().unwrap_or_default()));
    }
    if r.goal_reached != Some(true) {
        feedback.push("the goal is not reached".into());
    }
    ok(json!({
        "verdict": if feedback.is_empty() { "valid" } else { "invalid" },
        "feedback": feedback,
        "report": report_json(r.mode, r.valid, &r.steps, r.goal_reached, &r.final_formula),
    }))
}

fn shape_goal(e: &Exercise, f: &Formula, d: &Derivation) -> Option<Goal> {
    let ExerciseKind::NormalForm { forms, order } = &e.kind else {
        return None;
    };
    let goals: Vec<Goal> = forms
        .iter()
        .map(|&shape| Goal::Shape {
            shape,
            order: order.clone(),
        })
        .collect();
    goals
        .iter()
        .find(|g| g.reached_by(d.final_formula(), f))
        .or(goals.first())
        .cloned()
}

async fn submit_handler(State(app): Shared, UrlPath(id): UrlPath<String>, ApiJson(req): ApiJson<SubmitReq>) -> Reply {
    let e = app.store.get(&id).ok_or_else(|| ApiError::not_found("exercise"))?;
    let limits = &app.limits;
    match &e.kind {
        ExerciseKind::Consequence { .. } => {
            let arg = Argument::parse(&e.statement).map_err(engine_err)?;
            if let Some(lines) = req.proof {
                let report = check_rules_proof(&arg, &lines);
                let feedback: Vec<String> = report.lines.iter().filter(|l| !l.ok).map(|l| l.render()).collect();
                let mut feedback = feedback;
                if !report.concludes {
                    feedback.push("the last line is not the conclusion".into());
                }
                return ok(json!({
                    "verdict": if report.valid { "valid" } else { "invalid" },
                    "feedback": feedback,
                    "report": report,
                }));
            }
            let answer = req.answer.ok_or_else(|| ApiError::bad("submit an answer or a proof"))?;
            let given = answer
                .verdict
                .ok_or_else(|| ApiError::bad("answer.verdict is required"))?;
            let folded = discreta_core::laws::fold_label(&given).replace(['∴', ' '], "");
            let given = match folded.as_str() {
                "valid" | "valida" | "clvalida" => true,
                "invalid" | "novalida" | "clnovalida" => false,
                _ => return Err(ApiError::bad(format!("unknown verdict {given:?}"))),
            };
            let truth = countermodel(&arg.premises, &arg.conclusion, limits)
                .map_err(engine_err)?
                .is_none();
            let label = if truth { "valid" } else { "invalid" };
            let feedback = if given == truth {
                vec![]
            } else {
                vec![format!("the argument is {label}")]
            };
            grade(feedback, json!(label))
        }
        _ => {
            let f = discreta_core::parse_infix(&e.statement).map_err(engine_err)?;
            if let Some(v) = req.derivation {
                let d = read_derivation(v)?;
                let goal = match &e.kind {
                    ExerciseKind::DerivationGoal { goal } => Some(goal.clone()),
                    ExerciseKind::NormalForm { .. } => shape_goal(e, &f, &d),
                    _ => Some(Goal::Formula(Formula::constant(
                        classify_with(&f, limits).map_err(engine_err)? == Classification::Tautology,
                    ))),
                };
                return check_derivation_submission(d, &f, goal, req.mode, limits);
            }
            let answer = req
                .answer
                .ok_or_else(|| ApiError::bad("submit an answer or a derivation"))?;
            let mut feedback = Vec::new();
            let mut expected = serde_json::Map::new();
            let class = classify_with(&f, limits).map_err(engine_err)?;
            if let Some(c) = &answer.classification {
                let given = Classification::from_label(c)
                    .ok_or_else(|| ApiError::bad(format!("unknown classification {c:?}")))?;
                if given != class {
                    feedback.push(format!("the formula is a {}", class.english()));
                    expected.insert("classification".into(), json!(class.spanish()));
                }
            }
            if answer.minterms.is_some() || answer.maxterms.is_some() {
                let order = e.order().unwrap_or_else(|| f.atoms());
                let ix = index_sets_with(&f, &order, limits).map_err(engine_err)?;
                let norm = |v: &Vec<u64>| {
                    let mut v = v.clone();
                    v.sort();
                    v.dedup();
                    v
                };
                for (name, given, truth) in [
                    ("minterms", &answer.minterms, &ix.minterms),
                    ("maxterms", &answer.maxterms, &ix.maxterms),
                ] {
                    if let Some(g) = given {
                        if &norm(g) != truth {
                            feedback.push(format!("{name} differ"));
                            expected.insert(name.into(), json!(truth));
                        }
                    }
                }
            }
            if answer.verdict.is_some() {
                return Err(ApiError::bad("a verdict does not fit this exercise"));
            }
            let expected = match expected.len() {
                0 => Value::Null,
                1 if expected.contains_key("classification") => expected["classification"].clone(),
                _ => Value::Object(expected),
            };
            grade(feedback, expected)
        }
    }
}

async fn health() -> Reply {
    ok(json!({ "status": "ok" }))
}

async fn not_found() -> ApiError {
    ApiError::not_found("route")
}

pub fn router(store: ExerciseStore, opts: Options) -> Router {
    let state = Arc::new(AppState {
        store,
        limits: opts.limits.clone(),
    });
    let mut app = Router::new()
        .route("/api/health", get(health))
        .route("/api/parse", post(parse_handler))
        .route("/api/step/options", post(options_handler))
        .route("/api/step/apply", post(apply_handler))
        .route("/api/derivation/validate", post(validate_handler))
        .route("/api/exercises", get(list_handler))
        .route("/api/exercises/{id}", get(get_handler))
        .route("/api/exercises/{id}/submit", post(submit_handler))
        .fallback(not_found)
        .with_state(state)
        .layer(DefaultBodyLimit::max(BODY_LIMIT));
    if !opts.allow_origins.is_empty() {
        let origins: Vec<HeaderValue> = opts.allow_origins.iter().filter_map(|o| o.parse().ok()).collect();
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origins)
                .allow_methods(Any)
                .allow_headers(Any),
        );
    }
    app
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store: ExerciseStore, opts: Options) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store, opts)).await
}
