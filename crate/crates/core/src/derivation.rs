//! Recorded derivations, their JSON file format, and step-by-step validation.
//!
//! ```json
//! { "format": 1, "start": "P ∧ (P → Q) → Q", "goal": "T",
//!   "steps": [ { "law": "EL1", "direction": "LR", "path": [], "result": "¬(P ∧ (P → Q)) ∨ Q" } ] }
//! ```
//!
//! `law` is a catalog id or an alias ("Ley de Morgan", "Asoc", ...); a
//! comma-separated list bundles several laws into one line. `goal` is a
//! formula or `{"shape": "nnf" | "dnf" | "cnf" | "fndp" | "fncp"}`, the last
//! two optionally with an `"order"` list of variables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ac;
use crate::formula::{Formula, Path, Var};
use crate::laws::{check_step, resolve_law_ref, Direction, LawError, LawId, UnknownLaw};
use crate::normal_forms::{canonical_indices, cnf_terms, dnf_terms, CanonicalKind};
use crate::parser::{parse_infix, ParseError};
use crate::semantics::{equivalent_with, SemanticsError};
use crate::Limits;

/// A law label as written in a derivation, with its resolved candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawRef {
    label: String,
    components: Vec<Vec<LawId>>,
}

impl LawRef {
    pub fn parse(label: &str) -> Result<Self, UnknownLaw> {
        Ok(LawRef {
            label: label.trim().to_string(),
            components: resolve_law_ref(label)?,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// One entry per comma-separated name, each the ids it may stand for.
    pub fn components(&self) -> &[Vec<LawId>] {
        &self.components
    }

    pub fn is_bundle(&self) -> bool {
        self.components.len() > 1
    }

    /// The id when the label names exactly one catalog law.
    pub fn single(&self) -> Option<LawId> {
        match self.components.as_slice() {
            [only] if only.len() == 1 => Some(only[0]),
            _ => None,
        }
    }
}

impl From<LawId> for LawRef {
    fn from(id: LawId) -> Self {
        LawRef {
            label: id.id().to_string(),
            components: vec![vec![id]],
        }
    }
}

impl fmt::Display for LawRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub law: LawRef,
    pub direction: Direction,
    pub path: Path,
    pub result: Formula,
    pub note: Option<String>,
}

impl StepRecord {
    pub fn new(law: LawId, direction: Direction, path: Path, result: Formula) -> Self {
        StepRecord {
            law: law.into(),
            direction,
            path,
            result,
            note: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Nnf,
    Dnf,
    Cnf,
    Fndp,
    Fncp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Formula(Formula),
    Shape { shape: Shape, order: Option<Vec<Var>> },
}

impl Goal {
    pub fn shape(shape: Shape) -> Self {
        Goal::Shape { shape, order: None }
    }

    /// Whether `f` meets the goal; `start` supplies the default variable order.
    pub fn reached_by(&self, f: &Formula, start: &Formula) -> bool {
        match self {
            Goal::Formula(g) => f == g,
            Goal::Shape { shape, order } => match shape {
                Shape::Nnf => f.is_nnf(),
                Shape::Dnf => dnf_terms(f).is_some(),
                Shape::Cnf => cnf_terms(f).is_some(),
                Shape::Fndp | Shape::Fncp => {
                    let kind = if *shape == Shape::Fndp {
                        CanonicalKind::Fndp
                    } else {
                        CanonicalKind::Fncp
                    };
                    let order = order.clone().unwrap_or_else(|| start.atoms());
                    canonical_indices(f, kind, &order)
                        .map(|ix| ix.windows(2).all(|w| w[0] < w[1]))
                        .unwrap_or(false)
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub start: Formula,
    pub steps: Vec<StepRecord>,
    pub goal: Option<Goal>,
}

impl Derivation {
    pub fn new(start: Formula) -> Self {
        Derivation {
            start,
            steps: Vec::new(),
            goal: None,
        }
    }

    pub fn final_formula(&self) -> &Formula {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let file: DerivationFile = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        Derivation::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivation serializes")
    }

    /// The start formula, then one `≡ result    Law` line per step.
    pub fn render_lines(&self) -> Vec<String> {
        let mut out = vec![self.start.to_string()];
        for s in &self.steps {
            let law = s.law.single().map(LawId::spanish).unwrap_or(s.law.label());
            out.push(format!("≡ {}    {}", s.result, law));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{field}: {error}")]
    Formula { field: String, error: ParseError },
    #[error("step {step}: {error}")]
    Law { step: usize, error: UnknownLaw },
    #[error("goal order: {0}")]
    Order(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GoalFile {
    Formula(String),
    Shape {
        shape: Shape,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepFile {
    law: String,
    #[serde(default = "default_direction")]
    direction: Direction,
    #[serde(default)]
    path: Vec<usize>,
    result: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn default_direction() -> Direction {
    Direction::LeftToRight
}

fn default_format() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DerivationFile {
    #[serde(default = "default_format")]
    format: u32,
    start: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goal: Option<GoalFile>,
    #[serde(default)]
    steps: Vec<StepFile>,
}

impl TryFrom<DerivationFile> for Derivation {
    type Error = FormatError;

    fn try_from(file: DerivationFile) -> Result<Self, FormatError> {
        if file.format != 1 {
            return Err(FormatError::Version(file.format));
        }
        let formula =
            |field: String, text: &str| parse_infix(text).map_err(|error| FormatError::Formula { field, error });
        let start = formula("start".into(), &file.start)?;
        let goal = file.goal.map(Goal::try_from).transpose()?;
        let mut steps = Vec::with_capacity(file.steps.len());
        for (i, s) in file.steps.into_iter().enumerate() {
            let n = i + 1;
            steps.push(StepRecord {
                law: LawRef::parse(&s.law).map_err(|error| FormatError::Law { step: n, error })?,
                direction: s.direction,
                path: Path(s.path),
                result: formula(format!("step {n} result"), &s.result)?,
                note: s.note,
            });
        }
        Ok(Derivation { start, steps, goal })
    }
}

impl From<&Derivation> for DerivationFile {
    fn from(d: &Derivation) -> Self {
        DerivationFile {
            format: 1,
            start: d.start.to_string(),
            goal: d.goal.as_ref().map(GoalFile::from),
            steps: d
                .steps
                .iter()
                .map(|s| StepFile {
                    law: s.law.label().to_string(),
                    direction: s.direction,
                    path: s.path.0.clone(),
                    result: s.result.to_string(),
                    note: s.note.clone(),
                })
                .collect(),
        }
    }
}

impl From<&Goal> for GoalFile {
    fn from(g: &Goal) -> Self {
        match g {
            Goal::Formula(f) => GoalFile::Formula(f.to_string()),
            Goal::Shape { shape, order } => GoalFile::Shape {
                shape: *shape,
                order: order.as_ref().map(|o| o.iter().map(|v| v.to_string()).collect()),
            },
        }
    }
}

impl TryFrom<GoalFile> for Goal {
    type Error = FormatError;

    fn try_from(g: GoalFile) -> Result<Self, FormatError> {
        match g {
            GoalFile::Formula(text) => parse_infix(&text)
                .map(Goal::Formula)
                .map_err(|error| FormatError::Formula {
                    field: "goal".into(),
                    error,
                }),
            GoalFile::Shape { shape, order } => {
                let order = order
                    .map(|names| {
                        names
                            .iter()
                            .map(|n| Var::new(n).map_err(|e| FormatError::Order(e.to_string())))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                Ok(Goal::Shape { shape, order })
            }
        }
    }
}

impl Serialize for Goal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GoalFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Goal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Goal::try_from(GoalFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DerivationFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Derivation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = DerivationFile::deserialize(d)?;
        Derivation::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    #[default]
    #[serde(alias = "lenientac", alias = "lenient_ac")]
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepErrorKind {
    PathOutOfRange,
    PatternMismatch,
    BundleNeedsLenient,
    NotEquivalent,
    TooManyVariables,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepVerdict {
    /// 1-based line number.
    pub index: usize,
    pub law: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<StepErrorKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub mode: Mode,
    pub valid: bool,
    pub steps: Vec<StepVerdict>,
    /// `None` when the derivation names no goal.
    pub goal_reached: Option<bool>,
    pub final_formula: String,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&StepVerdict> {
        self.steps.iter().find(|s| !s.ok)
    }
}

fn strict_step(before: &Formula, step: &StepRecord) -> Result<(), (StepErrorKind, String)> {
    if step.law.is_bundle() {
        return Err((
            StepErrorKind::BundleNeedsLenient,
            format!("\"{}\" names several laws; strict mode takes one per step", step.law),
        ));
    }
    let mut first = None;
    for id in &step.law.components()[0] {
        match check_step(before, &step.result, *id, step.direction, &step.path) {
            Ok(()) => return Ok(()),
            Err(e) => {
                first.get_or_insert(e);
            }
        }
    }
    let e = first.expect("a component has at least one id");
    let kind = match e {
        LawError::PathOutOfRange(_) => StepErrorKind::PathOutOfRange,
        _ => StepErrorKind::PatternMismatch,
    };
    Err((kind, e.to_string()))
}

fn check_one(before: &Formula, step: &StepRecord, mode: Mode, limits: &Limits) -> Result<(), (StepErrorKind, String)> {
    match equivalent_with(before, &step.result, limits) {
        Ok(true) => {}
        Ok(false) => {
            return Err((
                StepErrorKind::NotEquivalent,
                format!("{} is not equivalent to the previous line", step.result),
            ))
        }
        Err(e @ SemanticsError::TooManyVariables { .. }) => {
            return Err((StepErrorKind::TooManyVariables, e.to_string()))
        }
        Err(e) => return Err((StepErrorKind::NotEquivalent, e.to_string())),
    }
    let strict = strict_step(before, step);
    match mode {
        Mode::Strict => strict,
        Mode::Lenient => {
            if strict.is_ok() || ac::justified(before, &step.result, step.law.components()) {
                Ok(())
            } else {
                Err((
                    StepErrorKind::PatternMismatch,
                    format!("{} does not explain the change to {}", step.law, step.result),
                ))
            }
        }
    }
}

/// Checks every step against its law and the truth-table oracle, then the goal.
pub fn validate_derivation(d: &Derivation, mode: Mode) -> ValidationReport {
    validate_derivation_with(d, mode, &Limits::default())
}

pub fn validate_derivation_with(d: &Derivation, mode: Mode, limits: &Limits) -> ValidationReport {
    let mut prev = &d.start;
    let mut steps = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let outcome = check_one(prev, step, mode, limits);
        let (kind, error) = match outcome {
            Ok(()) => (None, None),
            Err((k, e)) => (Some(k), Some(e)),
        };
        steps.push(StepVerdict {
            index: i + 1,
            law: step.law.label().to_string(),
            ok: kind.is_none(),
            kind,
            error,
        });
        prev = &step.result;
    }
    let goal_reached = d.goal.as_ref().map(|g| g.reached_by(prev, &d.start));
    ValidationReport {
        mode,
        valid: steps.iter().all(|s| s.ok) && goal_reached != Some(false),
        steps,
        goal_reached,
        final_formula: prev.to_string(),
    }
}
