//! Exercise files and worked-solution documents.
//!
//! An exercise is a JSON file named `*.exercise.json`:
//!
//! ```json
//! { "format": 1, "id": "anexo5-ej1", "kind": "normal_form",
//!   "forms": ["fndp", "fncp"], "order": ["A", "B", "C"],
//!   "statement": "A ∨ ¬B ∧ C",
//!   "expected": { "classification": "contingency",
//!                 "minterms": [1, 4, 5, 6, 7], "maxterms": [0, 2, 3] } }
//! ```
//!
//! `kind` is one of `classify`, `normal_form` (with `forms` and an optional
//! `order`), `consequence` (with `method`) or `derivation_goal` (with `goal`).

use std::collections::HashMap;
use std::fmt;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::auto::{auto_derive_with, AutoGoal};
use crate::derivation::{validate_derivation_with, Derivation, Goal, Mode, Shape};
use crate::formula::{Formula, Var};
use crate::inference::{check, Argument, Method, Verdict, VerdictTrace};
use crate::normal_forms::{canonical_indices, to_cnf_with, to_dnf_with, to_nnf, to_principal_with, CanonicalKind};
use crate::parser::parse_infix;
use crate::semantics::{
    check_order, classify_with, index_sets_with, truth_table, CanonicalIndexSets, Classification, TruthTable,
};
use crate::{Error, Limits};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExerciseKind {
    Classify,
    NormalForm {
        forms: Vec<Shape>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<Var>>,
    },
    Consequence {
        method: Method,
    },
    DerivationGoal {
        goal: Goal,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "class_label")]
    pub classification: Option<Classification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minterms: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxterms: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl Expected {
    fn is_empty(&self) -> bool {
        self == &Expected::default()
    }
}

/// Classifications are written either as tags or as the Spanish labels.
mod class_label {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use crate::semantics::Classification;

    pub fn serialize<S: Serializer>(c: &Option<Classification>, s: S) -> Result<S::Ok, S::Error> {
        c.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Classification>, D::Error> {
        let text = String::deserialize(d)?;
        Classification::from_label(&text)
            .map(Some)
            .ok_or_else(|| D::Error::custom(format!("unknown classification {text:?}")))
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exercise {
    #[serde(default = "one")]
    pub format: u32,
    pub id: String,
    #[serde(flatten)]
    pub kind: ExerciseKind,
    /// Formula text, or argument text (`P, P → Q ⇒ Q`) for consequences.
    pub statement: String,
    #[serde(default, skip_serializing_if = "Expected::is_empty")]
    pub expected: Expected,
}

/// The parsed statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Formula(Formula),
    Argument(Argument),
}

impl Exercise {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let e: Exercise = serde_json::from_str(text).map_err(|e| e.to_string())?;
        e.check()?;
        Ok(e)
    }

    pub fn statement(&self) -> Result<Statement, String> {
        match self.kind {
            ExerciseKind::Consequence { .. } => Argument::parse(&self.statement)
                .map(Statement::Argument)
                .map_err(|e| format!("statement: {e}")),
            _ => parse_infix(&self.statement)
                .map(Statement::Formula)
                .map_err(|e| format!("statement: {e}")),
        }
    }

    pub fn formula(&self) -> Option<Formula> {
        match self.statement() {
            Ok(Statement::Formula(f)) => Some(f),
            _ => None,
        }
    }

    /// Variable order for index sets: the explicit one or the sorted atoms.
    pub fn order(&self) -> Option<Vec<Var>> {
        let f = self.formula()?;
        match &self.kind {
            ExerciseKind::NormalForm { order: Some(o), .. } => Some(o.clone()),
            _ => Some(f.atoms()),
        }
    }

    /// Schema checks beyond JSON shape: version, statement, and answers
    /// that fit the kind.
    pub fn check(&self) -> Result<(), String> {
        if self.format != 1 {
            return Err(format!("unsupported format version {}", self.format));
        }
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        self.statement()?;
        let x = &self.expected;
        let has_indices = x.minterms.is_some() || x.maxterms.is_some();
        match &self.kind {
            ExerciseKind::Classify | ExerciseKind::DerivationGoal { .. } => {
                if has_indices || x.verdict.is_some() {
                    return Err("expected may only give a classification for this kind".into());
                }
            }
            ExerciseKind::NormalForm { forms, order } => {
                if forms.is_empty() {
                    return Err("normal_form needs at least one form".into());
                }
                if x.verdict.is_some() {
                    return Err("a verdict does not fit a normal_form exercise".into());
                }
                let f = self.formula().expect("checked above");
                if let Some(o) = order {
                    check_order(
                        o,
                        &Limits {
                            var_cap: usize::MAX,
                            ..Limits::default()
                        },
                    )
                    .map_err(|e| format!("order: {e}"))?;
                    if let Some(v) = f.atoms().into_iter().find(|v| !o.contains(v)) {
                        return Err(format!("order: variable {v} is missing"));
                    }
                }
                let n = self.order().map_or(0, |o| o.len());
                for ix in [&x.minterms, &x.maxterms].into_iter().flatten() {
                    if n >= 64 || ix.iter().any(|&i| i >> n != 0) {
                        return Err(format!("index out of range for {n} variables"));
                    }
                }
                if let (Some(m), Some(mx)) = (&x.minterms, &x.maxterms) {
                    let mut all: Vec<u64> = m.iter().chain(mx).copied().collect();
                    all.sort();
                    if all != (0..1u64 << n).collect::<Vec<_>>() {
                        return Err("minterms and maxterms must partition the rows".into());
                    }
                }
            }
            ExerciseKind::Consequence { .. } => {
                if has_indices || x.classification.is_some() {
                    return Err("expected may only give a verdict for a consequence".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {reason}", path.display())]
    Schema {
        path: PathBuf,
        id: Option<String>,
        reason: String,
    },
    #[error("duplicate exercise id {id:?} in {} and {}", first.display(), second.display())]
    DuplicateId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
}

/// Loads one exercise file, or every `*.exercise.json` below a directory
/// (sorted by path).
pub fn load_exercises(path: &FsPath) -> Result<Vec<(PathBuf, Exercise)>, LoadError> {
    let io = |path: &FsPath, e: &dyn fmt::Display| LoadError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let meta = std::fs::metadata(path).map_err(|e| io(path, &e))?;
    let mut files = Vec::new();
    if meta.is_dir() {
        for entry in walkdir::WalkDir::new(path).sort_by_file_name() {
            let entry = entry.map_err(|e| io(path, &e))?;
            let name = entry.file_name().to_string_lossy();
            if entry.file_type().is_file() && name.ends_with(".exercise.json") {
                files.push(entry.into_path());
            }
        }
    } else {
        files.push(path.to_path_buf());
    }
    let mut seen: HashMap<String, PathBuf> = HashMap::new();
    let mut out = Vec::with_capacity(files.len());
    for file in files {
        let text = std::fs::read_to_string(&file).map_err(|e| io(&file, &e))?;
        let id = serde_json::from_str::<serde_json::Value>(&text)
            .ok()
            .and_then(|v| v.get("id").and_then(|i| i.as_str()).map(str::to_string));
        let ex = Exercise::from_json(&text).map_err(|reason| LoadError::Schema {
            path: file.clone(),
            id,
            reason,
        })?;
        if let Some(first) = seen.get(&ex.id) {
            return Err(LoadError::DuplicateId {
                id: ex.id.clone(),
                first: first.clone(),
                second: file,
            });
        }
        seen.insert(ex.id.clone(), file.clone());
        out.push((file, ex));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormResult {
    pub shape: Shape,
    #[serde(with = "crate::parser::as_text")]
    pub formula: Formula,
    pub derivation: Derivation,
}

/// The structured result behind a solution document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Classify {
        classification: Classification,
        table: TruthTable,
    },
    NormalForm {
        classification: Classification,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        indices: Option<CanonicalIndexSets>,
        forms: Vec<NormalFormResult>,
    },
    Consequence {
        result: VerdictTrace,
    },
    Derivation {
        classification: Classification,
        derivation: Derivation,
    },
    Failure {
        error: String,
        resource_limit: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub format: u32,
    pub id: String,
    pub statement: String,
    /// Worked steps, one law-annotated line each.
    pub lines: Vec<String>,
    /// Final answer lines, Spanish labels.
    pub answer: Vec<String>,
    /// The same answer with English labels.
    pub answer_en: Vec<String>,
    pub mismatches: Vec<Mismatch>,
    pub outcome: Outcome,
}

/// How a document should affect a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Mismatch,
    Failed,
    ResourceLimit,
}

pub fn sigma(ix: &[u64]) -> String {
    format!("Σm({})", join(ix))
}

pub fn pi(ix: &[u64]) -> String {
    format!("ΠM({})", join(ix))
}

fn join(ix: &[u64]) -> String {
    ix.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

impl SolutionDocument {
    pub fn status(&self) -> Status {
        match &self.outcome {
            Outcome::Failure {
                resource_limit: true, ..
            } => Status::ResourceLimit,
            Outcome::Failure { .. } => Status::Failed,
            _ if !self.mismatches.is_empty() => Status::Mismatch,
            _ => Status::Solved,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("Ejercicio {}\n{}\n", self.id, self.statement);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for l in &self.answer {
            out.push_str(l);
            out.push('\n');
        }
        if !self.answer_en.is_empty() {
            out.push_str(&format!("({})\n", self.answer_en.join("; ")));
        }
        for m in &self.mismatches {
            out.push_str(&format!(
                "✗ {}: se esperaba {}, se obtuvo {}\n",
                m.field, m.expected, m.actual
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

fn principal_kind(shape: Shape) -> Option<CanonicalKind> {
    match shape {
        Shape::Fndp => Some(CanonicalKind::Fndp),
        Shape::Fncp => Some(CanonicalKind::Fncp),
        _ => None,
    }
}

struct Draft {
    lines: Vec<String>,
    answer: Vec<String>,
    answer_en: Vec<String>,
    mismatches: Vec<Mismatch>,
}

impl Draft {
    fn compare<T: PartialEq + fmt::Debug>(
        &mut self,
        field: &str,
        expected: &Option<T>,
        actual: &T,
        show: impl Fn(&T) -> String,
    ) {
        if let Some(e) = expected {
            if e != actual {
                self.mismatches.push(Mismatch {
                    field: field.into(),
                    expected: show(e),
                    actual: show(actual),
                });
            }
        }
    }
}

fn solve_inner(e: &Exercise, limits: &Limits, d: &mut Draft) -> Result<Outcome, Error> {
    let statement = e
        .statement()
        .map_err(|_| Error::Unsupported("statement does not parse"))?;
    let x = &e.expected;
    let class_show = |c: &Classification| c.spanish().to_string();
    match (&e.kind, statement) {
        (ExerciseKind::Classify, Statement::Formula(f)) => {
            let table = truth_table(&f, &f.atoms(), limits)?;
            let c = table.classification();
            d.lines.extend(table.render(&f.to_string()).lines().map(str::to_string));
            d.answer.push(format!("∴ {}", c.spanish()));
            d.answer_en.push(c.english().into());
            d.compare("classification", &x.classification, &c, class_show);
            Ok(Outcome::Classify {
                classification: c,
                table,
            })
        }
        (ExerciseKind::NormalForm { forms, .. }, Statement::Formula(f)) => {
            let order = e.order().expect("formula statement");
            let c = classify_with(&f, limits)?;
            let wants_indices =
                forms.iter().any(|s| principal_kind(*s).is_some()) || x.minterms.is_some() || x.maxterms.is_some();
            let indices = if wants_indices {
                Some(index_sets_with(&f, &order, limits)?)
            } else {
                None
            };
            let mut results = Vec::new();
            for &shape in forms {
                let (formula, derivation) = match shape {
                    Shape::Nnf => to_nnf(&f),
                    Shape::Dnf => {
                        let (nf, dv) = to_dnf_with(&f, limits)?;
                        (nf.to_formula(), dv)
                    }
                    Shape::Cnf => {
                        let (nf, dv) = to_cnf_with(&f, limits)?;
                        (nf.to_formula(), dv)
                    }
                    Shape::Fndp | Shape::Fncp => {
                        let kind = principal_kind(shape).unwrap();
                        let (cf, dv) = to_principal_with(&f, kind, &order, limits)?;
                        (cf.to_formula(), dv)
                    }
                };
                d.lines.push(format!("{}:", shape_title(shape)));
                d.lines.extend(derivation.render_lines());
                results.push(NormalFormResult {
                    shape,
                    formula,
                    derivation,
                });
            }
            if let Some(ix) = &indices {
                d.answer.push(sigma(&ix.minterms));
                d.answer.push(pi(&ix.maxterms));
                d.answer_en.push(format!("minterms {}", join(&ix.minterms)));
                d.answer_en.push(format!("maxterms {}", join(&ix.maxterms)));
                d.compare("minterms", &x.minterms, &ix.minterms, |v| sigma(v));
                d.compare("maxterms", &x.maxterms, &ix.maxterms, |v| pi(v));
            }
            d.answer.push(format!("∴ {}", c.spanish()));
            d.answer_en.push(c.english().into());
            d.compare("classification", &x.classification, &c, class_show);
            Ok(Outcome::NormalForm {
                classification: c,
                indices,
                forms: results,
            })
        }
        (ExerciseKind::Consequence { method }, Statement::Argument(arg)) => {
            let result = check(&arg, *method, limits)?;
            d.lines.push(method.spanish().to_string());
            let mut rendered = result.render();
            rendered.pop();
            d.lines.extend(rendered);
            d.answer.push(result.verdict.spanish().into());
            d.answer_en.push(result.verdict.english().into());
            d.compare("verdict", &x.verdict, &result.verdict, |v| v.spanish().to_string());
            Ok(Outcome::Consequence { result })
        }
        (ExerciseKind::DerivationGoal { goal }, Statement::Formula(f)) => {
            let c = classify_with(&f, limits)?;
            let mut derivation = match goal {
                Goal::Formula(g) if g.is_const(true) || g.is_const(false) => {
                    auto_derive_with(&f, AutoGoal::Constant, limits)?
                }
                Goal::Formula(_) => return Err(Error::Unsupported("derivations toward an arbitrary formula")),
                Goal::Shape { shape, order } => match principal_kind(*shape) {
                    Some(kind) => {
                        let order = order.clone().unwrap_or_else(|| f.atoms());
                        to_principal_with(&f, kind, &order, limits)?.1
                    }
                    None => {
                        let g = match shape {
                            Shape::Nnf => AutoGoal::Nnf,
                            Shape::Dnf => AutoGoal::Dnf,
                            _ => AutoGoal::Cnf,
                        };
                        auto_derive_with(&f, g, limits)?
                    }
                },
            };
            derivation.goal = Some(goal.clone());
            if !goal.reached_by(derivation.final_formula(), &f) {
                return Err(Error::Unsupported("the requested constant does not match the formula"));
            }
            d.lines.extend(derivation.render_lines());
            d.answer.push(format!("∴ {}", c.spanish()));
            d.answer_en.push(c.english().into());
            d.compare("classification", &x.classification, &c, class_show);
            Ok(Outcome::Derivation {
                classification: c,
                derivation,
            })
        }
        _ => Err(Error::Unsupported("statement does not fit the exercise kind")),
    }
}

fn shape_title(shape: Shape) -> &'static str {
    match shape {
        Shape::Nnf => "FNN",
        Shape::Dnf => "FND",
        Shape::Cnf => "FNC",
        Shape::Fndp => "FNDP",
        Shape::Fncp => "FNCP",
    }
}

pub fn solve(e: &Exercise) -> SolutionDocument {
    solve_with(e, &Limits::from_env())
}

/// Works the exercise and compares against `expected`. Engine errors come
/// back as a failure document rather than an `Err`.
pub fn solve_with(e: &Exercise, limits: &Limits) -> SolutionDocument {
    let mut d = Draft {
        lines: Vec::new(),
        answer: Vec::new(),
        answer_en: Vec::new(),
        mismatches: Vec::new(),
    };
    let outcome = match solve_inner(e, limits, &mut d) {
        Ok(o) => o,
        Err(err) => {
            d.answer = vec![format!("Error: {err}")];
            d.answer_en = vec![err.to_string()];
            Outcome::Failure {
                error: err.to_string(),
                resource_limit: err.is_resource_limit(),
            }
        }
    };
    SolutionDocument {
        format: 1,
        id: e.id.clone(),
        statement: e.statement.clone(),
        lines: d.lines,
        answer: d.answer,
        answer_en: d.answer_en,
        mismatches: d.mismatches,
        outcome,
    }
}

/// Re-checks a document's machine block against its exercise without
/// trusting the solver: derivations replay, index sets and verdicts match
/// the truth-table oracle.
pub fn verify_document(e: &Exercise, doc: &SolutionDocument, limits: &Limits) -> Result<(), String> {
    if doc.id != e.id {
        return Err("document belongs to another exercise".into());
    }
    let check_derivation = |d: &Derivation, start: &Formula| -> Result<(), String> {
        if &d.start != start {
            return Err("derivation does not start at the statement".into());
        }
        let r = validate_derivation_with(d, Mode::Strict, limits);
        match r.first_failure() {
            Some(s) => Err(format!("step {}: {}", s.index, s.error.clone().unwrap_or_default())),
            None if r.goal_reached == Some(false) => Err("goal not reached".into()),
            None => Ok(()),
        }
    };
    let oracle_class = |f: &Formula| classify_with(f, limits).map_err(|e| e.to_string());
    match (&doc.outcome, e.statement()?) {
        (Outcome::Failure { .. }, _) => Ok(()),
        (Outcome::Classify { classification, table }, Statement::Formula(f)) => {
            let fresh = truth_table(&f, &f.atoms(), limits).map_err(|e| e.to_string())?;
            if &fresh != table || fresh.classification() != *classification {
                return Err("truth table or classification differs".into());
            }
            Ok(())
        }
        (
            Outcome::NormalForm {
                classification,
                indices,
                forms,
            },
            Statement::Formula(f),
        ) => {
            if oracle_class(&f)? != *classification {
                return Err("classification differs".into());
            }
            let order = e.order().expect("formula statement");
            let fresh = index_sets_with(&f, &order, limits).map_err(|e| e.to_string())?;
            if indices.as_ref().is_some_and(|ix| ix != &fresh) {
                return Err("index sets differ".into());
            }
            for r in forms {
                check_derivation(&r.derivation, &f)?;
                if r.derivation.final_formula() != &r.formula {
                    return Err(format!("{:?}: result differs from the derivation", r.shape));
                }
                let ok = match principal_kind(r.shape) {
                    Some(kind) => {
                        let want = if kind == CanonicalKind::Fndp {
                            &fresh.minterms
                        } else {
                            &fresh.maxterms
                        };
                        let mut got = canonical_indices(&r.formula, kind, &order).unwrap_or_default();
                        got.sort();
                        &got == want
                    }
                    None => Goal::shape(r.shape).reached_by(&r.formula, &f),
                };
                if !ok {
                    return Err(format!("{:?}: not in the requested form", r.shape));
                }
            }
            Ok(())
        }
        (Outcome::Consequence { result }, Statement::Argument(arg)) => {
            result.replay_with(&arg, limits).map_err(|e| e.to_string())?;
            let entailed = crate::semantics::countermodel(&arg.premises, &arg.conclusion, limits)
                .map_err(|e| e.to_string())?
                .is_none();
            let contradicts = match result.verdict {
                Verdict::Valid => !entailed,
                Verdict::Invalid => entailed,
                Verdict::Inconclusive => false,
            };
            if contradicts {
                return Err("verdict contradicts the oracle".into());
            }
            Ok(())
        }
        (
            Outcome::Derivation {
                classification,
                derivation,
            },
            Statement::Formula(f),
        ) => {
            if oracle_class(&f)? != *classification {
                return Err("classification differs".into());
            }
            check_derivation(derivation, &f)
        }
        _ => Err("outcome does not fit the exercise".into()),
    }
}
