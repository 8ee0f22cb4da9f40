//! Logical consequence: by definition (tautology check), by forward
//! propagation of forced truth values (direct and indirect methods), by
//! inference-rule proofs, and by resolution refutation.

mod propagation;
mod resolution;
mod rules;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::auto::{auto_derive_with, AutoGoal};
use crate::derivation::{validate_derivation_with, Derivation, Mode};
use crate::formula::{Formula, Var};
use crate::parser::{parse_infix, ParseError};
use crate::semantics::{classify_with, countermodel, evaluate, truth_table, Assignment, Classification, TruthTable};
use crate::{Error, Limits};

pub use propagation::{check_direct, check_direct_with, check_indirect, check_indirect_with, Fact, FactRule};
pub use resolution::{prove_resolution, prove_resolution_with, Clause, ClauseOrigin, ClauseRecord};
pub use rules::{check_rules_proof, InferenceRule, Justification, LineVerdict, ProofLine, RulesReport};

/// Premises P₁ … Pₙ and a conclusion Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Argument {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Argument {
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> Self {
        Argument { premises, conclusion }
    }

    /// Parses `P₁, P₂, … ⇒ Q` (also `=>`). Error positions are offsets into `text`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let (split, arrow_len) = match (text.find('⇒'), text.find("=>")) {
            (Some(i), _) => (i, '⇒'.len_utf8()),
            (None, Some(i)) => (i, 2),
            (None, None) => {
                return Err(ParseError {
                    position: text.chars().count(),
                    expected: "'⇒' before the conclusion".into(),
                    found: "end of input".into(),
                })
            }
        };
        let shift = |e: ParseError, byte_offset: usize| ParseError {
            position: e.position + text[..byte_offset].chars().count(),
            ..e
        };
        let head = &text[..split];
        let mut premises = Vec::new();
        if !head.trim().is_empty() {
            let mut offset = 0;
            for part in head.split(',') {
                premises.push(parse_infix(part).map_err(|e| shift(e, offset))?);
                offset += part.len() + 1;
            }
        }
        let tail_at = split + arrow_len;
        let conclusion = parse_infix(&text[tail_at..]).map_err(|e| shift(e, tail_at))?;
        Ok(Argument { premises, conclusion })
    }

    pub fn premise_conjunction(&self) -> Formula {
        Formula::conjunction(self.premises.iter().cloned())
    }

    /// `(P₁ ∧ … ∧ Pₙ) → Q`, a tautology exactly when the argument is valid.
    pub fn implication(&self) -> Formula {
        Formula::implies(self.premise_conjunction(), self.conclusion.clone())
    }

    pub fn atoms(&self) -> Vec<Var> {
        let mut all: Vec<Var> = self
            .premises
            .iter()
            .chain([&self.conclusion])
            .flat_map(Formula::atoms)
            .collect();
        all.sort();
        all.dedup();
        all
    }

    /// True when `a` makes every premise true and the conclusion false.
    pub fn is_countermodel(&self, a: &Assignment) -> bool {
        let holds = |f: &Formula| evaluate(f, a).unwrap_or(false);
        self.premises.iter().all(holds) && evaluate(&self.conclusion, a) == Ok(false)
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        write!(f, "{} ⇒ {}", ps.join(", "), self.conclusion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Definition,
    Direct,
    Indirect,
    #[serde(rename = "rules")]
    RulesProof,
    Resolution,
}

impl Method {
    pub fn spanish(self) -> &'static str {
        match self {
            Method::Definition => "Definición",
            Method::Direct => "Método directo",
            Method::Indirect => "Método indirecto",
            Method::RulesProof => "Reglas de inferencia",
            Method::Resolution => "Resolución",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
    Inconclusive,
}

impl Verdict {
    pub fn spanish(self) -> &'static str {
        match self {
            Verdict::Valid => "∴ CL válida",
            Verdict::Invalid => "∴ CL no válida",
            Verdict::Inconclusive => "∴ sin conclusión por este método",
        }
    }

    pub fn english(self) -> &'static str {
        match self {
            Verdict::Valid => "valid consequence",
            Verdict::Invalid => "not a valid consequence",
            Verdict::Inconclusive => "inconclusive with this method",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trace {
    None,
    Derivation {
        derivation: Derivation,
    },
    TruthTable {
        table: TruthTable,
    },
    Facts {
        facts: Vec<Fact>,
        contradiction: Option<(usize, usize)>,
    },
    Resolution {
        clauses: Vec<ClauseRecord>,
    },
    Rules {
        report: RulesReport,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictTrace {
    pub method: Method,
    pub verdict: Verdict,
    pub countermodel: Option<Assignment>,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("the verdict does not match the trace: {0}")]
    Verdict(String),
    #[error("step {step}: {reason}")]
    Step { step: usize, reason: String },
    #[error(transparent)]
    Engine(#[from] Error),
}

impl VerdictTrace {
    /// Re-checks the trace against `arg` independently of how it was built.
    pub fn replay(&self, arg: &Argument) -> Result<(), ReplayError> {
        self.replay_with(arg, &Limits::default())
    }

    pub fn replay_with(&self, arg: &Argument, limits: &Limits) -> Result<(), ReplayError> {
        if self.verdict == Verdict::Invalid {
            let cm = self
                .countermodel
                .as_ref()
                .ok_or_else(|| ReplayError::Verdict("invalid without a countermodel".into()))?;
            if !arg.is_countermodel(cm) {
                return Err(ReplayError::Verdict(format!("{} is not a countermodel", cm.render())));
            }
        }
        match &self.trace {
            Trace::None => {
                if self.verdict == Verdict::Valid {
                    return Err(ReplayError::Verdict("valid without a trace".into()));
                }
                Ok(())
            }
            Trace::Derivation { derivation } => {
                if derivation.start != arg.implication() {
                    return Err(ReplayError::Verdict("derivation does not start at the argument".into()));
                }
                let report = validate_derivation_with(derivation, Mode::Lenient, limits);
                if let Some(bad) = report.first_failure() {
                    return Err(ReplayError::Step {
                        step: bad.index,
                        reason: bad.error.clone().unwrap_or_default(),
                    });
                }
                if self.verdict == Verdict::Valid && derivation.final_formula() != &Formula::TRUE {
                    return Err(ReplayError::Verdict("derivation does not end at T".into()));
                }
                Ok(())
            }
            Trace::TruthTable { table } => {
                let fresh = truth_table(&arg.implication(), &table.order, limits).map_err(Error::from)?;
                if &fresh != table {
                    return Err(ReplayError::Verdict("truth table differs".into()));
                }
                let taut = table.classification() == Classification::Tautology;
                if taut != (self.verdict == Verdict::Valid) {
                    return Err(ReplayError::Verdict("verdict disagrees with the table".into()));
                }
                Ok(())
            }
            Trace::Facts { facts, contradiction } => {
                propagation::replay(arg, self.method, self.verdict, facts, *contradiction, limits)
            }
            Trace::Resolution { clauses } => resolution::replay(arg, self.verdict, clauses, limits),
            Trace::Rules { report } => {
                if report.valid != (self.verdict == Verdict::Valid) {
                    return Err(ReplayError::Verdict("report and verdict disagree".into()));
                }
                Ok(())
            }
        }
    }

    /// Numbered lines in the worked-solution style, ending with the verdict.
    pub fn render(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.trace {
            Trace::None => {}
            Trace::Derivation { derivation } => out.extend(derivation.render_lines()),
            Trace::TruthTable { table } => {
                out.extend(table.render("").lines().map(str::to_string));
            }
            Trace::Facts { facts, contradiction } => {
                for f in facts {
                    out.push(f.render());
                }
                if let Some((a, b)) = contradiction {
                    out.push(format!("Contradicción entre [{a}] y [{b}]"));
                }
            }
            Trace::Resolution { clauses } => {
                for c in clauses {
                    out.push(c.render());
                }
            }
            Trace::Rules { report } => {
                for l in &report.lines {
                    out.push(l.render());
                }
            }
        }
        if let Some(cm) = &self.countermodel {
            out.push(format!("Contramodelo: {}", cm.render()));
        }
        out.push(self.verdict.spanish().to_string());
        out
    }
}

pub fn check_by_definition(arg: &Argument) -> Result<VerdictTrace, Error> {
    check_by_definition_with(arg, &Limits::default())
}

/// Valid exactly when `(P₁ ∧ … ∧ Pₙ) → Q` is a tautology.
pub fn check_by_definition_with(arg: &Argument, limits: &Limits) -> Result<VerdictTrace, Error> {
    let f = arg.implication();
    let class = classify_with(&f, limits)?;
    if class == Classification::Tautology {
        let trace = match auto_derive_with(&f, AutoGoal::Constant, limits) {
            Ok(derivation) => Trace::Derivation { derivation },
            Err(_) => Trace::TruthTable {
                table: truth_table(&f, &f.atoms(), limits)?,
            },
        };
        return Ok(VerdictTrace {
            method: Method::Definition,
            verdict: Verdict::Valid,
            countermodel: None,
            trace,
        });
    }
    Ok(VerdictTrace {
        method: Method::Definition,
        verdict: Verdict::Invalid,
        countermodel: countermodel(&arg.premises, &arg.conclusion, limits)?,
        trace: Trace::None,
    })
}

/// Runs one of the automatic methods.
pub fn check(arg: &Argument, method: Method, limits: &Limits) -> Result<VerdictTrace, Error> {
    match method {
        Method::Definition => check_by_definition_with(arg, limits),
        Method::Direct => check_direct_with(arg, limits),
        Method::Indirect => check_indirect_with(arg, limits),
        Method::Resolution => prove_resolution_with(arg, limits),
        Method::RulesProof => Err(Error::Unsupported("rules proofs are checked, not generated")),
    }
}
