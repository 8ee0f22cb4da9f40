//! Propositional logic engine: formulas, truth tables, equivalence laws,
//! normal forms with step-by-step traces, and consequence checking.

pub mod ac;
pub mod auto;
pub mod derivation;
pub mod exercise;
pub mod formula;
pub mod inference;
pub mod laws;
pub mod normal_forms;
pub mod parser;
mod rewrite;
pub mod semantics;

use thiserror::Error;

pub use ac::ac_equal;
pub use auto::{auto_derive, AutoGoal};
pub use derivation::{validate_derivation, Derivation, Goal, Mode, Shape, StepRecord, ValidationReport};
pub use exercise::{load_exercises, solve, solve_with, verify_document, Exercise, ExerciseKind, SolutionDocument};
pub use formula::{Connective, Formula, Literal, Path, PathOutOfRange, Var};
pub use inference::{check as check_argument, Argument, Method, Verdict, VerdictTrace};
pub use laws::{applicable_laws, apply_law, apply_law_with, check_step, Direction, LawId};
pub use normal_forms::{to_cnf, to_dnf, to_nnf, to_principal, CanonicalForm, CanonicalKind, CnfForm, DnfForm};
pub use parser::{parse, parse_infix, parse_polish, print, print_with, Charset, ParseError, SyntaxStyle};
pub use semantics::{
    classify, entails, equivalent, evaluate, index_sets, truth_table, Assignment, CanonicalIndexSets, Classification,
    SemanticsError, TruthTable,
};

/// Resource caps shared by every exponential or open-ended operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Most variables a truth table may range over.
    pub var_cap: usize,
    /// Most terms a DNF/CNF conversion may produce.
    pub term_cap: usize,
    /// Most variables for principal forms.
    pub expansion_var_cap: usize,
    /// Rewrite steps allowed in a normal-form trace or auto derivation.
    pub step_limit: usize,
    /// Rewrite steps allowed in a principal-form trace.
    pub trace_step_limit: usize,
    /// Budget for the pairwise fact combination of the direct method.
    pub combine_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            var_cap: 20,
            term_cap: 4096,
            expansion_var_cap: 12,
            step_limit: 20_000,
            trace_step_limit: 200_000,
            combine_budget: 64,
        }
    }
}

impl Limits {
    pub const VAR_CAP_ENV: &'static str = "DISCRETA_VAR_CAP";

    /// Defaults, with the variable cap taken from `DISCRETA_VAR_CAP` if set.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(cap) = std::env::var(Self::VAR_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            l.var_cap = cap;
        }
        l
    }
}

/// Errors from the transformation and proof engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("normal form would exceed {cap} terms (estimated {estimate})")]
    TermBlowupLimit { estimate: u128, cap: usize },
    #[error("gave up after {0} rewrite steps")]
    StepLimitExceeded(usize),
    #[error("formula is a contingency; it does not reduce to a constant")]
    NotConstant,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    /// True for the cap-style failures (too many variables, terms or steps).
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::Semantics(SemanticsError::TooManyVariables { .. })
                | Error::TermBlowupLimit { .. }
                | Error::StepLimitExceeded(_)
        )
    }
}
