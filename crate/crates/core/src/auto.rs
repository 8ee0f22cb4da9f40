//! Automatic derivations: reduce a formula to a constant or a normal form
//! using only catalog laws.

use serde::{Deserialize, Serialize};

use crate::derivation::{Derivation, Goal, Shape};
use crate::formula::Formula;
use crate::normal_forms::{to_cnf_with, to_dnf_with, to_nnf};
use crate::semantics::{classify_with, Classification};
use crate::{Error, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoGoal {
    /// T for a tautology, F for a contradiction.
    Constant,
    Nnf,
    Dnf,
    Cnf,
}

pub fn auto_derive(f: &Formula, goal: AutoGoal) -> Result<Derivation, Error> {
    auto_derive_with(f, goal, &Limits::default())
}

pub fn auto_derive_with(f: &Formula, goal: AutoGoal, limits: &Limits) -> Result<Derivation, Error> {
    match goal {
        AutoGoal::Nnf => Ok(to_nnf(f).1),
        AutoGoal::Dnf => Ok(to_dnf_with(f, limits)?.1),
        AutoGoal::Cnf => Ok(to_cnf_with(f, limits)?.1),
        AutoGoal::Constant => {
            // A tautology's CNF has no clauses left and a contradiction's DNF
            // has no terms, so the normal-form engine ends at the constant.
            let (mut d, value) = match classify_with(f, limits)? {
                Classification::Contingency => return Err(Error::NotConstant),
                Classification::Tautology => (to_cnf_with(f, limits)?.1, true),
                Classification::Contradiction => (to_dnf_with(f, limits)?.1, false),
            };
            let want = Formula::constant(value);
            assert_eq!(d.final_formula(), &want, "normal form of a constant formula");
            d.goal = Some(Goal::Formula(want));
            Ok(d)
        }
    }
}

impl AutoGoal {
    pub fn shape(self) -> Option<Shape> {
        match self {
            AutoGoal::Constant => None,
            AutoGoal::Nnf => Some(Shape::Nnf),
            AutoGoal::Dnf => Some(Shape::Dnf),
            AutoGoal::Cnf => Some(Shape::Cnf),
        }
    }
}
