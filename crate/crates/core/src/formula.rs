//! Formula syntax trees, literals and subformula addressing.
//!
//! Trees are persistent: children are reference counted, so the rewrite
//! operations share every subtree they do not touch. Cloning a formula is
//! O(1).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A propositional variable name: a letter followed by letters, digits or
/// underscores. Names are case sensitive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Var(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid variable name {0:?}")]
pub struct InvalidVar(pub String);

impl Var {
    pub fn new(name: &str) -> Result<Self, InvalidVar> {
        if Self::is_valid(name) {
            Ok(Var(Arc::from(name)))
        } else {
            Err(InvalidVar(name.to_string()))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_alphanumeric() || c == '_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Var {
    type Error = InvalidVar;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Var::new(&s)
    }
}

impl From<Var> for String {
    fn from(v: Var) -> String {
        v.0.to_string()
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub const ALL: [Connective; 4] = [Connective::And, Connective::Or, Connective::Implies, Connective::Iff];

    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "∧",
            Connective::Or => "∨",
            Connective::Implies => "→",
            Connective::Iff => "↔",
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "->",
            Connective::Iff => "<->",
        }
    }

    /// Binding strength; larger binds tighter. Negation sits above all of these.
    pub fn precedence(self) -> u8 {
        match self {
            Connective::Iff => 1,
            Connective::Implies => 2,
            Connective::Or => 3,
            Connective::And => 4,
        }
    }

    pub fn is_right_assoc(self) -> bool {
        matches!(self, Connective::Implies | Connective::Iff)
    }

    /// The dual of ∧ is ∨ and vice versa.
    pub fn dual(self) -> Option<Connective> {
        match self {
            Connective::And => Some(Connective::Or),
            Connective::Or => Some(Connective::And),
            _ => None,
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Connective::And => a && b,
            Connective::Or => a || b,
            Connective::Implies => !a || b,
            Connective::Iff => a == b,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Formula {
    Const {
        value: bool,
    },
    Atom {
        name: Var,
    },
    Not {
        child: Arc<Formula>,
    },
    Binary {
        op: Connective,
        left: Arc<Formula>,
        right: Arc<Formula>,
    },
}

/// A child-index path from the root. `0` is the only child of a negation or
/// the left child of a binary node, `1` the right child.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn child(&self, i: usize) -> Path {
        let mut steps = self.0.clone();
        steps.push(i);
        Path(steps)
    }

    pub fn join(&self, rest: &[usize]) -> Path {
        let mut steps = self.0.clone();
        steps.extend_from_slice(rest);
        Path(steps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl From<Vec<usize>> for Path {
    fn from(v: Vec<usize>) -> Self {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("path {path} leaves the formula at step {depth}")]
pub struct PathOutOfRange {
    pub path: Path,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Var,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Var) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: Var) -> Self {
        Literal { atom, negated: true }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom {
            name: self.atom.clone(),
        };
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

impl Formula {
    pub const TRUE: Formula = Formula::Const { value: true };
    pub const FALSE: Formula = Formula::Const { value: false };

    pub fn constant(value: bool) -> Self {
        Formula::Const { value }
    }

    /// Builds an atom, panicking on an invalid name. Use [`Var::new`] for
    /// untrusted input.
    pub fn atom(name: &str) -> Self {
        Formula::Atom {
            name: Var::new(name).expect("valid variable name"),
        }
    }

    pub fn var(name: Var) -> Self {
        Formula::Atom { name }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Formula) -> Self {
        Formula::Not { child: Arc::new(child) }
    }

    pub fn binary(op: Connective, left: Formula, right: Formula) -> Self {
        Formula::Binary {
            op,
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::And, left, right)
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Or, left, right)
    }

    pub fn implies(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Implies, left, right)
    }

    pub fn iff(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Iff, left, right)
    }

    /// Left-nested conjunction; the empty conjunction is `T`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        Self::chain(Connective::And, items).unwrap_or(Formula::TRUE)
    }

    /// Left-nested disjunction; the empty disjunction is `F`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        Self::chain(Connective::Or, items).unwrap_or(Formula::FALSE)
    }

    fn chain<I: IntoIterator<Item = Formula>>(op: Connective, items: I) -> Option<Self> {
        items.into_iter().reduce(|acc, next| Formula::binary(op, acc, next))
    }

    pub fn is_const(&self, value: bool) -> bool {
        matches!(self, Formula::Const { value: v } if *v == value)
    }

    pub fn as_binary(&self, want: Connective) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Binary { op, left, right } if *op == want => Some((left, right)),
            _ => None,
        }
    }

    pub fn as_not(&self) -> Option<&Formula> {
        match self {
            Formula::Not { child } => Some(child),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom { name } => Some(Literal::pos(name.clone())),
            Formula::Not { child } => match child.as_ref() {
                Formula::Atom { name } => Some(Literal::neg(name.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Formula::Const { .. } | Formula::Atom { .. } => 0,
            Formula::Not { .. } => 1,
            Formula::Binary { .. } => 2,
        }
    }

    pub fn child(&self, i: usize) -> Option<&Formula> {
        match (self, i) {
            (Formula::Not { child }, 0) => Some(child),
            (Formula::Binary { left, .. }, 0) => Some(left),
            (Formula::Binary { right, .. }, 1) => Some(right),
            _ => None,
        }
    }

    /// Distinct atoms in ascending lexicographic order.
    pub fn atoms(&self) -> Vec<Var> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set.into_iter().collect()
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const { .. } => {}
            Formula::Atom { name } => {
                out.insert(name.clone());
            }
            Formula::Not { child } => child.collect_atoms(out),
            Formula::Binary { left, right, .. } => {
                left.collect_atoms(out);
                right.collect_atoms(out);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const { .. } | Formula::Atom { .. } => 1,
            Formula::Not { child } => 1 + child.size(),
            Formula::Binary { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const { .. } | Formula::Atom { .. } => 1,
            Formula::Not { child } => 1 + child.depth(),
            Formula::Binary { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn subformula_at(&self, path: &Path) -> Result<&Formula, PathOutOfRange> {
        let mut node = self;
        for (depth, &step) in path.0.iter().enumerate() {
            node = node.child(step).ok_or_else(|| PathOutOfRange {
                path: path.clone(),
                depth,
            })?;
        }
        Ok(node)
    }

    /// Returns a copy of `self` with the node at `path` replaced by `with`.
    pub fn replace_at(&self, path: &Path, with: Formula) -> Result<Formula, PathOutOfRange> {
        self.replace_from(path, 0, with)
    }

    fn replace_from(&self, path: &Path, depth: usize, with: Formula) -> Result<Formula, PathOutOfRange> {
        let Some(&step) = path.0.get(depth) else {
            return Ok(with);
        };
        let out_of_range = || PathOutOfRange {
            path: path.clone(),
            depth,
        };
        match (self, step) {
            (Formula::Not { child }, 0) => Ok(Formula::Not {
                child: Arc::new(child.replace_from(path, depth + 1, with)?),
            }),
            (Formula::Binary { op, left, right }, 0) => Ok(Formula::Binary {
                op: *op,
                left: Arc::new(left.replace_from(path, depth + 1, with)?),
                right: Arc::clone(right),
            }),
            (Formula::Binary { op, left, right }, 1) => Ok(Formula::Binary {
                op: *op,
                left: Arc::clone(left),
                right: Arc::new(right.replace_from(path, depth + 1, with)?),
            }),
            _ => Err(out_of_range()),
        }
    }

    /// Every node position in preorder (root first, left before right).
    pub fn positions(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack = vec![Path::root()];
        while let Some(p) = stack.pop() {
            let node = self.subformula_at(&p).expect("generated path");
            for i in (0..node.arity()).rev() {
                stack.push(p.child(i));
            }
            out.push(p);
        }
        out
    }

    /// True when only ∧, ∨, constants and negated atoms occur.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Const { .. } | Formula::Atom { .. } => true,
            Formula::Not { child } => matches!(child.as_ref(), Formula::Atom { .. }),
            Formula::Binary { op, left, right } => {
                matches!(op, Connective::And | Connective::Or) && left.is_nnf() && right.is_nnf()
            }
        }
    }

    /// Replaces every atom by the formula `f(name)` returns, if any.
    pub fn substitute(&self, f: &dyn Fn(&Var) -> Option<Formula>) -> Formula {
        match self {
            Formula::Const { .. } => self.clone(),
            Formula::Atom { name } => f(name).unwrap_or_else(|| self.clone()),
            Formula::Not { child } => Formula::not(child.substitute(f)),
            Formula::Binary { op, left, right } => Formula::binary(*op, left.substitute(f), right.substitute(f)),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print(self, crate::parser::SyntaxStyle::InfixFull))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print(self, crate::parser::SyntaxStyle::InfixMinimal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_infix;

    fn p(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    fn names(vs: Vec<Var>) -> Vec<String> {
        vs.into_iter().map(String::from).collect()
    }

    #[test]
    fn atoms_sorted_and_distinct() {
        assert_eq!(names(p("A ∨ (¬B ∧ C)").atoms()), ["A", "B", "C"]);
        assert!(p("T").atoms().is_empty());
        assert_eq!(names(p("(Q ∧ P) → Q").atoms()), ["P", "Q"]);
    }

    #[test]
    fn case_sensitive_atoms() {
        assert_eq!(names(p("P ∧ p").atoms()), ["P", "p"]);
    }

    #[test]
    fn subformula_addressing() {
        let f = p("P → (Q ∨ R)");
        assert_eq!(f.subformula_at(&Path(vec![1])).unwrap(), &p("Q ∨ R"));
        let g = p("¬(P ∧ Q)");
        assert_eq!(g.subformula_at(&Path(vec![0, 1])).unwrap(), &p("Q"));
        let err = p("P").subformula_at(&Path(vec![0])).unwrap_err();
        assert_eq!(err.depth, 0);
    }

    #[test]
    fn replace_is_value_semantics() {
        let f = p("P ∧ Q");
        let g = f.replace_at(&Path(vec![1]), p("¬Q")).unwrap();
        assert_eq!(g, p("P ∧ ¬Q"));
        assert_eq!(f, p("P ∧ Q"));
        assert_eq!(p("P").replace_at(&Path::root(), Formula::TRUE).unwrap(), Formula::TRUE);
        assert!(p("P ∨ Q").replace_at(&Path(vec![0, 0]), p("R")).is_err());
    }

    #[test]
    fn var_validation() {
        assert!(Var::new("x_1").is_ok());
        assert!(Var::new("1x").is_err());
        assert!(Var::new("").is_err());
        assert!(Var::new("a-b").is_err());
    }

    #[test]
    fn positions_preorder() {
        let f = p("¬P ∧ Q");
        let ps: Vec<Vec<usize>> = f.positions().into_iter().map(|p| p.0).collect();
        assert_eq!(ps, vec![vec![], vec![0], vec![0, 0], vec![1]]);
    }
}
