//! Truth tables, classification, canonical index sets and the exhaustive
//! equivalence / entailment oracle every other module is checked against.
//!
//! Row `i` of a table over `order` assigns `order[k]` the bit
//! `(i >> (n - 1 - k)) & 1`, so the first variable is the most significant.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Connective, Formula, Var};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("atom {0} has no value in the assignment")]
    UnboundAtom(Var),
    #[error("{count} variables exceed the cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("variable {0} is missing from the variable order")]
    MissingVariable(Var),
    #[error("variable {0} appears twice in the variable order")]
    DuplicateVariable(Var),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<Var, bool>);

impl Assignment {
    pub fn from_row(order: &[Var], row: u64) -> Self {
        let n = order.len();
        Assignment(
            order
                .iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), (row >> (n - 1 - k)) & 1 == 1))
                .collect(),
        )
    }

    pub fn get(&self, v: &Var) -> Option<bool> {
        self.0.get(v).copied()
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.0.insert(v, value);
    }

    /// `P=T, Q=F` style rendering.
    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|(v, b)| format!("{v}={}", if *b { "T" } else { "F" }))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool, SemanticsError> {
    Ok(match f {
        Formula::Const { value } => *value,
        Formula::Atom { name } => a.get(name).ok_or_else(|| SemanticsError::UnboundAtom(name.clone()))?,
        Formula::Not { child } => !evaluate(child, a)?,
        Formula::Binary { op, left, right } => op.apply(evaluate(left, a)?, evaluate(right, a)?),
    })
}

/// Postfix program for evaluating one formula on many rows.
pub(crate) struct Compiled {
    ops: Vec<Op>,
    n: usize,
}

enum Op {
    Const(bool),
    Var(usize),
    Not,
    Bin(Connective),
}

impl Compiled {
    pub(crate) fn new(f: &Formula, order: &[Var]) -> Result<Self, SemanticsError> {
        let index: HashMap<&Var, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut ops = Vec::with_capacity(f.size());
        let mut stack = vec![(f, false)];
        while let Some((node, expanded)) = stack.pop() {
            match node {
                Formula::Const { value } => ops.push(Op::Const(*value)),
                Formula::Atom { name } => {
                    let i = *index
                        .get(name)
                        .ok_or_else(|| SemanticsError::MissingVariable(name.clone()))?;
                    ops.push(Op::Var(i));
                }
                Formula::Not { child } => {
                    if expanded {
                        ops.push(Op::Not);
                    } else {
                        stack.push((node, true));
                        stack.push((child, false));
                    }
                }
                Formula::Binary { op, left, right } => {
                    if expanded {
                        ops.push(Op::Bin(*op));
                    } else {
                        stack.push((node, true));
                        stack.push((right, false));
                        stack.push((left, false));
                    }
                }
            }
        }
        Ok(Compiled { ops, n: order.len() })
    }

    pub(crate) fn eval(&self, row: u64, stack: &mut Vec<bool>) -> bool {
        stack.clear();
        for op in &self.ops {
            match op {
                Op::Const(b) => stack.push(*b),
                Op::Var(i) => stack.push((row >> (self.n - 1 - i)) & 1 == 1),
                Op::Not => {
                    let v = stack.pop().expect("operand");
                    stack.push(!v);
                }
                Op::Bin(c) => {
                    let r = stack.pop().expect("operand");
                    let l = stack.pop().expect("operand");
                    stack.push(c.apply(l, r));
                }
            }
        }
        stack.pop().expect("result")
    }
}

pub(crate) fn check_order(order: &[Var], limits: &Limits) -> Result<(), SemanticsError> {
    if order.len() > limits.var_cap {
        return Err(SemanticsError::TooManyVariables {
            count: order.len(),
            cap: limits.var_cap,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for v in order {
        if !seen.insert(v) {
            return Err(SemanticsError::DuplicateVariable(v.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub order: Vec<Var>,
    /// `values[i]` is the formula's value on row `i`.
    pub values: Vec<bool>,
}

impl TruthTable {
    pub fn rows(&self) -> impl Iterator<Item = (u64, Assignment, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as u64, Assignment::from_row(&self.order, i as u64), *v))
    }

    pub fn classification(&self) -> Classification {
        let trues = self.values.iter().filter(|v| **v).count();
        if trues == self.values.len() {
            Classification::Tautology
        } else if trues == 0 {
            Classification::Contradiction
        } else {
            Classification::Contingency
        }
    }

    pub fn index_sets(&self) -> CanonicalIndexSets {
        let (mut minterms, mut maxterms) = (Vec::new(), Vec::new());
        for (i, v) in self.values.iter().enumerate() {
            if *v {
                minterms.push(i as u64);
            } else {
                maxterms.push(i as u64);
            }
        }
        CanonicalIndexSets {
            n: self.order.len(),
            minterms,
            maxterms,
        }
    }

    /// Aligned text rendering with a header of variable names.
    pub fn render(&self, formula_text: &str) -> String {
        let widths: Vec<usize> = self.order.iter().map(|v| v.as_str().chars().count()).collect();
        let mut out = String::new();
        out.push_str("  # | ");
        for (v, w) in self.order.iter().zip(&widths) {
            out.push_str(&format!("{:>w$} ", v.as_str(), w = w));
        }
        out.push_str(&format!("| {formula_text}\n"));
        for (i, a, value) in self.rows() {
            out.push_str(&format!("{i:>3} | "));
            for (v, w) in self.order.iter().zip(&widths) {
                let bit = if a.get(v) == Some(true) { "1" } else { "0" };
                out.push_str(&format!("{bit:>w$} ", w = w));
            }
            out.push_str(&format!("| {}\n", if value { "T" } else { "F" }));
        }
        out
    }
}

pub fn truth_table(f: &Formula, order: &[Var], limits: &Limits) -> Result<TruthTable, SemanticsError> {
    check_order(order, limits)?;
    let prog = Compiled::new(f, order)?;
    let rows = 1u64 << order.len();
    let mut stack = Vec::new();
    let values = (0..rows).map(|r| prog.eval(r, &mut stack)).collect();
    Ok(TruthTable {
        order: order.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Tautology,
    Contingency,
    Contradiction,
}

impl Classification {
    pub fn spanish(self) -> &'static str {
        match self {
            Classification::Tautology => "Tautología",
            Classification::Contingency => "Contingencia",
            Classification::Contradiction => "Contradicción",
        }
    }

    pub fn english(self) -> &'static str {
        match self {
            Classification::Tautology => "tautology",
            Classification::Contingency => "contingency",
            Classification::Contradiction => "contradiction",
        }
    }

    /// Accepts the English tag or the Spanish label, accents optional.
    pub fn from_label(s: &str) -> Option<Self> {
        match crate::laws::fold_label(s).as_str() {
            "tautology" | "tautologia" => Some(Classification::Tautology),
            "contingency" | "contingencia" => Some(Classification::Contingency),
            "contradiction" | "contradiccion" => Some(Classification::Contradiction),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalIndexSets {
    pub n: usize,
    pub minterms: Vec<u64>,
    pub maxterms: Vec<u64>,
}

pub fn classify(f: &Formula) -> Result<Classification, SemanticsError> {
    classify_with(f, &Limits::default())
}

pub fn classify_with(f: &Formula, limits: &Limits) -> Result<Classification, SemanticsError> {
    Ok(truth_table(f, &f.atoms(), limits)?.classification())
}

pub fn index_sets(f: &Formula, order: &[Var]) -> Result<CanonicalIndexSets, SemanticsError> {
    index_sets_with(f, order, &Limits::default())
}

pub fn index_sets_with(f: &Formula, order: &[Var], limits: &Limits) -> Result<CanonicalIndexSets, SemanticsError> {
    Ok(truth_table(f, order, limits)?.index_sets())
}

fn union_atoms<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Var> {
    let mut set = std::collections::BTreeSet::new();
    for f in fs {
        f.collect_atoms(&mut set);
    }
    set.into_iter().collect()
}

pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool, SemanticsError> {
    equivalent_with(f, g, &Limits::default())
}

pub fn equivalent_with(f: &Formula, g: &Formula, limits: &Limits) -> Result<bool, SemanticsError> {
    let order = union_atoms([f, g]);
    check_order(&order, limits)?;
    let (pf, pg) = (Compiled::new(f, &order)?, Compiled::new(g, &order)?);
    let mut stack = Vec::new();
    Ok((0..1u64 << order.len()).all(|r| pf.eval(r, &mut stack) == pg.eval(r, &mut stack)))
}

pub fn entails(premises: &[Formula], conclusion: &Formula) -> Result<bool, SemanticsError> {
    Ok(countermodel(premises, conclusion, &Limits::default())?.is_none())
}

/// The first row (in table order) making every premise true and the
/// conclusion false, over the union of the argument's atoms.
pub fn countermodel(
    premises: &[Formula],
    conclusion: &Formula,
    limits: &Limits,
) -> Result<Option<Assignment>, SemanticsError> {
    let order = union_atoms(premises.iter().chain([conclusion]));
    check_order(&order, limits)?;
    let progs = premises
        .iter()
        .map(|p| Compiled::new(p, &order))
        .collect::<Result<Vec<_>, _>>()?;
    let goal = Compiled::new(conclusion, &order)?;
    let mut stack = Vec::new();
    for r in 0..1u64 << order.len() {
        if progs.iter().all(|p| p.eval(r, &mut stack)) && !goal.eval(r, &mut stack) {
            return Ok(Some(Assignment::from_row(&order, r)));
        }
    }
    Ok(None)
}
