//! Forced-truth-value propagation for the direct and indirect methods.
//!
//! Facts are formulas with a known value. New facts come from splitting
//! compound facts, from the usual one-step rules (modus ponens, tollens,
//! disjunctive syllogism, ...), from substituting one fact's value into
//! another, and, when nothing else moves, from combining two true facts
//! into the clauses of their conjunction. The engine never guesses: it
//! answers Invalid only when the forced atoms already form a countermodel.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Argument, Method, ReplayError, Trace, Verdict, VerdictTrace};
use crate::ac::Ac;
use crate::formula::{Connective, Formula};
use crate::normal_forms::{to_cnf_with, to_dnf_with};
use crate::semantics::{check_order, countermodel, Assignment};
use crate::{Error, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactRule {
    Premise,
    NegatedConclusion,
    Decomposition,
    ModusPonens,
    ModusTollens,
    DisjunctiveSyllogism,
    ConjunctFalse,
    Biconditional,
    Substitution,
    Evaluation,
    Combination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub id: usize,
    #[serde(with = "crate::parser::as_text")]
    pub formula: Formula,
    pub value: bool,
    pub rule: FactRule,
    pub from: Vec<usize>,
}

fn refs(ids: &[usize]) -> String {
    ids.iter().map(|i| format!("[{i}]")).collect::<Vec<_>>().join(", ")
}

impl Fact {
    pub fn render(&self) -> String {
        let why = match self.rule {
            FactRule::Premise => "Premisa".to_string(),
            FactRule::NegatedConclusion => "Se supone la conclusión falsa".to_string(),
            FactRule::Substitution => format!("Sust [{}] en [{}]", self.from[0], self.from[1]),
            FactRule::Combination => format!("Distributiva sobre {}", refs(&self.from)),
            FactRule::Evaluation => format!("Evaluación con {}", refs(&self.from)),
            _ => format!("De {}", refs(&self.from)),
        };
        let text = match &self.formula {
            f @ Formula::Binary { .. } => format!("({f})"),
            f => f.to_string(),
        };
        format!(
            "[{}] {} ≡ {}    {}",
            self.id,
            text,
            if self.value { "T" } else { "F" },
            why
        )
    }
}

struct Engine<'a> {
    facts: Vec<Fact>,
    index: HashMap<Ac, usize>,
    contradiction: Option<(usize, usize)>,
    substituted: HashSet<(usize, usize)>,
    combined: HashSet<(usize, usize)>,
    combine_left: usize,
    limits: &'a Limits,
}

fn simplify_consts(f: &Formula) -> Formula {
    match f {
        Formula::Const { .. } | Formula::Atom { .. } => f.clone(),
        Formula::Not { child } => match simplify_consts(child) {
            Formula::Const { value } => Formula::constant(!value),
            c => Formula::not(c),
        },
        Formula::Binary { op, left, right } => {
            let (l, r) = (simplify_consts(left), simplify_consts(right));
            let (lc, rc) = (const_of(&l), const_of(&r));
            match op {
                Connective::And => match (lc, rc) {
                    (Some(false), _) | (_, Some(false)) => Formula::FALSE,
                    (Some(true), _) => r,
                    (_, Some(true)) => l,
                    _ => Formula::and(l, r),
                },
                Connective::Or => match (lc, rc) {
                    (Some(true), _) | (_, Some(true)) => Formula::TRUE,
                    (Some(false), _) => r,
                    (_, Some(false)) => l,
                    _ => Formula::or(l, r),
                },
                Connective::Implies => match (lc, rc) {
                    (Some(false), _) | (_, Some(true)) => Formula::TRUE,
                    (Some(true), _) => r,
                    (_, Some(false)) => simplify_consts(&Formula::not(l)),
                    _ => Formula::implies(l, r),
                },
                Connective::Iff => match (lc, rc) {
                    (Some(a), Some(b)) => Formula::constant(a == b),
                    (Some(true), _) => r,
                    (_, Some(true)) => l,
                    (Some(false), _) => simplify_consts(&Formula::not(r)),
                    (_, Some(false)) => simplify_consts(&Formula::not(l)),
                    _ => Formula::iff(l, r),
                },
            }
        }
    }
}

fn const_of(f: &Formula) -> Option<bool> {
    match f {
        Formula::Const { value } => Some(*value),
        _ => None,
    }
}

/// Replaces every node AC-equal to `key` (below the root) by `value`.
fn substitute(f: &Formula, key: &Ac, value: bool, at_root: bool) -> Formula {
    if !at_root && &Ac::from_formula(f) == key {
        return Formula::constant(value);
    }
    match f {
        Formula::Const { .. } | Formula::Atom { .. } => f.clone(),
        Formula::Not { child } => Formula::not(substitute(child, key, value, false)),
        Formula::Binary { op, left, right } => Formula::binary(
            *op,
            substitute(left, key, value, false),
            substitute(right, key, value, false),
        ),
    }
}

fn is_literal_or_const(f: &Formula) -> bool {
    f.as_literal().is_some() || const_of(f).is_some()
}

impl<'a> Engine<'a> {
    fn new(limits: &'a Limits) -> Self {
        Engine {
            facts: Vec::new(),
            index: HashMap::new(),
            contradiction: None,
            substituted: HashSet::new(),
            combined: HashSet::new(),
            combine_left: limits.combine_budget,
            limits,
        }
    }

    fn add(&mut self, formula: Formula, value: bool, rule: FactRule, from: Vec<usize>) -> bool {
        if self.contradiction.is_some() {
            return false;
        }
        let key = Ac::from_formula(&formula);
        let clash = match (const_of(&formula), self.index.get(&key)) {
            (Some(c), _) if c == value => return false,
            (Some(_), _) => Some(None),
            (None, Some(&k)) if self.facts[k].value == value => return false,
            (None, Some(&k)) => Some(Some(self.facts[k].id)),
            (None, None) => None,
        };
        let id = self.facts.len() + 1;
        self.facts.push(Fact {
            id,
            formula,
            value,
            rule,
            from,
        });
        match clash {
            Some(other) => self.contradiction = Some((other.unwrap_or(id), id)),
            None => {
                self.index.insert(key, id - 1);
            }
        }
        true
    }

    fn known(&self, f: &Formula) -> Option<(bool, usize)> {
        self.index
            .get(&Ac::from_formula(f))
            .map(|&k| (self.facts[k].value, self.facts[k].id))
    }

    /// Three-valued evaluation from the known facts; `cites` collects the
    /// facts it used.
    fn kleene(&self, f: &Formula, top: bool, cites: &mut Vec<usize>) -> Option<bool> {
        if !top {
            if let Some((v, id)) = self.known(f) {
                cites.push(id);
                return Some(v);
            }
        }
        match f {
            Formula::Const { value } => Some(*value),
            Formula::Atom { .. } => None,
            Formula::Not { child } => self.kleene(child, false, cites).map(|v| !v),
            Formula::Binary { op, left, right } => {
                let a = self.kleene(left, false, cites);
                let b = self.kleene(right, false, cites);
                match op {
                    Connective::And => match (a, b) {
                        (Some(false), _) | (_, Some(false)) => Some(false),
                        (Some(true), Some(true)) => Some(true),
                        _ => None,
                    },
                    Connective::Or => match (a, b) {
                        (Some(true), _) | (_, Some(true)) => Some(true),
                        (Some(false), Some(false)) => Some(false),
                        _ => None,
                    },
                    Connective::Implies => match (a, b) {
                        (Some(false), _) | (_, Some(true)) => Some(true),
                        (Some(true), Some(false)) => Some(false),
                        _ => None,
                    },
                    Connective::Iff => match (a, b) {
                        (Some(x), Some(y)) => Some(x == y),
                        _ => None,
                    },
                }
            }
        }
    }

    /// Applies the one-step rules to fact `i`.
    fn propagate(&mut self, i: usize) {
        let Fact { id, formula, value, .. } = self.facts[i].clone();
        match &formula {
            Formula::Not { child } => {
                self.add((**child).clone(), !value, FactRule::Decomposition, vec![id]);
            }
            Formula::Binary { op, left, right } => {
                let (l, r) = ((**left).clone(), (**right).clone());
                match (op, value) {
                    (Connective::And, true) | (Connective::Or, false) => {
                        self.add(l, value, FactRule::Decomposition, vec![id]);
                        self.add(r, value, FactRule::Decomposition, vec![id]);
                    }
                    (Connective::Implies, false) => {
                        self.add(l, true, FactRule::Decomposition, vec![id]);
                        self.add(r, false, FactRule::Decomposition, vec![id]);
                    }
                    (Connective::Implies, true) => {
                        if let Some((true, k)) = self.known(&l) {
                            self.add(r.clone(), true, FactRule::ModusPonens, vec![id, k]);
                        }
                        if let Some((false, k)) = self.known(&r) {
                            self.add(l, false, FactRule::ModusTollens, vec![id, k]);
                        }
                    }
                    (Connective::Or, true) | (Connective::And, false) => {
                        let rule = if *op == Connective::Or {
                            FactRule::DisjunctiveSyllogism
                        } else {
                            FactRule::ConjunctFalse
                        };
                        if let Some((v, k)) = self.known(&l) {
                            if v != value {
                                self.add(r.clone(), value, rule, vec![id, k]);
                            }
                        }
                        if let Some((v, k)) = self.known(&r) {
                            if v != value {
                                self.add(l, value, rule, vec![id, k]);
                            }
                        }
                    }
                    (Connective::Iff, _) => {
                        if let Some((v, k)) = self.known(&l) {
                            self.add(r.clone(), v == value, FactRule::Biconditional, vec![id, k]);
                        }
                        if let Some((v, k)) = self.known(&r) {
                            self.add(l, v == value, FactRule::Biconditional, vec![id, k]);
                        }
                    }
                }
            }
            _ => {}
        }
        let mut cites = Vec::new();
        if let Some(w) = self.kleene(&formula, true, &mut cites) {
            if w != value {
                cites.sort();
                cites.dedup();
                self.add(formula, w, FactRule::Evaluation, cites);
            }
        }
    }

    fn substitute_round(&mut self) -> bool {
        let n = self.facts.len();
        for i in 0..n {
            if is_literal_or_const(&self.facts[i].formula) {
                continue;
            }
            for j in 0..n {
                if i == j || self.substituted.contains(&(j, i)) {
                    continue;
                }
                let key = Ac::from_formula(&self.facts[j].formula);
                let subbed = substitute(&self.facts[i].formula, &key, self.facts[j].value, true);
                if subbed == self.facts[i].formula {
                    continue;
                }
                self.substituted.insert((j, i));
                let out = simplify_consts(&subbed);
                let (vi, idi, idj) = (self.facts[i].value, self.facts[i].id, self.facts[j].id);
                if self.add(out, vi, FactRule::Substitution, vec![idj, idi]) {
                    return true;
                }
            }
        }
        false
    }

    /// Clauses of `a ∧ b` after a round trip through DNF, which makes them
    /// include the resolvents of the two facts.
    fn combine_round(&mut self) -> bool {
        let mut small = self.limits.clone();
        small.step_limit = 4000;
        small.term_cap = 256;
        let trues: Vec<usize> = (0..self.facts.len())
            .filter(|&k| self.facts[k].value && !is_literal_or_const(&self.facts[k].formula))
            .collect();
        for (pos, &b) in trues.iter().enumerate() {
            for &a in &trues[..pos] {
                if self.combine_left == 0 {
                    return false;
                }
                if !self.combined.insert((a, b)) {
                    continue;
                }
                self.combine_left -= 1;
                let both = Formula::and(self.facts[a].formula.clone(), self.facts[b].formula.clone());
                let Ok((dnf, _)) = to_dnf_with(&both, &small) else {
                    continue;
                };
                let Ok((cnf, _)) = to_cnf_with(&dnf.to_formula(), &small) else {
                    continue;
                };
                let (ida, idb) = (self.facts[a].id, self.facts[b].id);
                let mut added = false;
                for clause in &cnf.terms {
                    let f = Formula::disjunction(clause.iter().map(|l| l.to_formula()));
                    added |= self.add(f, true, FactRule::Combination, vec![ida, idb]);
                }
                if added {
                    return true;
                }
            }
        }
        false
    }

    fn saturate(&mut self, goal: Option<&Formula>) {
        let mut done = 0;
        loop {
            while done < self.facts.len() && self.contradiction.is_none() {
                self.propagate(done);
                done += 1;
            }
            if self.contradiction.is_some() {
                return;
            }
            if let Some(g) = goal {
                if let Some((true, _)) = self.known(g) {
                    return;
                }
                let mut cites = Vec::new();
                if self.kleene(g, false, &mut cites) == Some(true) {
                    cites.sort();
                    cites.dedup();
                    self.add(g.clone(), true, FactRule::Evaluation, cites);
                    return;
                }
            }
            // Revisit earlier facts once new values are known.
            let before = self.facts.len();
            for i in 0..before {
                self.propagate(i);
            }
            if self.facts.len() > before {
                continue;
            }
            if self.substitute_round() || self.combine_round() {
                continue;
            }
            return;
        }
    }

    fn forced_countermodel(&self, arg: &Argument) -> Option<Assignment> {
        let mut a = Assignment::default();
        for v in arg.atoms() {
            let (value, _) = self.known(&Formula::var(v.clone()))?;
            a.set(v, value);
        }
        arg.is_countermodel(&a).then_some(a)
    }
}

fn run(arg: &Argument, method: Method, limits: &Limits) -> Result<VerdictTrace, Error> {
    check_order(&arg.atoms(), limits)?;
    let mut e = Engine::new(limits);
    for p in &arg.premises {
        e.add(p.clone(), true, FactRule::Premise, Vec::new());
    }
    let goal = if method == Method::Indirect {
        e.add(arg.conclusion.clone(), false, FactRule::NegatedConclusion, Vec::new());
        None
    } else {
        Some(&arg.conclusion)
    };
    e.saturate(goal);
    let proved =
        e.contradiction.is_some() || (method == Method::Direct && matches!(e.known(&arg.conclusion), Some((true, _))));
    let (verdict, countermodel) = if proved {
        (Verdict::Valid, None)
    } else {
        match e.forced_countermodel(arg) {
            Some(a) => (Verdict::Invalid, Some(a)),
            None => (Verdict::Inconclusive, None),
        }
    };
    Ok(VerdictTrace {
        method,
        verdict,
        countermodel,
        trace: Trace::Facts {
            facts: e.facts,
            contradiction: e.contradiction,
        },
    })
}

pub fn check_direct(arg: &Argument) -> Result<VerdictTrace, Error> {
    check_direct_with(arg, &Limits::default())
}

/// Assumes the premises true and propagates until the conclusion is forced.
pub fn check_direct_with(arg: &Argument, limits: &Limits) -> Result<VerdictTrace, Error> {
    run(arg, Method::Direct, limits)
}

pub fn check_indirect(arg: &Argument) -> Result<VerdictTrace, Error> {
    check_indirect_with(arg, &Limits::default())
}

/// Assumes the conclusion false and propagates until a value clash.
pub fn check_indirect_with(arg: &Argument, limits: &Limits) -> Result<VerdictTrace, Error> {
    run(arg, Method::Indirect, limits)
}

fn as_claim(f: &Fact) -> Formula {
    if f.value {
        f.formula.clone()
    } else {
        Formula::not(f.formula.clone())
    }
}

pub(super) fn replay(
    arg: &Argument,
    method: Method,
    verdict: Verdict,
    facts: &[Fact],
    contradiction: Option<(usize, usize)>,
    limits: &Limits,
) -> Result<(), ReplayError> {
    let bad = |step: usize, reason: &str| ReplayError::Step {
        step,
        reason: reason.to_string(),
    };
    for (k, f) in facts.iter().enumerate() {
        if f.id != k + 1 {
            return Err(bad(f.id, "facts are numbered out of order"));
        }
        match f.rule {
            FactRule::Premise => {
                if !f.value || !arg.premises.contains(&f.formula) {
                    return Err(bad(f.id, "not a premise"));
                }
            }
            FactRule::NegatedConclusion => {
                if method != Method::Indirect || f.value || f.formula != arg.conclusion {
                    return Err(bad(f.id, "not the negated conclusion"));
                }
            }
            _ => {
                if f.from.is_empty() && const_of(&f.formula).is_none() {
                    return Err(bad(f.id, "derived fact cites nothing"));
                }
                let mut cited = Vec::new();
                for &c in &f.from {
                    if c == 0 || c >= f.id {
                        return Err(bad(f.id, "cites a later fact"));
                    }
                    cited.push(as_claim(&facts[c - 1]));
                }
                if countermodel(&cited, &as_claim(f), limits)
                    .map_err(Error::from)?
                    .is_some()
                {
                    return Err(bad(f.id, "does not follow from the cited facts"));
                }
            }
        }
    }
    let clash = match contradiction {
        Some((a, b)) => {
            let (fa, fb) = match (facts.get(a.wrapping_sub(1)), facts.get(b.wrapping_sub(1))) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(ReplayError::Verdict("contradiction cites a missing fact".into())),
            };
            let ok = if a == b {
                const_of(&fa.formula) == Some(!fa.value)
            } else {
                Ac::from_formula(&fa.formula) == Ac::from_formula(&fb.formula) && fa.value != fb.value
            };
            if !ok {
                return Err(ReplayError::Verdict("the cited facts do not clash".into()));
            }
            true
        }
        None => false,
    };
    let concluded = facts
        .iter()
        .any(|f| f.value && Ac::from_formula(&f.formula) == Ac::from_formula(&arg.conclusion));
    let valid = clash || (method == Method::Direct && concluded);
    if valid != (verdict == Verdict::Valid) {
        return Err(ReplayError::Verdict("verdict disagrees with the facts".into()));
    }
    Ok(())
}
