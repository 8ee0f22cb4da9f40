//! Negation, disjunctive and conjunctive normal forms, and the principal
//! (canonical) forms, each returned with a replayable derivation.

use serde::{Deserialize, Serialize};

use crate::derivation::{Derivation, Goal, Shape};
use crate::formula::{Connective, Formula, Literal, Var};
use crate::rewrite::{self, chain_elems, Tracer, VarOrder};
use crate::semantics::{check_order, index_sets_with, CanonicalIndexSets, SemanticsError};
use crate::{Error, Limits};

/// Terms of a DNF (products) or CNF (sums), as literal lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DnfForm {
    pub terms: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfForm {
    pub terms: Vec<Vec<Literal>>,
}

fn rebuild(terms: &[Vec<Literal>], term_op: Connective) -> Formula {
    let term = |t: &Vec<Literal>| {
        let lits = t.iter().map(Literal::to_formula);
        if term_op == Connective::And {
            Formula::conjunction(lits)
        } else {
            Formula::disjunction(lits)
        }
    };
    let ts = terms.iter().map(term);
    if term_op == Connective::And {
        Formula::disjunction(ts)
    } else {
        Formula::conjunction(ts)
    }
}

fn is_normal(term: &[Literal]) -> bool {
    term.iter()
        .enumerate()
        .all(|(i, l)| term[..i].iter().all(|m| m.atom != l.atom))
}

impl DnfForm {
    pub fn to_formula(&self) -> Formula {
        rebuild(&self.terms, Connective::And)
    }

    /// Every term is normal: no atom occurs twice in it.
    pub fn is_normal(&self) -> bool {
        self.terms.iter().all(|t| is_normal(t))
    }
}

impl CnfForm {
    pub fn to_formula(&self) -> Formula {
        rebuild(&self.terms, Connective::Or)
    }

    pub fn is_normal(&self) -> bool {
        self.terms.iter().all(|t| is_normal(t))
    }
}

fn terms_of(f: &Formula, term_op: Connective) -> Option<Vec<Vec<Literal>>> {
    let outer = term_op.dual().expect("chain op");
    // Constant forms: the empty outer chain, or one empty term.
    if f.is_const(term_op == Connective::Or) {
        return Some(Vec::new());
    }
    if f.is_const(term_op == Connective::And) {
        return Some(vec![Vec::new()]);
    }
    chain_elems(f, outer)
        .into_iter()
        .map(|t| chain_elems(t, term_op).into_iter().map(Formula::as_literal).collect())
        .collect()
}

/// The product terms of `f` if it is an ∨ of ∧s of literals (or a constant).
pub fn dnf_terms(f: &Formula) -> Option<Vec<Vec<Literal>>> {
    terms_of(f, Connective::And)
}

/// The sum terms of `f` if it is an ∧ of ∨s of literals (or a constant).
pub fn cnf_terms(f: &Formula) -> Option<Vec<Vec<Literal>>> {
    terms_of(f, Connective::Or)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CanonicalKind {
    /// Sum of minterms.
    Fndp,
    /// Product of maxterms.
    Fncp,
}

impl CanonicalKind {
    fn term_op(self) -> Connective {
        match self {
            CanonicalKind::Fndp => Connective::And,
            CanonicalKind::Fncp => Connective::Or,
        }
    }

    pub fn shape(self) -> Shape {
        match self {
            CanonicalKind::Fndp => Shape::Fndp,
            CanonicalKind::Fncp => Shape::Fncp,
        }
    }
}

fn term_index(term: &[Literal], kind: CanonicalKind, order: &[Var]) -> Option<u64> {
    if term.len() != order.len() {
        return None;
    }
    let mut ix = 0u64;
    for (k, v) in order.iter().enumerate() {
        let lit = term.iter().find(|l| &l.atom == v)?;
        let bit = match kind {
            CanonicalKind::Fndp => !lit.negated,
            CanonicalKind::Fncp => lit.negated,
        };
        if bit {
            ix |= 1 << (order.len() - 1 - k);
        }
    }
    Some(ix)
}

/// Term indices, in written order, if `f` is built from canonical terms over `order`.
pub fn canonical_indices(f: &Formula, kind: CanonicalKind, order: &[Var]) -> Option<Vec<u64>> {
    terms_of(f, kind.term_op())?
        .iter()
        .map(|t| term_index(t, kind, order))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub kind: CanonicalKind,
    pub order: Vec<Var>,
    /// Canonical terms in ascending index order; literals follow `order`.
    pub terms: Vec<Vec<Literal>>,
    pub indices: CanonicalIndexSets,
}

impl CanonicalForm {
    pub fn to_formula(&self) -> Formula {
        rebuild(&self.terms, self.kind.term_op())
    }

    /// Indices of the written terms: Σm for FNDP, ΠM for FNCP.
    pub fn term_indices(&self) -> &[u64] {
        match self.kind {
            CanonicalKind::Fndp => &self.indices.minterms,
            CanonicalKind::Fncp => &self.indices.maxterms,
        }
    }

    fn from_indices(kind: CanonicalKind, order: &[Var], indices: CanonicalIndexSets) -> Self {
        let n = order.len();
        let written = match kind {
            CanonicalKind::Fndp => &indices.minterms,
            CanonicalKind::Fncp => &indices.maxterms,
        };
        let terms = written
            .iter()
            .map(|&ix| {
                order
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let bit = (ix >> (n - 1 - k)) & 1 == 1;
                        let negated = match kind {
                            CanonicalKind::Fndp => !bit,
                            CanonicalKind::Fncp => bit,
                        };
                        Literal {
                            atom: v.clone(),
                            negated,
                        }
                    })
                    .collect()
            })
            .collect();
        CanonicalForm {
            kind,
            order: order.to_vec(),
            terms,
            indices,
        }
    }
}

fn derivation(start: &Formula, tr: Tracer, goal: Goal) -> Derivation {
    Derivation {
        start: start.clone(),
        steps: tr.steps,
        goal: Some(goal),
    }
}

/// Negation normal form: only ∧, ∨, literals and constants remain.
pub fn to_nnf(f: &Formula) -> (Formula, Derivation) {
    let mut tr = Tracer::new(f.clone(), usize::MAX);
    rewrite::nnf(&mut tr).expect("no step limit");
    let out = tr.cur.clone();
    (out, derivation(f, tr, Goal::shape(Shape::Nnf)))
}

pub fn to_dnf(f: &Formula) -> Result<(DnfForm, Derivation), Error> {
    to_dnf_with(f, &Limits::default())
}

pub fn to_dnf_with(f: &Formula, limits: &Limits) -> Result<(DnfForm, Derivation), Error> {
    let tr = run_normal_form(f, Connective::And, &f.atoms(), limits)?;
    let terms = dnf_terms(&tr.cur).expect("engine output is a DNF");
    Ok((DnfForm { terms }, derivation(f, tr, Goal::shape(Shape::Dnf))))
}

pub fn to_cnf(f: &Formula) -> Result<(CnfForm, Derivation), Error> {
    to_cnf_with(f, &Limits::default())
}

pub fn to_cnf_with(f: &Formula, limits: &Limits) -> Result<(CnfForm, Derivation), Error> {
    let tr = run_normal_form(f, Connective::Or, &f.atoms(), limits)?;
    let terms = cnf_terms(&tr.cur).expect("engine output is a CNF");
    Ok((CnfForm { terms }, derivation(f, tr, Goal::shape(Shape::Cnf))))
}

fn run_normal_form(f: &Formula, term_op: Connective, order: &[Var], limits: &Limits) -> Result<Tracer, Error> {
    let mut tr = Tracer::new(f.clone(), limits.step_limit);
    rewrite::normal_form(&mut tr, term_op, &VarOrder::new(order), limits.term_cap)?;
    Ok(tr)
}

fn check_expansion_order(f: &Formula, order: &[Var], limits: &Limits) -> Result<(), Error> {
    check_order(order, limits)?;
    if let Some(v) = f.atoms().into_iter().find(|a| !order.contains(a)) {
        return Err(SemanticsError::MissingVariable(v).into());
    }
    if order.len() > limits.expansion_var_cap {
        return Err(Error::TermBlowupLimit {
            estimate: 1u128 << order.len(),
            cap: 1 << limits.expansion_var_cap,
        });
    }
    Ok(())
}

/// Principal form over `order`, derived step by step from the normal form.
pub fn to_principal(f: &Formula, kind: CanonicalKind, order: &[Var]) -> Result<(CanonicalForm, Derivation), Error> {
    to_principal_with(f, kind, order, &Limits::default())
}

pub fn to_principal_with(
    f: &Formula,
    kind: CanonicalKind,
    order: &[Var],
    limits: &Limits,
) -> Result<(CanonicalForm, Derivation), Error> {
    check_expansion_order(f, order, limits)?;
    let term_op = kind.term_op();
    let mut tr = run_normal_form(f, term_op, order, limits)?;
    tr.set_limit(limits.trace_step_limit);
    rewrite::expand_canonical(&mut tr, term_op, order)?;
    let written = canonical_indices(&tr.cur, kind, order).expect("expansion yields canonical terms");
    let n = order.len();
    let all: Vec<u64> = (0..1u64 << n).collect();
    let indices = match kind {
        CanonicalKind::Fndp => CanonicalIndexSets {
            n,
            maxterms: all.iter().copied().filter(|i| !written.contains(i)).collect(),
            minterms: written,
        },
        CanonicalKind::Fncp => CanonicalIndexSets {
            n,
            minterms: all.iter().copied().filter(|i| !written.contains(i)).collect(),
            maxterms: written,
        },
    };
    let form = CanonicalForm::from_indices(kind, order, indices);
    debug_assert_eq!(form.to_formula(), tr.cur);
    let goal = Goal::Shape {
        shape: kind.shape(),
        order: Some(order.to_vec()),
    };
    Ok((form, derivation(f, tr, goal)))
}

/// Principal form read off the truth table, without a derivation.
pub fn principal_form(f: &Formula, kind: CanonicalKind, order: &[Var]) -> Result<CanonicalForm, Error> {
    principal_form_with(f, kind, order, &Limits::default())
}

pub fn principal_form_with(
    f: &Formula,
    kind: CanonicalKind,
    order: &[Var],
    limits: &Limits,
) -> Result<CanonicalForm, Error> {
    check_expansion_order(f, order, limits)?;
    let indices = index_sets_with(f, order, limits)?;
    Ok(CanonicalForm::from_indices(kind, order, indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{validate_derivation, Mode};
    use crate::parser::parse_infix;
    use crate::semantics::{equivalent, index_sets};

    fn p(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    fn vars(names: &str) -> Vec<Var> {
        names.split(',').map(|n| Var::new(n).unwrap()).collect()
    }

    fn lits(spec: &str) -> Vec<Literal> {
        spec.split_whitespace()
            .map(|t| match t.strip_prefix('¬') {
                Some(a) => Literal::neg(Var::new(a).unwrap()),
                None => Literal::pos(Var::new(t).unwrap()),
            })
            .collect()
    }

    fn replay(d: &Derivation) {
        let r = validate_derivation(d, Mode::Strict);
        assert!(r.valid, "{:?} in {}", r.first_failure(), d.to_json());
    }

    #[test]
    fn nnf_examples() {
        for (input, want) in [("P → Q", "¬P ∨ Q"), ("¬(P ∧ Q)", "¬P ∨ ¬Q"), ("¬¬P", "P")] {
            let (out, d) = to_nnf(&p(input));
            assert_eq!(out, p(want));
            replay(&d);
        }
    }

    #[test]
    fn dnf_of_exercise_three() {
        let (dnf, d) = to_dnf(&p("p ∧ (¬q ∨ (r ∧ ¬s))")).unwrap();
        assert_eq!(dnf.terms, vec![lits("p ¬q"), lits("p r ¬s")]);
        replay(&d);
    }

    #[test]
    fn cnf_of_exercise_one() {
        let (cnf, d) = to_cnf(&p("A ∨ ¬B ∧ C")).unwrap();
        assert_eq!(cnf.terms, vec![lits("A ¬B"), lits("A C")]);
        replay(&d);
    }

    #[test]
    fn contradiction_has_no_terms() {
        let (dnf, d) = to_dnf(&p("P ∧ ¬P")).unwrap();
        assert!(dnf.terms.is_empty());
        assert_eq!(d.final_formula(), &Formula::FALSE);
        replay(&d);
    }

    #[test]
    fn principal_examples() {
        let (f, d) = to_principal(&p("A ∨ ¬B ∧ C"), CanonicalKind::Fndp, &vars("A,B,C")).unwrap();
        assert_eq!(f.indices.minterms, vec![1, 4, 5, 6, 7]);
        assert_eq!(f.indices.maxterms, vec![0, 2, 3]);
        replay(&d);
        let cnf = p("(a ∨ ¬b ∨ d) ∧ (¬a ∨ b ∨ c) ∧ (¬a ∨ c ∨ d)");
        let (f, d) = to_principal(&cnf, CanonicalKind::Fncp, &vars("a,b,c,d")).unwrap();
        assert_eq!(f.indices.maxterms, vec![4, 6, 8, 9, 12]);
        replay(&d);
        let (f, d) = to_principal(&Formula::TRUE, CanonicalKind::Fndp, &vars("P")).unwrap();
        assert_eq!(f.indices.minterms, vec![0, 1]);
        replay(&d);
    }

    #[test]
    fn principal_agrees_with_table() {
        for s in [
            "(¬p ∨ ¬q) ∧ (p ∨ r)",
            "P ↔ Q",
            "(P → Q) ∧ (Q → R) ∧ ¬(P → R)",
            "p ∧ (¬q ∨ (r ∧ (¬s ∧ (r ∨ (¬q ∨ p)))))",
        ] {
            let f = p(s);
            let order = f.atoms();
            for kind in [CanonicalKind::Fndp, CanonicalKind::Fncp] {
                let (form, d) = to_principal(&f, kind, &order).unwrap();
                assert_eq!(form.indices, index_sets(&f, &order).unwrap(), "{s} {kind:?}");
                assert_eq!(&form.to_formula(), d.final_formula());
                assert!(equivalent(&f, d.final_formula()).unwrap());
                replay(&d);
            }
        }
    }

    #[test]
    fn expansion_errors() {
        let f = p("P ∧ Q");
        assert!(matches!(
            to_principal(&f, CanonicalKind::Fndp, &vars("P")),
            Err(Error::Semantics(SemanticsError::MissingVariable(_)))
        ));
        let many = vars("a,b,c,d,e,f,g,h,i,j,k,l,m");
        assert!(matches!(
            to_principal(&p("a"), CanonicalKind::Fndp, &many),
            Err(Error::TermBlowupLimit { .. })
        ));
    }

    #[test]
    fn term_cap_guards_distribution() {
        let f = p("(a ∨ b) ∧ (c ∨ d) ∧ (e ∨ f) ∧ (g ∨ h)");
        let limits = Limits {
            term_cap: 8,
            ..Limits::default()
        };
        assert!(matches!(to_dnf_with(&f, &limits), Err(Error::TermBlowupLimit { .. })));
        assert!(to_cnf_with(&f, &limits).is_ok());
    }
}
