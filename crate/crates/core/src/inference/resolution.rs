//! Refutation by resolution over the clauses of the premises and of the
//! negated conclusion.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Argument, Method, ReplayError, Trace, Verdict, VerdictTrace};
use crate::formula::{Formula, Literal, Var};
use crate::normal_forms::to_cnf_with;
use crate::semantics::{check_order, Assignment};
use crate::{Error, Limits};

/// A sorted, duplicate-free disjunction of literals.
pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClauseOrigin {
    /// From the premise at this 0-based position.
    Premise {
        index: usize,
    },
    NegatedConclusion,
    Resolvent {
        left: usize,
        right: usize,
        pivot: Var,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseRecord {
    pub id: usize,
    pub literals: Clause,
    pub origin: ClauseOrigin,
}

fn clause_text(c: &[Literal]) -> String {
    if c.is_empty() {
        return "□".to_string();
    }
    c.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ∨ ")
}

impl ClauseRecord {
    pub fn render(&self) -> String {
        let mut s = format!("[{}] {}", self.id, clause_text(&self.literals));
        let _ = match &self.origin {
            ClauseOrigin::Premise { index } => write!(s, "    Premisa {}", index + 1),
            ClauseOrigin::NegatedConclusion => write!(s, "    Negación de la conclusión"),
            ClauseOrigin::Resolvent { left, right, pivot } => {
                write!(s, "    Res [{left}], [{right}] sobre {pivot}")
            }
        };
        s
    }
}

fn normalize(mut c: Clause) -> Option<Clause> {
    c.sort();
    c.dedup();
    let taut = c.windows(2).any(|w| w[0].atom == w[1].atom);
    (!taut).then_some(c)
}

fn subsumes(a: &[Literal], b: &[Literal]) -> bool {
    a.len() <= b.len() && a.iter().all(|l| b.binary_search(l).is_ok())
}

fn resolve(a: &[Literal], b: &[Literal]) -> Vec<(Var, Clause)> {
    let mut out = Vec::new();
    for l in a {
        let c = l.complement();
        if b.binary_search(&c).is_ok() {
            let merged = a
                .iter()
                .filter(|x| *x != l)
                .chain(b.iter().filter(|x| **x != c))
                .cloned()
                .collect();
            if let Some(r) = normalize(merged) {
                out.push((l.atom.clone(), r));
            }
        }
    }
    out
}

fn input_clauses(arg: &Argument, limits: &Limits) -> Result<Vec<(Clause, ClauseOrigin)>, Error> {
    let mut sources: Vec<(Formula, ClauseOrigin)> = arg
        .premises
        .iter()
        .enumerate()
        .map(|(index, p)| (p.clone(), ClauseOrigin::Premise { index }))
        .collect();
    sources.push((Formula::not(arg.conclusion.clone()), ClauseOrigin::NegatedConclusion));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (f, origin) in sources {
        let (cnf, _) = to_cnf_with(&f, limits)?;
        for t in cnf.terms {
            if let Some(c) = normalize(t) {
                if seen.insert(c.clone()) {
                    out.push((c, origin.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// Small DPLL; unassigned atoms become false.
fn dpll(clauses: &[Clause], atoms: &[Var]) -> Option<Assignment> {
    fn go(clauses: &[Clause], assign: &mut Vec<(Var, bool)>) -> bool {
        let value = |assign: &[(Var, bool)], l: &Literal| {
            assign.iter().find(|(v, _)| *v == l.atom).map(|(_, b)| *b != l.negated)
        };
        let mut pick = None;
        for c in clauses {
            let vals: Vec<_> = c.iter().map(|l| value(assign, l)).collect();
            if vals.contains(&Some(true)) {
                continue;
            }
            let open: Vec<_> = c
                .iter()
                .zip(&vals)
                .filter(|(_, v)| v.is_none())
                .map(|(l, _)| l)
                .collect();
            match open.len() {
                0 => return false,
                1 => {
                    pick = Some((open[0].clone(), true));
                    break;
                }
                _ => {
                    if pick.is_none() {
                        pick = Some((open[0].clone(), false));
                    }
                }
            }
        }
        let Some((lit, unit)) = pick else { return true };
        let mark = assign.len();
        for b in [!lit.negated, lit.negated] {
            assign.push((lit.atom.clone(), b));
            if go(clauses, assign) {
                return true;
            }
            assign.truncate(mark);
            if unit {
                break;
            }
        }
        false
    }
    let mut assign = Vec::new();
    if !go(clauses, &mut assign) {
        return None;
    }
    let mut a = Assignment::default();
    for v in atoms {
        a.set(v.clone(), false);
    }
    for (v, b) in assign {
        a.set(v, b);
    }
    Some(a)
}

pub fn prove_resolution(arg: &Argument) -> Result<VerdictTrace, Error> {
    prove_resolution_with(arg, &Limits::default())
}

pub fn prove_resolution_with(arg: &Argument, limits: &Limits) -> Result<VerdictTrace, Error> {
    check_order(&arg.atoms(), limits)?;
    let mut all: Vec<ClauseRecord> = input_clauses(arg, limits)?
        .into_iter()
        .enumerate()
        .map(|(k, (literals, origin))| ClauseRecord {
            id: k + 1,
            literals,
            origin,
        })
        .collect();
    let mut known: HashSet<Clause> = all.iter().map(|c| c.literals.clone()).collect();
    let mut waiting: BTreeSet<(usize, usize)> = all.iter().map(|c| (c.literals.len(), c.id)).collect();
    let mut active: Vec<usize> = Vec::new();
    let mut empty = all.iter().find(|c| c.literals.is_empty()).map(|c| c.id);

    while empty.is_none() {
        let Some((_, given)) = waiting.pop_first() else { break };
        let g = all[given - 1].literals.clone();
        if active.iter().any(|&a| subsumes(&all[a - 1].literals, &g)) {
            continue;
        }
        active.retain(|&a| !subsumes(&g, &all[a - 1].literals));
        active.push(given);
        for &other in &active {
            for (pivot, r) in resolve(&all[other - 1].literals, &g) {
                if !known.insert(r.clone()) {
                    continue;
                }
                if all.len() >= limits.term_cap {
                    return Err(Error::StepLimitExceeded(all.len()));
                }
                let id = all.len() + 1;
                let (left, right) = (other.min(given), other.max(given));
                if r.is_empty() {
                    empty = Some(id);
                }
                waiting.insert((r.len(), id));
                all.push(ClauseRecord {
                    id,
                    literals: r,
                    origin: ClauseOrigin::Resolvent { left, right, pivot },
                });
                if empty.is_some() {
                    break;
                }
            }
            if empty.is_some() {
                break;
            }
        }
    }

    let (verdict, countermodel, roots) = match empty {
        Some(e) => (Verdict::Valid, None, vec![e]),
        None => {
            let clauses: Vec<Clause> = active.iter().map(|&a| all[a - 1].literals.clone()).collect();
            match dpll(&clauses, &arg.atoms()).filter(|m| arg.is_countermodel(m)) {
                Some(m) => (Verdict::Invalid, Some(m), active.clone()),
                None => (Verdict::Inconclusive, None, active.clone()),
            }
        }
    };
    // Keep the roots and their ancestors, renumbered 1..n.
    let mut keep = BTreeSet::new();
    let mut stack = roots;
    while let Some(k) = stack.pop() {
        if keep.insert(k) {
            if let ClauseOrigin::Resolvent { left, right, .. } = &all[k - 1].origin {
                stack.extend([*left, *right]);
            }
        }
    }
    let kept: Vec<usize> = keep.into_iter().collect();
    let new_id = |old: usize| kept.binary_search(&old).unwrap() + 1;
    let clauses = kept
        .iter()
        .map(|&k| {
            let mut c = all[k - 1].clone();
            c.id = new_id(k);
            if let ClauseOrigin::Resolvent { left, right, .. } = &mut c.origin {
                *left = new_id(*left);
                *right = new_id(*right);
            }
            c
        })
        .collect();
    Ok(VerdictTrace {
        method: Method::Resolution,
        verdict,
        countermodel,
        trace: Trace::Resolution { clauses },
    })
}

pub(super) fn replay(
    arg: &Argument,
    verdict: Verdict,
    clauses: &[ClauseRecord],
    limits: &Limits,
) -> Result<(), ReplayError> {
    let inputs: HashSet<(Clause, ClauseOrigin)> = input_clauses(arg, limits)?.into_iter().collect();
    let bad = |step: usize, reason: &str| ReplayError::Step {
        step,
        reason: reason.to_string(),
    };
    for (k, c) in clauses.iter().enumerate() {
        if c.id != k + 1 {
            return Err(bad(c.id, "clauses are numbered out of order"));
        }
        match &c.origin {
            ClauseOrigin::Resolvent { left, right, pivot } => {
                let get = |i: usize| clauses.get(i.wrapping_sub(1)).filter(|_| i < c.id);
                let (Some(l), Some(r)) = (get(*left), get(*right)) else {
                    return Err(bad(c.id, "cites a missing or later clause"));
                };
                let ok = resolve(&l.literals, &r.literals)
                    .into_iter()
                    .any(|(p, res)| &p == pivot && res == c.literals);
                if !ok {
                    return Err(bad(c.id, "is not a resolvent of its parents"));
                }
            }
            origin => {
                if !inputs.contains(&(c.literals.clone(), origin.clone())) {
                    return Err(bad(c.id, "is not an input clause"));
                }
            }
        }
    }
    let refuted = clauses.iter().any(|c| c.literals.is_empty());
    if refuted != (verdict == Verdict::Valid) {
        return Err(ReplayError::Verdict("verdict disagrees with the clauses".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::tests::ANEXO5;
    use crate::semantics::entails;

    fn arg(s: &str) -> Argument {
        Argument::parse(s).unwrap()
    }

    #[test]
    fn appendix_arguments_refute() {
        for s in ANEXO5 {
            let a = arg(s);
            let v = prove_resolution(&a).unwrap();
            assert_eq!(v.verdict, Verdict::Valid, "{s}");
            v.replay(&a).unwrap();
            let Trace::Resolution { clauses } = &v.trace else {
                panic!()
            };
            assert!(clauses.last().unwrap().literals.is_empty());
        }
    }

    #[test]
    fn countermodel_for_disjunction() {
        let a = arg("P ∨ Q ⇒ P");
        let v = prove_resolution(&a).unwrap();
        assert_eq!(v.verdict, Verdict::Invalid);
        let m = v.countermodel.clone().unwrap();
        assert_eq!(m.render(), "P=F, Q=T");
        v.replay(&a).unwrap();
    }

    #[test]
    fn inconsistent_premises_are_valid() {
        let a = arg("P, ¬P ⇒ Q");
        assert_eq!(prove_resolution(&a).unwrap().verdict, Verdict::Valid);
    }

    #[test]
    fn tautological_conclusion() {
        let a = arg(" ⇒ P ∨ ¬P");
        assert_eq!(prove_resolution(&a).unwrap().verdict, Verdict::Valid);
        let a = arg(" ⇒ P");
        assert!(!entails(&[], &a.conclusion).unwrap());
        assert_eq!(prove_resolution(&a).unwrap().verdict, Verdict::Invalid);
    }

    #[test]
    fn resolvent_rules() {
        let p = Var::new("P").unwrap();
        let q = Var::new("Q").unwrap();
        let a = vec![Literal::pos(p.clone()), Literal::pos(q.clone())];
        let b = vec![Literal::neg(p.clone()), Literal::neg(q.clone())];
        assert!(resolve(&a, &b).is_empty(), "both resolvents are tautologies");
        let c = vec![Literal::neg(p.clone())];
        assert_eq!(resolve(&a, &c), vec![(p, vec![Literal::pos(q)])]);
    }
}
