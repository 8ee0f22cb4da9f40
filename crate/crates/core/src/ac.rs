//! Formulas modulo associativity and commutativity of ∧ and ∨, and n-ary
//! versions of the catalog laws used to check hand-written steps.
//!
//! A hand-written line may rearrange chains freely and may apply its named
//! law at several places at once. [`justified`] decides whether a line is
//! explained by its laws: the before and after terms must meet under
//! repeated application of those laws, with chains compared as multisets.

use std::collections::HashSet;

use crate::formula::{Connective, Formula, Var};
use crate::laws::LawId;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Ac {
    Const(bool),
    Atom(Var),
    Not(Box<Ac>),
    /// Only ∧ or ∨; at least two items, sorted, none a chain of the same op.
    Chain(Connective, Vec<Ac>),
    Imp(Box<Ac>, Box<Ac>),
    Iff(Box<Ac>, Box<Ac>),
}

impl Ac {
    pub(crate) fn from_formula(f: &Formula) -> Ac {
        match f {
            Formula::Const { value } => Ac::Const(*value),
            Formula::Atom { name } => Ac::Atom(name.clone()),
            Formula::Not { child } => Ac::Not(Box::new(Ac::from_formula(child))),
            Formula::Binary { op, left, right } => match op {
                Connective::And | Connective::Or => chain(*op, vec![Ac::from_formula(left), Ac::from_formula(right)]),
                Connective::Implies => Ac::Imp(Box::new(Ac::from_formula(left)), Box::new(Ac::from_formula(right))),
                Connective::Iff => Ac::Iff(Box::new(Ac::from_formula(left)), Box::new(Ac::from_formula(right))),
            },
        }
    }

    fn size(&self) -> usize {
        match self {
            Ac::Const(_) | Ac::Atom(_) => 1,
            Ac::Not(c) => 1 + c.size(),
            Ac::Chain(_, xs) => 1 + xs.iter().map(Ac::size).sum::<usize>(),
            Ac::Imp(a, b) | Ac::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }
}

pub fn ac_equal(a: &Formula, b: &Formula) -> bool {
    Ac::from_formula(a) == Ac::from_formula(b)
}

fn not(a: Ac) -> Ac {
    Ac::Not(Box::new(a))
}

/// Builds a normalized chain. An empty chain is the unit of `op`.
fn chain(op: Connective, items: Vec<Ac>) -> Ac {
    let mut flat = Vec::with_capacity(items.len());
    for it in items {
        match it {
            Ac::Chain(o, xs) if o == op => flat.extend(xs),
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => Ac::Const(op == Connective::And),
        1 => flat.pop().expect("one item"),
        _ => {
            flat.sort();
            Ac::Chain(op, flat)
        }
    }
}

fn elems(op: Connective, t: &Ac) -> Vec<Ac> {
    match t {
        Ac::Chain(o, xs) if *o == op => xs.clone(),
        other => vec![other.clone()],
    }
}

fn without(xs: &[Ac], skip: &[usize]) -> Vec<Ac> {
    xs.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, x)| x.clone())
        .collect()
}

/// Multiset inclusion of sorted vectors.
fn sub_multiset(small: &[Ac], big: &[Ac]) -> bool {
    let mut j = 0;
    for s in small {
        while j < big.len() && &big[j] < s {
            j += 1;
        }
        if j == big.len() || &big[j] != s {
            return false;
        }
        j += 1;
    }
    true
}

/// `big` minus the multiset `small`, if `small` is contained in it.
fn remove_all(big: &[Ac], small: &[Ac]) -> Option<Vec<Ac>> {
    let mut rest = big.to_vec();
    for s in small {
        let k = rest.iter().position(|x| x == s)?;
        rest.remove(k);
    }
    Some(rest)
}

fn dual(op: Connective) -> Connective {
    op.dual().expect("chain op")
}

/// Negation pushed inward with De Morgan and double negation.
fn complement(t: &Ac) -> Ac {
    match t {
        Ac::Not(x) => (**x).clone(),
        Ac::Const(b) => Ac::Const(!b),
        Ac::Chain(op, xs) => chain(dual(*op), xs.iter().map(complement).collect()),
        other => not(other.clone()),
    }
}

/// Rewrites of `t` at its root by one law, most complete variant first.
/// With `dm`, Negation also cancels a term against its pushed-in complement.
fn local(t: &Ac, law: LawId, dm: bool, out: &mut Vec<Ac>) {
    use Connective::{And, Or};
    match (law, t) {
        (LawId::El1, Ac::Imp(a, b)) => out.push(chain(Or, vec![not((**a).clone()), (**b).clone()])),
        (LawId::El2, Ac::Iff(a, b)) => out.push(chain(
            And,
            vec![Ac::Imp(a.clone(), b.clone()), Ac::Imp(b.clone(), a.clone())],
        )),
        (LawId::DeMorganAnd | LawId::DeMorganOr, Ac::Not(inner)) => {
            let want = if law == LawId::DeMorganAnd { And } else { Or };
            if let Ac::Chain(op, xs) = inner.as_ref() {
                if *op == want {
                    out.push(chain(dual(want), xs.iter().cloned().map(not).collect()));
                    if xs.len() > 2 {
                        for i in 0..xs.len() {
                            out.push(chain(
                                dual(want),
                                vec![not(xs[i].clone()), not(chain(want, without(xs, &[i])))],
                            ));
                        }
                    }
                }
            }
        }
        (LawId::DoubleNegation, Ac::Not(inner)) => {
            if let Ac::Not(x) = inner.as_ref() {
                out.push((**x).clone());
            }
        }
        (LawId::DistAndOverOr | LawId::DistOrOverAnd, Ac::Chain(op, xs)) => {
            let outer = if law == LawId::DistAndOverOr { And } else { Or };
            if *op != outer {
                return;
            }
            let inner = dual(outer);
            for (i, x) in xs.iter().enumerate() {
                let Ac::Chain(o, ys) = x else { continue };
                if *o != inner {
                    continue;
                }
                let rest = without(xs, &[i]);
                let spread = |parts: &[Ac], with: &[Ac]| {
                    chain(
                        inner,
                        parts
                            .iter()
                            .map(|y| {
                                let mut term = with.to_vec();
                                term.push(y.clone());
                                chain(outer, term)
                            })
                            .collect(),
                    )
                };
                out.push(spread(ys, &rest));
                // The inner chain read as a binary split: one item and the rest.
                if ys.len() > 2 {
                    for k in 0..ys.len() {
                        let parts = [ys[k].clone(), chain(inner, without(ys, &[k]))];
                        out.push(spread(&parts, &rest));
                        if rest.len() > 1 {
                            for j in 0..xs.len() {
                                if j != i {
                                    let mut kept = without(xs, &[i, j]);
                                    kept.push(spread(&parts, &[xs[j].clone()]));
                                    out.push(chain(outer, kept));
                                }
                            }
                        }
                    }
                }
                if rest.len() > 1 {
                    for j in 0..xs.len() {
                        if j == i {
                            continue;
                        }
                        let mut kept = without(xs, &[i, j]);
                        kept.push(chain(
                            inner,
                            ys.iter()
                                .map(|y| chain(outer, vec![xs[j].clone(), y.clone()]))
                                .collect(),
                        ));
                        out.push(chain(outer, kept));
                    }
                }
            }
        }
        (LawId::Idempotence, Ac::Chain(op, xs)) => {
            let mut dedup = xs.clone();
            dedup.dedup();
            if dedup.len() < xs.len() {
                out.push(chain(*op, dedup));
                for k in 0..xs.len() - 1 {
                    if xs[k] == xs[k + 1] {
                        out.push(chain(*op, without(xs, &[k])));
                    }
                }
            }
        }
        (LawId::Negation, Ac::Not(inner)) => {
            if let Ac::Const(b) = inner.as_ref() {
                out.push(Ac::Const(!b));
            }
        }
        (LawId::Negation, Ac::Chain(op, xs)) => {
            let unit = Ac::Const(*op == Or);
            for (i, x) in xs.iter().enumerate() {
                let neg = not(x.clone());
                if let Some(j) = xs.iter().position(|y| *y == neg) {
                    let mut rest = without(xs, &[i, j]);
                    rest.push(unit.clone());
                    out.push(chain(*op, rest));
                } else if dm {
                    // The complement may have merged into this chain.
                    let others = without(xs, &[i]);
                    if let Some(mut rest) = remove_all(&others, &elems(*op, &complement(x))) {
                        rest.push(unit.clone());
                        out.push(chain(*op, rest));
                    }
                }
            }
        }
        (LawId::Identity, Ac::Chain(op, xs)) => {
            let unit = Ac::Const(*op == And);
            if xs.contains(&unit) {
                let kept: Vec<Ac> = xs.iter().filter(|x| **x != unit).cloned().collect();
                out.push(if kept.is_empty() {
                    unit.clone()
                } else {
                    chain(*op, kept)
                });
                if let Some(k) = xs.iter().position(|x| *x == unit) {
                    out.push(chain(*op, without(xs, &[k])));
                }
            }
        }
        (LawId::Domination, Ac::Chain(op, xs)) => {
            let zero = Ac::Const(*op == Or);
            if xs.contains(&zero) {
                out.push(zero);
            }
        }
        (LawId::Absorption, Ac::Chain(op, xs)) => {
            let inner = dual(*op);
            for (i, x) in xs.iter().enumerate() {
                let small = elems(inner, x);
                for (j, y) in xs.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if let Ac::Chain(o, big) = y {
                        if *o == inner && big.len() > small.len() && sub_multiset(&small, big) {
                            out.push(chain(*op, without(xs, &[j])));
                        }
                    }
                }
            }
        }
        _ => {}
    }
}

/// All terms reachable from `t` by one rewrite anywhere.
fn successors(t: &Ac, law: LawId, dm: bool, out: &mut Vec<Ac>) {
    local(t, law, dm, out);
    let mut sub = Vec::new();
    match t {
        Ac::Const(_) | Ac::Atom(_) => {}
        Ac::Not(c) => {
            successors(c, law, dm, &mut sub);
            out.extend(sub.into_iter().map(not));
        }
        Ac::Chain(op, xs) => {
            for i in 0..xs.len() {
                sub.clear();
                successors(&xs[i], law, dm, &mut sub);
                for s in sub.drain(..) {
                    let mut ys = xs.clone();
                    ys[i] = s;
                    out.push(chain(*op, ys));
                }
            }
        }
        Ac::Imp(a, b) | Ac::Iff(a, b) => {
            let rebuild = |l: Ac, r: Ac| match t {
                Ac::Imp(..) => Ac::Imp(Box::new(l), Box::new(r)),
                _ => Ac::Iff(Box::new(l), Box::new(r)),
            };
            successors(a, law, dm, &mut sub);
            for s in sub.drain(..) {
                out.push(rebuild(s, (**b).clone()));
            }
            successors(b, law, dm, &mut sub);
            for s in sub.drain(..) {
                out.push(rebuild((**a).clone(), s));
            }
        }
    }
}

struct Budget {
    rewrites: usize,
    max_size: usize,
}

/// One innermost-leftmost rewrite of `t` by the first law that applies.
fn innermost_step(t: &Ac, laws: &[LawId], dm: bool) -> Option<Ac> {
    let inner = match t {
        Ac::Const(_) | Ac::Atom(_) => None,
        Ac::Not(c) => innermost_step(c, laws, dm).map(not),
        Ac::Chain(op, xs) => xs.iter().enumerate().find_map(|(i, x)| {
            innermost_step(x, laws, dm).map(|s| {
                let mut ys = xs.clone();
                ys[i] = s;
                chain(*op, ys)
            })
        }),
        Ac::Imp(a, b) | Ac::Iff(a, b) => {
            let rebuild = |l: Ac, r: Ac| match t {
                Ac::Imp(..) => Ac::Imp(Box::new(l), Box::new(r)),
                _ => Ac::Iff(Box::new(l), Box::new(r)),
            };
            innermost_step(a, laws, dm)
                .map(|s| rebuild(s, (**b).clone()))
                .or_else(|| innermost_step(b, laws, dm).map(|s| rebuild((**a).clone(), s)))
        }
    };
    if inner.is_some() {
        return inner;
    }
    let mut out = Vec::new();
    for law in laws {
        local(t, *law, dm, &mut out);
        if !out.is_empty() {
            out.truncate(1);
            return out.pop();
        }
    }
    None
}

/// Innermost normalization under `laws`; `None` when the budget runs out.
fn normalize(t: &Ac, laws: &[LawId], dm: bool, budget: &mut Budget) -> Option<Ac> {
    let mut cur = t.clone();
    while let Some(next) = innermost_step(&cur, laws, dm) {
        if budget.rewrites == 0 || next.size() > budget.max_size {
            return None;
        }
        budget.rewrites -= 1;
        cur = next;
    }
    Some(cur)
}

const FRONTIER_CAP: usize = 4000;

fn expand(frontier: &HashSet<Ac>, laws: &[LawId], dm: bool, seen: &mut HashSet<Ac>) -> HashSet<Ac> {
    let mut next = HashSet::new();
    let mut buf = Vec::new();
    for t in frontier {
        for law in laws {
            buf.clear();
            successors(t, *law, dm, &mut buf);
            for s in buf.drain(..) {
                if seen.len() >= FRONTIER_CAP {
                    return next;
                }
                if seen.insert(s.clone()) {
                    next.insert(s);
                }
            }
        }
    }
    next
}

/// Key equal for formulas that differ only in the grouping of ∧/∨ chains.
fn regrouped(f: &Formula) -> String {
    fn go(f: &Formula, parent: Option<Connective>, out: &mut String) {
        match f {
            Formula::Binary { op, left, right } if matches!(op, Connective::And | Connective::Or) => {
                let open = parent != Some(*op);
                if open {
                    out.push('(');
                    out.push_str(op.symbol());
                }
                go(left, Some(*op), out);
                go(right, Some(*op), out);
                if open {
                    out.push(')');
                }
            }
            Formula::Binary { op, left, right } => {
                out.push('(');
                out.push_str(op.symbol());
                go(left, None, out);
                go(right, None, out);
                out.push(')');
            }
            Formula::Not { child } => {
                out.push('¬');
                go(child, None, out);
            }
            other => {
                out.push(' ');
                out.push_str(&other.to_string());
            }
        }
    }
    let mut s = String::new();
    go(f, None, &mut s);
    s
}

/// Whether `after` follows from `before` by the given laws modulo AC.
///
/// `components` is the resolved law label: one entry per comma-separated
/// name, each holding the ids that name may stand for. Pure rearrangements
/// are explained only by an AC law. Associativity alone must keep the operand
/// order and commutativity alone must change it; every other law must account
/// for a real change.
pub(crate) fn justified(before: &Formula, after: &Formula, components: &[Vec<LawId>]) -> bool {
    let a = Ac::from_formula(before);
    let b = Ac::from_formula(after);
    let all: Vec<LawId> = components.iter().flatten().copied().collect();
    if a == b {
        let assoc = all.iter().any(|l| matches!(l, LawId::AssocAnd | LawId::AssocOr));
        let comm = all.iter().any(|l| matches!(l, LawId::CommAnd | LawId::CommOr));
        return match (assoc, comm) {
            (true, true) => true,
            (true, false) => regrouped(before) == regrouped(after),
            (false, true) => regrouped(before) != regrouped(after),
            (false, false) => false,
        };
    }
    let mut laws: Vec<LawId> = all.into_iter().filter(|l| !l.is_ac()).collect();
    laws.sort();
    laws.dedup();
    if laws.is_empty() {
        return false;
    }

    let budget = || Budget {
        rewrites: 500,
        max_size: 4 * a.size().max(b.size()) + 32,
    };
    let dm = laws.iter().any(|l| matches!(l, LawId::DeMorganAnd | LawId::DeMorganOr));
    // Opposite directions of one law (both distributions) can undo each
    // other, so each law is also tried alone.
    let mut sets = vec![laws.clone()];
    if laws.len() > 1 {
        sets.extend(laws.iter().map(|l| vec![*l]));
    }
    for set in &sets {
        let na = normalize(&a, set, dm, &mut budget());
        let nb = normalize(&b, set, dm, &mut budget());
        if na.as_ref() == Some(&b) || nb.as_ref() == Some(&a) {
            return true;
        }
    }

    // One side must reach the other; meeting halfway would let erasing laws
    // (Absorption, Negation) hide an unrelated change.
    let depth = 1 + components.iter().filter(|c| c.iter().any(|l| !l.is_ac())).count();
    reaches(&a, &b, &laws, dm, depth) || reaches(&b, &a, &laws, dm, depth)
}

fn reaches(from: &Ac, to: &Ac, laws: &[LawId], dm: bool, depth: usize) -> bool {
    let mut seen: HashSet<Ac> = HashSet::from([from.clone()]);
    let mut front = seen.clone();
    for _ in 0..depth {
        front = expand(&front, laws, dm, &mut seen);
        if front.contains(to) {
            return true;
        }
        if front.is_empty() {
            break;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::resolve_law_ref;
    use crate::parser::parse_infix;

    fn p(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    fn ok(before: &str, after: &str, label: &str) -> bool {
        justified(&p(before), &p(after), &resolve_law_ref(label).unwrap())
    }

    #[test]
    fn ac_equality_ignores_grouping_and_order() {
        assert!(ac_equal(&p("(P ∨ Q) ∨ R"), &p("R ∨ (Q ∨ P)")));
        assert!(!ac_equal(&p("P ∨ Q"), &p("P ∧ Q")));
        assert!(!ac_equal(&p("P ∨ P"), &p("P")));
    }

    #[test]
    fn rearrangement_needs_an_ac_label() {
        assert!(ok("(¬P ∨ ¬Q) ∨ Q", "¬P ∨ (¬Q ∨ Q)", "Asociativa"));
        assert!(!ok("(¬P ∨ ¬Q) ∨ Q", "¬P ∨ (¬Q ∨ Q)", "Identidad"));
    }

    #[test]
    fn associativity_alone_keeps_order() {
        assert!(!ok("(P ∨ Q) ∨ R", "P ∨ (R ∨ Q)", "Asociativa"));
        assert!(!ok("(P ∨ Q) ∨ R", "P ∨ (Q ∨ R)", "Conmutativa"));
        assert!(ok("(P ∨ Q) ∨ R", "R ∨ (Q ∨ P)", "Conmutativa"));
        assert!(ok("P ∨ Q ∨ R ∨ S", "Q ∨ P ∨ S ∨ R", "Conmutativa"));
        assert!(ok(
            "(P ∧ ¬R) ∨ (¬P ∨ R) ∨ Q",
            "T ∨ Q",
            "Negación, Ley de Morgan, Doble Negación"
        ));
        assert!(!ok("(P ∧ ¬R) ∨ (¬P ∨ R) ∨ Q", "T ∨ Q", "Negación"));
        assert!(ok("(P ∨ Q) ∨ R", "P ∨ (R ∨ Q)", "Asociativa, Conmutativa"));
    }

    #[test]
    fn law_modulo_commutativity() {
        assert!(ok("¬(P ∧ ¬Q) ∨ (P ∧ ¬Q)", "T", "Negación"));
        assert!(ok("((P ∧ ¬Q) ∨ ¬Q) ∨ R", "¬Q ∨ R", "Absorción"));
        assert!(ok("(P ∧ ¬Q) ∨ Q", "(P ∨ Q) ∧ (¬Q ∨ Q)", "Distributiva"));
    }

    #[test]
    fn several_sites_at_once() {
        assert!(ok(
            "(A ∧ T ∧ T) ∨ (T ∧ ¬B ∧ C)",
            "(A ∧ (B ∨ ¬B) ∧ (C ∨ ¬C)) ∨ ((A ∨ ¬A) ∧ ¬B ∧ C)",
            "negación"
        ));
        assert!(ok("A ∨ (¬B ∧ C)", "(A ∧ T ∧ T) ∨ (T ∧ ¬B ∧ C)", "identidad"));
    }

    #[test]
    fn wrong_law_rejected() {
        assert!(!ok("¬¬P ∨ Q", "P ∨ Q", "Negación"));
        assert!(ok("¬¬P ∨ Q", "P ∨ Q", "Doble Negación"));
        assert!(!ok("P ∨ T", "T", "Identidad"));
    }

    #[test]
    fn bundles_compose() {
        assert!(ok(
            "(¬(¬P ∨ Q) ∨ ¬¬Q) ∨ ¬Q",
            "((¬¬P ∧ ¬Q) ∨ Q) ∨ ¬Q",
            "Ley de Morgan, Doble Negación"
        ));
        assert!(!ok("(¬(¬P ∨ Q) ∨ ¬¬Q) ∨ ¬Q", "((¬¬P ∧ ¬Q) ∨ Q) ∨ ¬Q", "Ley de Morgan"));
    }
}
