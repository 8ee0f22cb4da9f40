//! The rewrite engine behind the normal forms and automatic derivations.
//!
//! Every move is a single catalog law applied at an explicit path, so the
//! recorded steps replay exactly in strict mode. Working on chains (maximal
//! runs of one of ∧/∨) needs reassociation and swaps; those are emitted as
//! ordinary Assoc/Comm steps.

use std::collections::HashMap;

use crate::derivation::StepRecord;
use crate::formula::{Connective, Formula, Path, Var};
use crate::laws::{apply_schema, Bindings, Direction, LawId};
use crate::Error;

const LR: Direction = Direction::LeftToRight;
const RL: Direction = Direction::RightToLeft;

pub(crate) struct Tracer {
    pub cur: Formula,
    pub steps: Vec<StepRecord>,
    limit: usize,
}

impl Tracer {
    pub fn new(f: Formula, limit: usize) -> Self {
        Tracer {
            cur: f,
            steps: Vec::new(),
            limit,
        }
    }

    pub fn set_limit(&mut self, limit: usize) {
        self.limit = limit;
    }

    fn node(&self, p: &Path) -> &Formula {
        self.cur.subformula_at(p).expect("engine paths address nodes")
    }

    fn apply_seeded(
        &mut self,
        law: LawId,
        schema: usize,
        dir: Direction,
        p: &Path,
        seed: Bindings,
    ) -> Result<(), Error> {
        if self.steps.len() >= self.limit {
            return Err(Error::StepLimitExceeded(self.limit));
        }
        let next = apply_schema(&self.cur, law, schema, dir, p, seed).unwrap_or_else(|| {
            panic!(
                "{law} schema {schema} {} does not apply at {p} in {}",
                dir.tag(),
                self.cur
            )
        });
        self.steps.push(StepRecord::new(law, dir, p.clone(), next.clone()));
        self.cur = next;
        Ok(())
    }

    fn apply(&mut self, law: LawId, schema: usize, dir: Direction, p: &Path) -> Result<(), Error> {
        self.apply_seeded(law, schema, dir, p, Default::default())
    }
}

fn assoc(op: Connective) -> LawId {
    if op == Connective::And {
        LawId::AssocAnd
    } else {
        LawId::AssocOr
    }
}

fn comm(op: Connective) -> LawId {
    if op == Connective::And {
        LawId::CommAnd
    } else {
        LawId::CommOr
    }
}

fn dual(op: Connective) -> Connective {
    op.dual().expect("chain connective")
}

fn is_chain_op(op: Connective) -> bool {
    matches!(op, Connective::And | Connective::Or)
}

type Picker<'a, T> = dyn FnMut(&Formula, &[usize], Option<Connective>) -> Option<T> + 'a;

/// First node in preorder for which `pick` answers.
fn find_pre<T>(f: &Formula, path: &mut Vec<usize>, parent: Option<Connective>, pick: &mut Picker<'_, T>) -> Option<T> {
    if let Some(t) = pick(f, path, parent) {
        return Some(t);
    }
    let op = match f {
        Formula::Binary { op, .. } => Some(*op),
        _ => None,
    };
    for i in 0..f.arity() {
        path.push(i);
        let hit = find_pre(f.child(i).expect("child"), path, op, pick);
        path.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// First node in postorder (innermost, leftmost) for which `pick` answers.
fn find_post<T>(
    f: &Formula,
    path: &mut Vec<usize>,
    pick: &mut dyn FnMut(&Formula, &[usize]) -> Option<T>,
) -> Option<T> {
    for i in 0..f.arity() {
        path.push(i);
        let hit = find_post(f.child(i).expect("child"), path, pick);
        path.pop();
        if hit.is_some() {
            return hit;
        }
    }
    pick(f, path)
}

fn nnf_move(f: &Formula) -> Option<(LawId, usize)> {
    match f {
        Formula::Binary {
            op: Connective::Iff, ..
        } => Some((LawId::El2, 0)),
        Formula::Binary {
            op: Connective::Implies,
            ..
        } => Some((LawId::El1, 0)),
        Formula::Not { child } => match child.as_ref() {
            Formula::Binary {
                op: Connective::And, ..
            } => Some((LawId::DeMorganAnd, 0)),
            Formula::Binary { op: Connective::Or, .. } => Some((LawId::DeMorganOr, 0)),
            Formula::Not { .. } => Some((LawId::DoubleNegation, 0)),
            Formula::Const { value: true } => Some((LawId::Negation, 4)),
            Formula::Const { value: false } => Some((LawId::Negation, 5)),
            _ => None,
        },
        _ => None,
    }
}

/// Eliminates → and ↔ and pushes negations down to the atoms, outermost first.
pub(crate) fn nnf(tr: &mut Tracer) -> Result<(), Error> {
    loop {
        let hit = find_pre(&tr.cur, &mut Vec::new(), None, &mut |f, p, _| {
            nnf_move(f).map(|m| (Path(p.to_vec()), m))
        });
        let Some((p, (law, schema))) = hit else { return Ok(()) };
        tr.apply(law, schema, LR, &p)?;
    }
}

fn is_neg_of(a: &Formula, b: &Formula) -> bool {
    a.as_not() == Some(b)
}

/// A size-reducing law applicable at this node, by schema.
fn simplify_move(f: &Formula) -> Option<(LawId, usize)> {
    use Connective::{And, Or};
    match f {
        Formula::Not { child } => match child.as_ref() {
            Formula::Not { .. } => Some((LawId::DoubleNegation, 0)),
            Formula::Const { value: true } => Some((LawId::Negation, 4)),
            Formula::Const { value: false } => Some((LawId::Negation, 5)),
            _ => None,
        },
        Formula::Binary { op, left, right } if is_chain_op(*op) => {
            let and = *op == And;
            let (l, r) = (left.as_ref(), right.as_ref());
            let zero = !and;
            let unit = and;
            if r.is_const(zero) {
                return Some((LawId::Domination, if and { 2 } else { 0 }));
            }
            if l.is_const(zero) {
                return Some((LawId::Domination, if and { 3 } else { 1 }));
            }
            if r.is_const(unit) {
                return Some((LawId::Identity, if and { 0 } else { 2 }));
            }
            if l.is_const(unit) {
                return Some((LawId::Identity, if and { 1 } else { 3 }));
            }
            if is_neg_of(r, l) {
                return Some((LawId::Negation, if and { 2 } else { 0 }));
            }
            if is_neg_of(l, r) {
                return Some((LawId::Negation, if and { 3 } else { 1 }));
            }
            if l == r {
                return Some((LawId::Idempotence, if and { 0 } else { 1 }));
            }
            let base = if and { 4 } else { 0 };
            let inner = if and { Or } else { And };
            if let Some((a, b)) = r.as_binary(inner) {
                if a == l {
                    return Some((LawId::Absorption, base));
                }
                if b == l {
                    return Some((LawId::Absorption, base + 1));
                }
            }
            if let Some((a, b)) = l.as_binary(inner) {
                if a == r {
                    return Some((LawId::Absorption, base + 2));
                }
                if b == r {
                    return Some((LawId::Absorption, base + 3));
                }
            }
            None
        }
        _ => None,
    }
}

fn simplify_local(tr: &mut Tracer) -> Result<bool, Error> {
    let hit = find_post(&tr.cur, &mut Vec::new(), &mut |f, p| {
        simplify_move(f).map(|m| (Path(p.to_vec()), m))
    });
    match hit {
        Some((p, (law, schema))) => {
            tr.apply(law, schema, LR, &p)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

pub(crate) fn chain_elems(f: &Formula, op: Connective) -> Vec<&Formula> {
    let mut out = Vec::new();
    let mut stack = vec![f];
    while let Some(n) = stack.pop() {
        match n.as_binary(op) {
            Some((l, r)) => {
                stack.push(r);
                stack.push(l);
            }
            None => out.push(n),
        }
    }
    out
}

fn spine(p: &Path, k: usize) -> Path {
    let mut q = p.clone();
    q.0.extend(std::iter::repeat_n(1, k));
    q
}

fn elem_path(p: &Path, k: usize, n: usize) -> Path {
    if k + 1 == n {
        spine(p, k)
    } else {
        spine(p, k).child(0)
    }
}

/// Reassociates the chain at `p` to the right: `x₀ ∘ (x₁ ∘ (… ∘ xₙ))`.
fn right_assoc(tr: &mut Tracer, p: &Path, op: Connective) -> Result<(), Error> {
    let mut q = p.clone();
    loop {
        let Some((l, _)) = tr.node(&q).as_binary(op) else {
            return Ok(());
        };
        if l.as_binary(op).is_some() {
            tr.apply(assoc(op), 0, LR, &q)?;
        } else {
            q = q.child(1);
        }
    }
}

/// Swaps elements `k` and `k + 1` of a right-nested chain of `n` elements.
fn swap(tr: &mut Tracer, p: &Path, op: Connective, k: usize, n: usize) -> Result<(), Error> {
    let q = spine(p, k);
    if k + 2 == n {
        tr.apply(comm(op), 0, LR, &q)
    } else {
        tr.apply(assoc(op), 0, RL, &q)?;
        tr.apply(comm(op), 0, LR, &q.child(0))?;
        tr.apply(assoc(op), 0, LR, &q)
    }
}

fn move_to(tr: &mut Tracer, p: &Path, op: Connective, from: usize, to: usize, n: usize) -> Result<(), Error> {
    for k in (to..from).rev() {
        swap(tr, p, op, k, n)?;
    }
    Ok(())
}

/// Groups elements `k` and `k + 1` into one node and returns its path.
fn group(tr: &mut Tracer, p: &Path, op: Connective, k: usize, n: usize) -> Result<Path, Error> {
    let q = spine(p, k);
    if k + 2 == n {
        Ok(q)
    } else {
        tr.apply(assoc(op), 0, RL, &q)?;
        Ok(q.child(0))
    }
}

#[derive(Debug, Clone, Copy)]
enum Pair {
    Complement,
    Duplicate,
    /// Element `i` absorbs element `j` (or equals it up to order).
    Absorb,
}

fn multiset_le(small: &[&Formula], big: &[&Formula]) -> bool {
    let mut used = vec![false; big.len()];
    small
        .iter()
        .all(|s| match (0..big.len()).find(|&k| !used[k] && big[k] == *s) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        })
}

fn find_pair(es: &[&Formula], op: Connective) -> Option<(Pair, usize, usize)> {
    for j in 1..es.len() {
        for i in 0..j {
            if is_neg_of(es[i], es[j]) || is_neg_of(es[j], es[i]) {
                return Some((Pair::Complement, i, j));
            }
            if es[i] == es[j] {
                return Some((Pair::Duplicate, i, j));
            }
        }
    }
    let inner = dual(op);
    let parts: Vec<Vec<&Formula>> = es.iter().map(|e| chain_elems(e, inner)).collect();
    for j in 0..es.len() {
        if es[j].as_binary(inner).is_none() {
            continue;
        }
        for i in 0..es.len() {
            if i != j && parts[i].len() <= parts[j].len() && multiset_le(&parts[i], &parts[j]) {
                return Some((Pair::Absorb, i, j));
            }
        }
    }
    None
}

/// Finds two elements of one chain that cancel, repeat, or absorb, brings
/// them together and applies Negation, Idempotence or Absorption.
fn chain_simplify(tr: &mut Tracer) -> Result<bool, Error> {
    let hit = find_pre(&tr.cur, &mut Vec::new(), None, &mut |f, p, parent| {
        let Formula::Binary { op, .. } = f else { return None };
        if !is_chain_op(*op) || parent == Some(*op) {
            return None;
        }
        let es = chain_elems(f, *op);
        find_pair(&es, *op).map(|pair| (Path(p.to_vec()), *op, pair))
    });
    let Some((p, op, (kind, i, j))) = hit else {
        return Ok(false);
    };
    let and = op == Connective::And;
    right_assoc(tr, &p, op)?;
    let n = chain_elems(tr.node(&p), op).len();
    // Bring the pair together as (first, second) with `lo` first.
    let (lo, hi) = (i.min(j), i.max(j));
    move_to(tr, &p, op, hi, lo + 1, n)?;
    if let Pair::Absorb = kind {
        if i > j {
            swap(tr, &p, op, lo, n)?;
        }
    }
    let g = group(tr, &p, op, lo, n)?;
    match kind {
        Pair::Complement => {
            let (l, r) = tr.node(&g).as_binary(op).expect("grouped pair");
            let schema = match (is_neg_of(l, r), and) {
                (false, false) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (true, true) => 3,
            };
            tr.apply(LawId::Negation, schema, LR, &g)?;
        }
        Pair::Duplicate => tr.apply(LawId::Idempotence, if and { 0 } else { 1 }, LR, &g)?,
        Pair::Absorb => absorb(tr, &g, op)?,
    }
    Ok(true)
}

/// At `g = small ∘ big`, where the ∘' elements of `small` are a sub-multiset
/// of those of `big`, reorders `big` to start with `small` and absorbs it.
fn absorb(tr: &mut Tracer, g: &Path, op: Connective) -> Result<(), Error> {
    let inner = dual(op);
    let (small_p, big_p) = (g.child(0), g.child(1));
    right_assoc(tr, &small_p, inner)?;
    right_assoc(tr, &big_p, inner)?;
    let small: Vec<Formula> = chain_elems(tr.node(&small_p), inner).into_iter().cloned().collect();
    let m = small.len();
    for (t, want) in small.iter().enumerate() {
        let big = chain_elems(tr.node(&big_p), inner);
        let n = big.len();
        let pos = (t..n).find(|&k| big[k] == want).expect("sub-multiset");
        move_to(tr, &big_p, inner, pos, t, n)?;
    }
    let n = chain_elems(tr.node(&big_p), inner).len();
    let and = op == Connective::And;
    if n == m {
        return tr.apply(LawId::Idempotence, if and { 0 } else { 1 }, LR, g);
    }
    for t in (0..m.saturating_sub(1)).rev() {
        tr.apply(assoc(inner), 0, RL, &spine(&big_p, t))?;
    }
    tr.apply(LawId::Absorption, if and { 4 } else { 0 }, LR, g)
}

fn distribute(tr: &mut Tracer, outer: Connective) -> Result<bool, Error> {
    let law = if outer == Connective::And {
        LawId::DistAndOverOr
    } else {
        LawId::DistOrOverAnd
    };
    let inner = dual(outer);
    let hit = find_post(&tr.cur, &mut Vec::new(), &mut |f, p| {
        let (l, r) = f.as_binary(outer)?;
        let schema = if r.as_binary(inner).is_some() {
            0
        } else if l.as_binary(inner).is_some() {
            1
        } else {
            return None;
        };
        Some((Path(p.to_vec()), schema))
    });
    match hit {
        Some((p, schema)) => {
            tr.apply(law, schema, LR, &p)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

pub(crate) struct VarOrder {
    index: HashMap<Var, usize>,
}

impl VarOrder {
    pub fn new(order: &[Var]) -> Self {
        VarOrder {
            index: order.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect(),
        }
    }

    fn key(&self, f: &Formula) -> Option<(usize, String, bool)> {
        let lit = f.as_literal()?;
        let i = self.index.get(&lit.atom).copied().unwrap_or(usize::MAX);
        Some((i, lit.atom.to_string(), lit.negated))
    }
}

/// Sorts one chain of literals into variable order.
fn sort_literal_chains(tr: &mut Tracer, order: &VarOrder) -> Result<bool, Error> {
    let hit = find_pre(&tr.cur, &mut Vec::new(), None, &mut |f, p, parent| {
        let Formula::Binary { op, .. } = f else { return None };
        if !is_chain_op(*op) || parent == Some(*op) {
            return None;
        }
        let keys: Option<Vec<_>> = chain_elems(f, *op).into_iter().map(|e| order.key(e)).collect();
        let keys = keys?;
        if keys.windows(2).all(|w| w[0] <= w[1]) {
            return None;
        }
        Some((Path(p.to_vec()), *op))
    });
    let Some((p, op)) = hit else { return Ok(false) };
    right_assoc(tr, &p, op)?;
    let mut keys: Vec<_> = chain_elems(tr.node(&p), op)
        .into_iter()
        .map(|e| order.key(e).expect("literal"))
        .collect();
    let n = keys.len();
    for i in 1..n {
        let mut j = i;
        while j > 0 && keys[j - 1] > keys[j] {
            swap(tr, &p, op, j - 1, n)?;
            keys.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(true)
}

/// Reassociates every ∧/∨ chain to the left, the shape flat chains parse to.
pub(crate) fn left_assoc_all(tr: &mut Tracer) -> Result<(), Error> {
    loop {
        let hit = find_pre(&tr.cur, &mut Vec::new(), None, &mut |f, p, _| {
            let Formula::Binary { op, right, .. } = f else {
                return None;
            };
            (is_chain_op(*op) && right.as_binary(*op).is_some()).then(|| (Path(p.to_vec()), *op))
        });
        let Some((p, op)) = hit else { return Ok(()) };
        tr.apply(assoc(op), 0, RL, &p)?;
    }
}

fn estimate_terms(f: &Formula, outer: Connective) -> u128 {
    match f {
        Formula::Binary { op, left, right } if is_chain_op(*op) => {
            let (a, b) = (estimate_terms(left, outer), estimate_terms(right, outer));
            if *op == outer {
                a.saturating_add(b)
            } else {
                a.saturating_mul(b)
            }
        }
        _ => 1,
    }
}

/// NNF, then distribution of `term_op` over its dual until the formula is a
/// `dual(term_op)` of `term_op`-terms, simplifying between rounds.
pub(crate) fn normal_form(
    tr: &mut Tracer,
    term_op: Connective,
    order: &VarOrder,
    term_cap: usize,
) -> Result<(), Error> {
    nnf(tr)?;
    let estimate = estimate_terms(&tr.cur, dual(term_op));
    if estimate > term_cap as u128 {
        return Err(Error::TermBlowupLimit {
            estimate,
            cap: term_cap,
        });
    }
    loop {
        if simplify_local(tr)? || chain_simplify(tr)? || distribute(tr, term_op)? || sort_literal_chains(tr, order)? {
            continue;
        }
        return left_assoc_all(tr);
    }
}

/// Expands every term of a normal form over `order` into canonical terms,
/// then sorts them by index and merges repeats.
///
/// `term_op` is ∧ for the principal disjunctive form and ∨ for the
/// conjunctive one. The input must be the output of [`normal_form`].
pub(crate) fn expand_canonical(tr: &mut Tracer, term_op: Connective, order: &[Var]) -> Result<(), Error> {
    let outer = dual(term_op);
    let root = Path::root();
    if tr.cur.is_const(term_op == Connective::Or) {
        // Empty sum / product: nothing to expand.
        return Ok(());
    }
    right_assoc(tr, &root, outer)?;
    let n = chain_elems(&tr.cur, outer).len();
    for k in (0..n).rev() {
        right_assoc(tr, &elem_path(&root, k, n), term_op)?;
        expand_term(tr, &elem_path(&root, k, n), term_op, order)?;
    }
    right_assoc(tr, &root, outer)?;
    let negative_bit = term_op == Connective::Or;
    let index_of = |f: &Formula| -> u64 {
        let lits = chain_elems(f, term_op);
        let mut ix = 0u64;
        for (k, v) in order.iter().enumerate() {
            let lit = lits
                .iter()
                .filter_map(|l| l.as_literal())
                .find(|l| &l.atom == v)
                .expect("canonical term");
            if lit.negated == negative_bit {
                ix |= 1 << (order.len() - 1 - k);
            }
        }
        ix
    };
    let mut keys: Vec<u64> = chain_elems(&tr.cur, outer).into_iter().map(index_of).collect();
    let mut i = 1;
    while i < keys.len() {
        let mut j = i;
        let mut merged = false;
        while j > 0 && keys[j - 1] >= keys[j] {
            let n = keys.len();
            if keys[j - 1] == keys[j] {
                let g = group(tr, &root, outer, j - 1, n)?;
                let schema = if outer == Connective::And { 0 } else { 1 };
                tr.apply(LawId::Idempotence, schema, LR, &g)?;
                keys.remove(j);
                merged = true;
                break;
            }
            swap(tr, &root, outer, j - 1, n)?;
            keys.swap(j - 1, j);
            j -= 1;
        }
        if !merged {
            i += 1;
        }
    }
    left_assoc_all(tr)
}

/// Splits the term at `tp` on the first variable of `order` it lacks,
/// recursively, until every piece is canonical.
fn expand_term(tr: &mut Tracer, tp: &Path, term_op: Connective, order: &[Var]) -> Result<(), Error> {
    let and = term_op == Connective::And;
    let term = tr.node(tp).clone();
    let lits: Vec<Var> = if term.is_const(and) {
        Vec::new()
    } else {
        chain_elems(&term, term_op)
            .into_iter()
            .map(|l| l.as_literal().expect("normal term").atom)
            .collect()
    };
    let Some((vi, v)) = order.iter().enumerate().find(|(_, v)| !lits.contains(v)) else {
        return Ok(());
    };
    let unit_schema_right = if and { 0 } else { 2 }; // X ∘ unit ≡ X
    let unit_schema_left = if and { 1 } else { 3 }; // unit ∘ X ≡ X
    let neg_schema = if and { 1 } else { 2 }; // ¬X ∨ X ≡ T  /  X ∧ ¬X ≡ F
    let dist = if and {
        LawId::DistAndOverOr
    } else {
        LawId::DistOrOverAnd
    };
    let seed: Bindings = [Some(Formula::var(v.clone())), None, None];

    if lits.is_empty() {
        tr.apply_seeded(LawId::Negation, neg_schema, RL, tp, seed)?;
    } else {
        let pos_of = |w: &Var| order.iter().position(|o| o == w).unwrap_or(usize::MAX);
        let i = lits.iter().filter(|w| pos_of(w) < vi).count();
        let k = lits.len();
        if i == k {
            let lp = spine(tp, k - 1);
            tr.apply(LawId::Identity, unit_schema_right, RL, &lp)?;
            tr.apply_seeded(LawId::Negation, neg_schema, RL, &lp.child(1), seed)?;
            tr.apply(dist, 0, LR, &lp)?;
            for d in (0..k - 1).rev() {
                tr.apply(dist, 0, LR, &spine(tp, d))?;
            }
        } else {
            let sp = spine(tp, i);
            tr.apply(LawId::Identity, unit_schema_left, RL, &sp)?;
            tr.apply_seeded(LawId::Negation, neg_schema, RL, &sp.child(0), seed)?;
            tr.apply(dist, 1, LR, &sp)?;
            for d in (0..i).rev() {
                tr.apply(dist, 0, LR, &spine(tp, d))?;
            }
        }
    }
    expand_term(tr, &tp.child(0), term_op, order)?;
    expand_term(tr, &tp.child(1), term_op, order)
}
