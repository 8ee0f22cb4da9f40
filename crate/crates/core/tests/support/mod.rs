//! Brute-force oracle, random formula strategies and the property bodies
//! shared by the property suite and the acceptance run.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use discreta_core::inference::Trace;
use discreta_core::{
    applicable_laws, apply_law, check_argument, check_step, index_sets, parse_infix, parse_polish, print_with, to_cnf,
    to_dnf, to_nnf, to_principal, validate_derivation, Argument, CanonicalKind, Charset, Connective, Formula, Limits,
    Method, Mode, SyntaxStyle, Var, Verdict,
};

type Outcome = Result<(), TestCaseError>;

pub const NAMES: [&str; 6] = ["P", "Q", "R", "S", "U", "W"];

pub fn eval(f: &Formula, env: &BTreeMap<&str, bool>) -> bool {
    match f {
        Formula::Const { value } => *value,
        Formula::Atom { name } => env[name.as_str()],
        Formula::Not { child } => !eval(child, env),
        Formula::Binary { op, left, right } => {
            let (a, b) = (eval(left, env), eval(right, env));
            match op {
                Connective::And => a && b,
                Connective::Or => a || b,
                Connective::Implies => !a || b,
                Connective::Iff => a == b,
            }
        }
    }
}

/// Every assignment over the given names, first name as the high bit.
pub fn rows<'a>(names: &'a [&'static str]) -> impl Iterator<Item = BTreeMap<&'static str, bool>> + 'a {
    let n = names.len();
    (0..1u64 << n).map(move |r| {
        names
            .iter()
            .enumerate()
            .map(|(k, v)| (*v, (r >> (n - 1 - k)) & 1 == 1))
            .collect()
    })
}

pub fn same(a: &Formula, b: &Formula) -> bool {
    rows(&NAMES).all(|env| eval(a, &env) == eval(b, &env))
}

pub fn formula(vars: usize, depth: u32, size: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => (0..vars).prop_map(|i| Formula::atom(NAMES[i])),
        1 => any::<bool>().prop_map(Formula::constant),
    ];
    leaf.prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            2 => inner.clone().prop_map(Formula::not),
            5 => (
                prop_oneof![
                    Just(Connective::And),
                    Just(Connective::Or),
                    Just(Connective::Implies),
                    Just(Connective::Iff)
                ],
                inner.clone(),
                inner
            )
                .prop_map(|(op, l, r)| Formula::binary(op, l, r)),
        ]
    })
}

pub fn atoms_formula(vars: usize, depth: u32, size: u32) -> impl Strategy<Value = Formula> {
    formula(vars, depth, size).prop_filter("no constants", |f| !has_const(f))
}

pub fn has_const(f: &Formula) -> bool {
    match f {
        Formula::Const { .. } => true,
        Formula::Atom { .. } => false,
        Formula::Not { child } => has_const(child),
        Formula::Binary { left, right, .. } => has_const(left) || has_const(right),
    }
}

pub fn literal_shape(f: &Formula) -> bool {
    match f {
        Formula::Atom { .. } | Formula::Const { .. } => true,
        Formula::Not { child } => matches!(**child, Formula::Atom { .. }),
        _ => false,
    }
}

/// Operator `outer` over operator `inner` over literals.
pub fn two_level(f: &Formula, outer: Connective, inner: Connective) -> bool {
    fn chain(f: &Formula, op: Connective, leaf: &dyn Fn(&Formula) -> bool) -> bool {
        match f {
            Formula::Binary { op: o, left, right } if *o == op => chain(left, op, leaf) && chain(right, op, leaf),
            _ => leaf(f),
        }
    }
    chain(f, outer, &|t| chain(t, inner, &literal_shape))
}

pub fn order(n: usize) -> Vec<Var> {
    NAMES[..n].iter().map(|s| Var::new(s).unwrap()).collect()
}

/// Rewrites atoms outside the first `n` names to the first name.
pub fn restrict(f: &Formula, n: usize) -> Formula {
    let names = &NAMES[..n];
    f.substitute(&|v| (!names.contains(&v.as_str())).then(|| Formula::atom(names[0])))
}

pub fn valid_by_oracle(premises: &[Formula], conclusion: &Formula, n: usize) -> bool {
    rows(&NAMES[..n]).all(|env| !premises.iter().all(|p| eval(p, &env)) || eval(conclusion, &env))
}

pub fn round_trip(f: &Formula) -> Outcome {
    for style in [SyntaxStyle::InfixMinimal, SyntaxStyle::InfixFull] {
        for cs in [Charset::Unicode, Charset::Ascii] {
            let text = print_with(f, style, cs);
            prop_assert_eq!(parse_infix(&text).unwrap(), f.clone(), "{}", text);
        }
    }
    let polish = print_with(f, SyntaxStyle::Polish, Charset::Unicode);
    prop_assert_eq!(parse_polish(&polish).unwrap(), f.clone(), "{}", polish);
    Ok(())
}

pub fn moves_preserve_meaning(f: &Formula) -> Outcome {
    for path in f.positions() {
        for (law, dir) in applicable_laws(f, &path, true).unwrap() {
            let Ok(g) = apply_law(f, law, dir, &path) else { continue };
            prop_assert!(same(f, &g), "{:?} {:?} at {:?}: {} => {}", law, dir, path, f, g);
            prop_assert!(check_step(f, &g, law, dir, &path).is_ok());
        }
    }
    Ok(())
}

pub fn normal_forms_equivalent(f: &Formula) -> Outcome {
    let (nnf, t) = to_nnf(f);
    prop_assert!(nnf.is_nnf());
    prop_assert!(same(f, &nnf));
    prop_assert_eq!(t.final_formula(), &nnf);
    // Term-cap refusals are allowed; anything produced must be right.
    match to_dnf(f) {
        Ok((dnf, _)) => {
            let dnf = dnf.to_formula();
            prop_assert!(two_level(&dnf, Connective::Or, Connective::And), "{}", dnf);
            prop_assert!(same(f, &dnf), "{} vs {}", f, dnf);
        }
        Err(e) => prop_assert!(e.is_resource_limit(), "{}", e),
    }
    match to_cnf(f) {
        Ok((cnf, _)) => {
            let cnf = cnf.to_formula();
            prop_assert!(two_level(&cnf, Connective::And, Connective::Or), "{}", cnf);
            prop_assert!(same(f, &cnf), "{} vs {}", f, cnf);
        }
        Err(e) => prop_assert!(e.is_resource_limit(), "{}", e),
    }
    Ok(())
}

pub fn index_partition(f: &Formula, n: usize) -> Outcome {
    let f = restrict(f, n);
    let sets = index_sets(&f, &order(n)).unwrap();
    let mut want_min = Vec::new();
    let mut want_max = Vec::new();
    for (i, env) in rows(&NAMES[..n]).enumerate() {
        if eval(&f, &env) {
            want_min.push(i as u64)
        } else {
            want_max.push(i as u64)
        }
    }
    prop_assert_eq!(&sets.minterms, &want_min);
    prop_assert_eq!(&sets.maxterms, &want_max);
    Ok(())
}

pub fn normal_form_traces_validate(f: &Formula) -> Outcome {
    let (_, t) = to_nnf(f);
    prop_assert!(validate_derivation(&t, Mode::Strict).valid, "nnf {}", f);
    let (_, t) = to_dnf(f).unwrap();
    prop_assert!(validate_derivation(&t, Mode::Strict).valid, "dnf {}", f);
    let (_, t) = to_cnf(f).unwrap();
    prop_assert!(validate_derivation(&t, Mode::Strict).valid, "cnf {}", f);
    Ok(())
}

pub fn principal_forms(f: &Formula, n: usize) -> Outcome {
    let f = restrict(f, n);
    let ord = order(n);
    let ones: Vec<u64> = rows(&NAMES[..n])
        .enumerate()
        .filter(|(_, e)| eval(&f, e))
        .map(|(i, _)| i as u64)
        .collect();
    let zeros: Vec<u64> = (0..1u64 << n).filter(|i| !ones.contains(i)).collect();

    let (fndp, t) = to_principal(&f, CanonicalKind::Fndp, &ord).unwrap();
    prop_assert_eq!(fndp.term_indices(), &ones[..]);
    prop_assert!(same(&f, &fndp.to_formula()));
    prop_assert!(validate_derivation(&t, Mode::Strict).valid, "fndp {}", f);

    let (fncp, t) = to_principal(&f, CanonicalKind::Fncp, &ord).unwrap();
    prop_assert_eq!(fncp.term_indices(), &zeros[..]);
    prop_assert!(same(&f, &fncp.to_formula()));
    prop_assert!(validate_derivation(&t, Mode::Strict).valid, "fncp {}", f);
    Ok(())
}

pub fn consequence_methods(premises: &[Formula], conclusion: &Formula) -> Outcome {
    let arg = Argument::new(premises.to_vec(), conclusion.clone());
    let valid = valid_by_oracle(premises, conclusion, 5);
    let limits = Limits::default();
    for method in [Method::Definition, Method::Resolution, Method::Direct, Method::Indirect] {
        let r = check_argument(&arg, method, &limits).unwrap();
        match (method, r.verdict) {
            (Method::Definition | Method::Resolution, v) => {
                let want = if valid { Verdict::Valid } else { Verdict::Invalid };
                prop_assert_eq!(v, want, "{:?} {:?}", method, arg);
            }
            (_, Verdict::Valid) => prop_assert!(valid, "{:?} {:?}", method, arg),
            (_, Verdict::Invalid) => prop_assert!(!valid, "{:?} {:?}", method, arg),
            (_, Verdict::Inconclusive) => {}
        }
        if let Some(cm) = &r.countermodel {
            let env: BTreeMap<&str, bool> = NAMES
                .iter()
                .map(|n| (*n, cm.get(&Var::new(n).unwrap()).unwrap_or(false)))
                .collect();
            prop_assert!(premises.iter().all(|p| eval(p, &env)) && !eval(conclusion, &env));
        }
        prop_assert!(
            r.replay(&arg).is_ok(),
            "{:?} trace of {:?} does not replay",
            method,
            arg
        );
        if let Trace::Derivation { derivation } = &r.trace {
            prop_assert!(validate_derivation(derivation, Mode::Lenient).valid);
        }
    }
    Ok(())
}

pub fn argument(vars: usize) -> impl Strategy<Value = (Vec<Formula>, Formula)> {
    (
        prop::collection::vec(atoms_formula(vars, 3, 8), 1..=3),
        atoms_formula(vars, 2, 4),
    )
}
