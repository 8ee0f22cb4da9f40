//! Inputs shared by the benchmarks.

use discreta_core::{parse_infix, Argument, Formula};

pub fn formula(text: &str) -> Formula {
    parse_infix(text).expect("benchmark input parses")
}

/// Chained implications `P0 → P1, …, P(n-1) → Pn, P0 ∴ Pn`.
pub fn chain_argument(n: usize) -> Argument {
    let mut premises: Vec<Formula> = (0..n)
        .map(|i| Formula::implies(Formula::atom(&format!("P{i}")), Formula::atom(&format!("P{}", i + 1))))
        .collect();
    premises.push(Formula::atom("P0"));
    Argument::new(premises, Formula::atom(&format!("P{n}")))
}
