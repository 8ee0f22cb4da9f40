//! Checks numbered proofs written with inference rules and equivalences.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Argument;
use crate::ac::Ac;
use crate::derivation::{validate_derivation, Derivation, LawRef, Mode, StepRecord};
use crate::formula::{Connective, Formula, Path};
use crate::laws::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InferenceRule {
    /// A → B, A ⊢ B
    MP,
    /// A → B, ¬B ⊢ ¬A
    MT,
    /// A → B, B → C ⊢ A → C
    HS,
    /// A ∨ B, ¬A ⊢ B
    DS,
    /// A ∧ B ⊢ A
    Simp,
    /// A, B ⊢ A ∧ B
    Conj,
    /// A ⊢ A ∨ B
    Add,
    /// A ∨ B, ¬A ∨ C ⊢ B ∨ C
    Res,
}

impl InferenceRule {
    pub fn arity(self) -> usize {
        match self {
            InferenceRule::Simp | InferenceRule::Add => 1,
            _ => 2,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use InferenceRule::*;
        let s = s.trim().to_lowercase();
        Some(match s.as_str() {
            "mp" | "modus ponens" => MP,
            "mt" | "modus tollens" => MT,
            "hs" | "sh" | "silogismo hipotético" | "hypothetical syllogism" => HS,
            "ds" | "sd" | "silogismo disyuntivo" | "disjunctive syllogism" => DS,
            "simp" | "simplificación" | "simplification" => Simp,
            "conj" | "conjunción" | "conjunction" => Conj,
            "add" | "ad" | "adición" | "addition" => Add,
            "res" | "resolución" | "resolution" => Res,
            _ => return None,
        })
    }
}

impl fmt::Display for InferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    Premise,
    /// `lines` are 1-based references to earlier lines.
    Rule {
        rule: InferenceRule,
        lines: Vec<usize>,
    },
    /// One equivalence step (or bundle) from an earlier line.
    Equivalence {
        law: String,
        line: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<Path>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofLine {
    #[serde(with = "crate::parser::as_text")]
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineVerdict {
    pub index: usize,
    pub formula: String,
    pub justification: Justification,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl LineVerdict {
    pub fn render(&self) -> String {
        let why = match &self.justification {
            Justification::Premise => "Premisa".to_string(),
            Justification::Rule { rule, lines } => format!(
                "{rule} {}",
                lines.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
            ),
            Justification::Equivalence { law, line, .. } => format!("{law} {line}"),
        };
        let mark = match &self.error {
            None => String::new(),
            Some(e) => format!("    ✗ {e}"),
        };
        format!("{}. {}    {}{}", self.index, self.formula, why, mark)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulesReport {
    pub lines: Vec<LineVerdict>,
    /// The last line is the conclusion.
    pub concludes: bool,
    pub valid: bool,
}

fn same(a: &Formula, b: &Formula) -> bool {
    a == b
}

fn imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    f.as_binary(Connective::Implies)
}

/// `a` and `b` are complementary: one is the negation of the other.
fn complementary(a: &Formula, b: &Formula) -> bool {
    a.as_not().is_some_and(|x| same(x, b)) || b.as_not().is_some_and(|x| same(x, a))
}

fn check_rule(rule: InferenceRule, cited: &[&Formula], out: &Formula) -> bool {
    use InferenceRule::*;
    let pairs: Vec<(&Formula, &Formula)> = match cited {
        [a, b] => vec![(a, b), (b, a)],
        _ => Vec::new(),
    };
    match rule {
        MP => pairs
            .iter()
            .any(|(i, a)| imp(i).is_some_and(|(l, r)| same(l, a) && same(r, out))),
        MT => pairs
            .iter()
            .any(|(i, nb)| imp(i).is_some_and(|(l, r)| complementary(r, nb) && complementary(l, out))),
        HS => pairs.iter().any(|(x, y)| match (imp(x), imp(y), imp(out)) {
            (Some((a, b)), Some((b2, c)), Some((oa, oc))) => same(b, b2) && same(a, oa) && same(c, oc),
            _ => false,
        }),
        DS => pairs.iter().any(|(d, n)| {
            d.as_binary(Connective::Or)
                .is_some_and(|(l, r)| (complementary(l, n) && same(r, out)) || (complementary(r, n) && same(l, out)))
        }),
        Simp => match cited {
            [c] => c
                .as_binary(Connective::And)
                .is_some_and(|(l, r)| same(l, out) || same(r, out)),
            _ => false,
        },
        Conj => match cited {
            [a, b] => out
                .as_binary(Connective::And)
                .is_some_and(|(l, r)| (same(l, a) && same(r, b)) || (same(l, b) && same(r, a))),
            _ => false,
        },
        Add => match cited {
            [a] => out
                .as_binary(Connective::Or)
                .is_some_and(|(l, r)| same(l, a) || same(r, a)),
            _ => false,
        },
        Res => pairs.iter().any(|(x, y)| {
            let (Some((a, b)), Some((na, c))) = (x.as_binary(Connective::Or), y.as_binary(Connective::Or)) else {
                return false;
            };
            let Some((ob, oc)) = out.as_binary(Connective::Or) else {
                return false;
            };
            let splits = [(a, b), (b, a)];
            let other = [(na, c), (c, na)];
            splits.iter().any(|(p, rest)| {
                other.iter().any(|(np, rest2)| {
                    complementary(p, np) && ((same(rest, ob) && same(rest2, oc)) || (same(rest, oc) && same(rest2, ob)))
                })
            })
        }),
    }
}

fn check_line(arg: &Argument, done: &[ProofLine], line: &ProofLine) -> Result<(), String> {
    let n = done.len() + 1;
    let fetch = |k: usize| {
        if k == 0 || k >= n {
            Err(format!("line {k} is not an earlier line"))
        } else {
            Ok(&done[k - 1].formula)
        }
    };
    match &line.justification {
        Justification::Premise => {
            if arg.premises.contains(&line.formula) {
                Ok(())
            } else {
                Err("not one of the premises".into())
            }
        }
        Justification::Rule { rule, lines } => {
            if lines.len() != rule.arity() {
                return Err(format!("{rule} cites {} line(s)", rule.arity()));
            }
            let cited = lines.iter().map(|&k| fetch(k)).collect::<Result<Vec<_>, _>>()?;
            if check_rule(*rule, &cited, &line.formula) {
                Ok(())
            } else {
                Err(format!("{rule} does not give this formula"))
            }
        }
        Justification::Equivalence { law, line: k, path } => {
            let before = fetch(*k)?;
            let law_ref = LawRef::parse(law).map_err(|e| e.to_string())?;
            let mut d = Derivation::new(before.clone());
            d.steps.push(StepRecord {
                law: law_ref,
                direction: Direction::LeftToRight,
                path: path.clone().unwrap_or_else(Path::root),
                result: line.formula.clone(),
                note: None,
            });
            let report = validate_derivation(&d, Mode::Lenient);
            match report.first_failure() {
                None => Ok(()),
                Some(s) => Err(s.error.clone().unwrap_or_else(|| "invalid step".into())),
            }
        }
    }
}

/// Checks every line; the proof is valid when all lines check and the last
/// one is the conclusion (up to reordering of ∧/∨ operands).
pub fn check_rules_proof(arg: &Argument, lines: &[ProofLine]) -> RulesReport {
    let mut out = Vec::with_capacity(lines.len());
    for (k, line) in lines.iter().enumerate() {
        let res = check_line(arg, &lines[..k], line);
        out.push(LineVerdict {
            index: k + 1,
            formula: line.formula.to_string(),
            justification: line.justification.clone(),
            ok: res.is_ok(),
            error: res.err(),
        });
    }
    let concludes = lines
        .last()
        .is_some_and(|l| Ac::from_formula(&l.formula) == Ac::from_formula(&arg.conclusion));
    let valid = concludes && out.iter().all(|l| l.ok);
    RulesReport {
        lines: out,
        concludes,
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::tests::ANEXO5;
    use crate::parser::parse_infix;

    fn line(f: &str, j: Justification) -> ProofLine {
        ProofLine {
            formula: parse_infix(f).unwrap(),
            justification: j,
        }
    }

    fn rule(rule: InferenceRule, lines: &[usize]) -> Justification {
        Justification::Rule {
            rule,
            lines: lines.to_vec(),
        }
    }

    #[test]
    fn modus_ponens_chain() {
        let a = Argument::parse(ANEXO5[0]).unwrap();
        let proof = [
            line("P", Justification::Premise),
            line("P → (Q ∨ R)", Justification::Premise),
            line("(Q ∨ R) → S", Justification::Premise),
            line("Q ∨ R", rule(InferenceRule::MP, &[2, 1])),
            line("S", rule(InferenceRule::MP, &[3, 4])),
        ];
        let r = check_rules_proof(&a, &proof);
        assert!(r.valid, "{:?}", r.lines);
    }

    #[test]
    fn tollens_and_equivalence() {
        let a = Argument::parse(ANEXO5[2]).unwrap();
        let proof = [
            line("P → Q", Justification::Premise),
            line("Q → R", Justification::Premise),
            line("¬R", Justification::Premise),
            line("P → R", rule(InferenceRule::HS, &[1, 2])),
            line("¬P", rule(InferenceRule::MT, &[4, 3])),
        ];
        assert!(check_rules_proof(&a, &proof).valid);
        let proof = [
            line("P → Q", Justification::Premise),
            line(
                "¬P ∨ Q",
                Justification::Equivalence {
                    law: "Implicación".into(),
                    line: 1,
                    path: None,
                },
            ),
        ];
        let r = check_rules_proof(&a, &proof);
        assert!(r.lines.iter().all(|l| l.ok), "{:?}", r.lines);
        assert!(!r.concludes && !r.valid);
    }

    #[test]
    fn wrong_lines_are_flagged() {
        let a = Argument::parse(ANEXO5[0]).unwrap();
        let proof = [
            line("P", Justification::Premise),
            line("Q", Justification::Premise),
            line("S", rule(InferenceRule::MP, &[1, 5])),
            line("S", rule(InferenceRule::Simp, &[1])),
        ];
        let r = check_rules_proof(&a, &proof);
        assert!(!r.valid);
        assert_eq!(
            r.lines.iter().map(|l| l.ok).collect::<Vec<_>>(),
            [true, false, false, false]
        );
    }

    #[test]
    fn other_rules() {
        let f = |s| parse_infix(s).unwrap();
        let (p, q, r) = (f("P"), f("Q"), f("R"));
        assert!(check_rule(InferenceRule::DS, &[&f("P ∨ Q"), &f("¬Q")], &p));
        assert!(check_rule(InferenceRule::DS, &[&f("¬P"), &f("P ∨ Q")], &q));
        assert!(check_rule(InferenceRule::Conj, &[&p, &q], &f("Q ∧ P")));
        assert!(check_rule(InferenceRule::Add, &[&p], &f("R ∨ P")));
        assert!(check_rule(InferenceRule::Simp, &[&f("P ∧ Q")], &q));
        assert!(check_rule(
            InferenceRule::Res,
            &[&f("P ∨ Q"), &f("¬P ∨ R")],
            &f("Q ∨ R")
        ));
        assert!(!check_rule(
            InferenceRule::Res,
            &[&f("P ∨ Q"), &f("P ∨ R")],
            &f("Q ∨ R")
        ));
        assert!(!check_rule(InferenceRule::MP, &[&f("P → Q"), &q], &p));
        let _ = r;
    }

    #[test]
    fn serde_shape() {
        let l = line("Q ∨ R", rule(InferenceRule::MP, &[2, 1]));
        let j = serde_json::to_string(&l).unwrap();
        assert_eq!(
            j,
            r#"{"formula":"Q ∨ R","justification":{"kind":"rule","rule":"MP","lines":[2,1]}}"#
        );
        assert_eq!(serde_json::from_str::<ProofLine>(&j).unwrap(), l);
    }
}
