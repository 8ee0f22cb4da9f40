//! Text to formula and back: infix with precedence, Polish prefix notation
//! and fully parenthesized printing.
//!
//! Infix grammar, tightest binding first:
//!
//! ```text
//! formula  = iff
//! iff      = implies [ ("↔" | "<->") iff ]        (right associative)
//! implies  = or [ ("→" | "->") implies ]          (right associative)
//! or       = and { ("∨" | "|") and }             (left associative)
//! and      = unary { ("∧" | "&") unary }         (left associative)
//! unary    = ("¬" | "~" | "!") unary | primary
//! primary  = "T" | "V" | "F" | ident | "(" formula ")"
//! ident    = letter { letter | digit | "_" }
//! ```
//!
//! `T` and `V` denote true, `F` false, so no atom can carry those names.

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Connective, Formula, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SyntaxStyle {
    /// Only the parentheses the precedence table requires.
    InfixMinimal,
    /// Every binary node parenthesized.
    InfixFull,
    /// Prefix tokens separated by single spaces.
    Polish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Charset {
    #[default]
    Unicode,
    Ascii,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("at offset {position}: expected {expected}, found {found}")]
pub struct ParseError {
    /// Character (not byte) offset into the input.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    Op(Connective),
    LParen,
    RParen,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Const(true) => "T".into(),
            Tok::Const(false) => "F".into(),
            Tok::Not => "¬".into(),
            Tok::Op(c) => c.symbol().into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

const END: &str = "end of input";

fn lex(text: &str) -> Result<(Vec<(usize, Tok)>, usize), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '¬' | '~' | '!' => Tok::Not,
            '∧' | '&' => Tok::Op(Connective::And),
            '∨' | '|' => Tok::Op(Connective::Or),
            '→' => Tok::Op(Connective::Implies),
            '↔' => Tok::Op(Connective::Iff),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Op(Connective::Implies)
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Tok::Op(Connective::Iff)
            }
            c if c.is_alphabetic() => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                match word.as_str() {
                    "T" | "V" => Tok::Const(true),
                    "F" => Tok::Const(false),
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    position: start,
                    expected: "a formula token".into(),
                    found: other.to_string(),
                })
            }
        };
        i += 1;
        toks.push((start, tok));
    }
    Ok((toks, chars.len()))
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().map(Tok::text).unwrap_or_else(|| END.into()),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn atom(name: String) -> Formula {
        Formula::var(Var::new(&name).expect("lexer only yields valid identifiers"))
    }
}

/// Parses infix notation with precedence ¬ > ∧ > ∨ > → > ↔.
pub fn parse_infix(text: &str) -> Result<Formula, ParseError> {
    let (toks, end) = lex(text)?;
    let mut cur = Cursor { toks, pos: 0, end };
    let f = infix_expr(&mut cur, 0)?;
    if cur.peek().is_some() {
        return Err(cur.error("a connective or end of input"));
    }
    Ok(f)
}

fn infix_expr(cur: &mut Cursor, min_prec: u8) -> Result<Formula, ParseError> {
    let mut lhs = infix_unary(cur)?;
    while let Some(Tok::Op(op)) = cur.peek() {
        let op = *op;
        let prec = op.precedence();
        if prec < min_prec {
            break;
        }
        cur.bump();
        let next_min = if op.is_right_assoc() { prec } else { prec + 1 };
        let rhs = infix_expr(cur, next_min)?;
        lhs = Formula::binary(op, lhs, rhs);
    }
    Ok(lhs)
}

fn infix_unary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    match cur.peek() {
        Some(Tok::Not) => {
            cur.bump();
            Ok(Formula::not(infix_unary(cur)?))
        }
        Some(Tok::LParen) => {
            cur.bump();
            let inner = infix_expr(cur, 0)?;
            match cur.peek() {
                Some(Tok::RParen) => {
                    cur.bump();
                    Ok(inner)
                }
                _ => Err(cur.error("')'")),
            }
        }
        Some(Tok::Const(v)) => {
            let v = *v;
            cur.bump();
            Ok(Formula::constant(v))
        }
        Some(Tok::Ident(_)) => match cur.bump() {
            Some(Tok::Ident(name)) => Ok(Cursor::atom(name)),
            _ => unreachable!(),
        },
        _ => Err(cur.error("a formula")),
    }
}

/// Parses prefix (Polish) notation, e.g. `∨ A ∧ ¬ B C`.
pub fn parse_polish(text: &str) -> Result<Formula, ParseError> {
    let (toks, end) = lex(text)?;
    let mut cur = Cursor { toks, pos: 0, end };
    let f = polish_expr(&mut cur)?;
    if cur.peek().is_some() {
        return Err(cur.error("end of input"));
    }
    Ok(f)
}

fn polish_expr(cur: &mut Cursor) -> Result<Formula, ParseError> {
    // An explicit stack keeps deep inputs off the call stack.
    enum Frame {
        Not,
        Bin(Connective, Option<Formula>),
    }
    let mut stack: Vec<Frame> = Vec::new();
    loop {
        let mut done = match cur.peek() {
            Some(Tok::Not) => {
                cur.bump();
                stack.push(Frame::Not);
                continue;
            }
            Some(Tok::Op(op)) => {
                let op = *op;
                cur.bump();
                stack.push(Frame::Bin(op, None));
                continue;
            }
            Some(Tok::Const(v)) => {
                let v = *v;
                cur.bump();
                Formula::constant(v)
            }
            Some(Tok::Ident(_)) => match cur.bump() {
                Some(Tok::Ident(name)) => Cursor::atom(name),
                _ => unreachable!(),
            },
            _ => return Err(cur.error("an operand")),
        };
        loop {
            match stack.pop() {
                None => return Ok(done),
                Some(Frame::Not) => done = Formula::not(done),
                Some(Frame::Bin(op, None)) => {
                    stack.push(Frame::Bin(op, Some(done)));
                    break;
                }
                Some(Frame::Bin(op, Some(left))) => done = Formula::binary(op, left, done),
            }
        }
    }
}

/// Parses in the notation named by `style` (both infix styles share a parser).
pub fn parse(text: &str, style: SyntaxStyle) -> Result<Formula, ParseError> {
    match style {
        SyntaxStyle::Polish => parse_polish(text),
        _ => parse_infix(text),
    }
}

/// Serde adapter storing a formula as its minimal infix text.
pub mod as_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::formula::Formula;

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&f.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_infix(&text).map_err(serde::de::Error::custom)
    }
}

pub fn print(f: &Formula, style: SyntaxStyle) -> String {
    print_with(f, style, Charset::Unicode)
}

pub fn print_with(f: &Formula, style: SyntaxStyle, charset: Charset) -> String {
    let mut out = String::new();
    let p = Printer { charset };
    match style {
        SyntaxStyle::InfixMinimal => p.minimal(f, &mut out),
        SyntaxStyle::InfixFull => p.full(f, &mut out),
        SyntaxStyle::Polish => p.polish(f, &mut out),
    }
    out
}

struct Printer {
    charset: Charset,
}

impl Printer {
    fn op(&self, c: Connective) -> &'static str {
        match self.charset {
            Charset::Unicode => c.symbol(),
            Charset::Ascii => c.ascii(),
        }
    }

    fn neg(&self) -> &'static str {
        match self.charset {
            Charset::Unicode => "¬",
            Charset::Ascii => "~",
        }
    }

    fn leaf(&self, f: &Formula, out: &mut String) -> bool {
        match f {
            Formula::Const { value: true } => out.push('T'),
            Formula::Const { value: false } => out.push('F'),
            Formula::Atom { name } => out.push_str(name.as_str()),
            _ => return false,
        }
        true
    }

    fn minimal(&self, f: &Formula, out: &mut String) {
        if self.leaf(f, out) {
            return;
        }
        match f {
            Formula::Not { child } => {
                out.push_str(self.neg());
                self.minimal_paren(child, child.arity() == 2, out);
            }
            Formula::Binary { op, left, right } => {
                let prec = op.precedence();
                let left_paren = binary_prec(left).is_some_and(|lp| lp < prec || (lp == prec && op.is_right_assoc()));
                let right_paren =
                    binary_prec(right).is_some_and(|rp| rp < prec || (rp == prec && !op.is_right_assoc()));
                self.minimal_paren(left, left_paren, out);
                out.push(' ');
                out.push_str(self.op(*op));
                out.push(' ');
                self.minimal_paren(right, right_paren, out);
            }
            _ => unreachable!(),
        }
    }

    fn minimal_paren(&self, f: &Formula, paren: bool, out: &mut String) {
        if paren {
            out.push('(');
            self.minimal(f, out);
            out.push(')');
        } else {
            self.minimal(f, out);
        }
    }

    fn full(&self, f: &Formula, out: &mut String) {
        if self.leaf(f, out) {
            return;
        }
        match f {
            Formula::Not { child } => {
                out.push_str(self.neg());
                self.full(child, out);
            }
            Formula::Binary { op, left, right } => {
                out.push('(');
                self.full(left, out);
                out.push(' ');
                out.push_str(self.op(*op));
                out.push(' ');
                self.full(right, out);
                out.push(')');
            }
            _ => unreachable!(),
        }
    }

    fn polish(&self, f: &Formula, out: &mut String) {
        if !out.is_empty() {
            out.push(' ');
        }
        if self.leaf(f, out) {
            return;
        }
        match f {
            Formula::Not { child } => {
                out.push_str(self.neg());
                self.polish(child, out);
            }
            Formula::Binary { op, left, right } => {
                out.push_str(self.op(*op));
                self.polish(left, out);
                self.polish(right, out);
            }
            _ => unreachable!(),
        }
    }
}

fn binary_prec(f: &Formula) -> Option<u8> {
    match f {
        Formula::Binary { op, .. } => Some(op.precedence()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let expected = Formula::or(a("A"), Formula::and(Formula::not(a("B")), a("C")));
        assert_eq!(parse_infix("A ∨ ¬B ∧ C").unwrap(), expected);
        assert_eq!(parse_infix("A | ~B & C").unwrap(), expected);
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse_infix("P -> Q -> R").unwrap(),
            Formula::implies(a("P"), Formula::implies(a("Q"), a("R")))
        );
        assert_eq!(
            parse_infix("P <-> Q ↔ R").unwrap(),
            Formula::iff(a("P"), Formula::iff(a("Q"), a("R")))
        );
    }

    #[test]
    fn conjunction_is_left_associative() {
        assert_eq!(
            parse_infix("P ∧ Q ∧ R").unwrap(),
            Formula::and(Formula::and(a("P"), a("Q")), a("R"))
        );
    }

    #[test]
    fn redundant_parens_and_constants() {
        assert_eq!(parse_infix("((P))").unwrap(), a("P"));
        assert_eq!(parse_infix("T ∧ V ∨ F").unwrap().to_string(), "T ∧ T ∨ F");
    }

    #[test]
    fn infix_errors() {
        let e = parse_infix("P -> ").unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.found, "end of input");
        assert!(parse_infix("").is_err());
        let e = parse_infix("(P ∧ Q").unwrap_err();
        assert_eq!((e.position, e.expected.as_str()), (6, "')'"));
        let e = parse_infix("P Q").unwrap_err();
        assert_eq!((e.position, e.found.as_str()), (2, "Q"));
        let e = parse_infix("P # Q").unwrap_err();
        assert_eq!((e.position, e.found.as_str()), (2, "#"));
        let e = parse_infix("P ∧ )").unwrap_err();
        assert_eq!(e.position, 4);
    }

    #[test]
    fn polish_parsing() {
        assert_eq!(parse_polish("∨ A ∧ ¬ B C").unwrap(), parse_infix("A ∨ ¬B ∧ C").unwrap());
        assert_eq!(parse_polish("→ P Q").unwrap(), Formula::implies(a("P"), a("Q")));
        let e = parse_polish("∧ P").unwrap_err();
        assert_eq!((e.position, e.found.as_str()), (3, "end of input"));
        let e = parse_polish("P Q").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_polish("( P )").is_err());
    }

    #[test]
    fn printing_styles() {
        let f = Formula::or(a("A"), Formula::and(Formula::not(a("B")), a("C")));
        assert_eq!(print(&f, SyntaxStyle::InfixMinimal), "A ∨ ¬B ∧ C");
        assert_eq!(print(&f, SyntaxStyle::InfixFull), "(A ∨ (¬B ∧ C))");
        let g = Formula::implies(a("P"), Formula::implies(a("Q"), a("R")));
        assert_eq!(print(&g, SyntaxStyle::Polish), "→ P → Q R");
        assert_eq!(print_with(&g, SyntaxStyle::InfixMinimal, Charset::Ascii), "P -> Q -> R");
    }

    #[test]
    fn minimal_parens_where_needed() {
        for s in [
            "(P → Q) → R",
            "P ∧ (Q ∧ R)",
            "¬(P ∨ Q)",
            "(P ∨ Q) ∧ R",
            "¬¬P",
            "(P ↔ Q) → R",
        ] {
            let f = parse_infix(s).unwrap();
            assert_eq!(print(&f, SyntaxStyle::InfixMinimal), s);
        }
    }
}
