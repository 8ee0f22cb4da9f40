//! The equivalence-law catalog and single-step rewriting at a path.
//!
//! A law is a family of directional schemas over the metavariables `X`, `Y`,
//! `Z`. Applying a law picks the first schema whose source side matches the
//! addressed subformula; checking a recorded step accepts any schema.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Connective, Formula, Path, PathOutOfRange};
use crate::parser::parse_infix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LawId {
    #[serde(rename = "EL1")]
    El1,
    #[serde(rename = "EL2")]
    El2,
    DeMorganAnd,
    DeMorganOr,
    DoubleNegation,
    DistAndOverOr,
    DistOrOverAnd,
    AssocAnd,
    AssocOr,
    CommAnd,
    CommOr,
    Idempotence,
    Negation,
    Identity,
    Domination,
    Absorption,
}

impl LawId {
    pub const ALL: [LawId; 16] = [
        LawId::El1,
        LawId::El2,
        LawId::DeMorganAnd,
        LawId::DeMorganOr,
        LawId::DoubleNegation,
        LawId::DistAndOverOr,
        LawId::DistOrOverAnd,
        LawId::AssocAnd,
        LawId::AssocOr,
        LawId::CommAnd,
        LawId::CommOr,
        LawId::Idempotence,
        LawId::Negation,
        LawId::Identity,
        LawId::Domination,
        LawId::Absorption,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LawId::El1 => "EL1",
            LawId::El2 => "EL2",
            LawId::DeMorganAnd => "DeMorganAnd",
            LawId::DeMorganOr => "DeMorganOr",
            LawId::DoubleNegation => "DoubleNegation",
            LawId::DistAndOverOr => "DistAndOverOr",
            LawId::DistOrOverAnd => "DistOrOverAnd",
            LawId::AssocAnd => "AssocAnd",
            LawId::AssocOr => "AssocOr",
            LawId::CommAnd => "CommAnd",
            LawId::CommOr => "CommOr",
            LawId::Idempotence => "Idempotence",
            LawId::Negation => "Negation",
            LawId::Identity => "Identity",
            LawId::Domination => "Domination",
            LawId::Absorption => "Absorption",
        }
    }

    /// Label used in rendered worked solutions.
    pub fn spanish(self) -> &'static str {
        match self {
            LawId::El1 => "EL 1",
            LawId::El2 => "EL 2",
            LawId::DeMorganAnd | LawId::DeMorganOr => "Ley de Morgan",
            LawId::DoubleNegation => "Doble Negación",
            LawId::DistAndOverOr | LawId::DistOrOverAnd => "Distributiva",
            LawId::AssocAnd | LawId::AssocOr => "Asociativa",
            LawId::CommAnd | LawId::CommOr => "Conmutativa",
            LawId::Idempotence => "Idempotencia",
            LawId::Negation => "Negación",
            LawId::Identity => "Identidad",
            LawId::Domination => "Dominación",
            LawId::Absorption => "Absorción",
        }
    }

    /// Associativity and commutativity only rearrange ∧/∨ chains.
    pub fn is_ac(self) -> bool {
        matches!(self, LawId::AssocAnd | LawId::AssocOr | LawId::CommAnd | LawId::CommOr)
    }

    pub fn law(self) -> &'static Law {
        &catalog()[self as usize]
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "LR")]
    LeftToRight,
    #[serde(rename = "RL")]
    RightToLeft,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Direction::LeftToRight => "LR",
            Direction::RightToLeft => "RL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Meta(usize),
    Const(bool),
    Not(Box<Pattern>),
    Bin(Connective, Box<Pattern>, Box<Pattern>),
}

pub const META_NAMES: [&str; 3] = ["X", "Y", "Z"];

pub type Bindings = [Option<Formula>; 3];

impl Pattern {
    fn from_formula(f: &Formula) -> Pattern {
        match f {
            Formula::Const { value } => Pattern::Const(*value),
            Formula::Atom { name } => Pattern::Meta(
                META_NAMES
                    .iter()
                    .position(|m| *m == name.as_str())
                    .expect("schema atoms are metavariables"),
            ),
            Formula::Not { child } => Pattern::Not(Box::new(Pattern::from_formula(child))),
            Formula::Binary { op, left, right } => Pattern::Bin(
                *op,
                Box::new(Pattern::from_formula(left)),
                Box::new(Pattern::from_formula(right)),
            ),
        }
    }

    pub fn matches(&self, f: &Formula, b: &mut Bindings) -> bool {
        match (self, f) {
            (Pattern::Meta(i), _) => match &b[*i] {
                Some(bound) => bound == f,
                None => {
                    b[*i] = Some(f.clone());
                    true
                }
            },
            (Pattern::Const(v), Formula::Const { value }) => v == value,
            (Pattern::Not(p), Formula::Not { child }) => p.matches(child, b),
            (Pattern::Bin(op, pl, pr), Formula::Binary { op: fop, left, right }) => {
                op == fop && pl.matches(left, b) && pr.matches(right, b)
            }
            _ => false,
        }
    }

    pub fn instantiate(&self, b: &Bindings) -> Option<Formula> {
        Some(match self {
            Pattern::Meta(i) => b[*i].clone()?,
            Pattern::Const(v) => Formula::constant(*v),
            Pattern::Not(p) => Formula::not(p.instantiate(b)?),
            Pattern::Bin(op, l, r) => Formula::binary(*op, l.instantiate(b)?, r.instantiate(b)?),
        })
    }

    fn metas(&self, out: &mut [bool; 3]) {
        match self {
            Pattern::Meta(i) => out[*i] = true,
            Pattern::Const(_) => {}
            Pattern::Not(p) => p.metas(out),
            Pattern::Bin(_, l, r) => {
                l.metas(out);
                r.metas(out);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Schema {
    pub text: &'static str,
    pub lhs: Pattern,
    pub rhs: Pattern,
}

impl Schema {
    fn parse(text: &'static str) -> Schema {
        let (l, r) = text.split_once('≡').expect("schema has ≡");
        let side = |s: &str| Pattern::from_formula(&parse_infix(s.trim()).expect("schema parses"));
        Schema {
            text,
            lhs: side(l),
            rhs: side(r),
        }
    }

    pub fn sides(&self, dir: Direction) -> (&Pattern, &Pattern) {
        match dir {
            Direction::LeftToRight => (&self.lhs, &self.rhs),
            Direction::RightToLeft => (&self.rhs, &self.lhs),
        }
    }

    /// True when the target mentions a metavariable the source does not bind.
    pub fn needs_bindings(&self, dir: Direction) -> bool {
        let (src, tgt) = self.sides(dir);
        let (mut s, mut t) = ([false; 3], [false; 3]);
        src.metas(&mut s);
        tgt.metas(&mut t);
        (0..3).any(|i| t[i] && !s[i])
    }

    pub fn matches_anything(&self, dir: Direction) -> bool {
        matches!(self.sides(dir).0, Pattern::Meta(_))
    }
}

#[derive(Debug)]
pub struct Law {
    pub id: LawId,
    pub schemas: Vec<Schema>,
}

pub fn catalog() -> &'static [Law] {
    static CATALOG: OnceLock<Vec<Law>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let table: [(LawId, &[&'static str]); 16] = [
            (LawId::El1, &["X → Y ≡ ¬X ∨ Y"]),
            (LawId::El2, &["X ↔ Y ≡ (X → Y) ∧ (Y → X)"]),
            (LawId::DeMorganAnd, &["¬(X ∧ Y) ≡ ¬X ∨ ¬Y"]),
            (LawId::DeMorganOr, &["¬(X ∨ Y) ≡ ¬X ∧ ¬Y"]),
            (LawId::DoubleNegation, &["¬¬X ≡ X"]),
            (
                LawId::DistAndOverOr,
                &["X ∧ (Y ∨ Z) ≡ (X ∧ Y) ∨ (X ∧ Z)", "(Y ∨ Z) ∧ X ≡ (Y ∧ X) ∨ (Z ∧ X)"],
            ),
            (
                LawId::DistOrOverAnd,
                &["X ∨ (Y ∧ Z) ≡ (X ∨ Y) ∧ (X ∨ Z)", "(Y ∧ Z) ∨ X ≡ (Y ∨ X) ∧ (Z ∨ X)"],
            ),
            (LawId::AssocAnd, &["(X ∧ Y) ∧ Z ≡ X ∧ (Y ∧ Z)"]),
            (LawId::AssocOr, &["(X ∨ Y) ∨ Z ≡ X ∨ (Y ∨ Z)"]),
            (LawId::CommAnd, &["X ∧ Y ≡ Y ∧ X"]),
            (LawId::CommOr, &["X ∨ Y ≡ Y ∨ X"]),
            (LawId::Idempotence, &["X ∧ X ≡ X", "X ∨ X ≡ X"]),
            (
                LawId::Negation,
                &[
                    "X ∨ ¬X ≡ T",
                    "¬X ∨ X ≡ T",
                    "X ∧ ¬X ≡ F",
                    "¬X ∧ X ≡ F",
                    "¬T ≡ F",
                    "¬F ≡ T",
                ],
            ),
            (LawId::Identity, &["X ∧ T ≡ X", "T ∧ X ≡ X", "X ∨ F ≡ X", "F ∨ X ≡ X"]),
            (LawId::Domination, &["X ∨ T ≡ T", "T ∨ X ≡ T", "X ∧ F ≡ F", "F ∧ X ≡ F"]),
            (
                LawId::Absorption,
                &[
                    "X ∨ (X ∧ Y) ≡ X",
                    "X ∨ (Y ∧ X) ≡ X",
                    "(X ∧ Y) ∨ X ≡ X",
                    "(Y ∧ X) ∨ X ≡ X",
                    "X ∧ (X ∨ Y) ≡ X",
                    "X ∧ (Y ∨ X) ≡ X",
                    "(X ∨ Y) ∧ X ≡ X",
                    "(Y ∨ X) ∧ X ≡ X",
                ],
            ),
        ];
        table
            .into_iter()
            .enumerate()
            .map(|(i, (id, schemas))| {
                assert_eq!(id as usize, i, "catalog order matches LawId discriminants");
                Law {
                    id,
                    schemas: schemas.iter().map(|s| Schema::parse(s)).collect(),
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error(transparent)]
    PathOutOfRange(#[from] PathOutOfRange),
    #[error("{law} ({dir}) does not match at {path}", dir = .dir.tag())]
    PatternMismatch { law: LawId, dir: Direction, path: Path },
    #[error("{law} ({dir}) at {path} introduces a metavariable that needs a binding", dir = .dir.tag())]
    UnboundMetavariable { law: LawId, dir: Direction, path: Path },
    #[error("unknown metavariable {0:?}; use X, Y or Z")]
    UnknownMetavariable(String),
}

/// Rewrites the subformula at `path` with the first matching schema of `law`.
pub fn apply_law(f: &Formula, law: LawId, dir: Direction, path: &Path) -> Result<Formula, LawError> {
    apply_law_with(f, law, dir, path, &BTreeMap::new())
}

/// Like [`apply_law`], with explicit values for metavariables that only the
/// target side mentions (e.g. `X` in `T ⇒ X ∨ ¬X`).
pub fn apply_law_with(
    f: &Formula,
    law: LawId,
    dir: Direction,
    path: &Path,
    extra: &BTreeMap<String, Formula>,
) -> Result<Formula, LawError> {
    let mut seed: Bindings = Default::default();
    for (name, value) in extra {
        let i = META_NAMES
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| LawError::UnknownMetavariable(name.clone()))?;
        seed[i] = Some(value.clone());
    }
    let sub = f.subformula_at(path)?;
    let mut unbound = false;
    for schema in &law.law().schemas {
        let (src, tgt) = schema.sides(dir);
        let mut b = seed.clone();
        // Extra bindings constrain only metavariables the source leaves free.
        let mut src_metas = [false; 3];
        src.metas(&mut src_metas);
        for (i, used) in src_metas.iter().enumerate() {
            if *used {
                b[i] = None;
            }
        }
        if !src.matches(sub, &mut b) {
            continue;
        }
        match tgt.instantiate(&b) {
            Some(out) => return Ok(f.replace_at(path, out)?),
            None => unbound = true,
        }
    }
    if unbound {
        Err(LawError::UnboundMetavariable {
            law,
            dir,
            path: path.clone(),
        })
    } else {
        Err(LawError::PatternMismatch {
            law,
            dir,
            path: path.clone(),
        })
    }
}

/// Applies one specific schema; used by the trace generators, which know
/// which variant they want.
pub(crate) fn apply_schema(
    f: &Formula,
    law: LawId,
    schema: usize,
    dir: Direction,
    path: &Path,
    seed: Bindings,
) -> Option<Formula> {
    let s = &law.law().schemas[schema];
    let (src, tgt) = s.sides(dir);
    let sub = f.subformula_at(path).ok()?;
    let mut b = seed;
    if !src.matches(sub, &mut b) {
        return None;
    }
    f.replace_at(path, tgt.instantiate(&b)?).ok()
}

/// Exact check of one recorded step: `after` differs from `before` only at
/// `path`, and some schema of `law` relates the two subformulas there.
pub fn check_step(before: &Formula, after: &Formula, law: LawId, dir: Direction, path: &Path) -> Result<(), LawError> {
    let old = before.subformula_at(path)?;
    let new = after.subformula_at(path)?;
    let mismatch = || LawError::PatternMismatch {
        law,
        dir,
        path: path.clone(),
    };
    if &before.replace_at(path, new.clone())? != after {
        return Err(mismatch());
    }
    for schema in &law.law().schemas {
        let (src, tgt) = schema.sides(dir);
        let mut b: Bindings = Default::default();
        if src.matches(old, &mut b) && tgt.matches(new, &mut b) {
            return Ok(());
        }
    }
    Err(mismatch())
}

/// Moves that apply at `path`, in catalog order, left-to-right before
/// right-to-left. Directions whose source is a bare metavariable (they match
/// every formula) or that need extra bindings are listed only when
/// `include_expansions` is set; the latter still require bindings to apply.
pub fn applicable_laws(
    f: &Formula,
    path: &Path,
    include_expansions: bool,
) -> Result<Vec<(LawId, Direction)>, PathOutOfRange> {
    let sub = f.subformula_at(path)?;
    let mut out = Vec::new();
    for law in catalog() {
        for dir in [Direction::LeftToRight, Direction::RightToLeft] {
            let fits = law.schemas.iter().any(|s| {
                if !include_expansions && (s.matches_anything(dir) || s.needs_bindings(dir)) {
                    return false;
                }
                let mut b: Bindings = Default::default();
                s.sides(dir).0.matches(sub, &mut b)
            });
            if fits {
                out.push((law.id, dir));
            }
        }
    }
    Ok(out)
}

/// Lowercases, strips Spanish accents and collapses whitespace.
pub fn fold_label(s: &str) -> String {
    let mut out = String::new();
    for c in s.trim().chars() {
        let c = match c {
            'á' | 'Á' => 'a',
            'é' | 'É' => 'e',
            'í' | 'Í' => 'i',
            'ó' | 'Ó' => 'o',
            'ú' | 'Ú' | 'ü' | 'Ü' => 'u',
            'ñ' | 'Ñ' => 'n',
            c => c.to_ascii_lowercase(),
        };
        if c.is_whitespace() {
            if !out.ends_with(' ') {
                out.push(' ');
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown law name {0:?}")]
pub struct UnknownLaw(pub String);

/// Resolves one law name: a catalog id or one of the worked-solution
/// aliases. Aliases such as "Ley de Morgan" stand for several ids.
pub fn resolve_alias(name: &str) -> Result<Vec<LawId>, UnknownLaw> {
    let key: String = fold_label(name)
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '.')
        .collect();
    use LawId::*;
    let ids: &[LawId] = match key.as_str() {
        "el1" | "eli" | "ei1" | "implicacion" | "condicional" => &[El1],
        "el2" | "ei2" | "bicondicional" | "equivalencia" => &[El2],
        "leydemorgan" | "morgan" | "demorgan" => &[DeMorganAnd, DeMorganOr],
        "demorganand" => &[DeMorganAnd],
        "demorganor" => &[DeMorganOr],
        "doblenegacion" | "doublenegation" => &[DoubleNegation],
        "distributiva" | "distributividad" | "dist" | "distrib" | "distributive" => &[DistAndOverOr, DistOrOverAnd],
        "distandoveror" => &[DistAndOverOr],
        "distoroverand" => &[DistOrOverAnd],
        "asociativa" | "asociacion" | "asociatividad" | "asoc" | "associative" => &[AssocAnd, AssocOr],
        "assocand" => &[AssocAnd],
        "assocor" => &[AssocOr],
        "conmutativa" | "conmutatividad" | "conm" | "comm" | "commutative" => &[CommAnd, CommOr],
        "command" => &[CommAnd],
        "commor" => &[CommOr],
        "idem" | "idempotencia" | "idempotence" => &[Idempotence],
        "neg" | "negacion" | "negation" => &[Negation],
        "ident" | "identidad" | "identity" => &[Identity],
        "dom" | "dominacion" | "domination" => &[Domination],
        "absorcion" | "absorption" => &[Absorption],
        _ => return Err(UnknownLaw(name.to_string())),
    };
    Ok(ids.to_vec())
}

/// Resolves a possibly bundled label like "Asociativa, Conmutativa" into its
/// components, each a set of candidate ids.
pub fn resolve_law_ref(label: &str) -> Result<Vec<Vec<LawId>>, UnknownLaw> {
    label
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(resolve_alias)
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(UnknownLaw(label.to_string()))
            } else {
                Ok(v)
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    const LR: Direction = Direction::LeftToRight;
    const RL: Direction = Direction::RightToLeft;

    #[test]
    fn implication_elimination() {
        assert_eq!(
            apply_law(&p("P → Q"), LawId::El1, LR, &Path::root()).unwrap(),
            p("¬P ∨ Q")
        );
    }

    #[test]
    fn de_morgan_below_root() {
        let f = apply_law(&p("¬(P ∧ Q) ∨ R"), LawId::DeMorganAnd, LR, &Path(vec![0])).unwrap();
        assert_eq!(f, p("(¬P ∨ ¬Q) ∨ R"));
    }

    #[test]
    fn mismatch_is_reported() {
        assert!(matches!(
            apply_law(&p("P ∧ Q"), LawId::Domination, LR, &Path::root()),
            Err(LawError::PatternMismatch { .. })
        ));
        assert!(matches!(
            apply_law(&p("P"), LawId::El1, LR, &Path(vec![1])),
            Err(LawError::PathOutOfRange(_))
        ));
    }

    #[test]
    fn expansions_need_bindings() {
        let t = Formula::TRUE;
        assert!(matches!(
            apply_law(&t, LawId::Domination, RL, &Path::root()),
            Err(LawError::UnboundMetavariable { .. })
        ));
        // Only ¬F ≡ T is fully determined without a binding.
        assert_eq!(apply_law(&t, LawId::Negation, RL, &Path::root()).unwrap(), p("¬F"));
        let extra = BTreeMap::from([("X".to_string(), p("B"))]);
        assert_eq!(
            apply_law_with(&t, LawId::Negation, RL, &Path::root(), &extra).unwrap(),
            p("B ∨ ¬B")
        );
        assert_eq!(
            apply_law(&p("A"), LawId::Identity, RL, &Path::root()).unwrap(),
            p("A ∧ T")
        );
    }

    #[test]
    fn applicable_menu() {
        let menu = applicable_laws(&p("¬¬P"), &Path::root(), false).unwrap();
        assert!(menu.contains(&(LawId::DoubleNegation, LR)));
        let menu = applicable_laws(&p("P ∨ T"), &Path::root(), false).unwrap();
        assert!(menu.contains(&(LawId::Domination, LR)));
        assert!(!menu.contains(&(LawId::Identity, RL)));
        assert!(applicable_laws(&p("P"), &Path::root(), false).unwrap().is_empty());
        let all = applicable_laws(&p("P"), &Path::root(), true).unwrap();
        assert!(all.contains(&(LawId::Idempotence, RL)));
        assert!(all.contains(&(LawId::Identity, RL)));
    }

    #[test]
    fn menu_agrees_with_apply() {
        let f = p("¬(P ∧ Q) ∨ (P ∧ (Q ∨ R))");
        for path in f.positions() {
            let menu = applicable_laws(&f, &path, false).unwrap();
            for law in LawId::ALL {
                for dir in [LR, RL] {
                    let listed = menu.contains(&(law, dir));
                    let applies = apply_law(&f, law, dir, &path).is_ok();
                    let expansion = law
                        .law()
                        .schemas
                        .iter()
                        .any(|s| s.matches_anything(dir) || s.needs_bindings(dir));
                    if !expansion {
                        assert_eq!(listed, applies, "{law} {dir:?} at {path}");
                    } else if listed {
                        assert!(applies);
                    }
                }
            }
        }
    }

    #[test]
    fn step_check_accepts_any_schema() {
        let before = p("P ∨ Q");
        let after = p("(P ∨ Q) ∨ (P ∨ Q)");
        assert!(check_step(&before, &after, LawId::Idempotence, RL, &Path::root()).is_ok());
        assert!(check_step(&p("T"), &p("¬R ∨ R"), LawId::Negation, RL, &Path::root()).is_ok());
        assert!(check_step(&p("T ∧ Q"), &p("(¬R ∨ R) ∧ P"), LawId::Negation, RL, &Path(vec![0])).is_err());
    }

    #[test]
    fn alias_table() {
        assert_eq!(resolve_alias("EL 1").unwrap(), vec![LawId::El1]);
        assert_eq!(resolve_alias("Ley de Morgan").unwrap().len(), 2);
        assert_eq!(resolve_alias("Negación").unwrap(), vec![LawId::Negation]);
        assert_eq!(resolve_alias("distributividad").unwrap().len(), 2);
        assert_eq!(resolve_alias("Dominación").unwrap(), vec![LawId::Domination]);
        assert_eq!(resolve_alias("Absorción").unwrap(), vec![LawId::Absorption]);
        assert_eq!(resolve_alias("DeMorganOr").unwrap(), vec![LawId::DeMorganOr]);
        assert!(resolve_alias("Modus Ponens").is_err());
        assert_eq!(resolve_law_ref("Asociativa, Conmutativa").unwrap().len(), 2);
    }

    #[test]
    fn catalog_ids_resolve_to_themselves() {
        for id in LawId::ALL {
            assert_eq!(resolve_alias(id.id()).unwrap(), vec![id]);
            assert_eq!(id.law().id, id);
        }
    }
}
