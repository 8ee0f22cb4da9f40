//! `discreta`: propositional logic from the command line.
//!
//! Exit status: 0 success or valid, 1 failed check / invalid / mismatch,
//! 2 parse or usage error, 3 resource limit.

use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use discreta_core::derivation::{validate_derivation_with, Derivation, Mode};
use discreta_core::exercise::{load_exercises, pi, sigma, solve_with, Status};
use discreta_core::inference::{check, Argument, Method, Verdict};
use discreta_core::normal_forms::{to_cnf_with, to_dnf_with, to_nnf, to_principal_with, CanonicalKind};
use discreta_core::parser::{parse, print_with, Charset, ParseError, SyntaxStyle};
use discreta_core::semantics::{classify_with, index_sets_with, truth_table, SemanticsError};
use discreta_core::{Error, Formula, Limits, Var};

#[derive(Parser)]
#[command(
    name = "discreta",
    version,
    about = "Propositional logic: tables, normal forms, derivations and proofs"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Use ASCII connectives (~ & | -> <->) in text output.
    #[arg(long, global = true)]
    ascii: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Notation {
    Infix,
    Polish,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Minimal,
    Full,
    Polish,
}

#[derive(Clone, Copy, ValueEnum)]
enum NfKind {
    Nnf,
    Dnf,
    Cnf,
    Fndp,
    Fncp,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Definition,
    Direct,
    Indirect,
    Resolution,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print it back.
    Parse {
        text: String,
        #[arg(long, value_enum, default_value = "infix")]
        notation: Notation,
        #[arg(long, value_enum, default_value = "minimal")]
        style: Style,
    },
    /// Print the truth table.
    Table {
        formula: String,
        /// Comma-separated variable order (default: sorted atoms).
        #[arg(long)]
        order: Option<String>,
    },
    /// Tautology, contingency or contradiction.
    Classify { formula: String },
    /// Normal form with its step-by-step derivation.
    Nf {
        #[arg(long, value_enum)]
        kind: NfKind,
        #[arg(long)]
        order: Option<String>,
        formula: String,
    },
    /// Minterm and maxterm index sets.
    Indices {
        #[arg(long)]
        order: String,
        formula: String,
    },
    /// Validate a derivation file.
    Check {
        file: PathBuf,
        /// Require exactly one catalog law per step.
        #[arg(long)]
        strict: bool,
    },
    /// Decide whether a conclusion follows from premises, e.g. "P, P -> Q => Q".
    Prove {
        #[arg(long, value_enum)]
        method: MethodArg,
        argument: String,
    },
    /// Solve one exercise file.
    Solve { file: PathBuf },
    /// Solve every exercise below a directory.
    SolveAll {
        dir: PathBuf,
        /// Write one solution document per exercise here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        exercises: PathBuf,
        /// Origin allowed by CORS; repeatable.
        #[arg(long = "allow-origin")]
        allow_origin: Vec<String>,
    },
}

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const LIMIT: u8 = 3;

/// A terminal error: message and exit status.
struct Fail(u8, String);

impl From<ParseError> for Fail {
    fn from(e: ParseError) -> Self {
        Fail(USAGE, format!("parse error {e}"))
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(if e.is_resource_limit() { LIMIT } else { FAILED }, e.to_string())
    }
}

impl From<SemanticsError> for Fail {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::TooManyVariables { .. } => Fail(LIMIT, e.to_string()),
            _ => Fail(USAGE, e.to_string()),
        }
    }
}

struct Out {
    json: bool,
    ascii: bool,
}

impl Out {
    fn text(&self, s: &str) {
        let s = if self.ascii { asciify(s) } else { s.to_string() };
        println!("{s}");
    }

    fn value(&self, v: &serde_json::Value) {
        println!("{}", serde_json::to_string_pretty(v).expect("json"));
    }

    fn formula(&self, f: &Formula) -> String {
        let cs = if self.ascii { Charset::Ascii } else { Charset::Unicode };
        print_with(f, SyntaxStyle::InfixMinimal, cs)
    }
}

/// ASCII stand-ins for the symbols used in text output.
fn asciify(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '¬' => out.push('~'),
            '∧' => out.push('&'),
            '∨' => out.push('|'),
            '→' => out.push_str("->"),
            '↔' => out.push_str("<->"),
            '⇒' => out.push_str("=>"),
            '≡' => out.push_str("=="),
            '∴' => out.push_str(".:"),
            'Σ' => out.push_str("Sum "),
            'Π' => out.push_str("Prod "),
            '□' => out.push_str("[]"),
            '✗' => out.push('x'),
            c => out.push(c),
        }
    }
    out
}

fn formula(text: &str) -> Result<Formula, Fail> {
    Ok(discreta_core::parse_infix(text)?)
}

fn order(text: Option<&str>, f: &Formula) -> Result<Vec<Var>, Fail> {
    match text {
        None => Ok(f.atoms()),
        Some(t) => t
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Var::new(s).map_err(|e| Fail(USAGE, e.to_string())))
            .collect(),
    }
}

fn read(path: &FsPath) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Fail> {
    let out = Out {
        json: cli.json,
        ascii: cli.ascii,
    };
    let limits = Limits::from_env();
    match cli.cmd {
        Cmd::Parse { text, notation, style } => {
            let f = match notation {
                Notation::Infix => parse(&text, SyntaxStyle::InfixMinimal)?,
                Notation::Polish => parse(&text, SyntaxStyle::Polish)?,
            };
            let style = match style {
                Style::Minimal => SyntaxStyle::InfixMinimal,
                Style::Full => SyntaxStyle::InfixFull,
                Style::Polish => SyntaxStyle::Polish,
            };
            let cs = if out.ascii { Charset::Ascii } else { Charset::Unicode };
            if out.json {
                out.value(&json!({ "format": 1, "ast": f, "atoms": f.atoms(), "text": print_with(&f, style, cs) }));
            } else {
                out.text(&print_with(&f, style, cs));
            }
            Ok(OK)
        }
        Cmd::Table {
            formula: text,
            order: o,
        } => {
            let f = formula(&text)?;
            let order = order(o.as_deref(), &f)?;
            let t = truth_table(&f, &order, &limits)?;
            if out.json {
                out.value(
                    &json!({ "format": 1, "formula": f.to_string(), "table": t, "classification": t.classification() }),
                );
            } else {
                out.text(t.render(&out.formula(&f)).trim_end());
            }
            Ok(OK)
        }
        Cmd::Classify { formula: text } => {
            let f = formula(&text)?;
            let c = classify_with(&f, &limits)?;
            if out.json {
                out.value(&json!({ "format": 1, "formula": f.to_string(), "classification": c }));
            } else {
                out.text(&format!("{} ({})", c.spanish(), c.english()));
            }
            Ok(OK)
        }
        Cmd::Nf {
            kind,
            order: o,
            formula: text,
        } => {
            let f = formula(&text)?;
            let (result, derivation, indices) = match kind {
                NfKind::Nnf => {
                    let (g, d) = to_nnf(&f);
                    (g, d, None)
                }
                NfKind::Dnf => {
                    let (g, d) = to_dnf_with(&f, &limits)?;
                    (g.to_formula(), d, None)
                }
                NfKind::Cnf => {
                    let (g, d) = to_cnf_with(&f, &limits)?;
                    (g.to_formula(), d, None)
                }
                NfKind::Fndp | NfKind::Fncp => {
                    let ck = if matches!(kind, NfKind::Fndp) {
                        CanonicalKind::Fndp
                    } else {
                        CanonicalKind::Fncp
                    };
                    let order = order(o.as_deref(), &f)?;
                    let (g, d) = to_principal_with(&f, ck, &order, &limits)?;
                    let ix = g.term_indices().to_vec();
                    (g.to_formula(), d, Some(ix))
                }
            };
            if out.json {
                out.value(&json!({
                    "format": 1,
                    "formula": result.to_string(),
                    "indices": indices,
                    "derivation": derivation,
                }));
            } else {
                for l in derivation.render_lines() {
                    out.text(&l);
                }
                if let Some(ix) = indices {
                    let line = if matches!(kind, NfKind::Fndp) {
                        sigma(&ix)
                    } else {
                        pi(&ix)
                    };
                    out.text(&line);
                }
            }
            Ok(OK)
        }
        Cmd::Indices {
            order: o,
            formula: text,
        } => {
            let f = formula(&text)?;
            let order = order(Some(&o), &f)?;
            let ix = index_sets_with(&f, &order, &limits)?;
            if out.json {
                out.value(&json!({ "format": 1, "order": order, "minterms": ix.minterms, "maxterms": ix.maxterms }));
            } else {
                out.text(&format!("{} {}", sigma(&ix.minterms), pi(&ix.maxterms)));
            }
            Ok(OK)
        }
        Cmd::Check { file, strict } => {
            let d =
                Derivation::from_json(&read(&file)?).map_err(|e| Fail(USAGE, format!("{}: {e}", file.display())))?;
            let mode = if strict { Mode::Strict } else { Mode::Lenient };
            let r = validate_derivation_with(&d, mode, &limits);
            if out.json {
                out.value(&json!({ "format": 1, "report": r }));
            } else {
                out.text(&out.formula(&d.start));
                for (s, v) in d.steps.iter().zip(&r.steps) {
                    let mark = if v.ok {
                        "✓".to_string()
                    } else {
                        format!("✗ {}", v.error.clone().unwrap_or_default())
                    };
                    out.text(&format!(
                        "{:>3}. ≡ {}    {}    {}",
                        v.index,
                        out.formula(&s.result),
                        v.law,
                        mark
                    ));
                }
                match r.goal_reached {
                    Some(true) => out.text("meta alcanzada (goal reached)"),
                    Some(false) => out.text("meta no alcanzada (goal not reached)"),
                    None => {}
                }
                out.text(if r.valid {
                    "derivación válida (valid)"
                } else {
                    "derivación no válida (invalid)"
                });
            }
            Ok(if r.valid { OK } else { FAILED })
        }
        Cmd::Prove { method, argument } => {
            let arg = Argument::parse(&argument)?;
            let method = match method {
                MethodArg::Definition => Method::Definition,
                MethodArg::Direct => Method::Direct,
                MethodArg::Indirect => Method::Indirect,
                MethodArg::Resolution => Method::Resolution,
            };
            let v = check(&arg, method, &limits)?;
            if out.json {
                out.value(&json!({ "format": 1, "argument": arg.to_string(), "result": v }));
            } else {
                out.text(&arg.to_string());
                out.text(method.spanish());
                for l in v.render() {
                    out.text(&l);
                }
                out.text(&format!("({})", v.verdict.english()));
            }
            Ok(if v.verdict == Verdict::Valid { OK } else { FAILED })
        }
        Cmd::Solve { file } => {
            let loaded = load_exercises(&file).map_err(|e| Fail(USAGE, e.to_string()))?;
            let mut code = OK;
            for (_, e) in loaded {
                let doc = solve_with(&e, &limits);
                if out.json {
                    println!("{}", doc.to_json());
                } else {
                    out.text(doc.to_text().trim_end());
                }
                code = code.max(status_code(doc.status()));
            }
            Ok(code)
        }
        Cmd::SolveAll { dir, out: dest } => {
            let loaded = load_exercises(&dir).map_err(|e| Fail(USAGE, e.to_string()))?;
            if let Some(d) = &dest {
                fs::create_dir_all(d).map_err(|e| Fail(USAGE, format!("{}: {e}", d.display())))?;
            }
            let docs: Vec<_> = loaded.par_iter().map(|(_, e)| solve_with(e, &limits)).collect();
            let mut code = OK;
            let mut summary = Vec::new();
            for doc in &docs {
                let status = doc.status();
                code = code.max(status_code(status));
                if let Some(d) = &dest {
                    let (name, body) = if out.json {
                        (format!("{}.solution.json", doc.id), doc.to_json())
                    } else {
                        (format!("{}.solution.txt", doc.id), doc.to_text())
                    };
                    write_atomic(&d.join(name), &body).map_err(|e| Fail(USAGE, e))?;
                }
                summary.push(
                    json!({ "id": doc.id, "status": format!("{status:?}").to_lowercase(), "answer": doc.answer }),
                );
            }
            if out.json && dest.is_none() {
                out.value(&json!({ "format": 1, "solutions": docs }));
            } else if out.json {
                out.value(&json!({ "format": 1, "summary": summary }));
            } else {
                for doc in &docs {
                    let tag = match doc.status() {
                        Status::Solved => "ok",
                        Status::Mismatch => "MISMATCH",
                        Status::Failed => "FAILED",
                        Status::ResourceLimit => "LIMIT",
                    };
                    out.text(&format!("{tag:<8} {:<28} {}", doc.id, doc.answer.join("  ")));
                }
                let bad = docs.iter().filter(|d| d.status() != Status::Solved).count();
                out.text(&format!("{} exercises, {} not solved cleanly", docs.len(), bad));
            }
            Ok(code)
        }
        Cmd::Serve {
            addr,
            exercises,
            allow_origin,
        } => {
            let loaded = load_exercises(&exercises).map_err(|e| Fail(USAGE, e.to_string()))?;
            let store = discreta_service::ExerciseStore::new(loaded.into_iter().map(|(_, e)| e));
            eprintln!("serving {} exercises on http://{addr}", store.len());
            let opts = discreta_service::Options {
                allow_origins: allow_origin,
                limits,
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Fail(FAILED, e.to_string()))?;
            rt.block_on(discreta_service::serve(addr, store, opts))
                .map_err(|e| Fail(FAILED, e.to_string()))?;
            Ok(OK)
        }
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Solved => OK,
        Status::Mismatch | Status::Failed => FAILED,
        Status::ResourceLimit => LIMIT,
    }
}

fn write_atomic(path: &FsPath, body: &str) -> Result<(), String> {
    let dir = path.parent().unwrap_or(FsPath::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| e.to_string())?;
    tmp.write_all(body.as_bytes()).map_err(|e| e.to_string())?;
    tmp.persist(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
