//! Line-oriented text format for weighted KBs and conjunctive queries.
//!
//! ```text
//! # comment
//! tbox:
//! inf: Visa and NoVisa SubClassOf Bot
//! 1: only hasNat.(not {c}) SubClassOf Visa
//! abox:
//! 1: hasNat(p, b)
//! 2: NoVisa(p)
//! ```
//!
//! Concept operators bind, from tightest: `not`, then `some`/`only`, then
//! `and`, then `or`; binary operators associate to the left.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::kb::{Assertion, Atom, Concept, ConceptInclusion, Query, QueryError, Term, Weight, WeightedKB};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &["Top", "Bot", "not", "some", "only", "and", "or", "SubClassOf", "inf"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(char),
    Assign,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::End => f.write_str("end of line"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Lexer {
    fn new(text: &str, line: usize) -> Result<Self, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push((Tok::Num(chars[start..i].iter().collect()), col));
            } else if c == ':' && chars.get(i + 1) == Some(&'=') {
                toks.push((Tok::Assign, col));
                i += 2;
            } else if "():{}.,?".contains(c) {
                toks.push((Tok::Sym(c), col));
                i += 1;
            } else {
                return Err(ParseError { line, column: col, message: format!("unexpected character `{c}`") });
            }
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Lexer { toks, pos: 0, line })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column(), message: message.into() }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == &Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.peek())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s.starts_with('_') => Err(self.error(format!("{what} may not start with `_`"))),
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            t => Err(self.error(format!("expected {what}, found {t}"))),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(self.error(format!("unexpected {t}"))),
        }
    }
}

fn weight(lx: &mut Lexer) -> Result<Weight, ParseError> {
    let (line, column) = (lx.line, lx.column());
    let err = |message: String| ParseError { line, column, message };
    let w = match lx.next() {
        Tok::Ident(s) if s == "inf" => Weight::Infinite,
        Tok::Num(s) => match s.parse::<u64>() {
            Ok(0) => return Err(err("weight must be positive".into())),
            Ok(n) => Weight::Finite(n),
            Err(_) if s.bytes().all(|b| b.is_ascii_digit()) => {
                return Err(err(format!("weight {s} does not fit in 64 bits")))
            }
            Err(_) => return Err(err(format!("invalid weight `{s}`"))),
        },
        t => return Err(err(format!("expected a weight, found {t}"))),
    };
    lx.expect_sym(':')?;
    Ok(w)
}

fn concept(lx: &mut Lexer) -> Result<Concept, ParseError> {
    let mut c = conjunction(lx)?;
    while lx.is_keyword("or") {
        lx.next();
        c = Concept::or(c, conjunction(lx)?);
    }
    Ok(c)
}

fn conjunction(lx: &mut Lexer) -> Result<Concept, ParseError> {
    let mut c = unary(lx)?;
    while lx.is_keyword("and") {
        lx.next();
        c = Concept::and(c, unary(lx)?);
    }
    Ok(c)
}

fn unary(lx: &mut Lexer) -> Result<Concept, ParseError> {
    if lx.is_keyword("not") {
        lx.next();
        return Ok(Concept::not(unary(lx)?));
    }
    for (kw, forall) in [("some", false), ("only", true)] {
        if lx.is_keyword(kw) {
            lx.next();
            let r = lx.name("a role name")?;
            lx.expect_sym('.')?;
            let c = unary(lx)?;
            return Ok(if forall { Concept::forall(r, c) } else { Concept::exists(r, c) });
        }
    }
    match lx.peek().clone() {
        Tok::Ident(s) if s == "Top" => {
            lx.next();
            Ok(Concept::Top)
        }
        Tok::Ident(s) if s == "Bot" => {
            lx.next();
            Ok(Concept::Bot)
        }
        Tok::Sym('{') => {
            lx.next();
            let a = lx.name("an individual name")?;
            lx.expect_sym('}')?;
            Ok(Concept::Nominal(a))
        }
        Tok::Sym('(') => {
            lx.next();
            let c = concept(lx)?;
            lx.expect_sym(')')?;
            Ok(c)
        }
        _ => Ok(Concept::Name(lx.name("a concept")?)),
    }
}

/// Parses a single concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut lx = Lexer::new(text, 1)?;
    let c = concept(&mut lx)?;
    lx.end()?;
    Ok(c)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    TBox,
    ABox,
}

pub fn parse_wkb(text: &str) -> Result<WeightedKB, ParseError> {
    let mut kb = WeightedKB::new();
    let mut section = Section::None;
    for (n, raw) in text.lines().enumerate() {
        let mut lx = Lexer::new(raw, n + 1)?;
        if lx.peek() == &Tok::End {
            continue;
        }
        if let Tok::Ident(s) = lx.peek().clone() {
            if (s == "tbox" || s == "abox") && lx.toks[1].0 == Tok::Sym(':') {
                lx.next();
                lx.next();
                lx.end()?;
                section = if s == "tbox" { Section::TBox } else { Section::ABox };
                continue;
            }
        }
        match section {
            Section::None => return Err(lx.error("expected `tbox:` or `abox:` before the first axiom")),
            Section::TBox => {
                let w = weight(&mut lx)?;
                let lhs = concept(&mut lx)?;
                if !lx.is_keyword("SubClassOf") {
                    return Err(lx.error(format!("expected `SubClassOf`, found {}", lx.peek())));
                }
                lx.next();
                let rhs = concept(&mut lx)?;
                lx.end()?;
                kb.tbox.push((ConceptInclusion::new(lhs, rhs), w));
            }
            Section::ABox => {
                let w = weight(&mut lx)?;
                let name = lx.name("a concept or role name")?;
                lx.expect_sym('(')?;
                let a = lx.name("an individual name")?;
                let alpha = if lx.peek() == &Tok::Sym(',') {
                    lx.next();
                    let b = lx.name("an individual name")?;
                    Assertion::role(name, a, b)
                } else {
                    Assertion::concept(name, a)
                };
                lx.expect_sym(')')?;
                lx.end()?;
                kb.abox.push((alpha, w));
            }
        }
    }
    Ok(kb)
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn write_concept(out: &mut String, c: &Concept, min_prec: u8) {
    let prec = match c {
        Concept::Or(..) => PREC_OR,
        Concept::And(..) => PREC_AND,
        Concept::Not(_) | Concept::Exists(..) | Concept::Forall(..) => PREC_UNARY,
        _ => PREC_UNARY + 1,
    };
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    match c {
        Concept::Name(a) => out.push_str(a),
        Concept::Nominal(a) => {
            let _ = write!(out, "{{{a}}}");
        }
        Concept::Top => out.push_str("Top"),
        Concept::Bot => out.push_str("Bot"),
        Concept::Or(a, b) => {
            write_concept(out, a, PREC_OR);
            out.push_str(" or ");
            write_concept(out, b, PREC_AND);
        }
        Concept::And(a, b) => {
            write_concept(out, a, PREC_AND);
            out.push_str(" and ");
            write_concept(out, b, PREC_UNARY);
        }
        Concept::Not(a) => {
            out.push_str("not ");
            write_concept(out, a, PREC_UNARY);
        }
        Concept::Exists(r, a) | Concept::Forall(r, a) => {
            let kw = if matches!(c, Concept::Exists(..)) { "some" } else { "only" };
            let _ = write!(out, "{kw} {r}.");
            write_concept(out, a, PREC_UNARY);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn serialize_concept(c: &Concept) -> String {
    let mut out = String::new();
    write_concept(&mut out, c, PREC_OR);
    out
}

/// Renders a KB so that `parse_wkb(&serialize_wkb(kb)) == kb`.
pub fn serialize_wkb(kb: &WeightedKB) -> String {
    let mut out = String::from("tbox:\n");
    for (tau, w) in &kb.tbox {
        let _ = writeln!(out, "{w}: {} SubClassOf {}", serialize_concept(&tau.lhs), serialize_concept(&tau.rhs));
    }
    out.push_str("abox:\n");
    for (alpha, w) in &kb.abox {
        match alpha {
            Assertion::Concept { concept, individual } => {
                let _ = writeln!(out, "{w}: {concept}({individual})");
            }
            Assertion::Role { role, subject, object } => {
                let _ = writeln!(out, "{w}: {role}({subject}, {object})");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] QueryError),
}

fn query_var(lx: &mut Lexer) -> Result<Option<String>, ParseError> {
    if lx.peek() == &Tok::Sym('?') {
        lx.next();
        return match lx.next() {
            Tok::Ident(s) => Ok(Some(s)),
            t => Err(lx.error(format!("expected a variable name, found {t}"))),
        };
    }
    Ok(None)
}

/// Parses `q(x, …) := Atom, …`. A term is a variable when it is `?`-prefixed
/// or listed in the head; otherwise it is an individual name.
pub fn parse_query(text: &str) -> Result<Query, QueryParseError> {
    let flat: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
    let mut lx = Lexer::new(&flat, 1)?;
    lx.name("a query name")?;
    lx.expect_sym('(')?;
    let mut head = Vec::new();
    if lx.peek() != &Tok::Sym(')') {
        loop {
            let v = match query_var(&mut lx)? {
                Some(v) => v,
                None => lx.name("an answer variable")?,
            };
            head.push(v);
            if lx.peek() != &Tok::Sym(',') {
                break;
            }
            lx.next();
        }
    }
    lx.expect_sym(')')?;
    if lx.next() != Tok::Assign {
        return Err(lx.error("expected `:=`").into());
    }
    let mut atoms = Vec::new();
    loop {
        let name = lx.name("a concept or role name")?;
        lx.expect_sym('(')?;
        let mut terms = vec![query_term(&mut lx, &head)?];
        if lx.peek() == &Tok::Sym(',') {
            lx.next();
            terms.push(query_term(&mut lx, &head)?);
        }
        lx.expect_sym(')')?;
        atoms.push(match <[Term; 2]>::try_from(terms) {
            Ok([s, o]) => Atom::Role(name, s, o),
            Err(mut one) => Atom::Concept(name, one.remove(0)),
        });
        if lx.peek() != &Tok::Sym(',') {
            break;
        }
        lx.next();
    }
    lx.end()?;
    Ok(Query::new(head, atoms)?)
}

fn query_term(lx: &mut Lexer, head: &[String]) -> Result<Term, ParseError> {
    if let Some(v) = query_var(lx)? {
        return Ok(Term::Var(v));
    }
    let s = lx.name("a term")?;
    Ok(if head.contains(&s) { Term::Var(s) } else { Term::Ind(s) })
}

pub fn serialize_query(q: &Query) -> String {
    let atoms: Vec<String> = q.atoms.iter().map(ToString::to_string).collect();
    format!("q({}) := {}", q.answer_vars.join(", "), atoms.join(", "))
}
