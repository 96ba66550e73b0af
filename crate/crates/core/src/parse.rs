//! Text syntax for PBESs and queries.
//!
//! ```text
//! pbes     ::= equation+
//! equation ::= ("mu" | "nu") IDENT "(" params? ")" "=" formula ";"
//! params   ::= IDENT ":" sort ("," IDENT ":" sort)*
//! formula  ::= "exists" IDENT ":" sort "." formula
//!            | "forall" IDENT ":" sort "." formula
//!            | formula "||" formula | formula "&&" formula
//!            | "(" formula ")" | IDENT "(" exprs? ")" | dataexpr
//! ```
//!
//! Data expressions use `+`, `-` (monus), `k*e`, `e mod k`, comparisons,
//! `!`, `true`, `false`, `even(e)` and `odd(e)`. `&&` binds tighter than
//! `||`; quantifier bodies extend as far right as possible. Comments start
//! with `%` or `//` and run to the end of the line.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::syntax::{CmpOp, DataExpr, Equation, Fixpoint, Param, Pbes, PredFormula, Signature, Sort, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("no equations")]
    NoEquations,
    #[error("sort error: {0}")]
    Sort(String),
    #[error("unbound predicate variable `{0}`")]
    UnboundPredicate(String),
    #[error("unbound data variable `{0}`")]
    UnboundVariable(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("duplicate equation for `{0}`")]
    DuplicateEquation(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParameter(String),
    #[error("predicate variable `{0}` may not occur inside a data expression")]
    CallInData(String),
    #[error("quantifier may not occur inside a data expression")]
    QuantifierInData,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError { pos, kind }
    }

    fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError::new(pos, ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 18] = [
    "&&", "||", "!=", "<=", ">=", "(", ")", ",", ":", ".", ";", "=", "<", ">", "+", "-", "*", "!",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse::<u64>()
                .map_err(|_| ParseError::syntax(pos, format!("numeral `{digits}` out of range")))?;
            col += i - start;
            out.push((Tok::Num(n), pos));
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let s: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&s)
        });
        match sym {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => return Err(ParseError::syntax(pos, format!("unexpected character `{c}`"))),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Untyped parse tree, classified into formulas and data expressions once
/// the predicate variables are known.
#[derive(Debug, Clone)]
enum Term {
    Num(u64),
    Bool(bool),
    Ident(String),
    Call(String, Vec<(Term, Pos)>),
    Parity(bool, Box<(Term, Pos)>),
    Not(Box<(Term, Pos)>),
    Bin(&'static str, Box<(Term, Pos)>, Box<(Term, Pos)>),
    Quant(bool, String, Sort, Box<(Term, Pos)>),
}

const KEYWORDS: [&str; 9] = ["mu", "nu", "exists", "forall", "true", "false", "mod", "even", "odd"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Pos, ParseError> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            Err(ParseError::syntax(self.pos(), format!("expected `{s}`, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(w), pos) if !KEYWORDS.contains(&w.as_str()) => Ok((w, pos)),
            (t, pos) => Err(ParseError::syntax(pos, format!("expected identifier, found {t}"))),
        }
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        match self.bump() {
            (Tok::Ident(w), _) if w == "N" => Ok(Sort::Nat),
            (Tok::Ident(w), _) if w == "B" => Ok(Sort::Bool),
            (t, pos) => Err(ParseError::syntax(pos, format!("expected sort `N` or `B`, found {t}"))),
        }
    }

    fn equation(&mut self) -> Result<RawEquation, ParseError> {
        let pos = self.pos();
        let fixpoint = match self.bump() {
            (Tok::Ident(w), _) if w == "mu" => Fixpoint::Mu,
            (Tok::Ident(w), _) if w == "nu" => Fixpoint::Nu,
            (t, pos) => return Err(ParseError::syntax(pos, format!("expected `mu` or `nu`, found {t}"))),
        };
        let (name, _) = self.ident()?;
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                let (p, ppos) = self.ident()?;
                self.expect_sym(":")?;
                let sort = self.sort()?;
                params.push((Param { name: p, sort }, ppos));
                if !self.is_sym(",") {
                    break;
                }
                self.bump();
            }
        }
        self.expect_sym(")")?;
        self.expect_sym("=")?;
        let body = self.formula()?;
        self.expect_sym(";")?;
        Ok(RawEquation { fixpoint, name, params, body, pos })
    }

    fn formula(&mut self) -> Result<(Term, Pos), ParseError> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> Result<(Term, Pos), ParseError> {
        // Levels: 0 `||`, 1 `&&`, 2 comparisons (non-associative), 3 `+ -`, 4 `* mod`.
        if level == 5 {
            return self.unary();
        }
        let pos = self.pos();
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let op = match (level, self.peek()) {
                (0, Tok::Sym("||")) => "||",
                (1, Tok::Sym("&&")) => "&&",
                (2, Tok::Sym(s @ ("=" | "!=" | "<" | "<=" | ">" | ">="))) => s,
                (3, Tok::Sym(s @ ("+" | "-"))) => s,
                (4, Tok::Sym("*")) => "*",
                (4, Tok::Ident(w)) if w == "mod" => "mod",
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.binary_level(level + 1)?;
            lhs = (Term::Bin(op, Box::new(lhs), Box::new(rhs)), pos);
            if level == 2 {
                if let Tok::Sym("=" | "!=" | "<" | "<=" | ">" | ">=") = self.peek() {
                    return Err(ParseError::syntax(self.pos(), "comparisons do not chain"));
                }
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<(Term, Pos), ParseError> {
        let pos = self.pos();
        if self.is_sym("!") {
            self.bump();
            let inner = self.unary()?;
            return Ok((Term::Not(Box::new(inner)), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<(Term, Pos), ParseError> {
        let pos = self.pos();
        match self.bump() {
            (Tok::Num(n), _) => Ok((Term::Num(n), pos)),
            (Tok::Sym("("), _) => {
                let inner = self.formula()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            (Tok::Ident(w), _) => match w.as_str() {
                "true" => Ok((Term::Bool(true), pos)),
                "false" => Ok((Term::Bool(false), pos)),
                "exists" | "forall" => {
                    let (x, _) = self.ident()?;
                    self.expect_sym(":")?;
                    let sort = self.sort()?;
                    self.expect_sym(".")?;
                    let body = self.formula()?;
                    Ok((Term::Quant(w == "exists", x, sort, Box::new(body)), pos))
                }
                "even" | "odd" => {
                    self.expect_sym("(")?;
                    let arg = self.formula()?;
                    self.expect_sym(")")?;
                    Ok((Term::Parity(w == "even", Box::new(arg)), pos))
                }
                _ if KEYWORDS.contains(&w.as_str()) => {
                    Err(ParseError::syntax(pos, format!("unexpected keyword `{w}`")))
                }
                _ => {
                    if self.is_sym("(") {
                        self.bump();
                        let mut args = Vec::new();
                        if !self.is_sym(")") {
                            loop {
                                args.push(self.formula()?);
                                if !self.is_sym(",") {
                                    break;
                                }
                                self.bump();
                            }
                        }
                        self.expect_sym(")")?;
                        Ok((Term::Call(w, args), pos))
                    } else {
                        Ok((Term::Ident(w), pos))
                    }
                }
            },
            (t, _) => Err(ParseError::syntax(pos, format!("unexpected {t}"))),
        }
    }
}

struct RawEquation {
    fixpoint: Fixpoint,
    name: String,
    params: Vec<(Param, Pos)>,
    body: (Term, Pos),
    pos: Pos,
}

/// Classifies terms against the predicate table and the data scope.
struct Checker<'a> {
    predicates: &'a BTreeMap<String, Vec<Sort>>,
    scope: Vec<(String, Sort)>,
}

impl Checker<'_> {
    fn lookup(&self, x: &str) -> Option<Sort> {
        self.scope.iter().rev().find(|(n, _)| n == x).map(|(_, s)| *s)
    }

    fn formula(&mut self, (term, pos): &(Term, Pos)) -> Result<PredFormula, ParseError> {
        match term {
            Term::Bin("&&", a, b) => Ok(PredFormula::and(self.formula(a)?, self.formula(b)?)),
            Term::Bin("||", a, b) => Ok(PredFormula::or(self.formula(a)?, self.formula(b)?)),
            Term::Quant(exists, x, sort, body) => {
                self.scope.push((x.clone(), *sort));
                let inner = self.formula(body);
                self.scope.pop();
                let inner = Box::new(inner?);
                Ok(if *exists {
                    PredFormula::Exists(x.clone(), *sort, inner)
                } else {
                    PredFormula::Forall(x.clone(), *sort, inner)
                })
            }
            Term::Call(name, args) => {
                let sorts = self
                    .predicates
                    .get(name)
                    .ok_or_else(|| ParseError::new(*pos, ParseErrorKind::UnboundPredicate(name.clone())))?;
                if sorts.len() != args.len() {
                    return Err(ParseError::new(
                        *pos,
                        ParseErrorKind::Arity { name: name.clone(), expected: sorts.len(), found: args.len() },
                    ));
                }
                let mut out = Vec::new();
                for (arg, sort) in args.iter().zip(sorts) {
                    let (e, s) = self.data(arg)?;
                    if s != *sort {
                        return Err(ParseError::new(
                            arg.1,
                            ParseErrorKind::Sort(format!("argument `{e}` of `{name}` should have sort {sort}")),
                        ));
                    }
                    out.push(e);
                }
                Ok(PredFormula::Call(name.clone(), out))
            }
            _ => {
                let (e, s) = self.data(&(term.clone(), *pos))?;
                if s != Sort::Bool {
                    return Err(ParseError::new(*pos, ParseErrorKind::Sort(format!("`{e}` is not a Boolean"))));
                }
                Ok(PredFormula::Data(e))
            }
        }
    }

    fn data(&self, (term, pos): &(Term, Pos)) -> Result<(DataExpr, Sort), ParseError> {
        let sort_err = |msg: String| ParseError::new(*pos, ParseErrorKind::Sort(msg));
        let typed = |t: &(Term, Pos), want: Sort| -> Result<DataExpr, ParseError> {
            let (e, s) = self.data(t)?;
            if s == want {
                Ok(e)
            } else {
                Err(ParseError::new(t.1, ParseErrorKind::Sort(format!("`{e}` should have sort {want}"))))
            }
        };
        Ok(match term {
            Term::Num(n) => (DataExpr::Nat(*n), Sort::Nat),
            Term::Bool(b) => (DataExpr::Bool(*b), Sort::Bool),
            Term::Ident(x) => {
                let s = self
                    .lookup(x)
                    .ok_or_else(|| ParseError::new(*pos, ParseErrorKind::UnboundVariable(x.clone())))?;
                (DataExpr::Var(x.clone()), s)
            }
            Term::Call(name, _) => {
                return Err(ParseError::new(*pos, ParseErrorKind::CallInData(name.clone())));
            }
            Term::Quant(..) => return Err(ParseError::new(*pos, ParseErrorKind::QuantifierInData)),
            Term::Parity(even, arg) => {
                let e = typed(arg, Sort::Nat)?;
                (if *even { DataExpr::even(e) } else { DataExpr::odd(e) }, Sort::Bool)
            }
            Term::Not(arg) => (DataExpr::not(typed(arg, Sort::Bool)?), Sort::Bool),
            Term::Bin(op, a, b) => match *op {
                "&&" => (DataExpr::and(typed(a, Sort::Bool)?, typed(b, Sort::Bool)?), Sort::Bool),
                "||" => (
                    DataExpr::Or(Box::new(typed(a, Sort::Bool)?), Box::new(typed(b, Sort::Bool)?)),
                    Sort::Bool,
                ),
                "+" => (DataExpr::Add(Box::new(typed(a, Sort::Nat)?), Box::new(typed(b, Sort::Nat)?)), Sort::Nat),
                "-" => (
                    DataExpr::Monus(Box::new(typed(a, Sort::Nat)?), Box::new(typed(b, Sort::Nat)?)),
                    Sort::Nat,
                ),
                "*" => match (&a.0, &b.0) {
                    (Term::Num(k), _) => (DataExpr::Scale(*k, Box::new(typed(b, Sort::Nat)?)), Sort::Nat),
                    (_, Term::Num(k)) => (DataExpr::Scale(*k, Box::new(typed(a, Sort::Nat)?)), Sort::Nat),
                    _ => return Err(sort_err("multiplication needs a constant factor".to_string())),
                },
                "mod" => match &b.0 {
                    Term::Num(k) if *k > 0 => (DataExpr::Mod(Box::new(typed(a, Sort::Nat)?), *k), Sort::Nat),
                    _ => return Err(sort_err("`mod` needs a positive constant divisor".to_string())),
                },
                cmp => {
                    let op = match cmp {
                        "=" => CmpOp::Eq,
                        "!=" => CmpOp::Ne,
                        "<" => CmpOp::Lt,
                        "<=" => CmpOp::Le,
                        ">" => CmpOp::Gt,
                        ">=" => CmpOp::Ge,
                        _ => unreachable!("operator table"),
                    };
                    let (x, sx) = self.data(a)?;
                    let (y, sy) = self.data(b)?;
                    let ok = match op {
                        CmpOp::Eq | CmpOp::Ne => sx == sy,
                        _ => sx == Sort::Nat && sy == Sort::Nat,
                    };
                    if !ok {
                        return Err(sort_err(format!("cannot compare `{x}` and `{y}`")));
                    }
                    (DataExpr::cmp(op, x, y), Sort::Bool)
                }
            },
        })
    }
}

/// Parses and checks a complete PBES.
pub fn parse_pbes(text: &str) -> Result<Pbes, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut raw = Vec::new();
    while *p.peek() != Tok::Eof {
        raw.push(p.equation()?);
    }
    if raw.is_empty() {
        return Err(ParseError::new(p.pos(), ParseErrorKind::NoEquations));
    }
    let mut predicates = BTreeMap::new();
    for eq in &raw {
        let sorts = eq.params.iter().map(|(p, _)| p.sort).collect();
        if predicates.insert(eq.name.clone(), sorts).is_some() {
            return Err(ParseError::new(eq.pos, ParseErrorKind::DuplicateEquation(eq.name.clone())));
        }
    }
    let mut equations = Vec::new();
    for eq in raw {
        let mut seen = BTreeSet::new();
        for (param, pos) in &eq.params {
            if !seen.insert(param.name.clone()) {
                return Err(ParseError::new(*pos, ParseErrorKind::DuplicateParameter(param.name.clone())));
            }
        }
        let mut checker = Checker {
            predicates: &predicates,
            scope: eq.params.iter().map(|(p, _)| (p.name.clone(), p.sort)).collect(),
        };
        let body = checker.formula(&eq.body)?;
        equations.push(Equation {
            fixpoint: eq.fixpoint,
            name: eq.name,
            params: eq.params.into_iter().map(|(p, _)| p).collect(),
            body,
        });
    }
    Ok(Pbes { equations })
}

/// Parses a query such as `X1(2)` or `M(0, 4)` against the equations of `pbes`.
pub fn parse_query(pbes: &Pbes, text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let (name, pos) = p.ident()?;
    let mut values = Vec::new();
    if p.is_sym("(") {
        p.bump();
        if !p.is_sym(")") {
            loop {
                let vpos = p.pos();
                values.push(match p.bump() {
                    (Tok::Num(n), _) => Value::Nat(n),
                    (Tok::Ident(w), _) if w == "true" => Value::Bool(true),
                    (Tok::Ident(w), _) if w == "false" => Value::Bool(false),
                    (t, _) => return Err(ParseError::syntax(vpos, format!("expected a value, found {t}"))),
                });
                if !p.is_sym(",") {
                    break;
                }
                p.bump();
            }
        }
        p.expect_sym(")")?;
    }
    if *p.peek() != Tok::Eof {
        return Err(ParseError::syntax(p.pos(), format!("unexpected {}", p.peek())));
    }
    let eq = pbes
        .equations
        .iter()
        .find(|eq| eq.name == name)
        .ok_or_else(|| ParseError::new(pos, ParseErrorKind::UnboundPredicate(name.clone())))?;
    if eq.params.len() != values.len() {
        return Err(ParseError::new(
            pos,
            ParseErrorKind::Arity { name, expected: eq.params.len(), found: values.len() },
        ));
    }
    for (param, value) in eq.params.iter().zip(&values) {
        if param.sort != value.sort() {
            return Err(ParseError::new(
                pos,
                ParseErrorKind::Sort(format!("value `{value}` for `{}` should have sort {}", param.name, param.sort)),
            ));
        }
    }
    Ok(Signature { name, values })
}
