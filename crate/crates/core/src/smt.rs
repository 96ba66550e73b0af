//! SMT-LIB2 encoding of symbolic-set queries.
//!
//! The encoding is text only; running a solver is the job of a [`Solver`]
//! implementation. Naturals become `Int` with a `>= 0` side constraint on
//! every declared constant and every quantified variable. Shared sets
//! ([`Prop::Member`]) become global `define-fun`s named `S!<n>`; user
//! symbols are always written `|quoted|`, so the two never clash.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::Error;
use crate::set::{Prop, SetExpr};
use crate::sexp::Sexp;
use crate::syntax::{CmpOp, DataExpr, Env, Param, Sort, Value};

pub const LOGIC: &str = "LIA";

/// Is there an assignment to `consts` satisfying `assertion`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub consts: Vec<Param>,
    pub assertion: Prop,
}

impl Query {
    pub fn new(consts: Vec<Param>, assertion: Prop) -> Query {
        Query { consts, assertion }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// A model assigning every declared constant.
    Sat(Env),
    Unsat,
    Unknown { reason: String, script: String },
}

pub trait Solver {
    fn check(&mut self, query: &Query) -> Result<SatResult, Error>;

    /// Satisfiability for callers that ignore the model; a `Sat` answer may
    /// carry an empty one.
    fn decide(&mut self, query: &Query) -> Result<SatResult, Error> {
        self.check(query)
    }

    /// A quantifier-free body equivalent to `set.body` over the binders of
    /// `set`, if the solver can compute one.
    fn eliminate(&mut self, set: &SetExpr) -> Result<Option<Prop>, Error> {
        let _ = set;
        Ok(None)
    }
}

impl<S: Solver + ?Sized> Solver for &mut S {
    fn check(&mut self, query: &Query) -> Result<SatResult, Error> {
        (**self).check(query)
    }

    fn decide(&mut self, query: &Query) -> Result<SatResult, Error> {
        (**self).decide(query)
    }

    fn eliminate(&mut self, set: &SetExpr) -> Result<Option<Prop>, Error> {
        (**self).eliminate(set)
    }
}

/// Commands for one query, split by scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    /// `define-fun`s not emitted before; they go at global scope.
    pub definitions: Vec<String>,
    /// `declare-const` and `assert` commands for the query's own scope.
    pub scoped: Vec<String>,
}

/// Stateful encoder that remembers which shared sets the solver already knows.
#[derive(Debug, Default)]
pub struct Encoder {
    names: BTreeMap<usize, (String, Arc<SetExpr>)>,
    emitted: Vec<String>,
}

impl Encoder {
    pub fn new() -> Encoder {
        Encoder::default()
    }

    /// Forgets all definitions, e.g. after the solver was restarted.
    pub fn clear(&mut self) {
        self.names.clear();
        self.emitted.clear();
    }

    pub fn definition_count(&self) -> usize {
        self.names.len()
    }

    pub fn encode(&mut self, query: &Query) -> Encoded {
        let mut definitions = Vec::new();
        let body = self.prop(&query.assertion, &mut definitions);
        let mut scoped = Vec::new();
        let mut guards = Vec::new();
        for c in &query.consts {
            scoped.push(format!("(declare-const {} {})", symbol(&c.name), sort_name(c.sort)));
            if c.sort == Sort::Nat {
                guards.push(format!("(>= {} 0)", symbol(&c.name)));
            }
        }
        for g in guards {
            scoped.push(format!("(assert {g})"));
        }
        scoped.push(format!("(assert {body})"));
        self.emitted.extend(definitions.iter().cloned());
        Encoded { definitions, scoped }
    }

    /// A self-contained script for `query`, for error reports and replay.
    pub fn standalone(query: &Query, check: &str) -> String {
        let mut enc = Encoder::new();
        let e = enc.encode(query);
        let mut out = format!("(set-logic {LOGIC})\n");
        for line in e.definitions.iter().chain(&e.scoped) {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(check);
        out.push('\n');
        out
    }

    fn define(&mut self, set: &Arc<SetExpr>, defs: &mut Vec<String>) -> String {
        let key = Arc::as_ptr(set) as usize;
        if let Some((name, _)) = self.names.get(&key) {
            return name.clone();
        }
        let body = self.prop(&set.body, defs);
        let name = format!("S!{}", self.names.len());
        let mut params = String::new();
        for (i, b) in set.binders().enumerate() {
            if i > 0 {
                params.push(' ');
            }
            let _ = write!(params, "({} {})", symbol(&b.name), sort_name(b.sort));
        }
        defs.push(format!("(define-fun {name} ({params}) Bool {body})"));
        self.names.insert(key, (name.clone(), set.clone()));
        name
    }

    fn prop(&mut self, p: &Prop, defs: &mut Vec<String>) -> String {
        match p {
            Prop::Const(b) => b.to_string(),
            Prop::Data(e) => data(e),
            Prop::Not(inner) => format!("(not {})", self.prop(inner, defs)),
            Prop::And(ps) | Prop::Or(ps) => {
                let op = if matches!(p, Prop::And(_)) { "and" } else { "or" };
                let mut out = format!("({op}");
                for q in ps {
                    out.push(' ');
                    out.push_str(&self.prop(q, defs));
                }
                out.push(')');
                out
            }
            Prop::Exists(vars, body) => {
                let body = self.prop(body, defs);
                let mut binders = String::new();
                let mut guards = Vec::new();
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        binders.push(' ');
                    }
                    let _ = write!(binders, "({} {})", symbol(&v.name), sort_name(v.sort));
                    if v.sort == Sort::Nat {
                        guards.push(format!("(>= {} 0)", symbol(&v.name)));
                    }
                }
                if guards.is_empty() {
                    format!("(exists ({binders}) {body})")
                } else {
                    format!("(exists ({binders}) (and {} {body}))", guards.join(" "))
                }
            }
            Prop::Member(set, args) => {
                let name = self.define(set, defs);
                if args.is_empty() {
                    name
                } else {
                    let args: Vec<String> = args.iter().map(data).collect();
                    format!("({name} {})", args.join(" "))
                }
            }
        }
    }
}

pub fn symbol(name: &str) -> String {
    format!("|{name}|")
}

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Nat => "Int",
        Sort::Bool => "Bool",
    }
}

/// SMT-LIB2 term for a data expression.
pub fn data(e: &DataExpr) -> String {
    match e {
        DataExpr::Nat(n) => n.to_string(),
        DataExpr::Bool(b) => b.to_string(),
        DataExpr::Var(x) => symbol(x),
        DataExpr::Add(a, b) => format!("(+ {} {})", data(a), data(b)),
        DataExpr::Monus(a, b) => {
            let (a, b) = (data(a), data(b));
            format!("(ite (>= {a} {b}) (- {a} {b}) 0)")
        }
        DataExpr::Scale(k, a) => format!("(* {k} {})", data(a)),
        DataExpr::Mod(a, k) => format!("(mod {} {k})", data(a)),
        DataExpr::Cmp(op, a, b) => {
            let (a, b) = (data(a), data(b));
            match op {
                CmpOp::Eq => format!("(= {a} {b})"),
                CmpOp::Ne => format!("(not (= {a} {b}))"),
                CmpOp::Lt => format!("(< {a} {b})"),
                CmpOp::Le => format!("(<= {a} {b})"),
                CmpOp::Gt => format!("(> {a} {b})"),
                CmpOp::Ge => format!("(>= {a} {b})"),
            }
        }
        DataExpr::Not(a) => format!("(not {})", data(a)),
        DataExpr::And(a, b) => format!("(and {} {})", data(a), data(b)),
        DataExpr::Or(a, b) => format!("(or {} {})", data(a), data(b)),
    }
}

/// Reads a `(get-model)` response. Constants the solver left out are
/// unconstrained and get the least value of their sort.
pub fn read_model(consts: &[Param], model: &Sexp) -> Result<Env, Error> {
    let bad = |what: &str| Error::Solver(format!("malformed model ({what}): {model}"));
    let mut items = model.list().ok_or_else(|| bad("not a list"))?;
    if items.first().and_then(Sexp::atom) == Some("model") {
        items = &items[1..];
    }
    let mut found = BTreeMap::new();
    for item in items {
        let parts = item.list().ok_or_else(|| bad("entry"))?;
        if parts.len() != 5 || parts[0].atom() != Some("define-fun") {
            continue;
        }
        let name = parts[1].atom().ok_or_else(|| bad("name"))?;
        if parts[2].list().is_none_or(|args| !args.is_empty()) {
            continue;
        }
        found.insert(name.to_string(), &parts[4]);
    }
    let mut env = Env::new();
    for c in consts {
        let value = match (c.sort, found.get(&c.name)) {
            (Sort::Nat, None) => Value::Nat(0),
            (Sort::Bool, None) => Value::Bool(false),
            (Sort::Nat, Some(v)) => Value::Nat(read_int(v).ok_or_else(|| bad(&c.name))?),
            (Sort::Bool, Some(v)) => match v.atom() {
                Some("true") => Value::Bool(true),
                Some("false") => Value::Bool(false),
                _ => return Err(bad(&c.name)),
            },
        };
        env.insert(c.name.clone(), value);
    }
    Ok(env)
}

/// A non-negative integer literal; negative values do not belong to `N`.
fn read_int(v: &Sexp) -> Option<u64> {
    match v {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(items) if items.len() == 2 && items[0].atom() == Some("-") => {
            let n: u64 = items[1].atom()?.parse().ok()?;
            (n == 0).then_some(0)
        }
        _ => None,
    }
}

/// Reads the formulas of a tactic's `(goals ...)` response as one
/// proposition over `vars`. Returns `None` for anything outside the
/// fragment [`Prop`] can express (division, integer `ite`, unknown symbols).
pub fn read_goals(goals: &Sexp, vars: &[Param]) -> Option<Prop> {
    let items = goals.list()?;
    if items.first()?.atom()? != "goals" {
        return None;
    }
    let sorts: BTreeMap<String, Sort> = vars.iter().map(|p| (p.name.clone(), p.sort)).collect();
    let mut disjuncts = Vec::new();
    for goal in &items[1..] {
        let parts = goal.list()?;
        if parts.first()?.atom()? != "goal" {
            return None;
        }
        let mut conjuncts = Vec::new();
        for f in &parts[1..] {
            if f.atom().is_some_and(|a| a.starts_with(':')) {
                break;
            }
            let p = Reader { sorts: &sorts, lets: Vec::new() }.formula(f)?;
            // The side constraints of the encoding carry no information.
            let side = vars.iter().any(|v| {
                v.sort == Sort::Nat && p == Prop::data(DataExpr::cmp(CmpOp::Ge, DataExpr::Var(v.name.clone()), DataExpr::Nat(0)))
            });
            if !side {
                conjuncts.push(p);
            }
        }
        disjuncts.push(Prop::and(conjuncts));
    }
    Some(Prop::or(disjuncts))
}

/// Integer term as `sum(coef * atom) + constant`; atoms are variables and
/// remainders.
#[derive(Debug, Clone, Default)]
struct Linear {
    terms: BTreeMap<DataExpr, i128>,
    constant: i128,
}

impl Linear {
    fn scale(mut self, k: i128) -> Linear {
        self.terms.values_mut().for_each(|c| *c *= k);
        self.constant *= k;
        self
    }

    fn add(mut self, other: Linear) -> Linear {
        for (a, c) in other.terms {
            *self.terms.entry(a).or_insert(0) += c;
        }
        self.constant += other.constant;
        self.terms.retain(|_, c| *c != 0);
        self
    }

    fn sum(parts: impl IntoIterator<Item = (DataExpr, u64)>, constant: u64) -> DataExpr {
        let mut out: Option<DataExpr> = None;
        for (atom, c) in parts {
            let term = if c == 1 { atom } else { DataExpr::Scale(c, alloc::boxed::Box::new(atom)) };
            out = Some(match out {
                None => term,
                Some(acc) => DataExpr::Add(alloc::boxed::Box::new(acc), alloc::boxed::Box::new(term)),
            });
        }
        match (out, constant) {
            (None, k) => DataExpr::Nat(k),
            (Some(e), 0) => e,
            (Some(e), k) => DataExpr::Add(alloc::boxed::Box::new(e), alloc::boxed::Box::new(DataExpr::Nat(k))),
        }
    }

    /// `self op 0` with both sides over the naturals.
    fn compare(self, op: CmpOp) -> Option<DataExpr> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (a, c) in self.terms {
            let m = u64::try_from(c.unsigned_abs()).ok()?;
            if c > 0 { pos.push((a, m)) } else { neg.push((a, m)) }
        }
        let k = u64::try_from(self.constant.unsigned_abs()).ok()?;
        let (kp, kn) = if self.constant >= 0 { (k, 0) } else { (0, k) };
        Some(DataExpr::cmp(op, Linear::sum(pos, kp), Linear::sum(neg, kn)))
    }

    /// `self mod k`; negative coefficients are replaced by congruent ones.
    fn modulo(self, k: u64) -> Option<DataExpr> {
        let m = i128::from(k);
        let terms = self
            .terms
            .into_iter()
            .filter_map(|(a, c)| {
                let r = c.rem_euclid(m);
                (r != 0).then(|| u64::try_from(r).map(|r| (a, r)))
            })
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        let constant = u64::try_from(self.constant.rem_euclid(m)).ok()?;
        if terms.is_empty() {
            return Some(DataExpr::Nat(constant));
        }
        Some(DataExpr::modulo(Linear::sum(terms, constant), k))
    }
}

#[derive(Clone)]
enum Term {
    Bool(Prop),
    Int(Linear),
}

struct Reader<'a> {
    sorts: &'a BTreeMap<String, Sort>,
    lets: Vec<(String, Term)>,
}

impl Reader<'_> {
    fn lookup(&self, name: &str) -> Option<Term> {
        if let Some((_, t)) = self.lets.iter().rev().find(|(n, _)| n == name) {
            return Some(t.clone());
        }
        match self.sorts.get(name)? {
            Sort::Nat => {
                let mut l = Linear::default();
                l.terms.insert(DataExpr::Var(name.to_string()), 1);
                Some(Term::Int(l))
            }
            Sort::Bool => Some(Term::Bool(Prop::Data(DataExpr::Var(name.to_string())))),
        }
    }

    fn formula(&mut self, s: &Sexp) -> Option<Prop> {
        match self.term(s)? {
            Term::Bool(p) => Some(p),
            Term::Int(_) => None,
        }
    }

    fn int(&mut self, s: &Sexp) -> Option<Linear> {
        match self.term(s)? {
            Term::Int(l) => Some(l),
            Term::Bool(_) => None,
        }
    }

    fn term(&mut self, s: &Sexp) -> Option<Term> {
        let items = match s {
            Sexp::Atom(a) => {
                return match a.as_str() {
                    "true" => Some(Term::Bool(Prop::Const(true))),
                    "false" => Some(Term::Bool(Prop::Const(false))),
                    _ if a.bytes().all(|b| b.is_ascii_digit()) => {
                        Some(Term::Int(Linear { terms: BTreeMap::new(), constant: a.parse().ok()? }))
                    }
                    _ => self.lookup(a),
                };
            }
            Sexp::Str(_) => return None,
            Sexp::List(items) => items,
        };
        let (head, args) = items.split_first()?;
        let head = head.atom()?;
        Some(match head {
            "not" if args.len() == 1 => Term::Bool(Prop::not(self.formula(&args[0])?)),
            "and" => Term::Bool(Prop::and(args.iter().map(|a| self.formula(a)).collect::<Option<Vec<_>>>()?)),
            "or" => Term::Bool(Prop::or(args.iter().map(|a| self.formula(a)).collect::<Option<Vec<_>>>()?)),
            "=>" if args.len() == 2 => {
                let (a, b) = (self.formula(&args[0])?, self.formula(&args[1])?);
                Term::Bool(Prop::or([Prop::not(a), b]))
            }
            "ite" if args.len() == 3 => {
                let c = self.formula(&args[0])?;
                let (a, b) = (self.formula(&args[1])?, self.formula(&args[2])?);
                Term::Bool(Prop::or([Prop::and([c.clone(), a]), Prop::and([Prop::not(c), b])]))
            }
            "let" if args.len() == 2 => {
                let depth = self.lets.len();
                let mut bound = Vec::new();
                for b in args[0].list()? {
                    let pair = b.list()?;
                    if pair.len() != 2 {
                        return None;
                    }
                    bound.push((pair[0].atom()?.to_string(), self.term(&pair[1])?));
                }
                self.lets.extend(bound);
                let body = self.term(&args[1]);
                self.lets.truncate(depth);
                body?
            }
            "=" | "distinct" | "<" | "<=" | ">" | ">=" if args.len() == 2 => {
                let (a, b) = (self.term(&args[0])?, self.term(&args[1])?);
                let p = match (a, b) {
                    (Term::Int(a), Term::Int(b)) => {
                        let op = match head {
                            "=" => CmpOp::Eq,
                            "distinct" => CmpOp::Ne,
                            "<" => CmpOp::Lt,
                            "<=" => CmpOp::Le,
                            ">" => CmpOp::Gt,
                            _ => CmpOp::Ge,
                        };
                        Prop::data(a.add(b.scale(-1)).compare(op)?)
                    }
                    (Term::Bool(a), Term::Bool(b)) if head == "=" || head == "distinct" => {
                        let same = Prop::or([Prop::and([a.clone(), b.clone()]), Prop::and([Prop::not(a), Prop::not(b)])]);
                        if head == "=" { same } else { Prop::not(same) }
                    }
                    _ => return None,
                };
                Term::Bool(p)
            }
            "+" => {
                let mut acc = Linear::default();
                for a in args {
                    acc = acc.add(self.int(a)?);
                }
                Term::Int(acc)
            }
            "-" if args.len() == 1 => Term::Int(self.int(&args[0])?.scale(-1)),
            "-" if args.len() >= 2 => {
                let mut acc = self.int(&args[0])?;
                for a in &args[1..] {
                    acc = acc.add(self.int(a)?.scale(-1));
                }
                Term::Int(acc)
            }
            "*" => {
                let mut factor = 1i128;
                let mut rest: Option<Linear> = None;
                for a in args {
                    let l = self.int(a)?;
                    if l.terms.is_empty() {
                        factor = factor.checked_mul(l.constant)?;
                    } else if rest.is_none() {
                        rest = Some(l);
                    } else {
                        return None;
                    }
                }
                Term::Int(match rest {
                    Some(l) => l.scale(factor),
                    None => Linear { terms: BTreeMap::new(), constant: factor },
                })
            }
            "mod" if args.len() == 2 => {
                let k = self.int(&args[1])?;
                if !k.terms.is_empty() || k.constant <= 0 {
                    return None;
                }
                let k = u64::try_from(k.constant).ok()?;
                let mut l = Linear::default();
                match self.int(&args[0])?.modulo(k)? {
                    DataExpr::Nat(c) => l.constant = i128::from(c),
                    atom => {
                        l.terms.insert(atom, 1);
                    }
                }
                Term::Int(l)
            }
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_all;
    use alloc::boxed::Box;
    use alloc::vec;

    #[test]
    fn data_terms() {
        let e = DataExpr::Monus(Box::new(DataExpr::Nat(1)), Box::new(DataExpr::Nat(2)));
        assert_eq!(data(&e), "(ite (>= 1 2) (- 1 2) 0)");
        assert_eq!(data(&DataExpr::even(DataExpr::var("n'"))), "(= (mod |n'| 2) 0)");
        let ne = DataExpr::cmp(CmpOp::Ne, DataExpr::Scale(3, Box::new(DataExpr::var("x"))), DataExpr::Nat(4));
        assert_eq!(data(&ne), "(not (= (* 3 |x|) 4))");
    }

    #[test]
    fn shared_sets_are_defined_once() {
        let n = vec![Param::new("n", Sort::Nat)];
        let even = Arc::new(SetExpr::new(n.clone(), vec![], Prop::data(DataExpr::even(DataExpr::var("n")))));
        let child = Arc::new(SetExpr::new(
            n.clone(),
            vec![],
            Prop::and([
                Prop::Member(even.clone(), vec![DataExpr::var("n")]),
                Prop::data(DataExpr::cmp(CmpOp::Lt, DataExpr::var("n"), DataExpr::Nat(4))),
            ]),
        ));
        let mut enc = Encoder::new();
        let q = Query::new(n.clone(), Prop::Member(child.clone(), vec![DataExpr::var("n")]));
        let first = enc.encode(&q);
        assert_eq!(
            first.definitions,
            vec![
                "(define-fun S!0 ((|n| Int)) Bool (= (mod |n| 2) 0))".to_string(),
                "(define-fun S!1 ((|n| Int)) Bool (and (S!0 |n|) (< |n| 4)))".to_string(),
            ]
        );
        assert_eq!(
            first.scoped,
            vec!["(declare-const |n| Int)", "(assert (>= |n| 0))", "(assert (S!1 |n|))"]
        );
        let again = enc.encode(&Query::new(vec![], Prop::Member(even, vec![DataExpr::Nat(3)])));
        assert!(again.definitions.is_empty());
        assert_eq!(again.scoped, vec!["(assert (S!0 3))"]);
        enc.clear();
        assert_eq!(enc.definition_count(), 0);
    }

    #[test]
    fn quantifiers_carry_nat_bounds() {
        let body = Prop::exists(
            vec![Param::new("e", Sort::Nat), Param::new("b", Sort::Bool)],
            Prop::and([
                Prop::data(DataExpr::cmp(CmpOp::Lt, DataExpr::var("e"), DataExpr::Nat(1))),
                Prop::data(DataExpr::var("b")),
            ]),
        );
        let script = Encoder::standalone(&Query::new(vec![], body), "(check-sat)");
        assert_eq!(
            script,
            "(set-logic LIA)\n(assert (exists ((|e| Int) (|b| Bool)) (and (>= |e| 0) (and (< |e| 1) |b|))))\n(check-sat)\n"
        );
    }

    #[test]
    fn goals_read_back() {
        let vars = vec![Param::new("x", Sort::Nat), Param::new("y", Sort::Nat)];
        let text = "(goals (goal (>= x 0) (<= (+ y (* (- 1) x)) 0) (>= (mod (+ 1 x (* (- 1) y)) 2) 1) (not (= x 2)) :precision precise :depth 2))";
        let p = read_goals(&parse_all(text).unwrap()[0], &vars).unwrap();
        assert_eq!(p.to_string(), "y <= x && odd(x + y + 1) && !(x = 2)");
        let empty = read_goals(&parse_all("(goals (goal :precision precise :depth 1))").unwrap()[0], &vars).unwrap();
        assert_eq!(empty, Prop::Const(true));
        let lets = "(goals (goal (let ((a!1 (+ x 3))) (or (< a!1 y) (= a!1 y))) :precision precise))";
        let p = read_goals(&parse_all(lets).unwrap()[0], &vars).unwrap();
        assert_eq!(p.to_string(), "x + 3 < y || x + 3 = y");
        let div = "(goals (goal (= (div x 2) y)))";
        assert_eq!(read_goals(&parse_all(div).unwrap()[0], &vars), None);
        let unknown = "(goals (goal (= z y)))";
        assert_eq!(read_goals(&parse_all(unknown).unwrap()[0], &vars), None);
    }

    #[test]
    fn models() {
        let consts = vec![Param::new("n'", Sort::Nat), Param::new("b", Sort::Bool), Param::new("z", Sort::Nat)];
        let m = &parse_all("((define-fun |n'| () Int 1) (define-fun b () Bool true) (define-fun S!0 ((x Int)) Bool true))").unwrap()[0];
        let env = read_model(&consts, m).unwrap();
        assert_eq!(env["n'"], Value::Nat(1));
        assert_eq!(env["b"], Value::Bool(true));
        assert_eq!(env["z"], Value::Nat(0));

        let old = &parse_all("(model (define-fun |n'| () Int (- 0)))").unwrap()[0];
        assert_eq!(read_model(&consts[..1], old).unwrap()["n'"], Value::Nat(0));
        let neg = &parse_all("((define-fun |n'| () Int (- 3)))").unwrap()[0];
        assert!(read_model(&consts[..1], neg).is_err());
    }
}
