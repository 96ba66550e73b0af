//! Symbolic sets: lambda-bound Boolean expressions over `N`/`B` tuples.
//!
//! A [`SetExpr`] denotes `{ (d, e) | body[d, e] }`. Bodies are quantified
//! Presburger formulas ([`Prop`]). A body may refer to another set through
//! [`Prop::Member`]; the referenced set is shared, which keeps bodies of
//! refined blocks constant-size and lets the SMT encoding define every shared
//! set once.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, EvalError};
use crate::smt::{Query, SatResult, Solver};
use crate::syntax::{CmpOp, DataExpr, Env, Param, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    /// A Boolean-sorted data expression.
    Data(DataExpr),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Exists(Vec<Param>, Box<Prop>),
    /// `args` belongs to the set (arguments line up with its binders).
    Member(Arc<SetExpr>, Vec<DataExpr>),
}

impl Prop {
    pub fn data(e: DataExpr) -> Prop {
        match e {
            DataExpr::Bool(b) => Prop::Const(b),
            e => Prop::Data(e),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Prop) -> Prop {
        match p {
            Prop::Const(b) => Prop::Const(!b),
            Prop::Not(inner) => *inner,
            p => Prop::Not(Box::new(p)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(true) => {}
                Prop::Const(false) => return Prop::Const(false),
                Prop::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::Const(true),
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(false) => {}
                Prop::Const(true) => return Prop::Const(true),
                Prop::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::Const(false),
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }

    /// Existential closure over `vars`, dropping variables that do not occur.
    pub fn exists(vars: Vec<Param>, body: Prop) -> Prop {
        let free = body.free_vars();
        let vars: Vec<Param> = vars.into_iter().filter(|v| free.contains(&v.name)).collect();
        match body {
            Prop::Const(_) => body,
            _ if vars.is_empty() => body,
            Prop::Exists(mut inner, b) => {
                let mut all = vars;
                all.append(&mut inner);
                Prop::Exists(all, b)
            }
            _ => Prop::Exists(vars, Box::new(body)),
        }
    }

    /// Membership of `args` in `set`, folded away when the set is trivial.
    pub fn member(set: Arc<SetExpr>, args: Vec<DataExpr>) -> Prop {
        match &set.body {
            Prop::Const(b) => Prop::Const(*b),
            _ if set.is_identity_args(&args) && args.is_empty() => set.body.clone(),
            _ => Prop::Member(set, args),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Prop::Const(_) => {}
            Prop::Data(e) => e.free_vars_into(out),
            Prop::Not(p) => p.free_vars_into(out),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.free_vars_into(out)),
            Prop::Exists(vars, body) => {
                let mut inner = BTreeSet::new();
                body.free_vars_into(&mut inner);
                for v in vars {
                    inner.remove(&v.name);
                }
                out.extend(inner);
            }
            Prop::Member(_, args) => args.iter().for_each(|a| a.free_vars_into(out)),
        }
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn substitute(&self, map: &BTreeMap<String, DataExpr>) -> Prop {
        match self {
            Prop::Const(_) => self.clone(),
            Prop::Data(e) => Prop::data(e.substitute(map)),
            Prop::Not(p) => Prop::not(p.substitute(map)),
            Prop::And(ps) => Prop::and(ps.iter().map(|p| p.substitute(map))),
            Prop::Or(ps) => Prop::or(ps.iter().map(|p| p.substitute(map))),
            Prop::Member(set, args) => Prop::Member(set.clone(), args.iter().map(|a| a.substitute(map)).collect()),
            Prop::Exists(vars, body) => {
                let mut inner = map.clone();
                for v in vars {
                    inner.remove(&v.name);
                }
                let mut incoming = BTreeSet::new();
                for e in inner.values() {
                    e.free_vars_into(&mut incoming);
                }
                let mut avoid = incoming.clone();
                body.free_vars_into(&mut avoid);
                let mut new_vars = Vec::with_capacity(vars.len());
                for v in vars {
                    if incoming.contains(&v.name) {
                        let fresh = fresh_name(&v.name, &avoid);
                        avoid.insert(fresh.clone());
                        inner.insert(v.name.clone(), DataExpr::Var(fresh.clone()));
                        new_vars.push(Param { name: fresh, sort: v.sort });
                    } else {
                        new_vars.push(v.clone());
                    }
                }
                Prop::Exists(new_vars, Box::new(body.substitute(&inner)))
            }
        }
    }

    /// Expands `Member` nodes in place. Returns `None` once the result would
    /// exceed `budget` nodes.
    pub fn inline(&self, budget: usize) -> Option<Prop> {
        let mut left = budget;
        self.inline_with(&mut left)
    }

    fn inline_with(&self, left: &mut usize) -> Option<Prop> {
        *left = left.checked_sub(1)?;
        Some(match self {
            Prop::Const(_) | Prop::Data(_) => self.clone(),
            Prop::Not(p) => Prop::not(p.inline_with(left)?),
            Prop::And(ps) => Prop::and(ps.iter().map(|p| p.inline_with(left)).collect::<Option<Vec<_>>>()?),
            Prop::Or(ps) => Prop::or(ps.iter().map(|p| p.inline_with(left)).collect::<Option<Vec<_>>>()?),
            Prop::Exists(vars, body) => Prop::exists(vars.clone(), body.inline_with(left)?),
            Prop::Member(set, args) => {
                let body = set.body.inline_with(left)?;
                body.substitute(&set.binding(args))
            }
        })
    }

    /// Truth under `env`, with quantifiers ranging over `0..=bound` (Nat) or
    /// both truth values (Bool). Exact on quantifier-free bodies.
    pub fn eval_bounded(&self, env: &Env, bound: u64) -> Result<bool, EvalError> {
        Ok(match self {
            Prop::Const(b) => *b,
            Prop::Data(e) => e.eval(env)?.as_bool().ok_or_else(|| EvalError::Sort(e.to_string()))?,
            Prop::Not(p) => !p.eval_bounded(env, bound)?,
            Prop::And(ps) => {
                for p in ps {
                    if !p.eval_bounded(env, bound)? {
                        return Ok(false);
                    }
                }
                true
            }
            Prop::Or(ps) => {
                for p in ps {
                    if p.eval_bounded(env, bound)? {
                        return Ok(true);
                    }
                }
                false
            }
            Prop::Exists(vars, body) => {
                let mut env = env.clone();
                exists_bounded(vars, body, &mut env, bound)?
            }
            Prop::Member(set, args) => {
                let mut inner = Env::new();
                for (b, a) in set.binders().zip(args) {
                    inner.insert(b.name.clone(), a.eval(env)?);
                }
                set.body.eval_bounded(&inner, bound)?
            }
        })
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, outer: u8) -> fmt::Result {
        let prec = match self {
            Prop::Exists(..) => 0,
            Prop::Or(_) => 1,
            Prop::And(_) => 2,
            _ => 3,
        };
        if prec < outer {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn exists_bounded(vars: &[Param], body: &Prop, env: &mut Env, bound: u64) -> Result<bool, EvalError> {
    let Some((first, rest)) = vars.split_first() else {
        return body.eval_bounded(env, bound);
    };
    let candidates: Vec<Value> = match first.sort {
        crate::syntax::Sort::Nat => (0..=bound).map(Value::Nat).collect(),
        crate::syntax::Sort::Bool => alloc::vec![Value::Bool(false), Value::Bool(true)],
    };
    for v in candidates {
        env.insert(first.name.clone(), v);
        if exists_bounded(rest, body, env, bound)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Const(b) => write!(f, "{b}"),
            Prop::Data(e) => match e {
                DataExpr::And(..) | DataExpr::Or(..) => write!(f, "({e})"),
                _ => write!(f, "{e}"),
            },
            Prop::Not(p) => {
                f.write_str("!")?;
                p.write_prec(f, 4)
            }
            Prop::And(ps) | Prop::Or(ps) => {
                let (sep, prec) = if matches!(self, Prop::And(_)) { (" && ", 3) } else { (" || ", 2) };
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    p.write_prec(f, prec)?;
                }
                Ok(())
            }
            Prop::Exists(vars, body) => {
                f.write_str("exists ")?;
                crate::syntax::write_list(f, vars)?;
                write!(f, " . {body}")
            }
            Prop::Member(set, args) => {
                f.write_str("(")?;
                crate::syntax::write_list(f, args)?;
                write!(f, ") in {{{set}}}")
            }
        }
    }
}

/// A set `{ (d, e) | body }` over a primary tuple `d` and optional secondary tuple `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetExpr {
    pub primary: Vec<Param>,
    pub secondary: Vec<Param>,
    pub body: Prop,
}

impl SetExpr {
    pub fn new(primary: Vec<Param>, secondary: Vec<Param>, body: Prop) -> SetExpr {
        SetExpr { primary, secondary, body }
    }

    pub fn full(primary: Vec<Param>, secondary: Vec<Param>) -> SetExpr {
        SetExpr::new(primary, secondary, Prop::Const(true))
    }

    pub fn empty(primary: Vec<Param>, secondary: Vec<Param>) -> SetExpr {
        SetExpr::new(primary, secondary, Prop::Const(false))
    }

    pub fn binders(&self) -> impl Iterator<Item = &Param> {
        self.primary.iter().chain(&self.secondary)
    }

    pub fn arity(&self) -> usize {
        self.primary.len() + self.secondary.len()
    }

    /// The binders as variable expressions, in order.
    pub fn binder_vars(&self) -> Vec<DataExpr> {
        self.binders().map(|b| DataExpr::Var(b.name.clone())).collect()
    }

    fn same_signature(&self, other: &SetExpr) -> Result<(), Error> {
        if self.primary == other.primary && self.secondary == other.secondary {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                signature_text(self),
                signature_text(other)
            )))
        }
    }

    fn is_identity_args(&self, args: &[DataExpr]) -> bool {
        args.len() == self.arity()
            && self
                .binders()
                .zip(args)
                .all(|(b, a)| matches!(a, DataExpr::Var(x) if *x == b.name))
    }

    fn binding(&self, args: &[DataExpr]) -> BTreeMap<String, DataExpr> {
        self.binders().map(|b| b.name.clone()).zip(args.iter().cloned()).collect()
    }

    /// Readable body with shared sets expanded, or `None` when that gets too large.
    pub fn expanded(&self, budget: usize) -> Option<Prop> {
        self.body.inline(budget)
    }
}

fn signature_text(s: &SetExpr) -> String {
    let names = |ps: &[Param]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
    format!("({} | {})", names(&s.primary), names(&s.secondary))
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\\(")?;
        crate::syntax::write_list(f, &self.primary)?;
        if !self.secondary.is_empty() {
            f.write_str(" | ")?;
            crate::syntax::write_list(f, &self.secondary)?;
        }
        write!(f, "). {}", self.body)
    }
}

pub fn meet(a: &SetExpr, b: &SetExpr) -> Result<SetExpr, Error> {
    a.same_signature(b)?;
    Ok(SetExpr::new(a.primary.clone(), a.secondary.clone(), Prop::and([a.body.clone(), b.body.clone()])))
}

pub fn complement(a: &SetExpr) -> SetExpr {
    SetExpr::new(a.primary.clone(), a.secondary.clone(), Prop::not(a.body.clone()))
}

/// Projection of a pair set onto its primary tuple.
pub fn exists_project(a: &SetExpr) -> SetExpr {
    SetExpr::new(a.primary.clone(), Vec::new(), Prop::exists(a.secondary.clone(), a.body.clone()))
}

/// Inverse image of `target` under the argument map `args`, as a set over
/// `primary` and `secondary`.
pub fn substitute_into(
    target: &Arc<SetExpr>,
    args: &[DataExpr],
    primary: &[Param],
    secondary: &[Param],
) -> Result<SetExpr, Error> {
    if args.len() != target.arity() {
        return Err(Error::SignatureMismatch(format!(
            "{} argument(s) for a set of arity {}",
            args.len(),
            target.arity()
        )));
    }
    let same_binders = target.primary.len() + target.secondary.len() == primary.len() + secondary.len()
        && target.binders().zip(primary.iter().chain(secondary)).all(|(a, b)| a == b);
    let body = if same_binders && target.is_identity_args(args) {
        target.body.clone()
    } else {
        Prop::member(target.clone(), args.to_vec())
    };
    Ok(SetExpr::new(primary.to_vec(), secondary.to_vec(), body))
}

/// Decides whether the set is empty.
pub fn is_empty<S: Solver + ?Sized>(a: &SetExpr, solver: &mut S) -> Result<bool, Error> {
    if let Prop::Const(b) = &a.body { return Ok(!b) }
    let query = Query::new(a.binders().cloned().collect(), a.body.clone());
    Ok(!is_satisfiable(&query, solver)?)
}

/// Decides whether `point` belongs to the set.
pub fn contains<S: Solver + ?Sized>(a: &SetExpr, point: &[Value], solver: &mut S) -> Result<bool, Error> {
    if point.len() != a.arity() || a.binders().zip(point).any(|(b, v)| b.sort != v.sort()) {
        return Err(Error::SignatureMismatch(format!("point of arity {} for set {}", point.len(), signature_text(a))));
    }
    let map: BTreeMap<String, DataExpr> = a.binders().map(|b| b.name.clone()).zip(point.iter().map(Value::to_expr)).collect();
    let body = a.body.substitute(&map);
    if let Prop::Const(b) = body {
        return Ok(b);
    }
    is_satisfiable(&Query::new(Vec::new(), body), solver)
}

/// Like [`satisfiable`] without asking for a model.
pub fn is_satisfiable<S: Solver + ?Sized>(query: &Query, solver: &mut S) -> Result<bool, Error> {
    Ok(verdict(solver.decide(query)?)?.is_some())
}

/// Runs a query; `Unknown` becomes [`Error::SolverUnknown`].
pub fn satisfiable<S: Solver + ?Sized>(query: &Query, solver: &mut S) -> Result<Option<Env>, Error> {
    verdict(solver.check(query)?)
}

fn verdict(r: SatResult) -> Result<Option<Env>, Error> {
    match r {
        SatResult::Sat(model) => Ok(Some(model)),
        SatResult::Unsat => Ok(None),
        SatResult::Unknown { reason, script } => Err(Error::SolverUnknown { reason, script }),
    }
}

/// `lhs op rhs` as a proposition.
pub fn compare(op: CmpOp, lhs: DataExpr, rhs: DataExpr) -> Prop {
    Prop::Data(DataExpr::cmp(op, lhs, rhs))
}
