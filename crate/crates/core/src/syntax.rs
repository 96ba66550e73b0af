//! Abstract syntax of PBESs, ranks, and ground evaluation of data expressions.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, EvalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Nat,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Nat => f.write_str("N"),
            Sort::Bool => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Nat(u64),
    Bool(bool),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Nat(_) => Sort::Nat,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match *self {
            Value::Nat(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            Value::Nat(_) => None,
        }
    }

    pub fn to_expr(&self) -> DataExpr {
        match *self {
            Value::Nat(n) => DataExpr::Nat(n),
            Value::Bool(b) => DataExpr::Bool(b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Data expressions over `N` and `B`.
///
/// `even(e)` and `odd(e)` have no node of their own: they are
/// `e mod 2 = 0` and `e mod 2 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataExpr {
    Nat(u64),
    Bool(bool),
    Var(String),
    Add(Box<DataExpr>, Box<DataExpr>),
    /// Natural subtraction, truncated at zero.
    Monus(Box<DataExpr>, Box<DataExpr>),
    /// Multiplication by a constant.
    Scale(u64, Box<DataExpr>),
    /// Remainder by a positive constant.
    Mod(Box<DataExpr>, u64),
    Cmp(CmpOp, Box<DataExpr>, Box<DataExpr>),
    Not(Box<DataExpr>),
    And(Box<DataExpr>, Box<DataExpr>),
    Or(Box<DataExpr>, Box<DataExpr>),
}

pub type Env = BTreeMap<String, Value>;

impl DataExpr {
    pub fn var(name: &str) -> DataExpr {
        DataExpr::Var(name.to_string())
    }

    pub fn cmp(op: CmpOp, a: DataExpr, b: DataExpr) -> DataExpr {
        DataExpr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn even(e: DataExpr) -> DataExpr {
        DataExpr::cmp(CmpOp::Eq, DataExpr::Mod(Box::new(e), 2), DataExpr::Nat(0))
    }

    pub fn odd(e: DataExpr) -> DataExpr {
        DataExpr::cmp(CmpOp::Eq, DataExpr::Mod(Box::new(e), 2), DataExpr::Nat(1))
    }

    /// `e mod k` with inner remainders and scalings reduced where the
    /// divisor allows; denotes the same natural as `Mod(e, k)`.
    pub fn modulo(e: DataExpr, k: u64) -> DataExpr {
        match congruent(e, k) {
            DataExpr::Nat(n) => DataExpr::Nat(n % k),
            e => DataExpr::Mod(Box::new(e), k),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: DataExpr) -> DataExpr {
        DataExpr::Not(Box::new(e))
    }

    pub fn and(a: DataExpr, b: DataExpr) -> DataExpr {
        DataExpr::And(Box::new(a), Box::new(b))
    }

    /// Conjunction of all literals, left-nested, `true` when empty.
    pub fn conjoin(literals: impl IntoIterator<Item = DataExpr>) -> DataExpr {
        literals
            .into_iter()
            .reduce(DataExpr::and)
            .unwrap_or(DataExpr::Bool(true))
    }

    pub fn eval(&self, env: &Env) -> Result<Value, EvalError> {
        let nat = |e: &DataExpr| -> Result<u64, EvalError> {
            e.eval(env)?
                .as_nat()
                .ok_or_else(|| EvalError::Sort(e.to_string()))
        };
        let boolean = |e: &DataExpr| -> Result<bool, EvalError> {
            e.eval(env)?
                .as_bool()
                .ok_or_else(|| EvalError::Sort(e.to_string()))
        };
        Ok(match self {
            DataExpr::Nat(n) => Value::Nat(*n),
            DataExpr::Bool(b) => Value::Bool(*b),
            DataExpr::Var(x) => *env.get(x).ok_or_else(|| EvalError::Unbound(x.clone()))?,
            DataExpr::Add(a, b) => Value::Nat(nat(a)?.checked_add(nat(b)?).ok_or(EvalError::Overflow)?),
            DataExpr::Monus(a, b) => Value::Nat(nat(a)?.saturating_sub(nat(b)?)),
            DataExpr::Scale(k, a) => Value::Nat(k.checked_mul(nat(a)?).ok_or(EvalError::Overflow)?),
            DataExpr::Mod(a, k) => {
                if *k == 0 {
                    return Err(EvalError::Sort(self.to_string()));
                }
                Value::Nat(nat(a)? % k)
            }
            DataExpr::Cmp(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                let r = match (op, x, y) {
                    (CmpOp::Eq, x, y) if x.sort() == y.sort() => x == y,
                    (CmpOp::Ne, x, y) if x.sort() == y.sort() => x != y,
                    (op, Value::Nat(x), Value::Nat(y)) => match op {
                        CmpOp::Lt => x < y,
                        CmpOp::Le => x <= y,
                        CmpOp::Gt => x > y,
                        CmpOp::Ge => x >= y,
                        CmpOp::Eq | CmpOp::Ne => unreachable!(),
                    },
                    _ => return Err(EvalError::Sort(self.to_string())),
                };
                Value::Bool(r)
            }
            DataExpr::Not(a) => Value::Bool(!boolean(a)?),
            DataExpr::And(a, b) => Value::Bool(boolean(a)? && boolean(b)?),
            DataExpr::Or(a, b) => Value::Bool(boolean(a)? || boolean(b)?),
        })
    }

    /// Sort of the expression, given the sorts of its variables.
    pub fn sort_in(&self, lookup: &dyn Fn(&str) -> Option<Sort>) -> Result<Sort, EvalError> {
        let expect = |e: &DataExpr, s: Sort| -> Result<(), EvalError> {
            if e.sort_in(lookup)? == s {
                Ok(())
            } else {
                Err(EvalError::Sort(e.to_string()))
            }
        };
        Ok(match self {
            DataExpr::Nat(_) => Sort::Nat,
            DataExpr::Bool(_) => Sort::Bool,
            DataExpr::Var(x) => lookup(x).ok_or_else(|| EvalError::Unbound(x.clone()))?,
            DataExpr::Add(a, b) | DataExpr::Monus(a, b) => {
                expect(a, Sort::Nat)?;
                expect(b, Sort::Nat)?;
                Sort::Nat
            }
            DataExpr::Scale(_, a) | DataExpr::Mod(a, _) => {
                expect(a, Sort::Nat)?;
                Sort::Nat
            }
            DataExpr::Cmp(op, a, b) => {
                let sa = a.sort_in(lookup)?;
                let sb = b.sort_in(lookup)?;
                let ok = match op {
                    CmpOp::Eq | CmpOp::Ne => sa == sb,
                    _ => sa == Sort::Nat && sb == Sort::Nat,
                };
                if !ok {
                    return Err(EvalError::Sort(self.to_string()));
                }
                Sort::Bool
            }
            DataExpr::Not(a) => {
                expect(a, Sort::Bool)?;
                Sort::Bool
            }
            DataExpr::And(a, b) | DataExpr::Or(a, b) => {
                expect(a, Sort::Bool)?;
                expect(b, Sort::Bool)?;
                Sort::Bool
            }
        })
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            DataExpr::Nat(_) | DataExpr::Bool(_) => {}
            DataExpr::Var(x) => {
                out.insert(x.clone());
            }
            DataExpr::Scale(_, a) | DataExpr::Mod(a, _) | DataExpr::Not(a) => a.free_vars_into(out),
            DataExpr::Add(a, b)
            | DataExpr::Monus(a, b)
            | DataExpr::Cmp(_, a, b)
            | DataExpr::And(a, b)
            | DataExpr::Or(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, map: &BTreeMap<String, DataExpr>) -> DataExpr {
        let s = |e: &DataExpr| Box::new(e.substitute(map));
        match self {
            DataExpr::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            DataExpr::Nat(_) | DataExpr::Bool(_) => self.clone(),
            DataExpr::Add(a, b) => DataExpr::Add(s(a), s(b)),
            DataExpr::Monus(a, b) => DataExpr::Monus(s(a), s(b)),
            DataExpr::Scale(k, a) => DataExpr::Scale(*k, s(a)),
            DataExpr::Mod(a, k) => DataExpr::modulo(a.substitute(map), *k),
            DataExpr::Cmp(op, a, b) => DataExpr::Cmp(*op, s(a), s(b)),
            DataExpr::Not(a) => DataExpr::Not(s(a)),
            DataExpr::And(a, b) => DataExpr::And(s(a), s(b)),
            DataExpr::Or(a, b) => DataExpr::Or(s(a), s(b)),
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> DataExpr {
        let mut map = BTreeMap::new();
        map.insert(from.to_string(), DataExpr::Var(to.to_string()));
        self.substitute(&map)
    }

    fn precedence(&self) -> u8 {
        match self {
            DataExpr::Or(..) => 1,
            DataExpr::And(..) => 2,
            DataExpr::Cmp(CmpOp::Eq, a, b) if is_parity_test(a, b).is_some() => 8,
            DataExpr::Cmp(..) => 3,
            DataExpr::Add(..) | DataExpr::Monus(..) => 4,
            DataExpr::Scale(..) | DataExpr::Mod(..) => 5,
            DataExpr::Not(..) => 6,
            _ => 8,
        }
    }
}

/// Recognises `e mod 2 = 0` / `e mod 2 = 1` so they print as `even(e)` / `odd(e)`.
fn is_parity_test<'a>(a: &'a DataExpr, b: &DataExpr) -> Option<(&'a DataExpr, bool)> {
    match (a, b) {
        (DataExpr::Mod(e, 2), DataExpr::Nat(0)) => Some((e, true)),
        (DataExpr::Mod(e, 2), DataExpr::Nat(1)) => Some((e, false)),
        _ => None,
    }
}

struct Prec<'a>(&'a DataExpr, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for DataExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            DataExpr::Nat(n) => write!(f, "{n}"),
            DataExpr::Bool(b) => write!(f, "{b}"),
            DataExpr::Var(x) => f.write_str(x),
            DataExpr::Add(a, b) => write!(f, "{} + {}", Prec(a, p), Prec(b, p + 1)),
            DataExpr::Monus(a, b) => write!(f, "{} - {}", Prec(a, p), Prec(b, p + 1)),
            DataExpr::Scale(k, a) => write!(f, "{k}*{}", Prec(a, p + 1)),
            DataExpr::Mod(a, k) => write!(f, "{} mod {k}", Prec(a, p)),
            DataExpr::Cmp(op, a, b) => match is_parity_test(a, b) {
                Some((e, true)) => write!(f, "even({e})"),
                Some((e, false)) => write!(f, "odd({e})"),
                None => write!(f, "{} {} {}", Prec(a, p + 1), op.symbol(), Prec(b, p + 1)),
            },
            DataExpr::Not(a) => write!(f, "!{}", Prec(a, 8)),
            DataExpr::And(a, b) => write!(f, "{} && {}", Prec(a, p), Prec(b, p + 1)),
            DataExpr::Or(a, b) => write!(f, "{} || {}", Prec(a, p), Prec(b, p + 1)),
        }
    }
}

/// Predicate formulas: data leaves combined with `&&`, `||`, quantifiers and
/// predicate-variable calls.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredFormula {
    Data(DataExpr),
    And(Box<PredFormula>, Box<PredFormula>),
    Or(Box<PredFormula>, Box<PredFormula>),
    Exists(String, Sort, Box<PredFormula>),
    /// Accepted by the parser; rejected by normalisation.
    Forall(String, Sort, Box<PredFormula>),
    Call(String, Vec<DataExpr>),
}

impl PredFormula {
    pub fn and(a: PredFormula, b: PredFormula) -> PredFormula {
        PredFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PredFormula, b: PredFormula) -> PredFormula {
        PredFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, sort: Sort, body: PredFormula) -> PredFormula {
        PredFormula::Exists(x.to_string(), sort, Box::new(body))
    }

    pub fn call(name: &str, args: Vec<DataExpr>) -> PredFormula {
        PredFormula::Call(name.to_string(), args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            PredFormula::Data(e) => e.free_vars_into(out),
            PredFormula::And(a, b) | PredFormula::Or(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            PredFormula::Exists(x, _, body) | PredFormula::Forall(x, _, body) => {
                let mut inner = BTreeSet::new();
                body.free_vars_into(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
            PredFormula::Call(_, args) => args.iter().for_each(|a| a.free_vars_into(out)),
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            PredFormula::Data(e) => e.free_vars_into(out),
            PredFormula::And(a, b) | PredFormula::Or(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            PredFormula::Exists(x, _, body) | PredFormula::Forall(x, _, body) => {
                out.insert(x.clone());
                body.all_names(out);
            }
            PredFormula::Call(_, args) => args.iter().for_each(|a| a.free_vars_into(out)),
        }
    }

    /// Substitution of free data variables; the caller guarantees no capture.
    pub fn substitute(&self, map: &BTreeMap<String, DataExpr>) -> PredFormula {
        match self {
            PredFormula::Data(e) => PredFormula::Data(e.substitute(map)),
            PredFormula::And(a, b) => PredFormula::and(a.substitute(map), b.substitute(map)),
            PredFormula::Or(a, b) => PredFormula::or(a.substitute(map), b.substitute(map)),
            PredFormula::Exists(x, s, body) | PredFormula::Forall(x, s, body) => {
                let mut inner = map.clone();
                inner.remove(x);
                let body = Box::new(body.substitute(&inner));
                if matches!(self, PredFormula::Exists(..)) {
                    PredFormula::Exists(x.clone(), *s, body)
                } else {
                    PredFormula::Forall(x.clone(), *s, body)
                }
            }
            PredFormula::Call(name, args) => {
                PredFormula::Call(name.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PredFormula::Exists(..) | PredFormula::Forall(..) => 0,
            PredFormula::Or(..) => 1,
            PredFormula::And(..) => 2,
            PredFormula::Data(e) => e.precedence().max(3),
            PredFormula::Call(..) => 8,
        }
    }
}

struct FPrec<'a>(&'a PredFormula, u8);

impl fmt::Display for FPrec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for PredFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredFormula::Data(e) => {
                // Boolean connectives inside a data leaf would reparse as
                // formula connectives, so they keep their parentheses.
                if matches!(e, DataExpr::And(..) | DataExpr::Or(..)) {
                    write!(f, "({e})")
                } else {
                    write!(f, "{e}")
                }
            }
            PredFormula::And(a, b) => write!(f, "{} && {}", FPrec(a, 2), FPrec(b, 3)),
            PredFormula::Or(a, b) => write!(f, "{} || {}", FPrec(a, 1), FPrec(b, 2)),
            PredFormula::Exists(x, s, body) => write!(f, "exists {x}:{s} . {body}"),
            PredFormula::Forall(x, s, body) => write!(f, "forall {x}:{s} . {body}"),
            PredFormula::Call(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fixpoint {
    Mu,
    Nu,
}

impl fmt::Display for Fixpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixpoint::Mu => f.write_str("mu"),
            Fixpoint::Nu => f.write_str("nu"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param {
    pub name: String,
    pub sort: Sort,
}

impl Param {
    pub fn new(name: &str, sort: Sort) -> Param {
        Param { name: name.to_string(), sort }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub fixpoint: Fixpoint,
    pub name: String,
    pub params: Vec<Param>,
    pub body: PredFormula,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}(", self.fixpoint, self.name)?;
        write_list(f, &self.params)?;
        write!(f, ") = {};", self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pbes {
    pub equations: Vec<Equation>,
}

impl Pbes {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.equations.iter().position(|eq| eq.name == name)
    }

    /// Alternation count of the prefix `nu s1 ... si`.
    pub fn rank(&self, name: &str) -> Result<u32, Error> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(ranks(self.equations.iter().map(|eq| eq.fixpoint))[i])
    }

    /// Checks that `sig` names a bound variable with matching value sorts.
    pub fn check_signature(&self, sig: &Signature) -> Result<usize, Error> {
        let i = self
            .index_of(&sig.name)
            .ok_or_else(|| Error::UnknownVariable(sig.name.clone()))?;
        check_values(&self.equations[i].params, sig)?;
        Ok(i)
    }
}

pub(crate) fn check_values(params: &[Param], sig: &Signature) -> Result<(), Error> {
    let ok = params.len() == sig.values.len()
        && params.iter().zip(&sig.values).all(|(p, v)| p.sort == v.sort());
    if ok {
        Ok(())
    } else {
        Err(Error::BadSignature(sig.to_string()))
    }
}

/// Ranks of a sequence of binders, counted from an implicit leading `nu`.
pub fn ranks(binders: impl IntoIterator<Item = Fixpoint>) -> Vec<u32> {
    let mut prev = Fixpoint::Nu;
    let mut rank = 0;
    binders
        .into_iter()
        .map(|sigma| {
            if sigma != prev {
                rank += 1;
                prev = sigma;
            }
            rank
        })
        .collect()
}

impl fmt::Display for Pbes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

/// A signature `X(v1, ..., vn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub name: String,
    pub values: Vec<Value>,
}

impl Signature {
    pub fn new(name: &str, values: Vec<Value>) -> Signature {
        Signature { name: name.to_string(), values }
    }

    pub fn nat(name: &str, values: &[u64]) -> Signature {
        Signature::new(name, values.iter().map(|&v| Value::Nat(v)).collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        write_list(f, &self.values)?;
        f.write_str(")")
    }
}

/// A term congruent to `e` modulo `k`. Monus is kept as is because
/// truncation does not respect congruence.
fn congruent(e: DataExpr, k: u64) -> DataExpr {
    match e {
        DataExpr::Nat(n) => DataExpr::Nat(n % k),
        // (a mod m) mod k = a mod k when k divides m.
        DataExpr::Mod(a, m) if m % k == 0 => congruent(*a, k),
        DataExpr::Add(a, b) => match (congruent(*a, k), congruent(*b, k)) {
            (DataExpr::Nat(0), x) | (x, DataExpr::Nat(0)) => x,
            (x, y) => DataExpr::Add(Box::new(x), Box::new(y)),
        },
        // c * (a mod m) = c * a - c * m * (a div m), so k | c * m drops the remainder.
        DataExpr::Scale(c, a) => {
            let inner = match *a {
                DataExpr::Mod(b, m) if c.checked_mul(m).is_some_and(|cm| cm % k == 0) => *b,
                a => a,
            };
            match (c % k, congruent(inner, k)) {
                (0, _) | (_, DataExpr::Nat(0)) => DataExpr::Nat(0),
                (c, DataExpr::Nat(n)) => DataExpr::Nat((u128::from(c) * u128::from(n) % u128::from(k)) as u64),
                (1, x) => x,
                (c, x) => DataExpr::Scale(c, Box::new(x)),
            }
        }
        e => e,
    }
}
