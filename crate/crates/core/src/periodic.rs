//! Canonical bodies for eventually periodic sets.
//!
//! A quantifier-free body whose atoms compare a binder with a constant or
//! only look at binders through remainders is determined by, per binder,
//! the exact value below a threshold `T` and the residue modulo a common
//! period `L` above it. Evaluating the body on one representative per class
//! and rebuilding it as a decision structure over the binders gives a form
//! that depends only on the denotation, with one remainder term per binder.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::set::{Prop, SetExpr};
use crate::syntax::{CmpOp, DataExpr, Env, Sort, Value};

/// Largest number of class tuples evaluated for one body.
pub const CLASS_CAP: usize = 4096;

/// Nodes a body may have once shared sets are inlined.
const INLINE_BUDGET: usize = 20_000;

/// The canonical body of `set`, or `None` outside the fragment or when the
/// class tuples exceed `cap`.
pub fn normal_form(set: &SetExpr, cap: usize) -> Option<Prop> {
    let names: Vec<String> = set.binders().map(|p| p.name.clone()).collect();
    if names.is_empty() || set.binders().any(|p| p.sort != Sort::Nat) {
        return None;
    }
    let body = set.expanded(INLINE_BUDGET)?;
    let mut scan = Scan { period: 1, thresholds: names.iter().map(|n| (n.clone(), 0)).collect() };
    scan.prop(&body)?;
    let period = scan.period;
    let mut total = 1usize;
    let mut vars = Vec::with_capacity(names.len());
    for name in names {
        let threshold = scan.thresholds[&name];
        let classes = usize::try_from(threshold.checked_add(period)?).ok()?;
        total = total.checked_mul(classes).filter(|t| *t <= cap)?;
        vars.push(Binder { name, threshold, period });
    }
    let mut r = Rebuild { vars, body: &body };
    for i in 0..r.vars.len() {
        r.minimise(i)?;
    }
    r.build(0, &mut Env::new())
}

struct Scan {
    period: u64,
    thresholds: BTreeMap<String, u64>,
}

impl Scan {
    fn prop(&mut self, p: &Prop) -> Option<()> {
        match p {
            Prop::Const(_) => Some(()),
            Prop::Data(e) => self.boolean(e),
            Prop::Not(q) => self.prop(q),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().try_for_each(|q| self.prop(q)),
            Prop::Exists(..) | Prop::Member(..) => None,
        }
    }

    fn boolean(&mut self, e: &DataExpr) -> Option<()> {
        match e {
            DataExpr::Bool(_) => Some(()),
            DataExpr::Not(a) => self.boolean(a),
            DataExpr::And(a, b) | DataExpr::Or(a, b) => {
                self.boolean(a)?;
                self.boolean(b)
            }
            DataExpr::Cmp(_, a, b) => match (&**a, &**b) {
                (DataExpr::Var(x), DataExpr::Nat(c)) | (DataExpr::Nat(c), DataExpr::Var(x)) => {
                    let t = self.thresholds.get_mut(x)?;
                    *t = (*t).max(c.checked_add(1)?);
                    Some(())
                }
                _ => {
                    self.residual(a)?;
                    self.residual(b)
                }
            },
            _ => None,
        }
    }

    /// A natural term that sees binders only through remainders.
    fn residual(&mut self, e: &DataExpr) -> Option<()> {
        match e {
            DataExpr::Nat(_) => Some(()),
            DataExpr::Mod(a, k) => {
                self.period = lcm(self.period, *k)?;
                self.linear(a)
            }
            DataExpr::Add(a, b) | DataExpr::Monus(a, b) => {
                self.residual(a)?;
                self.residual(b)
            }
            DataExpr::Scale(_, a) => self.residual(a),
            _ => None,
        }
    }

    /// A term whose remainder depends only on the binders' remainders.
    fn linear(&mut self, e: &DataExpr) -> Option<()> {
        match e {
            DataExpr::Nat(_) => Some(()),
            DataExpr::Var(x) => self.thresholds.contains_key(x).then_some(()),
            DataExpr::Add(a, b) => {
                self.linear(a)?;
                self.linear(b)
            }
            DataExpr::Scale(_, a) => self.linear(a),
            DataExpr::Mod(a, k) => {
                self.period = lcm(self.period, *k)?;
                self.linear(a)
            }
            _ => None,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Classes `0..threshold` are exact values; class `threshold + r` holds the
/// values `>= threshold` congruent to `r` modulo `period`.
struct Binder {
    name: String,
    threshold: u64,
    period: u64,
}

impl Binder {
    fn classes(&self) -> u64 {
        self.threshold + self.period
    }

    fn representative(&self, class: u64) -> u64 {
        if class < self.threshold {
            return class;
        }
        let r = class - self.threshold;
        let t = self.threshold;
        t + (r + self.period - t % self.period) % self.period
    }

    fn var(&self) -> DataExpr {
        DataExpr::Var(self.name.clone())
    }

    fn residue_is(&self, r: u64) -> Prop {
        Prop::data(DataExpr::cmp(CmpOp::Eq, DataExpr::Mod(alloc::boxed::Box::new(self.var()), self.period), DataExpr::Nat(r)))
    }

    /// Membership in a union of classes.
    fn member_of(&self, classes: &[u64]) -> Prop {
        let (t, l) = (self.threshold, self.period);
        let exact: Vec<u64> = classes.iter().copied().filter(|c| *c < t).collect();
        let residues: Vec<u64> = classes.iter().filter(|c| **c >= t).map(|c| c - t).collect();
        let low = if t == 0 {
            Prop::Const(false)
        } else if exact.len() as u64 == t {
            Prop::data(DataExpr::cmp(CmpOp::Lt, self.var(), DataExpr::Nat(t)))
        } else {
            Prop::or(exact.iter().map(|v| Prop::data(DataExpr::cmp(CmpOp::Eq, self.var(), DataExpr::Nat(*v)))))
        };
        if residues.is_empty() {
            return low;
        }
        let residue = if residues.len() as u64 == l {
            Prop::Const(true)
        } else if residues.len() as u64 * 2 <= l {
            Prop::or(residues.iter().map(|r| self.residue_is(*r)))
        } else {
            Prop::not(Prop::or((0..l).filter(|r| !residues.contains(r)).map(|r| self.residue_is(r))))
        };
        // The lower bound only matters for small values the residue test lets in.
        let guard_needed = (0..t).any(|v| !exact.contains(&v) && residues.contains(&(v % l)));
        let high = if guard_needed {
            Prop::and([Prop::data(DataExpr::cmp(CmpOp::Ge, self.var(), DataExpr::Nat(t))), residue])
        } else {
            residue
        };
        Prop::or([low, high])
    }
}

struct Rebuild<'a> {
    vars: Vec<Binder>,
    body: &'a Prop,
}

impl Rebuild<'_> {
    /// Least period dividing the current one, then least threshold.
    fn minimise(&mut self, i: usize) -> Option<()> {
        let (t, l) = (self.vars[i].threshold, self.vars[i].period);
        let columns: Vec<Vec<bool>> = (0..l).map(|r| self.column(i, self.vars[i].representative(t + r))).collect::<Option<_>>()?;
        // Column `r` is the residue `(t + r) mod l`; shifting by `d` is a rotation.
        if let Some(d) = (1..l).filter(|d| l % d == 0).find(|d| (0..l).all(|r| columns[r as usize] == columns[((r + d) % l) as usize])) {
            self.vars[i].period = d;
        }
        let l = self.vars[i].period;
        while self.vars[i].threshold > 0 {
            let t = self.vars[i].threshold;
            if self.column(i, t - 1)? != self.column(i, t - 1 + l)? {
                break;
            }
            self.vars[i].threshold = t - 1;
        }
        Some(())
    }

    /// Truth values over all classes of the other binders with binder `i` at `value`.
    fn column(&self, i: usize, value: u64) -> Option<Vec<bool>> {
        let mut out = Vec::new();
        let mut env = Env::new();
        env.insert(self.vars[i].name.clone(), Value::Nat(value));
        self.fill(0, i, &mut env, &mut out)?;
        Some(out)
    }

    fn fill(&self, j: usize, skip: usize, env: &mut Env, out: &mut Vec<bool>) -> Option<()> {
        if j == self.vars.len() {
            out.push(self.body.eval_bounded(env, 0).ok()?);
            return Some(());
        }
        if j == skip {
            return self.fill(j + 1, skip, env, out);
        }
        let var = &self.vars[j];
        for class in 0..var.classes() {
            env.insert(var.name.clone(), Value::Nat(var.representative(class)));
            self.fill(j + 1, skip, env, out)?;
        }
        Some(())
    }

    fn build(&self, i: usize, env: &mut Env) -> Option<Prop> {
        let Some(var) = self.vars.get(i) else {
            return self.body.eval_bounded(env, 0).ok().map(Prop::Const);
        };
        let mut groups: Vec<(Prop, Vec<u64>)> = Vec::new();
        for class in 0..var.classes() {
            env.insert(var.name.clone(), Value::Nat(var.representative(class)));
            let child = self.build(i + 1, env)?;
            match groups.iter_mut().find(|(p, _)| *p == child) {
                Some((_, cs)) => cs.push(class),
                None => groups.push((child, alloc::vec![class])),
            }
        }
        env.remove(&var.name);
        if groups.len() == 1 {
            return groups.pop().map(|(p, _)| p);
        }
        Some(Prop::or(groups.into_iter().map(|(child, classes)| Prop::and([var.member_of(&classes), child]))))
    }
}
