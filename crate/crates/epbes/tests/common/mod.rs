//! Helpers shared by the integration tests, including an evaluator of PBES
//! semantics over a finite domain that does not use the clause form.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use epbes::{SmtSession, SolverConfig};
use epbes_core::normal::ClausePbes;
use epbes_core::refine::{Owner, PartitionFamily};
use epbes_core::set::{self, Prop, SetExpr};
use epbes_core::smt::{Query, SatResult, Solver};
use epbes_core::syntax::CmpOp;
use epbes_core::{DataExpr, Error, Fixpoint, Pbes, PredFormula, Sort};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> Pbes {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    epbes_core::parse::parse_pbes(&text).unwrap()
}

pub fn session() -> SmtSession {
    SmtSession::new(SolverConfig::from_command("z3", Duration::from_secs(60)).unwrap())
}

/// A solver that checks every eliminated body against the original with a
/// separate equivalence query.
pub struct Audited<S> {
    pub inner: S,
    pub eliminations: usize,
}

impl<S: Solver> Audited<S> {
    pub fn new(inner: S) -> Audited<S> {
        Audited { inner, eliminations: 0 }
    }
}

impl<S: Solver> Solver for Audited<S> {
    fn check(&mut self, query: &Query) -> Result<SatResult, Error> {
        self.inner.check(query)
    }

    fn decide(&mut self, query: &Query) -> Result<SatResult, Error> {
        self.inner.decide(query)
    }

    fn eliminate(&mut self, set: &SetExpr) -> Result<Option<Prop>, Error> {
        let out = self.inner.eliminate(set)?;
        if let Some(p) = &out {
            let differ = Prop::or([
                Prop::and([set.body.clone(), Prop::not(p.clone())]),
                Prop::and([Prop::not(set.body.clone()), p.clone()]),
            ]);
            let q = Query::new(set.binders().cloned().collect(), differ);
            assert_eq!(self.inner.check(&q)?, SatResult::Unsat, "elimination changed {set} into {p}");
            self.eliminations += 1;
        }
        Ok(out)
    }
}

/// Blocks of every partition are pairwise disjoint and cover the space.
pub fn check_partitions<S: Solver>(c: &ClausePbes, fam: &PartitionFamily, solver: &mut S) -> Result<(), String> {
    let mut owners: Vec<Owner> = (0..c.equations.len()).map(|eq| Owner::Or { eq }).collect();
    for (eq, e) in c.equations.iter().enumerate() {
        owners.extend((0..e.clauses.len()).map(|clause| Owner::And { eq, clause }));
    }
    for owner in owners {
        let blocks = fam.partition(owner);
        if blocks.is_empty() {
            return Err(format!("{owner} is empty"));
        }
        for (x, a) in blocks.iter().enumerate() {
            if set::is_empty(&a.shape, solver).map_err(|e| e.to_string())? {
                return Err(format!("{owner}: block #{} is empty", a.id));
            }
            for b in &blocks[x + 1..] {
                let both = set::meet(&a.shape, &b.shape).map_err(|e| e.to_string())?;
                if !set::is_empty(&both, solver).map_err(|e| e.to_string())? {
                    return Err(format!("{owner}: blocks #{} and #{} overlap", a.id, b.id));
                }
            }
        }
        let shape = &blocks[0].shape;
        let vars = shape.binder_vars();
        let any = Prop::or(blocks.iter().map(|b| Prop::member(b.shape.clone(), vars.clone())));
        let rest = SetExpr::new(shape.primary.clone(), shape.secondary.clone(), Prop::not(any));
        if !set::is_empty(&rest, solver).map_err(|e| e.to_string())? {
            return Err(format!("{owner}: blocks do not cover the space"));
        }
    }
    Ok(())
}

/// Value of a data expression with every variable a natural number.
pub fn eval_nat(e: &DataExpr, env: &BTreeMap<String, u64>) -> u64 {
    match e {
        DataExpr::Nat(n) => *n,
        DataExpr::Var(x) => env[x],
        DataExpr::Add(a, b) => eval_nat(a, env) + eval_nat(b, env),
        DataExpr::Monus(a, b) => eval_nat(a, env).saturating_sub(eval_nat(b, env)),
        DataExpr::Scale(k, a) => k * eval_nat(a, env),
        DataExpr::Mod(a, k) => eval_nat(a, env) % k,
        other => panic!("not a natural-number term: {other}"),
    }
}

pub fn eval_bool(e: &DataExpr, env: &BTreeMap<String, u64>) -> bool {
    match e {
        DataExpr::Bool(b) => *b,
        DataExpr::Not(a) => !eval_bool(a, env),
        DataExpr::And(a, b) => eval_bool(a, env) && eval_bool(b, env),
        DataExpr::Or(a, b) => eval_bool(a, env) || eval_bool(b, env),
        DataExpr::Cmp(op, a, b) => {
            let (a, b) = (eval_nat(a, env), eval_nat(b, env));
            match op {
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
            }
        }
        other => panic!("not a Boolean term: {other}"),
    }
}

/// Solution of a PBES whose parameters are naturals and whose calls stay in
/// `0..k`, by nested fixpoint iteration over tuples in `0..k`. Existential
/// quantifiers range over `0..k` too, so the generator must bound witnesses.
pub struct FiniteSolution {
    pub k: u64,
    /// `table[i][tuple index]`, tuples in lexicographic order.
    pub table: Vec<Vec<bool>>,
}

impl FiniteSolution {
    pub fn holds(&self, eq: usize, values: &[u64]) -> bool {
        let idx = values.iter().fold(0u64, |acc, v| acc * self.k + v) as usize;
        self.table[eq][idx]
    }
}

fn tuples(arity: usize, k: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..k).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

pub fn solve_finite(p: &Pbes, k: u64) -> FiniteSolution {
    for eq in &p.equations {
        assert!(eq.params.iter().all(|x| x.sort == Sort::Nat));
    }
    let mut table: Vec<Vec<bool>> = p.equations.iter().map(|eq| vec![false; k.pow(eq.params.len() as u32) as usize]).collect();
    nest(p, k, 0, &mut table);
    FiniteSolution { k, table }
}

fn nest(p: &Pbes, k: u64, i: usize, table: &mut Vec<Vec<bool>>) {
    if i == p.equations.len() {
        return;
    }
    let eq = &p.equations[i];
    let init = eq.fixpoint == Fixpoint::Nu;
    table[i].iter_mut().for_each(|b| *b = init);
    loop {
        nest(p, k, i + 1, table);
        let next: Vec<bool> = tuples(eq.params.len(), k)
            .iter()
            .map(|t| {
                let env = eq.params.iter().map(|x| x.name.clone()).zip(t.iter().copied()).collect();
                eval_formula(p, k, &eq.body, &env, table)
            })
            .collect();
        if next == table[i] {
            return;
        }
        table[i] = next;
    }
}

fn eval_formula(p: &Pbes, k: u64, f: &PredFormula, env: &BTreeMap<String, u64>, table: &[Vec<bool>]) -> bool {
    match f {
        PredFormula::Data(e) => eval_bool(e, env),
        PredFormula::And(a, b) => eval_formula(p, k, a, env, table) && eval_formula(p, k, b, env, table),
        PredFormula::Or(a, b) => eval_formula(p, k, a, env, table) || eval_formula(p, k, b, env, table),
        PredFormula::Exists(x, _, body) => (0..k).any(|v| {
            let mut env = env.clone();
            env.insert(x.clone(), v);
            eval_formula(p, k, body, &env, table)
        }),
        PredFormula::Forall(..) => panic!("universal quantifier"),
        PredFormula::Call(name, args) => {
            let i = p.index_of(name).unwrap();
            let idx = args.iter().fold(0u64, |acc, a| {
                let v = eval_nat(a, env);
                assert!(v < k, "call leaves the finite domain");
                acc * k + v
            });
            table[i][idx as usize]
        }
    }
}

/// A random PBES over naturals in which every call argument is reduced
/// modulo `k` and every witness is guarded by `e < k`. Equations have one
/// or two parameters and up to three disjuncts.
pub fn random_mod_pbes(seed: u64) -> (String, u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let k = rng.random_range(2..=6u64);
    let n = rng.random_range(1..=3usize);
    let arity: Vec<usize> = (0..n).map(|_| rng.random_range(1..=2)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let mut text = String::new();
    for i in 0..n {
        let params: Vec<String> = (0..arity[i]).map(|j| format!("d{j}")).collect();
        let mut vars = params.clone();
        let fix = if rng.random_bool(0.5) { "mu" } else { "nu" };
        let clauses = rng.random_range(1..=3);
        let mut disjuncts = Vec::new();
        for _ in 0..clauses {
            let quantified = rng.random_bool(0.35);
            if quantified {
                vars.push("e".into());
            }
            let mut parts = Vec::new();
            if quantified {
                parts.push(format!("e < {k}"));
            }
            if rng.random_bool(0.7) {
                parts.push(literal(&mut rng, &vars, k));
            }
            for _ in 0..rng.random_range(0..=2) {
                let a = rng.random_range(0..n);
                let args: Vec<String> = (0..arity[a]).map(|_| term(&mut rng, &vars, k)).collect();
                parts.push(format!("{}({})", names[a], args.join(", ")));
            }
            if parts.is_empty() {
                parts.push(if rng.random_bool(0.5) { "true".into() } else { "false".into() });
            }
            let body = parts.join(" && ");
            disjuncts.push(if quantified { format!("(exists e:N . {body})") } else { format!("({body})") });
            if quantified {
                vars.pop();
            }
        }
        let decl: Vec<String> = params.iter().map(|x| format!("{x}:N")).collect();
        text.push_str(&format!("{fix} {}({}) = {};\n", names[i], decl.join(", "), disjuncts.join(" || ")));
    }
    (text, k)
}

fn literal(rng: &mut StdRng, vars: &[String], k: u64) -> String {
    let x = &vars[rng.random_range(0..vars.len())];
    let c = rng.random_range(0..k);
    match rng.random_range(0..5) {
        0 => format!("{x} = {c}"),
        1 => format!("{x} < {c}"),
        2 => format!("even({x})"),
        3 => {
            let y = &vars[rng.random_range(0..vars.len())];
            format!("{x} <= {y}")
        }
        _ => format!("!({x} = {c})"),
    }
}

fn term(rng: &mut StdRng, vars: &[String], k: u64) -> String {
    let x = &vars[rng.random_range(0..vars.len())];
    let c = rng.random_range(0..k);
    match rng.random_range(0..4) {
        0 => format!("({x} + {c}) mod {k}"),
        1 => {
            let y = &vars[rng.random_range(0..vars.len())];
            format!("({x} + {y}) mod {k}")
        }
        2 => format!("(2*{x} + {c}) mod {k}"),
        _ => format!("{c}"),
    }
}

/// All query tuples of equation arity `n` over `0..k`.
pub fn domain(n: usize, k: u64) -> Vec<Vec<u64>> {
    tuples(n, k)
}
