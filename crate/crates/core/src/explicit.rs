//! Bounded explicit instantiation of the dependency space.
//!
//! Exploration starts from one signature and enumerates clause witnesses
//! concretely. Signatures with a value above the value cap, and signatures
//! not expanded because the vertex cap was reached, are frontier vertices:
//! they have no moves, so circle loses there. A `True` verdict is therefore
//! always sound; `False` is only reported when the game is closed.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::game::priorities;
use crate::normal::ClausePbes;
use crate::parity::{self, Game, Player};
use crate::syntax::{Env, Param, Signature, Sort, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub value_cap: u64,
    pub witness_cap: u64,
    pub vertex_cap: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { value_cap: 256, witness_cap: 64, vertex_cap: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExplicitVertex {
    Or { eq: usize, values: Vec<Value> },
    And { eq: usize, clause: usize, values: Vec<Value>, witness: Vec<Value> },
}

#[derive(Debug, Clone)]
pub struct ExplicitGame {
    pub vertices: Vec<ExplicitVertex>,
    pub succ: Vec<Vec<usize>>,
    /// `Or` vertices left unexpanded.
    pub frontier: Vec<usize>,
    pub vertex_cap_hit: bool,
    /// Some clause may have witnesses beyond the witness cap. This does not
    /// affect `closed`.
    pub witness_truncated: bool,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitVerdict {
    True,
    False,
    Unknown,
}

/// Witness tuples with every component at most `cap`, ordered by largest
/// component, then lexicographically. Booleans count as 0 and 1.
pub fn witnesses(vars: &[Param], cap: u64) -> Vec<Vec<Value>> {
    let width = |s: Sort| match s {
        Sort::Nat => cap,
        Sort::Bool => 1,
    };
    let top = vars.iter().map(|v| width(v.sort)).max().unwrap_or(0);
    let value = |s: Sort, x: u64| match s {
        Sort::Nat => Value::Nat(x),
        Sort::Bool => Value::Bool(x == 1),
    };
    if vars.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for m in 0..=top {
        // Tuples bounded by m that reach m.
        let limit: Vec<u64> = vars.iter().map(|v| m.min(width(v.sort))).collect();
        let mut t = vec![0u64; vars.len()];
        loop {
            if t.contains(&m) {
                out.push(vars.iter().zip(&t).map(|(v, &x)| value(v.sort, x)).collect());
            }
            let Some(i) = (0..t.len()).rev().find(|&i| t[i] < limit[i]) else {
                break;
            };
            t[i] += 1;
            t[i + 1..].iter_mut().for_each(|x| *x = 0);
        }
    }
    out
}

fn over_cap(values: &[Value], cap: u64) -> bool {
    values.iter().any(|v| v.as_nat().is_some_and(|n| n > cap))
}

pub fn explore(c: &ClausePbes, sig: &Signature, bounds: Bounds) -> Result<ExplicitGame, Error> {
    let root_eq = c.index_of(&sig.name).ok_or_else(|| Error::UnknownVariable(sig.name.clone()))?;
    crate::syntax::check_values(&c.equations[root_eq].params, sig)?;
    let witness_sets: Vec<Vec<Vec<Vec<Value>>>> = c
        .equations
        .iter()
        .map(|eq| eq.clauses.iter().map(|cl| witnesses(&cl.vars, bounds.witness_cap)).collect())
        .collect();
    let mut g = ExplicitGame {
        vertices: Vec::new(),
        succ: Vec::new(),
        frontier: Vec::new(),
        vertex_cap_hit: false,
        witness_truncated: false,
        closed: false,
    };
    let mut index: BTreeMap<ExplicitVertex, usize> = BTreeMap::new();
    let mut intern = |g: &mut ExplicitGame, v: ExplicitVertex, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(&v) {
            return i;
        }
        let i = g.vertices.len();
        index.insert(v.clone(), i);
        g.vertices.push(v);
        g.succ.push(Vec::new());
        queue.push_back(i);
        i
    };
    let mut queue = VecDeque::new();
    intern(&mut g, ExplicitVertex::Or { eq: root_eq, values: sig.values.clone() }, &mut queue);
    while let Some(u) = queue.pop_front() {
        let ExplicitVertex::Or { eq: i, values } = g.vertices[u].clone() else {
            continue;
        };
        if over_cap(&values, bounds.value_cap) {
            g.frontier.push(u);
            continue;
        }
        if g.vertices.len() >= bounds.vertex_cap {
            g.vertex_cap_hit = true;
            g.frontier.push(u);
            continue;
        }
        let eq = &c.equations[i];
        let base: Env = eq.params.iter().map(|p| p.name.clone()).zip(values.iter().copied()).collect();
        for (k, clause) in eq.clauses.iter().enumerate() {
            if clause.vars.iter().any(|v| v.sort == Sort::Nat) {
                g.witness_truncated = true;
            }
            for w in &witness_sets[i][k] {
                let mut env = base.clone();
                env.extend(clause.vars.iter().map(|p| p.name.clone()).zip(w.iter().copied()));
                if clause.guard.eval(&env)? != Value::Bool(true) {
                    continue;
                }
                let and = ExplicitVertex::And { eq: i, clause: k, values: values.clone(), witness: w.clone() };
                let a = intern(&mut g, and, &mut queue);
                g.succ[u].push(a);
                for call in &clause.calls {
                    let vals = call.args.iter().map(|e| e.eval(&env)).collect::<Result<Vec<_>, _>>()?;
                    let t = intern(&mut g, ExplicitVertex::Or { eq: call.target, values: vals }, &mut queue);
                    if !g.succ[a].contains(&t) {
                        g.succ[a].push(t);
                    }
                }
            }
        }
    }
    g.frontier.sort_unstable();
    g.closed = g.frontier.is_empty() && !g.vertex_cap_hit;
    Ok(g)
}

impl ExplicitGame {
    pub fn or_count(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v, ExplicitVertex::Or { .. })).count()
    }

    pub fn as_parity_game(&self, c: &ClausePbes) -> Game {
        let omega = priorities(c);
        let mut g = Game { owner: Vec::new(), priority: Vec::new(), succ: self.succ.clone() };
        for v in &self.vertices {
            match v {
                ExplicitVertex::Or { eq, .. } => {
                    g.owner.push(Player::Even);
                    g.priority.push(omega[*eq]);
                }
                ExplicitVertex::And { .. } => {
                    g.owner.push(Player::Odd);
                    g.priority.push(0);
                }
            }
        }
        g
    }

    /// Winners by small progress measures.
    pub fn winners(&self, c: &ClausePbes) -> Vec<Player> {
        parity::solve_progress_measures(&self.as_parity_game(c))
    }

    /// Verdict for the root signature.
    pub fn verdict(&self, c: &ClausePbes) -> ExplicitVerdict {
        match (self.winners(c)[0], self.closed) {
            (Player::Even, _) => ExplicitVerdict::True,
            (Player::Odd, true) => ExplicitVerdict::False,
            (Player::Odd, false) => ExplicitVerdict::Unknown,
        }
    }
}

pub fn solve(c: &ClausePbes, sig: &Signature, bounds: Bounds) -> Result<(ExplicitVerdict, ExplicitGame), Error> {
    let g = explore(c, sig, bounds)?;
    Ok((g.verdict(c), g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::to_clause_form;
    use crate::parse::parse_pbes;

    fn clauses(text: &str) -> ClausePbes {
        to_clause_form(&parse_pbes(text).unwrap()).unwrap()
    }

    #[test]
    fn witness_order_is_fair() {
        let vars = vec![Param::new("a", Sort::Nat), Param::new("b", Sort::Nat)];
        let ws: Vec<Vec<u64>> = witnesses(&vars, 2).iter().map(|w| w.iter().map(|v| v.as_nat().unwrap()).collect()).collect();
        assert_eq!(
            ws,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![1, 1],
                vec![0, 2],
                vec![1, 2],
                vec![2, 0],
                vec![2, 1],
                vec![2, 2]
            ]
        );
        assert_eq!(witnesses(&[], 5), vec![Vec::<Value>::new()]);
        let mixed = witnesses(&[Param::new("b", Sort::Bool), Param::new("n", Sort::Nat)], 1);
        assert_eq!(mixed.len(), 4);
        assert_eq!(mixed[0], vec![Value::Bool(false), Value::Nat(0)]);
    }

    #[test]
    fn countdown_closes() {
        let c = clauses("mu X(d:N) = (d = 0) || (d > 0 && X(d - 1));");
        let (verdict, g) = solve(&c, &Signature::nat("X", &[5]), Bounds { value_cap: 10, witness_cap: 1, vertex_cap: 100 }).unwrap();
        assert!(g.closed);
        assert_eq!(g.or_count(), 6);
        assert_eq!(verdict, ExplicitVerdict::True);
    }

    #[test]
    fn growing_values_stay_open() {
        let c = clauses("nu X1(n:N) = exists n':N . even(n) && X1(3*n+5*n') && X1(4*n+5*n');");
        let b = Bounds { value_cap: 100, witness_cap: 4, vertex_cap: 10_000 };
        let (verdict, g) = solve(&c, &Signature::nat("X1", &[2]), b).unwrap();
        assert!(!g.closed);
        assert_eq!(verdict, ExplicitVerdict::Unknown);
        let (odd, _) = solve(&c, &Signature::nat("X1", &[3]), b).unwrap();
        assert_eq!(odd, ExplicitVerdict::False);
    }

    #[test]
    fn mccarthy_small_queries() {
        let c = clauses(
            "mu M(x:N, y:N) = (x > 3 && y + 1 = x && XT()) || (exists e:N . x <= 3 && M(x + 2, e) && M(e, y));\nnu XT() = XT();",
        );
        let b = Bounds { value_cap: 20, witness_cap: 20, vertex_cap: 100_000 };
        let (v, g) = solve(&c, &Signature::nat("M", &[5, 4]), b).unwrap();
        assert_eq!((v, g.closed, g.or_count()), (ExplicitVerdict::True, true, 2));
        let (v, g) = solve(&c, &Signature::nat("M", &[0, 4]), b).unwrap();
        assert!(g.closed);
        assert_eq!(v, ExplicitVerdict::False);
        let (v, _) = solve(&c, &Signature::nat("M", &[0, 3]), b).unwrap();
        assert_eq!(v, ExplicitVerdict::True);
    }

    #[test]
    fn vertex_cap_marks_open() {
        let c = clauses("nu X(d:N) = X(d + 1);");
        let g = explore(&c, &Signature::nat("X", &[0]), Bounds { value_cap: 1000, witness_cap: 0, vertex_cap: 10 }).unwrap();
        assert!(g.vertex_cap_hit && !g.closed);
        assert_eq!(g.verdict(&c), ExplicitVerdict::Unknown);
    }
}
