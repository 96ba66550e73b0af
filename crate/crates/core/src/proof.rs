//! Proof graphs: extraction from a winning strategy and validation.
//!
//! A concrete proof graph annotates every signature with the clause it uses
//! and a witness for the clause's quantified variables, so both validity
//! conditions are checked by ground evaluation and graph analysis alone.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::game::{Analysis, ReducedGame};
use crate::normal::ClausePbes;
use crate::parity::{Player, Solution};
use crate::refine::Owner;
use crate::set::{self, Prop};
use crate::smt::{Query, Solver};
use crate::syntax::{DataExpr, Env, Signature, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofVertex {
    pub sig: Signature,
    /// Clause index and witness for its quantified variables; `None` for
    /// vertices that were not expanded.
    pub annotation: Option<(usize, Vec<Value>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofGraph {
    pub vertices: Vec<ProofVertex>,
    pub edges: Vec<Vec<usize>>,
}

impl ProofGraph {
    pub fn index_of(&self, sig: &Signature) -> Option<usize> {
        self.vertices.iter().position(|v| v.sig == *sig)
    }

    fn add(&mut self, sig: Signature) -> usize {
        self.vertices.push(ProofVertex { sig, annotation: None });
        self.edges.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn remove_edge(&mut self, from: usize, to: usize) {
        self.edges[from].retain(|&w| w != to);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extraction {
    Closed(ProofGraph),
    /// The budget ran out; `frontier` lists the vertices left unexpanded.
    Partial { graph: ProofGraph, frontier: Vec<usize> },
}

impl Extraction {
    pub fn graph(&self) -> &ProofGraph {
        match self {
            Extraction::Closed(g) | Extraction::Partial { graph: g, .. } => g,
        }
    }
}

fn block_vertex<S: Solver + ?Sized>(a: &Analysis, game: &ReducedGame, sig: &Signature, solver: &mut S) -> Result<usize, Error> {
    let block = a.saturation.family.block_of(&a.clauses, sig, solver)?;
    game.vertex_of_block(block.id)
        .ok_or_else(|| Error::InternalInconsistency(format!("block #{} has no vertex", block.id)))
}

/// Unrolls circle's strategy from `sig` into concrete signatures, expanding
/// at most `budget` vertices.
pub fn extract<S: Solver + ?Sized>(a: &Analysis, sig: &Signature, budget: usize, solver: &mut S) -> Result<Extraction, Error> {
    let (Some(game), Some(solution)) = (&a.game, &a.solution) else {
        return Err(Error::Precondition(String::from("refinement did not saturate")));
    };
    let c = &a.clauses;
    let root = block_vertex(a, game, sig, solver)?;
    if solution.winner[root] != Player::Even {
        return Err(Error::Precondition(format!("{sig} is not in the winning region of circle")));
    }
    let mut graph = ProofGraph::default();
    let mut queue = VecDeque::new();
    queue.push_back(graph.add(sig.clone()));
    let mut expanded = 0;
    while let Some(u) = queue.pop_front() {
        if expanded == budget {
            queue.push_front(u);
            let frontier = queue.into_iter().collect();
            return Ok(Extraction::Partial { graph, frontier });
        }
        expanded += 1;
        let sig = graph.vertices[u].sig.clone();
        let v = block_vertex(a, game, &sig, solver)?;
        if solution.winner[v] != Player::Even {
            return Err(Error::InternalInconsistency(format!("{sig} left the winning region")));
        }
        let w = solution.strategy[v].ok_or_else(|| Error::InternalInconsistency(format!("no strategy move at {sig}")))?;
        let Owner::And { eq: i, clause: k } = game.vertices[w].owner else {
            return Err(Error::InternalInconsistency(format!("strategy at {sig} leads to a circle vertex")));
        };
        let clause = &c.equations[i].clauses[k];
        let fixed: BTreeMap<String, DataExpr> =
            c.equations[i].params.iter().map(|p| p.name.clone()).zip(sig.values.iter().map(Value::to_expr)).collect();
        let args: Vec<DataExpr> = c.pair_binders(i, k).iter().map(|b| DataExpr::Var(b.name.clone())).collect();
        let assertion = Prop::and([
            Prop::data(clause.guard.clone()),
            Prop::member(game.vertices[w].shape.clone(), args),
        ])
        .substitute(&fixed);
        let model = set::satisfiable(&Query::new(clause.vars.clone(), assertion), solver)?
            .ok_or_else(|| Error::InternalInconsistency(format!("no witness for {sig} in clause {k}")))?;
        let witness: Vec<Value> = clause.vars.iter().map(|x| model[&x.name]).collect();
        let mut env: Env = c.equations[i].params.iter().map(|p| p.name.clone()).zip(sig.values.iter().copied()).collect();
        env.extend(model);
        graph.vertices[u].annotation = Some((k, witness));
        for call in &clause.calls {
            let values = call.args.iter().map(|e| e.eval(&env)).collect::<Result<Vec<_>, _>>()?;
            let target = Signature::new(&c.equations[call.target].name, values);
            let t = match graph.index_of(&target) {
                Some(t) => t,
                None => {
                    let t = graph.add(target);
                    queue.push_back(t);
                    t
                }
            };
            if !graph.edges[u].contains(&t) {
                graph.edges[u].push(t);
            }
        }
    }
    Ok(Extraction::Closed(graph))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Local condition: the annotation is missing or wrong, the guard fails,
    /// or a call target is not in the postset.
    Local(String),
    /// A cycle through this vertex has odd minimal rank.
    OddCycle { rank: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub at: Signature,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Local(why) => write!(f, "local check at {}: {why}", self.at),
            ViolationKind::OddCycle { rank } => write!(f, "cycle check at {}: cycle with minimal rank {rank}", self.at),
        }
    }
}

/// Checks both conditions; an empty result means `pg` is a proof graph.
pub fn validate(pg: &ProofGraph, c: &ClausePbes) -> Vec<Violation> {
    let mut out = Vec::new();
    let ranks = c.ranks();
    let mut rank = Vec::with_capacity(pg.vertices.len());
    for (u, vertex) in pg.vertices.iter().enumerate() {
        let at = vertex.sig.clone();
        let Some(i) = c.index_of(&at.name) else {
            out.push(Violation { kind: ViolationKind::Local(format!("unknown predicate {}", at.name)), at });
            rank.push(None);
            continue;
        };
        rank.push(Some(ranks[i]));
        if let Err(why) = check_local(pg, u, i, c) {
            out.push(Violation { kind: ViolationKind::Local(why), at });
        }
    }
    for (u, r) in odd_cycles(&pg.edges, &rank) {
        out.push(Violation { kind: ViolationKind::OddCycle { rank: r }, at: pg.vertices[u].sig.clone() });
    }
    out
}

fn check_local(pg: &ProofGraph, u: usize, i: usize, c: &ClausePbes) -> Result<(), String> {
    let eq = &c.equations[i];
    let vertex = &pg.vertices[u];
    if vertex.sig.values.len() != eq.params.len() || eq.params.iter().zip(&vertex.sig.values).any(|(p, v)| p.sort != v.sort()) {
        return Err(String::from("values do not match the parameters"));
    }
    let Some((k, witness)) = &vertex.annotation else {
        return Err(String::from("no clause annotation"));
    };
    let clause = eq.clauses.get(*k).ok_or_else(|| format!("no clause {k}"))?;
    if witness.len() != clause.vars.len() || clause.vars.iter().zip(witness).any(|(p, v)| p.sort != v.sort()) {
        return Err(format!("witness does not match the variables of clause {k}"));
    }
    let env: Env = eq
        .params
        .iter()
        .chain(&clause.vars)
        .map(|p| p.name.clone())
        .zip(vertex.sig.values.iter().chain(witness).copied())
        .collect();
    match clause.guard.eval(&env) {
        Ok(Value::Bool(true)) => {}
        Ok(_) => return Err(format!("guard of clause {k} is false")),
        Err(e) => return Err(format!("guard of clause {k}: {e}")),
    }
    for call in &clause.calls {
        let values = call.args.iter().map(|e| e.eval(&env)).collect::<Result<Vec<_>, _>>().map_err(|e| format!("{e}"))?;
        let target = Signature::new(&c.equations[call.target].name, values);
        if !pg.edges[u].iter().any(|&w| pg.vertices[w].sig == target) {
            return Err(format!("call {target} is not in the postset"));
        }
    }
    Ok(())
}

/// Vertices `u` of odd rank `r` on a cycle through vertices of rank >= `r`.
/// Vertices with unknown rank are ignored.
pub fn odd_cycles(edges: &[Vec<usize>], rank: &[Option<u32>]) -> Vec<(usize, u32)> {
    let mut odd: Vec<u32> = rank.iter().flatten().copied().filter(|r| r % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    let mut out = Vec::new();
    for r in odd {
        let alive: Vec<bool> = rank.iter().map(|x| x.is_some_and(|x| x >= r)).collect();
        let comp = scc(edges, &alive);
        for u in 0..edges.len() {
            if rank[u] == Some(r) && on_cycle(edges, &alive, &comp, u) {
                out.push((u, r));
            }
        }
    }
    out.sort_unstable();
    out
}

fn on_cycle(edges: &[Vec<usize>], alive: &[bool], comp: &[usize], u: usize) -> bool {
    edges[u].iter().any(|&w| alive[w] && comp[w] == comp[u])
}

/// Strongly connected components of the subgraph on `alive` vertices
/// (iterative Tarjan). Dead vertices get `usize::MAX`.
pub fn scc(edges: &[Vec<usize>], alive: &[bool]) -> Vec<usize> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut count = 0;
    for root in 0..n {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = edges[v].get(*pos) {
                *pos += 1;
                if !alive[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    comp
}

/// Circle's strategy restricted to what is reachable from `root`: circle
/// vertices keep their strategy edge, box vertices keep every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn strategy_graph(game: &ReducedGame, solution: &Solution, root: usize) -> StrategyGraph {
    let g = &game.game;
    let mut seen = vec![false; game.len()];
    let mut stack = vec![root];
    seen[root] = true;
    let mut edges = Vec::new();
    while let Some(v) = stack.pop() {
        let next: Vec<usize> = match g.owner[v] {
            Player::Even => solution.strategy[v].into_iter().collect(),
            Player::Odd => g.succ[v].clone(),
        };
        for w in next {
            edges.push((v, w));
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    edges.sort_unstable();
    StrategyGraph { vertices: (0..game.len()).filter(|&v| seen[v]).collect(), edges }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyViolation {
    /// An edge leaves the graph or a box edge of the game is missing.
    NotClosed { vertex: usize },
    /// A circle vertex without exactly one game edge.
    Choice { vertex: usize },
    /// A cycle through `vertex` whose largest priority is odd.
    OddCycle { vertex: usize, priority: u32 },
    /// The edge is not backed by concrete successors.
    UnsoundEdge { from: usize, to: usize },
}

impl fmt::Display for StrategyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyViolation::NotClosed { vertex } => write!(f, "vertex {vertex}: not closed under moves"),
            StrategyViolation::Choice { vertex } => write!(f, "vertex {vertex}: circle must choose exactly one edge"),
            StrategyViolation::OddCycle { vertex, priority } => write!(f, "vertex {vertex}: cycle with odd maximal priority {priority}"),
            StrategyViolation::UnsoundEdge { from, to } => write!(f, "edge {from} -> {to}: not sound"),
        }
    }
}

/// Structural checks of a strategy graph: closure, one choice per circle
/// vertex, and no cycle whose largest priority is odd.
pub fn validate_strategy(game: &ReducedGame, sg: &StrategyGraph) -> Vec<StrategyViolation> {
    let g = &game.game;
    let n = game.len();
    let mut member = vec![false; n];
    for &v in &sg.vertices {
        member[v] = true;
    }
    let mut succ = vec![Vec::new(); n];
    let mut out = Vec::new();
    for &(v, w) in &sg.edges {
        if !member[v] || !member[w] || !g.succ[v].contains(&w) {
            out.push(StrategyViolation::NotClosed { vertex: v });
        } else {
            succ[v].push(w);
        }
    }
    for &v in &sg.vertices {
        match g.owner[v] {
            Player::Even if succ[v].len() != 1 => out.push(StrategyViolation::Choice { vertex: v }),
            Player::Odd if g.succ[v].iter().any(|w| !succ[v].contains(w)) => out.push(StrategyViolation::NotClosed { vertex: v }),
            _ => {}
        }
    }
    let mut odd: Vec<u32> = sg.vertices.iter().map(|&v| g.priority[v]).filter(|p| p % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    for p in odd {
        let alive: Vec<bool> = (0..n).map(|v| member[v] && g.priority[v] <= p).collect();
        let comp = scc(&succ, &alive);
        for &v in &sg.vertices {
            if g.priority[v] == p && on_cycle(&succ, &alive, &comp, v) {
                out.push(StrategyViolation::OddCycle { vertex: v, priority: p });
            }
        }
    }
    out.sort_by_key(|v| match v {
        StrategyViolation::NotClosed { vertex } | StrategyViolation::Choice { vertex } | StrategyViolation::OddCycle { vertex, .. } => *vertex,
        StrategyViolation::UnsoundEdge { from, .. } => *from,
    });
    out.dedup();
    out
}

/// [`validate_strategy`] plus the symbolic soundness check of every edge.
pub fn validate_strategy_sound<S: Solver + ?Sized>(
    game: &ReducedGame,
    c: &ClausePbes,
    sg: &StrategyGraph,
    solver: &mut S,
) -> Result<Vec<StrategyViolation>, Error> {
    let mut out = validate_strategy(game, sg);
    for &(v, w) in &sg.edges {
        if w < game.len() && !game.edge_sound(c, v, w, solver)? {
            out.push(StrategyViolation::UnsoundEdge { from: v, to: w });
        }
    }
    Ok(out)
}
