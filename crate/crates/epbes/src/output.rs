//! Machine-readable renderings: JSON documents (one schema per document
//! kind, under `schemas/`) and Graphviz DOT.

use std::fmt::Write;

use epbes_core::explicit::{Bounds, ExplicitGame, ExplicitVerdict, ExplicitVertex};
use epbes_core::game::ReducedGame;
use epbes_core::normal::ClausePbes;
use epbes_core::parity::{Player, Solution};
use epbes_core::proof::{ProofGraph, ProofVertex, StrategyGraph, Violation, ViolationKind};
use epbes_core::refine::{Block, Origin, Owner, PartitionFamily, SplitEvent, Splitter};
use epbes_core::{Param, Pbes, Signature, Sort, Value};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonValue {
    Nat(u64),
    Bool(bool),
}

impl From<Value> for JsonValue {
    fn from(v: Value) -> JsonValue {
        match v {
            Value::Nat(n) => JsonValue::Nat(n),
            Value::Bool(b) => JsonValue::Bool(b),
        }
    }
}

impl From<JsonValue> for Value {
    fn from(v: JsonValue) -> Value {
        match v {
            JsonValue::Nat(n) => Value::Nat(n),
            JsonValue::Bool(b) => Value::Bool(b),
        }
    }
}

fn values(vs: &[Value]) -> Vec<JsonValue> {
    vs.iter().copied().map(JsonValue::from).collect()
}

#[derive(Debug, Serialize)]
pub struct ParamOut {
    pub name: String,
    pub sort: &'static str,
}

fn params(ps: &[Param]) -> Vec<ParamOut> {
    ps.iter()
        .map(|p| ParamOut {
            name: p.name.clone(),
            sort: match p.sort {
                Sort::Nat => "N",
                Sort::Bool => "B",
            },
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct EquationOut {
    pub fixpoint: String,
    pub name: String,
    pub params: Vec<ParamOut>,
    pub rank: u32,
    pub body: String,
}

#[derive(Debug, Serialize)]
pub struct PbesOut {
    pub equations: Vec<EquationOut>,
}

impl PbesOut {
    pub fn new(p: &Pbes) -> PbesOut {
        let ranks = epbes_core::syntax::ranks(p.equations.iter().map(|e| e.fixpoint));
        let equations = p
            .equations
            .iter()
            .zip(ranks)
            .map(|(eq, rank)| EquationOut {
                fixpoint: eq.fixpoint.to_string(),
                name: eq.name.clone(),
                params: params(&eq.params),
                rank,
                body: eq.body.to_string(),
            })
            .collect();
        PbesOut { equations }
    }
}

#[derive(Debug, Serialize)]
pub struct CallOut {
    pub target: String,
    pub args: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClauseOut {
    pub index: usize,
    pub vars: Vec<ParamOut>,
    pub guard: String,
    pub calls: Vec<CallOut>,
}

#[derive(Debug, Serialize)]
pub struct ClauseEquationOut {
    pub fixpoint: String,
    pub name: String,
    pub params: Vec<ParamOut>,
    pub rank: u32,
    pub clauses: Vec<ClauseOut>,
}

#[derive(Debug, Serialize)]
pub struct ClausePbesOut {
    pub equations: Vec<ClauseEquationOut>,
}

impl ClausePbesOut {
    pub fn new(c: &ClausePbes) -> ClausePbesOut {
        let equations = c
            .equations
            .iter()
            .zip(c.ranks())
            .map(|(eq, rank)| ClauseEquationOut {
                fixpoint: eq.fixpoint.to_string(),
                name: eq.name.clone(),
                params: params(&eq.params),
                rank,
                clauses: eq
                    .clauses
                    .iter()
                    .enumerate()
                    .map(|(index, cl)| ClauseOut {
                        index,
                        vars: params(&cl.vars),
                        guard: cl.guard.to_string(),
                        calls: cl
                            .calls
                            .iter()
                            .map(|call| CallOut {
                                target: c.equations[call.target].name.clone(),
                                args: call.args.iter().map(ToString::to_string).collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        ClausePbesOut { equations }
    }
}

#[derive(Debug, Serialize)]
pub struct OwnerOut {
    pub kind: &'static str,
    pub equation: String,
    pub clause: Option<usize>,
}

fn owner(c: &ClausePbes, o: Owner) -> OwnerOut {
    match o {
        Owner::Or { eq } => OwnerOut { kind: "or", equation: c.equations[eq].name.clone(), clause: None },
        Owner::And { eq, clause } => OwnerOut { kind: "and", equation: c.equations[eq].name.clone(), clause: Some(clause) },
    }
}

/// Provenance `(i, k, j)` of a splitter and the block it was built from.
#[derive(Debug, Serialize)]
pub struct SplitterOut {
    pub kind: &'static str,
    pub equation: usize,
    pub clause: usize,
    pub call: Option<usize>,
    pub block: usize,
}

fn splitter(s: Splitter) -> SplitterOut {
    match s {
        Splitter::F { eq, clause, block } => SplitterOut { kind: "F", equation: eq, clause, call: None, block },
        Splitter::G { eq, clause, call, block } => SplitterOut { kind: "G", equation: eq, clause, call: Some(call), block },
    }
}

#[derive(Debug, Serialize)]
pub struct BlockOut {
    pub id: usize,
    pub owner: OwnerOut,
    pub label: String,
    pub parent: Option<usize>,
    pub splitter: Option<SplitterOut>,
    pub positive: Option<bool>,
}

fn block(c: &ClausePbes, fam: &PartitionFamily, b: &Block) -> BlockOut {
    let (parent, split, positive) = match b.origin {
        Origin::Initial => (None, None, None),
        Origin::Split { parent, splitter: s, positive } => (Some(parent), Some(splitter(s)), Some(positive)),
    };
    BlockOut { id: b.id, owner: owner(c, b.owner), label: fam.label(b), parent, splitter: split, positive }
}

#[derive(Debug, Serialize)]
pub struct EventOut {
    pub iteration: usize,
    pub owner: OwnerOut,
    pub splitter: SplitterOut,
    pub parent: usize,
    pub pieces: [usize; 2],
}

pub fn event(c: &ClausePbes, e: &SplitEvent) -> EventOut {
    EventOut { iteration: e.iteration, owner: owner(c, e.owner), splitter: splitter(e.splitter), parent: e.parent, pieces: e.pieces }
}

#[derive(Debug, Serialize)]
pub struct RefineOut {
    pub saturated: bool,
    pub iterations: usize,
    pub blocks: Vec<BlockOut>,
    /// The last split events when refinement diverged.
    pub last_events: Vec<EventOut>,
    /// Every split event, with `--trace`.
    pub trace: Option<Vec<EventOut>>,
}

impl RefineOut {
    pub fn new(c: &ClausePbes, fam: &PartitionFamily, last: &[SplitEvent], trace: Option<&[SplitEvent]>, saturated: bool) -> RefineOut {
        RefineOut {
            saturated,
            iterations: fam.iterations,
            blocks: fam.blocks().map(|b| block(c, fam, b)).collect(),
            last_events: last.iter().map(|e| event(c, e)).collect(),
            trace: trace.map(|t| t.iter().map(|e| event(c, e)).collect()),
        }
    }
}

fn player(p: Player) -> &'static str {
    match p {
        Player::Even => "circle",
        Player::Odd => "box",
    }
}

#[derive(Debug, Serialize)]
pub struct VertexOut {
    pub index: usize,
    pub block: usize,
    pub owner: OwnerOut,
    pub label: String,
    pub player: &'static str,
    pub priority: u32,
    pub winner: &'static str,
    /// The successor chosen by the vertex's owner, if it wins there.
    pub strategy: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct GameOut {
    pub vertices: Vec<VertexOut>,
    pub edges: Vec<[usize; 2]>,
    /// Vertex of the query's block, when a query was given.
    pub query_vertex: Option<usize>,
}

impl GameOut {
    pub fn new(c: &ClausePbes, g: &ReducedGame, s: &Solution, query_vertex: Option<usize>) -> GameOut {
        let vertices = g
            .vertices
            .iter()
            .enumerate()
            .map(|(v, x)| VertexOut {
                index: v,
                block: x.block,
                owner: owner(c, x.owner),
                label: x.label.clone(),
                player: player(g.game.owner[v]),
                priority: g.game.priority[v],
                winner: player(s.winner[v]),
                strategy: s.strategy[v],
            })
            .collect();
        GameOut { vertices, edges: edges(&g.game.succ), query_vertex }
    }
}

fn edges(succ: &[Vec<usize>]) -> Vec<[usize; 2]> {
    succ.iter().enumerate().flat_map(|(v, ws)| ws.iter().map(move |&w| [v, w])).collect()
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub verdict: &'static str,
    pub closed: bool,
}

pub fn explicit_verdict(v: ExplicitVerdict) -> &'static str {
    match v {
        ExplicitVerdict::True => "true",
        ExplicitVerdict::False => "false",
        ExplicitVerdict::Unknown => "unknown",
    }
}

#[derive(Debug, Serialize)]
pub struct SolveOut {
    pub query: String,
    /// `true`, `false` or `diverged`.
    pub verdict: &'static str,
    pub saturated: bool,
    pub iterations: usize,
    pub vertex_count: Option<usize>,
    pub vertex: Option<usize>,
    /// The explicit cross-check at small bounds.
    pub oracle: OracleSummary,
}

#[derive(Debug, Serialize)]
pub struct BoundsOut {
    pub value_cap: u64,
    pub witness_cap: u64,
    pub vertex_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct OracleOut {
    pub query: String,
    pub verdict: &'static str,
    pub closed: bool,
    pub vertices: usize,
    pub or_vertices: usize,
    pub frontier: usize,
    pub vertex_cap_hit: bool,
    pub witness_truncated: bool,
    pub bounds: BoundsOut,
}

impl OracleOut {
    pub fn new(query: &Signature, c: &ClausePbes, g: &ExplicitGame, bounds: Bounds) -> OracleOut {
        OracleOut {
            query: query.to_string(),
            verdict: explicit_verdict(g.verdict(c)),
            closed: g.closed,
            vertices: g.vertices.len(),
            or_vertices: g.or_count(),
            frontier: g.frontier.len(),
            vertex_cap_hit: g.vertex_cap_hit,
            witness_truncated: g.witness_truncated,
            bounds: BoundsOut { value_cap: bounds.value_cap, witness_cap: bounds.witness_cap, vertex_cap: bounds.vertex_cap },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationDoc {
    pub clause: usize,
    pub witness: Vec<JsonValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofVertexDoc {
    pub name: String,
    pub values: Vec<JsonValue>,
    pub annotation: Option<AnnotationDoc>,
}

/// The interchange form of a proof graph, read back by `validate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofGraphDoc {
    pub vertices: Vec<ProofVertexDoc>,
    pub edges: Vec<[usize; 2]>,
}

impl ProofGraphDoc {
    pub fn new(pg: &ProofGraph) -> ProofGraphDoc {
        ProofGraphDoc {
            vertices: pg
                .vertices
                .iter()
                .map(|v| ProofVertexDoc {
                    name: v.sig.name.clone(),
                    values: values(&v.sig.values),
                    annotation: v.annotation.as_ref().map(|(k, w)| AnnotationDoc { clause: *k, witness: values(w) }),
                })
                .collect(),
            edges: edges(&pg.edges),
        }
    }

    pub fn to_graph(&self) -> Result<ProofGraph, String> {
        let n = self.vertices.len();
        let mut edges = vec![Vec::new(); n];
        for &[u, w] in &self.edges {
            if u >= n || w >= n {
                return Err(format!("edge [{u}, {w}] names a vertex beyond {}", n.saturating_sub(1)));
            }
            edges[u].push(w);
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| ProofVertex {
                sig: Signature::new(&v.name, v.values.iter().copied().map(Value::from).collect()),
                annotation: v.annotation.as_ref().map(|a| (a.clause, a.witness.iter().copied().map(Value::from).collect())),
            })
            .collect();
        Ok(ProofGraph { vertices, edges })
    }
}

#[derive(Debug, Serialize)]
pub struct StrategyGraphOut {
    pub vertices: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ProveOut {
    pub query: String,
    pub closed: bool,
    /// Proof-graph vertices left unexpanded.
    pub frontier: Vec<usize>,
    pub proof_graph: ProofGraphDoc,
    /// Over the reduced game's vertex indices.
    pub strategy_graph: StrategyGraphOut,
}

impl ProveOut {
    pub fn new(query: &Signature, pg: &ProofGraph, frontier: &[usize], sg: &StrategyGraph) -> ProveOut {
        ProveOut {
            query: query.to_string(),
            closed: frontier.is_empty(),
            frontier: frontier.to_vec(),
            proof_graph: ProofGraphDoc::new(pg),
            strategy_graph: StrategyGraphOut { vertices: sg.vertices.clone(), edges: sg.edges.iter().map(|&(v, w)| [v, w]).collect() },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationOut {
    pub condition: u8,
    pub at: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct ValidateOut {
    pub ok: bool,
    pub violations: Vec<ViolationOut>,
}

impl ValidateOut {
    pub fn new(vs: &[Violation]) -> ValidateOut {
        let violations = vs
            .iter()
            .map(|v| ViolationOut {
                condition: match v.kind {
                    ViolationKind::Local(_) => 1,
                    ViolationKind::OddCycle { .. } => 2,
                },
                at: v.at.to_string(),
                message: v.to_string(),
            })
            .collect();
        ValidateOut { ok: vs.is_empty(), violations }
    }
}

pub fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// A double-quoted DOT string.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// The reduced game: ovals for `Or` blocks, boxes for `And` blocks, labelled
/// with the block formula and the priority. Circle's region is drawn solid,
/// box's dashed; strategy edges are bold.
pub fn game_dot(c: &ClausePbes, g: &ReducedGame, s: &Solution, query_vertex: Option<usize>) -> String {
    let mut out = String::from("digraph game {\n  node [fontname=\"monospace\"];\n");
    for (v, x) in g.vertices.iter().enumerate() {
        let (shape, head) = match x.owner {
            Owner::Or { eq } => ("ellipse", c.equations[eq].name.clone()),
            Owner::And { eq, clause } => ("box", format!("{}[{clause}]", c.equations[eq].name)),
        };
        let label = format!("v{v} #{} {head}\n{}\nprio {}", x.block, x.label, g.game.priority[v]);
        let style = if s.winner[v] == Player::Even { "solid" } else { "dashed" };
        let pen = if query_vertex == Some(v) { ", penwidth=3" } else { "" };
        let _ = writeln!(out, "  v{v} [shape={shape}, style={style}{pen}, label={}];", quote(&label));
    }
    for (v, ws) in g.game.succ.iter().enumerate() {
        for &w in ws {
            let bold = if s.strategy[v] == Some(w) && s.winner[v] == g.game.owner[v] { " [style=bold]" } else { "" };
            let _ = writeln!(out, "  v{v} -> v{w}{bold};");
        }
    }
    out.push_str("}\n");
    out
}

pub fn proof_dot(pg: &ProofGraph, frontier: &[usize]) -> String {
    let mut out = String::from("digraph proof {\n  node [fontname=\"monospace\", shape=ellipse];\n");
    for (u, v) in pg.vertices.iter().enumerate() {
        let mut label = v.sig.to_string();
        if let Some((k, w)) = &v.annotation {
            let w: Vec<String> = w.iter().map(ToString::to_string).collect();
            let _ = write!(label, "\nclause {k} [{}]", w.join(", "));
        }
        let style = if frontier.contains(&u) { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  p{u} [label={}{style}];", quote(&label));
    }
    for (u, ws) in pg.edges.iter().enumerate() {
        for w in ws {
            let _ = writeln!(out, "  p{u} -> p{w};");
        }
    }
    out.push_str("}\n");
    out
}

pub fn strategy_dot(c: &ClausePbes, g: &ReducedGame, sg: &StrategyGraph) -> String {
    let mut out = String::from("digraph strategy {\n  node [fontname=\"monospace\"];\n");
    for &v in &sg.vertices {
        let x = &g.vertices[v];
        let (shape, head) = match x.owner {
            Owner::Or { eq } => ("ellipse", c.equations[eq].name.clone()),
            Owner::And { eq, clause } => ("box", format!("{}[{clause}]", c.equations[eq].name)),
        };
        let label = format!("v{v} {head}\n{}\nprio {}", x.label, g.game.priority[v]);
        let _ = writeln!(out, "  v{v} [shape={shape}, label={}];", quote(&label));
    }
    for &(v, w) in &sg.edges {
        let _ = writeln!(out, "  v{v} -> v{w};");
    }
    out.push_str("}\n");
    out
}

pub fn explicit_dot(c: &ClausePbes, g: &ExplicitGame) -> String {
    let mut out = String::from("digraph explicit {\n  node [fontname=\"monospace\"];\n");
    let list = |vs: &[Value]| vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    for (u, v) in g.vertices.iter().enumerate() {
        let (shape, label) = match v {
            ExplicitVertex::Or { eq, values } => ("ellipse", format!("{}({})", c.equations[*eq].name, list(values))),
            ExplicitVertex::And { eq, clause, values, witness } => {
                ("box", format!("{}[{clause}]({} | {})", c.equations[*eq].name, list(values), list(witness)))
            }
        };
        let style = if g.frontier.contains(&u) { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  x{u} [shape={shape}{style}, label={}];", quote(&label));
    }
    for (u, ws) in g.succ.iter().enumerate() {
        for w in ws {
            let _ = writeln!(out, "  x{u} -> x{w};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_strings_are_escaped() {
        assert_eq!(quote("a \"b\"\nc\\"), "\"a \\\"b\\\"\\nc\\\\\"");
    }

    #[test]
    fn proof_graph_round_trips() {
        let doc = ProofGraphDoc {
            vertices: vec![
                ProofVertexDoc {
                    name: "X".into(),
                    values: vec![JsonValue::Nat(3), JsonValue::Bool(true)],
                    annotation: Some(AnnotationDoc { clause: 1, witness: vec![JsonValue::Nat(0)] }),
                },
                ProofVertexDoc { name: "Y".into(), values: vec![], annotation: None },
            ],
            edges: vec![[0, 1], [1, 0]],
        };
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<ProofGraphDoc>(&text).unwrap(), doc);
        let g = doc.to_graph().unwrap();
        assert_eq!(g.vertices[0].sig, Signature::new("X", vec![Value::Nat(3), Value::Bool(true)]));
        assert_eq!(ProofGraphDoc::new(&g), doc);
        let bad = ProofGraphDoc { edges: vec![[0, 5]], ..doc };
        assert!(bad.to_graph().is_err());
    }
}
