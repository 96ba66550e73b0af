//! The reduced dependency space of a saturated family, read as a parity game.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::normal::{self, ClausePbes};
use crate::parity::{self, Game, Player, Solution};
use crate::refine::{self, Block, Owner, PartitionFamily, Saturation};
use crate::set::{self, Prop, SetExpr};
use crate::smt::{Query, Solver};
use crate::syntax::{DataExpr, Param, Pbes, Signature};

#[derive(Debug, Clone)]
pub struct Vertex {
    pub block: usize,
    pub owner: Owner,
    pub shape: Arc<SetExpr>,
    pub label: String,
}

/// Vertices are the `Or` blocks (circle) followed by the `And` blocks (box),
/// each group in partition order.
#[derive(Debug, Clone)]
pub struct ReducedGame {
    pub vertices: Vec<Vertex>,
    pub game: Game,
}

fn vars(params: &[Param]) -> Vec<DataExpr> {
    params.iter().map(|p| DataExpr::Var(p.name.clone())).collect()
}

/// `Omega` of the `Or` blocks of each equation: `u - rank`, with `u` the
/// least even number bounding every rank.
pub fn priorities(c: &ClausePbes) -> Vec<u32> {
    let ranks = c.ranks();
    let top = ranks.iter().copied().max().unwrap_or(0);
    let u = top + top % 2;
    ranks.iter().map(|r| u - r).collect()
}

impl ReducedGame {
    pub fn build<S: Solver + ?Sized>(c: &ClausePbes, fam: &PartitionFamily, solver: &mut S) -> Result<ReducedGame, Error> {
        let omega = priorities(c);
        let mut vertices = Vec::new();
        let mut game = Game { owner: Vec::new(), priority: Vec::new(), succ: Vec::new() };
        let mut add = |b: &Block, player: Player, priority: u32| {
            vertices.push(Vertex { block: b.id, owner: b.owner, shape: b.shape.clone(), label: fam.label(b) });
            game.owner.push(player);
            game.priority.push(priority);
            game.succ.push(Vec::new());
        };
        for b in fam.or_blocks() {
            let Owner::Or { eq } = b.owner else { unreachable!() };
            add(b, Player::Even, omega[eq]);
        }
        for b in fam.and_blocks() {
            add(b, Player::Odd, 0);
        }
        let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(v, x)| (x.block, v)).collect();

        for (v, x) in vertices.iter().enumerate() {
            match x.owner {
                Owner::Or { eq: i } => {
                    let eq = &c.equations[i];
                    for (k, clause) in eq.clauses.iter().enumerate() {
                        for psi in fam.partition(Owner::And { eq: i, clause: k }) {
                            let binders = c.pair_binders(i, k);
                            let assertion = Prop::and([
                                Prop::member(x.shape.clone(), vars(&eq.params)),
                                Prop::member(psi.shape.clone(), vars(&binders)),
                                Prop::data(clause.guard.clone()),
                            ]);
                            if set::is_satisfiable(&Query::new(binders, assertion), solver)? {
                                game.succ[v].push(index[&psi.id]);
                            }
                        }
                    }
                }
                Owner::And { eq: i, clause: k } => {
                    let clause = &c.equations[i].clauses[k];
                    let binders = c.pair_binders(i, k);
                    for a in 0..c.equations.len() {
                        let calls: Vec<_> = clause.calls.iter().filter(|call| call.target == a).collect();
                        if calls.is_empty() {
                            continue;
                        }
                        for phi in fam.partition(Owner::Or { eq: a }) {
                            let hit = Prop::or(calls.iter().map(|call| Prop::member(phi.shape.clone(), call.args.clone())));
                            let assertion = Prop::and([Prop::member(x.shape.clone(), vars(&binders)), hit]);
                            if set::is_satisfiable(&Query::new(binders.clone(), assertion), solver)? {
                                game.succ[v].push(index[&phi.id]);
                            }
                        }
                    }
                }
            }
        }
        Ok(ReducedGame { vertices, game })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_of_block(&self, block: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.block == block)
    }

    pub fn edge_count(&self) -> usize {
        self.game.succ.iter().map(Vec::len).sum()
    }

    /// Vertices reachable from `roots`, in index order.
    pub fn reachable(&self, roots: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = roots.to_vec();
        for &r in roots {
            seen[r] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &self.game.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.len()).filter(|&v| seen[v]).collect()
    }

    /// The subgame induced by `keep` (closed under successors), with the old
    /// index of every new vertex.
    pub fn restrict(&self, keep: &[usize]) -> (ReducedGame, Vec<usize>) {
        let mut new_index = vec![usize::MAX; self.len()];
        for (n, &v) in keep.iter().enumerate() {
            new_index[v] = n;
        }
        let vertices = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let game = Game {
            owner: keep.iter().map(|&v| self.game.owner[v]).collect(),
            priority: keep.iter().map(|&v| self.game.priority[v]).collect(),
            succ: keep
                .iter()
                .map(|&v| self.game.succ[v].iter().filter(|&&w| new_index[w] != usize::MAX).map(|&w| new_index[w]).collect())
                .collect(),
        };
        (ReducedGame { vertices, game }, keep.to_vec())
    }

    /// Symbolic soundness of edge `v -> w`: every member of the source block
    /// has a concrete successor in the target block.
    pub fn edge_sound<S: Solver + ?Sized>(&self, c: &ClausePbes, v: usize, w: usize, solver: &mut S) -> Result<bool, Error> {
        let (x, y) = (&self.vertices[v], &self.vertices[w]);
        let query = match (x.owner, y.owner) {
            (Owner::Or { eq: i }, Owner::And { eq: i2, clause: k }) if i == i2 => {
                let eq = &c.equations[i];
                let clause = &eq.clauses[k];
                let step = Prop::exists(
                    clause.vars.clone(),
                    Prop::and([Prop::data(clause.guard.clone()), Prop::member(y.shape.clone(), vars(&c.pair_binders(i, k)))]),
                );
                Query::new(eq.params.clone(), Prop::and([Prop::member(x.shape.clone(), vars(&eq.params)), Prop::not(step)]))
            }
            (Owner::And { eq: i, clause: k }, Owner::Or { eq: a }) => {
                let clause = &c.equations[i].clauses[k];
                let binders = c.pair_binders(i, k);
                let hit = Prop::or(
                    clause.calls.iter().filter(|call| call.target == a).map(|call| Prop::member(y.shape.clone(), call.args.clone())),
                );
                Query::new(binders.clone(), Prop::and([Prop::member(x.shape.clone(), vars(&binders)), Prop::not(hit)]))
            }
            _ => return Ok(false),
        };
        Ok(!set::is_satisfiable(&query, solver)?)
    }
}

/// Answer to a membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    /// Refinement did not saturate within the iteration bound.
    Diverged { iterations: usize },
}

/// Everything the pipeline computed for one PBES.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub clauses: ClausePbes,
    pub saturation: Saturation,
    /// `None` when refinement diverged.
    pub game: Option<ReducedGame>,
    pub solution: Option<Solution>,
}

impl Analysis {
    pub fn run<S: Solver + ?Sized>(p: &Pbes, max_iter: usize, solver: &mut S) -> Result<Analysis, Error> {
        let clauses = normal::to_clause_form(p)?;
        Analysis::from_clauses(clauses, max_iter, solver)
    }

    pub fn from_clauses<S: Solver + ?Sized>(clauses: ClausePbes, max_iter: usize, solver: &mut S) -> Result<Analysis, Error> {
        let saturation = refine::saturate(&clauses, max_iter, solver)?;
        if !saturation.is_saturated() {
            return Ok(Analysis { clauses, saturation, game: None, solution: None });
        }
        let game = ReducedGame::build(&clauses, &saturation.family, solver)?;
        let solution = parity::solve(&game.game);
        Ok(Analysis { clauses, saturation, game: Some(game), solution: Some(solution) })
    }

    /// Game vertex of the block containing `sig`.
    pub fn vertex_of<S: Solver + ?Sized>(&self, sig: &Signature, solver: &mut S) -> Result<Option<usize>, Error> {
        let block = self.saturation.family.block_of(&self.clauses, sig, solver)?;
        Ok(self.game.as_ref().and_then(|g| g.vertex_of_block(block.id)))
    }

    pub fn membership<S: Solver + ?Sized>(&self, sig: &Signature, solver: &mut S) -> Result<Verdict, Error> {
        let (Some(game), Some(solution)) = (&self.game, &self.solution) else {
            // Validate the query even without a game.
            self.saturation.family.block_of(&self.clauses, sig, solver)?;
            return Ok(Verdict::Diverged { iterations: self.saturation.family.iterations });
        };
        let block = self.saturation.family.block_of(&self.clauses, sig, solver)?;
        let v = game
            .vertex_of_block(block.id)
            .ok_or_else(|| Error::InternalInconsistency(format!("block #{} has no vertex", block.id)))?;
        Ok(match solution.winner[v] {
            Player::Even => Verdict::True,
            Player::Odd => Verdict::False,
        })
    }
}
