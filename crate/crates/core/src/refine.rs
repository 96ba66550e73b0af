//! Partition refinement towards a feasible pair of equivalences.
//!
//! The family holds one partition `Phi_i` of the parameter space per
//! equation and one partition `Psi_ik` of the pair space per clause. One
//! round of `H` first divides every `Phi_i` by the `F` splitters of the blocks
//! in `Psi_ik`, then every `Psi_ik` by the `G` splitters of the blocks of the
//! called equations.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::normal::ClausePbes;
use crate::periodic;
use crate::set::{self, Prop, SetExpr};
use crate::smt::Solver;
use crate::syntax::{DataExpr, Signature};

/// The partition a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    /// A block of `Phi_eq`, a set of parameter tuples.
    Or { eq: usize },
    /// A block of `Psi_(eq, clause)`, a set of (parameter, witness) pairs.
    And { eq: usize, clause: usize },
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Or { eq } => write!(f, "Phi[{eq}]"),
            Owner::And { eq, clause } => write!(f, "Psi[{eq},{clause}]"),
        }
    }
}

/// Which set a division was performed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Splitter {
    /// Parameters of clause `(eq, clause)` with a satisfying witness in `block`.
    F { eq: usize, clause: usize, block: usize },
    /// Pairs of clause `(eq, clause)` whose call `call` lands in `block`.
    G { eq: usize, clause: usize, call: usize, block: usize },
}

impl fmt::Display for Splitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Splitter::F { eq, clause, block } => write!(f, "F[{eq},{clause}](#{block})"),
            Splitter::G { eq, clause, call, block } => write!(f, "G[{eq},{clause},{call}](#{block})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Initial,
    /// `positive` pieces are the meet with the splitter, the others the meet
    /// with its complement.
    Split { parent: usize, splitter: Splitter, positive: bool },
}

#[derive(Debug, Clone)]
pub struct Block {
    pub id: usize,
    pub owner: Owner,
    /// Nonempty; over the equation parameters for `Or`, over the pair
    /// binders of the clause for `And`.
    pub shape: Arc<SetExpr>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitEvent {
    pub iteration: usize,
    pub owner: Owner,
    pub splitter: Splitter,
    pub parent: usize,
    /// Ids of the positive and the negative piece.
    pub pieces: [usize; 2],
}

impl fmt::Display for SplitEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {}: {} #{} by {} -> #{} / #{}",
            self.iteration, self.owner, self.parent, self.splitter, self.pieces[0], self.pieces[1]
        )
    }
}

#[derive(Debug, Clone)]
pub struct PartitionFamily {
    pub phi: Vec<Vec<Block>>,
    pub psi: Vec<Vec<Vec<Block>>>,
    /// Completed applications of `H`.
    pub iterations: usize,
    next_id: usize,
    parents: Vec<Arc<SetExpr>>,
}

impl PartitionFamily {
    /// The trivial family: one full block per partition.
    pub fn initial(c: &ClausePbes) -> PartitionFamily {
        let mut fam = PartitionFamily { phi: Vec::new(), psi: Vec::new(), iterations: 0, next_id: 0, parents: Vec::new() };
        for (i, eq) in c.equations.iter().enumerate() {
            let shape = Arc::new(SetExpr::full(eq.params.clone(), Vec::new()));
            let block = fam.block(Owner::Or { eq: i }, shape, Origin::Initial);
            fam.phi.push(vec![block]);
        }
        for (i, eq) in c.equations.iter().enumerate() {
            let mut row = Vec::new();
            for (k, clause) in eq.clauses.iter().enumerate() {
                let shape = Arc::new(SetExpr::full(eq.params.clone(), clause.vars.clone()));
                row.push(vec![fam.block(Owner::And { eq: i, clause: k }, shape, Origin::Initial)]);
            }
            fam.psi.push(row);
        }
        fam
    }

    fn block(&mut self, owner: Owner, shape: Arc<SetExpr>, origin: Origin) -> Block {
        let id = self.next_id;
        self.next_id += 1;
        Block { id, owner, shape, origin }
    }

    pub fn block_count(&self) -> usize {
        self.phi.iter().map(Vec::len).sum::<usize>() + self.psi.iter().flatten().map(Vec::len).sum::<usize>()
    }

    pub fn or_blocks(&self) -> impl Iterator<Item = &Block> {
        self.phi.iter().flatten()
    }

    pub fn and_blocks(&self) -> impl Iterator<Item = &Block> {
        self.psi.iter().flatten().flatten()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.or_blocks().chain(self.and_blocks())
    }

    pub fn get(&self, id: usize) -> Option<&Block> {
        self.blocks().find(|b| b.id == id)
    }

    /// Shapes of blocks that were split away, kept so ids in traces stay resolvable.
    pub fn retired(&self) -> &[Arc<SetExpr>] {
        &self.parents
    }

    pub fn partition(&self, owner: Owner) -> &[Block] {
        match owner {
            Owner::Or { eq } => &self.phi[eq],
            Owner::And { eq, clause } => &self.psi[eq][clause],
        }
    }

    /// The block of `Phi_i` containing the signature.
    pub fn block_of<S: Solver + ?Sized>(&self, c: &ClausePbes, sig: &Signature, solver: &mut S) -> Result<&Block, Error> {
        let i = c.index_of(&sig.name).ok_or_else(|| Error::UnknownVariable(sig.name.clone()))?;
        let eq = &c.equations[i];
        if eq.params.len() != sig.values.len() || eq.params.iter().zip(&sig.values).any(|(p, v)| p.sort != v.sort()) {
            return Err(Error::BadSignature(format!("{sig}")));
        }
        for b in &self.phi[i] {
            if set::contains(&b.shape, &sig.values, solver)? {
                return Ok(b);
            }
        }
        Err(Error::NoBlock(format!("{sig}")))
    }

    /// Readable description of a block: its formula when short, else its split history.
    pub fn label(&self, block: &Block) -> String {
        const BUDGET: usize = 200;
        const WIDTH: usize = 72;
        if let Some(p) = block.shape.expanded(BUDGET) {
            let text = format!("{p}");
            if text.len() <= WIDTH {
                return text;
            }
        }
        match block.origin {
            Origin::Initial => String::from("true"),
            Origin::Split { parent, splitter, positive } => {
                format!("#{parent} {} {splitter}", if positive { "&" } else { "& !" })
            }
        }
    }
}

/// `set` with its body replaced by a quantifier-free equivalent when the
/// solver provides one, then by its periodic normal form when it has one.
/// Without this, shapes nest a quantifier per split.
fn simplified<S: Solver + ?Sized>(set: SetExpr, solver: &mut S) -> Result<SetExpr, Error> {
    let set = match solver.eliminate(&set)? {
        Some(body) => SetExpr::new(set.primary, set.secondary, body),
        None => set,
    };
    Ok(match periodic::normal_form(&set, periodic::CLASS_CAP) {
        Some(body) => SetExpr::new(set.primary, set.secondary, body),
        None => set,
    })
}

/// Divides every block of `blocks` by `splitter`: a block meeting both the
/// splitter and its complement is replaced in place by the two pieces.
fn divide<S: Solver + ?Sized>(
    fam: &mut PartitionFamily,
    owner: Owner,
    splitter: &SetExpr,
    tag: Splitter,
    trace: &mut Vec<SplitEvent>,
    solver: &mut S,
) -> Result<(), Error> {
    let current = match owner {
        Owner::Or { eq } => core::mem::take(&mut fam.phi[eq]),
        Owner::And { eq, clause } => core::mem::take(&mut fam.psi[eq][clause]),
    };
    let splitter = simplified(splitter.clone(), solver)?;
    let mut out = Vec::with_capacity(current.len() + 1);
    for block in current {
        let parent = Prop::member(block.shape.clone(), block.shape.binder_vars());
        let pos = SetExpr::new(
            block.shape.primary.clone(),
            block.shape.secondary.clone(),
            Prop::and([parent.clone(), splitter.body.clone()]),
        );
        if set::is_empty(&pos, solver)? {
            out.push(block);
            continue;
        }
        let neg = SetExpr::new(
            block.shape.primary.clone(),
            block.shape.secondary.clone(),
            Prop::and([parent, Prop::not(splitter.body.clone())]),
        );
        if set::is_empty(&neg, solver)? {
            out.push(block);
            continue;
        }
        let (pos, neg) = (simplified(pos, solver)?, simplified(neg, solver)?);
        let a = fam.block(owner, Arc::new(pos), Origin::Split { parent: block.id, splitter: tag, positive: true });
        let b = fam.block(owner, Arc::new(neg), Origin::Split { parent: block.id, splitter: tag, positive: false });
        trace.push(SplitEvent { iteration: fam.iterations + 1, owner, splitter: tag, parent: block.id, pieces: [a.id, b.id] });
        fam.parents.push(block.shape);
        out.push(a);
        out.push(b);
    }
    match owner {
        Owner::Or { eq } => fam.phi[eq] = out,
        Owner::And { eq, clause } => fam.psi[eq][clause] = out,
    }
    Ok(())
}

/// `{ d | exists e. phi_ik(d, e) && (d, e) in psi }`.
pub fn splitter_f(c: &ClausePbes, i: usize, k: usize, psi: &Block) -> SetExpr {
    let eq = &c.equations[i];
    let clause = &eq.clauses[k];
    let binders = c.pair_binders(i, k);
    let vars: Vec<DataExpr> = binders.iter().map(|b| DataExpr::Var(b.name.clone())).collect();
    let body = Prop::and([Prop::data(clause.guard.clone()), Prop::member(psi.shape.clone(), vars)]);
    SetExpr::new(eq.params.clone(), Vec::new(), Prop::exists(clause.vars.clone(), body))
}

/// `{ (d, e) | f_ikj(d, e) in phi }`.
pub fn splitter_g(c: &ClausePbes, i: usize, k: usize, j: usize, phi: &Block) -> Result<SetExpr, Error> {
    let eq = &c.equations[i];
    let clause = &eq.clauses[k];
    set::substitute_into(&phi.shape, &clause.calls[j].args, &eq.params, &clause.vars)
}

pub fn step_hd<S: Solver + ?Sized>(c: &ClausePbes, fam: &mut PartitionFamily, trace: &mut Vec<SplitEvent>, solver: &mut S) -> Result<(), Error> {
    for (i, eq) in c.equations.iter().enumerate() {
        for k in 0..eq.clauses.len() {
            let psi = fam.psi[i][k].clone();
            for block in &psi {
                let splitter = splitter_f(c, i, k, block);
                let tag = Splitter::F { eq: i, clause: k, block: block.id };
                divide(fam, Owner::Or { eq: i }, &splitter, tag, trace, solver)?;
            }
        }
    }
    Ok(())
}

pub fn step_hb<S: Solver + ?Sized>(c: &ClausePbes, fam: &mut PartitionFamily, trace: &mut Vec<SplitEvent>, solver: &mut S) -> Result<(), Error> {
    for (i, eq) in c.equations.iter().enumerate() {
        for (k, clause) in eq.clauses.iter().enumerate() {
            for (j, call) in clause.calls.iter().enumerate() {
                let phi = fam.phi[call.target].clone();
                for block in &phi {
                    let splitter = splitter_g(c, i, k, j, block)?;
                    let tag = Splitter::G { eq: i, clause: k, call: j, block: block.id };
                    divide(fam, Owner::And { eq: i, clause: k }, &splitter, tag, trace, solver)?;
                }
            }
        }
    }
    Ok(())
}

/// One application of `H = HB . HD`.
pub fn step<S: Solver + ?Sized>(c: &ClausePbes, fam: &mut PartitionFamily, trace: &mut Vec<SplitEvent>, solver: &mut S) -> Result<(), Error> {
    step_hd(c, fam, trace, solver)?;
    step_hb(c, fam, trace, solver)?;
    fam.iterations += 1;
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Outcome {
    /// A fixed point of `H`.
    Saturated,
    /// `max_iter` applications of `H` kept splitting.
    Diverged { last: Vec<SplitEvent> },
}

/// Number of split events kept in [`Outcome::Diverged`].
pub const DIVERGENCE_WINDOW: usize = 5;

#[derive(Debug, Clone)]
pub struct Saturation {
    pub family: PartitionFamily,
    pub outcome: Outcome,
    pub trace: Vec<SplitEvent>,
}

impl Saturation {
    pub fn is_saturated(&self) -> bool {
        matches!(self.outcome, Outcome::Saturated)
    }
}

/// Applies `H` to the trivial family until no block is split, at most
/// `max_iter` times. `observe` sees the family after every application.
pub fn saturate_with<S, O>(c: &ClausePbes, max_iter: usize, solver: &mut S, mut observe: O) -> Result<Saturation, Error>
where
    S: Solver + ?Sized,
    O: FnMut(&PartitionFamily, &mut S) -> Result<(), Error>,
{
    if max_iter == 0 {
        return Err(Error::Precondition(String::from("max_iter must be at least 1")));
    }
    let mut fam = PartitionFamily::initial(c);
    let mut trace = Vec::new();
    while fam.iterations < max_iter {
        let before = fam.block_count();
        step(c, &mut fam, &mut trace, solver)?;
        observe(&fam, solver)?;
        if fam.block_count() == before {
            return Ok(Saturation { family: fam, outcome: Outcome::Saturated, trace });
        }
    }
    let last = trace[trace.len().saturating_sub(DIVERGENCE_WINDOW)..].to_vec();
    Ok(Saturation { family: fam, outcome: Outcome::Diverged { last }, trace })
}

pub fn saturate<S: Solver + ?Sized>(c: &ClausePbes, max_iter: usize, solver: &mut S) -> Result<Saturation, Error> {
    saturate_with(c, max_iter, solver, |_, _| Ok(()))
}
