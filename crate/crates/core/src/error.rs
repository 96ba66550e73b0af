use alloc::string::String;

use thiserror::Error;

use crate::parse::ParseError;

/// Errors raised while evaluating ground data expressions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound data variable `{0}`")]
    Unbound(String),
    #[error("sort mismatch in `{0}`")]
    Sort(String),
    #[error("arithmetic overflow")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unknown predicate variable `{0}`")]
    UnknownVariable(String),
    #[error("universal quantifier over `{0}` is not allowed in an existential PBES")]
    UniversalNotAllowed(String),
    #[error("disjunctive normal form exceeds {cap} clauses")]
    DnfTooLarge { cap: usize },
    #[error("set signatures differ: {0}")]
    SignatureMismatch(String),
    #[error("signature `{0}` does not match the declared parameters")]
    BadSignature(String),
    #[error("SMT solver returned unknown ({reason}); offending script:\n{script}")]
    SolverUnknown { reason: String, script: String },
    #[error("SMT solver failure: {0}")]
    Solver(String),
    #[error("no block of the partition contains `{0}`")]
    NoBlock(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
