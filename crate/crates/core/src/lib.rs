//! Decision procedure for membership queries on existential parameterised
//! Boolean equation systems (PBESs).
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Everything
//! that has to talk to the outside world goes through the [`smt::Solver`]
//! trait; the `epbes` crate provides a process-backed implementation.
//!
//! Pipeline:
//!
//! 1. [`parse::parse_pbes`] reads the text syntax into a [`syntax::Pbes`].
//! 2. [`normal::to_clause_form`] rewrites it into clause form.
//! 3. [`refine::saturate`] refines the trivial partition family until it is a
//!    fixed point, using symbolic sets ([`set::SetExpr`]) and an SMT solver for
//!    emptiness checks.
//! 4. [`game::ReducedGame::build`] reads the finite quotient as a parity game,
//!    [`parity::solve`] solves it.
//! 5. [`proof`] extracts and validates proof graphs; [`explicit`] is a bounded
//!    explicit instantiation used for cross-checking.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod explicit;
pub mod game;
pub mod normal;
pub mod parity;
pub mod parse;
pub mod periodic;
pub mod proof;
pub mod refine;
pub mod set;
pub mod sexp;
pub mod smt;
pub mod syntax;

pub use error::{Error, EvalError};
pub use syntax::{DataExpr, Equation, Fixpoint, Param, Pbes, PredFormula, Signature, Sort, Value};
