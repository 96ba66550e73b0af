//! Process-backed SMT sessions, configuration, output formats and the
//! command-line driver around `epbes-core`.

pub mod app;
pub mod config;
pub mod output;
pub mod session;

pub use config::{Format, RunConfig};
pub use session::{SmtSession, SolverConfig};
