//! The command-line front end: argument definitions and subcommand drivers.
//! Results go to `out`, diagnostics to `err`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use epbes_core::explicit::{self, Bounds, ExplicitVerdict};
use epbes_core::game::{Analysis, ReducedGame, Verdict};
use epbes_core::normal::{self, ClausePbes};
use epbes_core::parity;
use epbes_core::parse::{parse_pbes, parse_query};
use epbes_core::proof::{self, Extraction};
use epbes_core::refine::{self, Outcome};
use epbes_core::{Error, Pbes, Signature};
use log::info;
use thiserror::Error as ThisError;

use crate::config::{ConfigError, Format, Layer, RunConfig, DEFAULT_BUDGET};
use crate::output::{self, GameOut, OracleOut, OracleSummary, ProofGraphDoc, ProveOut, RefineOut, SolveOut, ValidateOut};
use crate::session::{SmtSession, SolverConfig};

/// Bounds of the explicit cross-check run by `solve`.
pub const CROSS_CHECK: Bounds = Bounds { value_cap: 64, witness_cap: 16, vertex_cap: 20_000 };

#[derive(Debug, Parser)]
#[command(name = "epbes", version, about = "Membership queries on existential parameterised Boolean equation systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults for the options below.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Solver command line [env: EPBES_SMT_CMD] [default: z3].
    #[arg(long, global = true, value_name = "CMD")]
    pub smt_cmd: Option<String>,
    /// Per-query solver timeout [default: 30000].
    #[arg(long, global = true, value_name = "MS")]
    pub smt_timeout_ms: Option<u64>,
    /// Maximal number of refinement rounds [default: 100].
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Largest value an explicit vertex may carry [default: 256].
    #[arg(long, global = true, value_name = "N")]
    pub value_cap: Option<u64>,
    /// Largest witness component enumerated [default: 64].
    #[arg(long, global = true, value_name = "N")]
    pub witness_cap: Option<u64>,
    /// Largest explicit game [default: 100000].
    #[arg(long, global = true, value_name = "N")]
    pub vertex_cap: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Drop game vertices unreachable from the query.
    #[arg(long, global = true)]
    pub prune: bool,
    /// Include every split event in `refine` output.
    #[arg(long, global = true)]
    pub trace: bool,
    /// More log output on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and print a PBES.
    Parse { file: PathBuf },
    /// Print the clause form.
    Normalize { file: PathBuf },
    /// Refine the partition family until saturation.
    Refine { file: PathBuf },
    /// Decide a membership query; exit 0 true, 1 false, 2 diverged.
    Solve {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Extract a proof graph and the strategy graph for a true query.
    Prove {
        file: PathBuf,
        #[arg(long)]
        query: String,
        /// Largest number of proof-graph vertices to expand.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Check a JSON proof graph against a PBES.
    Validate {
        file: PathBuf,
        #[arg(long, value_name = "JSON")]
        graph: PathBuf,
    },
    /// Explore the explicit game within the caps.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Dump the solved reduced game.
    Export {
        file: PathBuf,
        /// Vertex to highlight, and the root for `--prune`.
        #[arg(long)]
        query: Option<String>,
    },
}

pub mod exit {
    pub const TRUE: u8 = 0;
    pub const FALSE: u8 = 1;
    pub const UNDECIDED: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const SOLVER: u8 = 4;
}

#[derive(Debug, ThisError)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => exit::INPUT,
            Failure::Solver(_) => exit::SOLVER,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_)
            | Error::UnknownVariable(_)
            | Error::UniversalNotAllowed(_)
            | Error::DnfTooLarge { .. }
            | Error::BadSignature(_) => Failure::Input(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Solver(format!("cannot write output: {e}"))
    }
}

impl GlobalArgs {
    fn layer(&self) -> Layer {
        Layer {
            smt_cmd: self.smt_cmd.clone(),
            smt_timeout_ms: self.smt_timeout_ms,
            max_iter: self.max_iter,
            value_cap: self.value_cap,
            witness_cap: self.witness_cap,
            vertex_cap: self.vertex_cap,
            format: self.format,
            prune: self.prune.then_some(true),
            trace: self.trace.then_some(true),
        }
    }

    /// Flags over the environment read through `var` over the config file.
    pub fn resolve(&self, var: impl Fn(&str) -> Option<String>) -> Result<RunConfig, Failure> {
        let file = match &self.config {
            Some(path) => Layer::from_toml(&read(path)?)?,
            None => Layer::default(),
        };
        Ok(RunConfig::resolve(self.layer(), Layer::from_env(var)?, file)?)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Pbes, Failure> {
    parse_pbes(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn query(p: &Pbes, text: &str) -> Result<Signature, Failure> {
    parse_query(p, text).map_err(|e| Failure::Input(format!("query `{text}`: {e}")))
}

/// Runs `cli` under the resolved `config`; returns the exit code.
pub fn run(cli: &Cli, config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    let mut driver = Driver { config, out, err, solver: None };
    match &cli.command {
        Command::Parse { file } => driver.parse(file),
        Command::Normalize { file } => driver.normalize(file),
        Command::Refine { file } => driver.refine(file),
        Command::Solve { file, query } => driver.solve(file, query),
        Command::Prove { file, query, budget } => driver.prove(file, query, *budget),
        Command::Validate { file, graph } => driver.validate(file, graph),
        Command::Oracle { file, query } => driver.oracle(file, query),
        Command::Export { file, query } => driver.export(file, query.as_deref()),
    }
}

struct Driver<'a> {
    config: &'a RunConfig,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    solver: Option<SmtSession>,
}

impl Driver<'_> {
    fn solver(&mut self) -> Result<&mut SmtSession, Failure> {
        if self.solver.is_none() {
            let cfg = SolverConfig::from_command(&self.config.smt_cmd, self.config.smt_timeout)?;
            self.solver = Some(SmtSession::new(cfg));
        }
        Ok(self.solver.as_mut().expect("set above"))
    }

    fn format(&self) -> Format {
        self.config.format
    }

    fn clauses(&self, p: &Pbes) -> Result<ClausePbes, Failure> {
        Ok(normal::to_clause_form(p)?)
    }

    fn analyse(&mut self, p: &Pbes) -> Result<Analysis, Failure> {
        let c = self.clauses(p)?;
        let max_iter = self.config.max_iter;
        let a = Analysis::from_clauses(c, max_iter, self.solver()?)?;
        if let Some(s) = &self.solver {
            info!("solver: {:?}", s.stats());
        }
        Ok(a)
    }

    fn parse(&mut self, file: &Path) -> Result<u8, Failure> {
        let p = load(file)?;
        match self.format() {
            Format::Json => self.out.write_all(output::json(&output::PbesOut::new(&p)).as_bytes())?,
            _ => writeln!(self.out, "{p}")?,
        }
        Ok(exit::TRUE)
    }

    fn normalize(&mut self, file: &Path) -> Result<u8, Failure> {
        let c = self.clauses(&load(file)?)?;
        match self.format() {
            Format::Json => self.out.write_all(output::json(&output::ClausePbesOut::new(&c)).as_bytes())?,
            _ => write!(self.out, "{c}")?,
        }
        Ok(exit::TRUE)
    }

    fn refine(&mut self, file: &Path) -> Result<u8, Failure> {
        let c = self.clauses(&load(file)?)?;
        let max_iter = self.config.max_iter;
        let s = refine::saturate(&c, max_iter, self.solver()?)?;
        let fam = &s.family;
        let last: &[_] = match &s.outcome {
            Outcome::Saturated => &[],
            Outcome::Diverged { last } => last,
        };
        let trace = self.config.trace.then_some(s.trace.as_slice());
        match self.format() {
            Format::Json => {
                let doc = RefineOut::new(&c, fam, last, trace, s.is_saturated());
                self.out.write_all(output::json(&doc).as_bytes())?;
            }
            _ => {
                match s.outcome {
                    Outcome::Saturated => writeln!(self.out, "saturated after {} iterations", fam.iterations)?,
                    Outcome::Diverged { .. } => writeln!(self.out, "diverged after {} iterations", fam.iterations)?,
                }
                for b in fam.blocks() {
                    writeln!(self.out, "#{} {}: {}", b.id, b.owner, fam.label(b))?;
                }
                let events = trace.unwrap_or(last);
                if !events.is_empty() {
                    writeln!(self.out, "splits:")?;
                }
                for e in events {
                    writeln!(self.out, "  {e}")?;
                }
            }
        }
        Ok(if s.is_saturated() { exit::TRUE } else { exit::UNDECIDED })
    }

    /// The reduced game, restricted to what `root` reaches under `--prune`.
    fn game(&self, a: &Analysis, root: Option<usize>) -> Option<(ReducedGame, parity::Solution, Option<usize>)> {
        let game = a.game.as_ref()?;
        let solution = a.solution.as_ref()?;
        match root {
            Some(r) if self.config.prune => {
                let keep = game.reachable(&[r]);
                let (sub, old) = game.restrict(&keep);
                // A reachable set is closed under successors, so the subgame
                // has the same winners; re-solving yields local strategies.
                let sol = parity::solve(&sub.game);
                debug_assert!(old.iter().enumerate().all(|(n, &v)| sol.winner[n] == solution.winner[v]));
                let root = old.iter().position(|&v| v == r);
                Some((sub, sol, root))
            }
            _ => Some((game.clone(), solution.clone(), root)),
        }
    }

    fn solve(&mut self, file: &Path, text: &str) -> Result<u8, Failure> {
        let p = load(file)?;
        let sig = query(&p, text)?;
        let a = self.analyse(&p)?;
        let verdict = a.membership(&sig, self.solver()?)?;
        let vertex = match verdict {
            Verdict::Diverged { .. } => None,
            _ => a.vertex_of(&sig, self.solver()?)?,
        };
        let (oracle, og) = explicit::solve(&a.clauses, &sig, CROSS_CHECK)?;
        let disagree = match (verdict, oracle) {
            (Verdict::False, ExplicitVerdict::True) => true,
            // A closed space with truncated witnesses may still miss moves.
            (Verdict::True, ExplicitVerdict::False) => !og.witness_truncated,
            _ => false,
        };
        if disagree {
            return Err(Failure::Solver(format!(
                "cross-check failed for {sig}: pipeline says {}, explicit exploration says {}",
                verdict_word(verdict),
                output::explicit_verdict(oracle)
            )));
        }
        let iterations = a.saturation.family.iterations;
        match self.format() {
            Format::Json => {
                let doc = SolveOut {
                    query: sig.to_string(),
                    verdict: verdict_word(verdict),
                    saturated: a.saturation.is_saturated(),
                    iterations,
                    vertex_count: a.game.as_ref().map(ReducedGame::len),
                    vertex,
                    oracle: OracleSummary { verdict: output::explicit_verdict(oracle), closed: og.closed },
                };
                self.out.write_all(output::json(&doc).as_bytes())?;
            }
            Format::Dot => match self.game(&a, vertex) {
                Some((g, s, root)) => self.out.write_all(output::game_dot(&a.clauses, &g, &s, root).as_bytes())?,
                None => writeln!(self.err, "diverged after {iterations} iterations; no game to draw")?,
            },
            Format::Text => match verdict {
                Verdict::Diverged { iterations } => {
                    writeln!(self.out, "diverged after {iterations} iterations")?;
                    if let Outcome::Diverged { last } = &a.saturation.outcome {
                        for e in last {
                            writeln!(self.out, "  {e}")?;
                        }
                    }
                }
                _ => writeln!(self.out, "{sig}: {}", verdict_word(verdict))?,
            },
        }
        Ok(match verdict {
            Verdict::True => exit::TRUE,
            Verdict::False => exit::FALSE,
            Verdict::Diverged { .. } => exit::UNDECIDED,
        })
    }

    fn prove(&mut self, file: &Path, text: &str, budget: usize) -> Result<u8, Failure> {
        let p = load(file)?;
        let sig = query(&p, text)?;
        let a = self.analyse(&p)?;
        match a.membership(&sig, self.solver()?)? {
            Verdict::True => {}
            Verdict::False => {
                writeln!(self.err, "{sig} is false; there is no proof graph")?;
                return Ok(exit::FALSE);
            }
            Verdict::Diverged { iterations } => {
                writeln!(self.out, "diverged after {iterations} iterations")?;
                return Ok(exit::UNDECIDED);
            }
        }
        let extraction = proof::extract(&a, &sig, budget, self.solver()?)?;
        let (graph, frontier) = match &extraction {
            Extraction::Closed(g) => (g, &[][..]),
            Extraction::Partial { graph, frontier } => (graph, frontier.as_slice()),
        };
        let game = a.game.as_ref().expect("membership was decided");
        let solution = a.solution.as_ref().expect("membership was decided");
        let root = a.vertex_of(&sig, self.solver()?)?.ok_or_else(|| Failure::Solver(format!("{sig} has no vertex")))?;
        let sg = proof::strategy_graph(game, solution, root);
        match self.format() {
            Format::Json => self.out.write_all(output::json(&ProveOut::new(&sig, graph, frontier, &sg)).as_bytes())?,
            Format::Dot => {
                self.out.write_all(output::proof_dot(graph, frontier).as_bytes())?;
                self.out.write_all(output::strategy_dot(&a.clauses, game, &sg).as_bytes())?;
            }
            Format::Text => {
                let state = if frontier.is_empty() { "closed" } else { "partial" };
                writeln!(self.out, "{state} proof graph for {sig} with {} vertices", graph.vertices.len())?;
                for (u, v) in graph.vertices.iter().enumerate() {
                    let succ: Vec<String> = graph.edges[u].iter().map(|&w| graph.vertices[w].sig.to_string()).collect();
                    match &v.annotation {
                        Some((k, w)) => {
                            let w: Vec<String> = w.iter().map(ToString::to_string).collect();
                            writeln!(self.out, "  {} clause {k} [{}] -> {}", v.sig, w.join(", "), succ.join(", "))?
                        }
                        None => writeln!(self.out, "  {} (unexpanded)", v.sig)?,
                    }
                }
                writeln!(self.out, "strategy graph: {} vertices, {} edges", sg.vertices.len(), sg.edges.len())?;
            }
        }
        Ok(exit::TRUE)
    }

    fn validate(&mut self, file: &Path, graph: &Path) -> Result<u8, Failure> {
        let c = self.clauses(&load(file)?)?;
        let text = read(graph)?;
        // Accept a bare proof graph or the whole output of `prove`.
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", graph.display())))?;
        let doc = value.get("proof_graph").cloned().unwrap_or(value);
        let doc: ProofGraphDoc =
            serde_json::from_value(doc).map_err(|e| Failure::Input(format!("{}: {e}", graph.display())))?;
        let pg = doc.to_graph().map_err(|e| Failure::Input(format!("{}: {e}", graph.display())))?;
        let violations = proof::validate(&pg, &c);
        match self.format() {
            Format::Json => self.out.write_all(output::json(&ValidateOut::new(&violations)).as_bytes())?,
            _ if violations.is_empty() => writeln!(self.out, "ok")?,
            _ => {
                for v in &violations {
                    writeln!(self.out, "violation: {v}")?;
                }
            }
        }
        Ok(if violations.is_empty() { exit::TRUE } else { exit::FALSE })
    }

    fn oracle(&mut self, file: &Path, text: &str) -> Result<u8, Failure> {
        let p = load(file)?;
        let sig = query(&p, text)?;
        let c = self.clauses(&p)?;
        let bounds = self.config.bounds;
        let (verdict, g) = explicit::solve(&c, &sig, bounds)?;
        match self.format() {
            Format::Json => self.out.write_all(output::json(&OracleOut::new(&sig, &c, &g, bounds)).as_bytes())?,
            Format::Dot => self.out.write_all(output::explicit_dot(&c, &g).as_bytes())?,
            Format::Text => {
                writeln!(self.out, "{sig}: {}", output::explicit_verdict(verdict))?;
                writeln!(
                    self.out,
                    "closed: {}, vertices: {} ({} or), frontier: {}",
                    g.closed,
                    g.vertices.len(),
                    g.or_count(),
                    g.frontier.len()
                )?;
            }
        }
        Ok(match verdict {
            ExplicitVerdict::True => exit::TRUE,
            ExplicitVerdict::False => exit::FALSE,
            ExplicitVerdict::Unknown => exit::UNDECIDED,
        })
    }

    fn export(&mut self, file: &Path, text: Option<&str>) -> Result<u8, Failure> {
        let p = load(file)?;
        let sig = text.map(|t| query(&p, t)).transpose()?;
        if self.config.prune && sig.is_none() {
            return Err(Failure::Input("--prune needs --query".into()));
        }
        let a = self.analyse(&p)?;
        if !a.saturation.is_saturated() {
            writeln!(self.out, "diverged after {} iterations", a.saturation.family.iterations)?;
            return Ok(exit::UNDECIDED);
        }
        let root = match &sig {
            Some(s) => a.vertex_of(s, self.solver()?)?,
            None => None,
        };
        let (g, s, root) = self.game(&a, root).expect("saturated");
        match self.format() {
            Format::Json => self.out.write_all(output::json(&GameOut::new(&a.clauses, &g, &s, root)).as_bytes())?,
            Format::Dot => self.out.write_all(output::game_dot(&a.clauses, &g, &s, root).as_bytes())?,
            Format::Text => {
                writeln!(self.out, "{} vertices, {} edges", g.len(), g.edge_count())?;
                for (v, x) in g.vertices.iter().enumerate() {
                    writeln!(
                        self.out,
                        "  v{v} #{} {} prio {} won by {}: {} -> {:?}",
                        x.block,
                        x.owner,
                        g.game.priority[v],
                        if s.winner[v] == parity::Player::Even { "circle" } else { "box" },
                        x.label,
                        g.game.succ[v]
                    )?;
                }
            }
        }
        Ok(exit::TRUE)
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::True => "true",
        Verdict::False => "false",
        Verdict::Diverged { .. } => "diverged",
    }
}
