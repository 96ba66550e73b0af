//! A persistent SMT-LIB2 solver process behind the [`Solver`] trait.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use epbes_core::sexp::{self, Sexp};
use epbes_core::set::{Prop, SetExpr};
use epbes_core::smt::{self, Encoder, Query, SatResult, Solver};
use epbes_core::Error;
use log::{debug, warn};

/// Complete for quantified linear arithmetic in z3; its default strategy can
/// stall on nested quantifiers.
pub const Z3_CHECK: &str = "(check-sat-using (then qe smt))";

/// Bounded first attempt; model search over remainders can loop on
/// unsatisfiable queries that elimination settles at once.
pub const Z3_QUICK: &str = "(check-sat-using (try-for (then qe smt) 2000))";

/// Rewrites an asserted body into quantifier-free goals.
pub const Z3_ELIMINATE: &str = "(apply (then qe simplify propagate-ineqs ctx-solver-simplify simplify))";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: String,
    pub args: Vec<String>,
    /// Command used instead of a plain `(check-sat)`.
    pub check: String,
    /// Bounded variant of `check` tried first; when it gives up, the query is
    /// decided on its existential closure.
    pub quick: Option<String>,
    pub timeout: Duration,
    /// Tactic command for [`Solver::eliminate`]; `None` keeps shapes as built.
    pub eliminate: Option<String>,
}

impl SolverConfig {
    /// Splits a command line such as `z3 -in -smt2`. A bare `z3` gets the
    /// flags it needs to read a script from standard input.
    pub fn from_command(cmd: &str, timeout: Duration) -> Result<SolverConfig, Error> {
        let mut words = cmd.split_whitespace().map(str::to_string);
        let program = words.next().ok_or_else(|| Error::Solver("empty solver command".into()))?;
        let mut args: Vec<String> = words.collect();
        let z3 = is_z3(&program);
        if z3 && args.is_empty() {
            args = vec!["-in".into(), "-smt2".into()];
        }
        let check = if z3 { Z3_CHECK } else { "(check-sat)" }.to_string();
        let quick = z3.then(|| Z3_QUICK.to_string());
        let eliminate = z3.then(|| Z3_ELIMINATE.to_string());
        Ok(SolverConfig { program, args, check, quick, timeout, eliminate })
    }
}

fn is_z3(program: &str) -> bool {
    Path::new(program)
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n == "z3" || n.starts_with("z3."))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub queries: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
    pub restarts: u64,
    /// Queries the quick attempt left open.
    pub retries: u64,
    pub eliminations: u64,
    pub solver_time: Duration,
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

enum Failure {
    /// The process died or the pipe broke; a restart may help.
    Crashed(String),
    Timeout,
    /// The solver rejected a command.
    Rejected(String),
}

/// One solver process, one query in flight. Definitions of shared sets are
/// sent once per process; after a restart they are re-sent on demand.
pub struct SmtSession {
    config: SolverConfig,
    process: Option<Process>,
    encoder: Encoder,
    stats: Stats,
}

impl SmtSession {
    pub fn new(config: SolverConfig) -> SmtSession {
        SmtSession { config, process: None, encoder: Encoder::new(), stats: Stats::default() }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    fn spawn(&self) -> Result<Process, Error> {
        let mut child = Command::new(&self.config.program)
            .args(&self.config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Solver(format!("cannot start `{}`: {e}", self.config.program)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut p = Process { child, stdin, lines };
        let prelude = format!(
            "(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic {})\n",
            smt::LOGIC
        );
        p.stdin
            .write_all(prelude.as_bytes())
            .map_err(|e| Error::Solver(format!("cannot talk to `{}`: {e}", self.config.program)))?;
        Ok(p)
    }

    fn kill(&mut self) {
        self.process = None;
        self.encoder.clear();
    }

    /// Only a satisfiable closure that must yield a model pays for the full
    /// model search.
    fn check_staged(&mut self, query: &Query, model: bool) -> Result<SatResult, Failure> {
        let check = self.config.check.clone();
        let Some(quick) = self.config.quick.clone() else { return self.check_once(query, &check) };
        match self.check_once(query, &quick)? {
            SatResult::Unknown { .. } => self.stats.retries += 1,
            r => return Ok(r),
        }
        if query.consts.is_empty() {
            return self.check_once(query, &check);
        }
        let closed = Query::new(Vec::new(), Prop::exists(query.consts.clone(), query.assertion.clone()));
        match self.check_once(&closed, &check)? {
            SatResult::Sat(_) if model => self.check_once(query, &check),
            r => Ok(r),
        }
    }

    fn check_once(&mut self, query: &Query, check: &str) -> Result<SatResult, Failure> {
        if self.process.is_none() {
            self.process = Some(self.spawn().map_err(|e| Failure::Crashed(e.to_string()))?);
        }
        let encoded = self.encoder.encode(query);
        let mut script = String::new();
        for d in &encoded.definitions {
            script.push_str(d);
            script.push('\n');
        }
        script.push_str("(push 1)\n");
        for s in &encoded.scoped {
            script.push_str(s);
            script.push('\n');
        }
        script.push_str(check);
        script.push('\n');
        let deadline = Instant::now() + self.config.timeout;
        let p = self.process.as_mut().expect("spawned above");
        send(p, &script)?;
        let answer = read_response(p, deadline)?;
        let result = match answer.as_str() {
            "sat" => {
                send(p, "(get-model)\n")?;
                let text = read_response(p, deadline)?;
                let model = sexp::parse_all(&text)
                    .ok()
                    .and_then(|mut v| v.pop())
                    .ok_or_else(|| Failure::Rejected(format!("unreadable model: {text}")))?;
                let env = smt::read_model(&query.consts, &model).map_err(|e| Failure::Rejected(e.to_string()))?;
                SatResult::Sat(env)
            }
            "unsat" => SatResult::Unsat,
            "unknown" => {
                send(p, "(get-info :reason-unknown)\n")?;
                let text = read_response(p, deadline)?;
                let reason = sexp::parse_all(&text)
                    .ok()
                    .and_then(|v| v.into_iter().next())
                    .and_then(|s| match s {
                        Sexp::List(items) => items.into_iter().nth(1),
                        _ => None,
                    })
                    .map(|s| match s {
                        Sexp::Str(s) | Sexp::Atom(s) => s,
                        other => other.to_string(),
                    })
                    .unwrap_or(text);
                SatResult::Unknown { reason, script: Encoder::standalone(query, check) }
            }
            other => return Err(Failure::Rejected(other.to_string())),
        };
        send(p, "(pop 1)\n")?;
        Ok(result)
    }

    fn eliminate_once(&mut self, query: &Query, tactic: &str) -> Result<Option<Prop>, Failure> {
        if self.process.is_none() {
            self.process = Some(self.spawn().map_err(|e| Failure::Crashed(e.to_string()))?);
        }
        let encoded = self.encoder.encode(query);
        let mut script = String::new();
        for d in &encoded.definitions {
            script.push_str(d);
            script.push('\n');
        }
        script.push_str("(push 1)\n");
        for s in &encoded.scoped {
            script.push_str(s);
            script.push('\n');
        }
        script.push_str(tactic);
        script.push_str("\n(pop 1)\n");
        let deadline = Instant::now() + self.config.timeout;
        let p = self.process.as_mut().expect("spawned above");
        send(p, &script)?;
        let text = read_response(p, deadline)?;
        let goals = sexp::parse_all(&text).map_err(|e| Failure::Rejected(e.to_string()))?;
        Ok(goals.first().and_then(|g| smt::read_goals(g, &query.consts)))
    }
}

fn send(p: &mut Process, text: &str) -> Result<(), Failure> {
    p.stdin
        .write_all(text.as_bytes())
        .and_then(|_| p.stdin.flush())
        .map_err(|e| Failure::Crashed(e.to_string()))
}

/// Reads lines until they form one complete response.
fn read_response(p: &mut Process, deadline: Instant) -> Result<String, Failure> {
    let mut text = String::new();
    loop {
        let left = deadline.saturating_duration_since(Instant::now());
        match p.lines.recv_timeout(left) {
            Ok(line) => {
                if !text.is_empty() {
                    text.push('\n');
                }
                text.push_str(&line);
                if sexp::is_complete(&text) {
                    let text = text.trim().to_string();
                    if text.starts_with("(error") {
                        return Err(Failure::Rejected(text));
                    }
                    return Ok(text);
                }
            }
            Err(RecvTimeoutError::Timeout) => return Err(Failure::Timeout),
            Err(RecvTimeoutError::Disconnected) => return Err(Failure::Crashed("solver exited".into())),
        }
    }
}

impl SmtSession {
    fn run(&mut self, query: &Query, model: bool) -> Result<SatResult, Error> {
        let start = Instant::now();
        self.stats.queries += 1;
        let mut attempt = 0;
        let result = loop {
            attempt += 1;
            match self.check_staged(query, model) {
                Ok(r) => break Ok(r),
                Err(Failure::Crashed(why)) if attempt == 1 => {
                    warn!("solver crashed ({why}); restarting");
                    self.stats.restarts += 1;
                    self.kill();
                }
                Err(Failure::Crashed(why)) => {
                    self.kill();
                    break Err(Error::Solver(format!("solver crashed twice: {why}")));
                }
                Err(Failure::Timeout) => {
                    self.stats.restarts += 1;
                    self.kill();
                    break Ok(SatResult::Unknown {
                        reason: format!("timeout after {} ms", self.config.timeout.as_millis()),
                        script: Encoder::standalone(query, &self.config.check),
                    });
                }
                Err(Failure::Rejected(msg)) => {
                    self.kill();
                    break Err(Error::Solver(format!(
                        "{msg}\nscript:\n{}",
                        Encoder::standalone(query, &self.config.check)
                    )));
                }
            }
        };
        self.stats.solver_time += start.elapsed();
        match &result {
            Ok(SatResult::Sat(_)) => self.stats.sat += 1,
            Ok(SatResult::Unsat) => self.stats.unsat += 1,
            Ok(SatResult::Unknown { .. }) => self.stats.unknown += 1,
            Err(_) => {}
        }
        debug!("query {} took {:?}", self.stats.queries, start.elapsed());
        result
    }

}

impl Solver for SmtSession {
    fn check(&mut self, query: &Query) -> Result<SatResult, Error> {
        self.run(query, true)
    }

    fn decide(&mut self, query: &Query) -> Result<SatResult, Error> {
        self.run(query, false)
    }

    fn eliminate(&mut self, set: &SetExpr) -> Result<Option<Prop>, Error> {
        let Some(tactic) = self.config.eliminate.clone() else { return Ok(None) };
        let start = Instant::now();
        let query = Query::new(set.binders().cloned().collect(), set.body.clone());
        let result = match self.eliminate_once(&query, &tactic) {
            Ok(p) => p,
            Err(Failure::Rejected(msg)) => {
                // Elimination is an optimisation; a refusal leaves the shape as is.
                warn!("elimination rejected: {msg}");
                self.kill();
                None
            }
            Err(Failure::Crashed(_) | Failure::Timeout) => {
                self.stats.restarts += 1;
                self.kill();
                None
            }
        };
        self.stats.eliminations += 1;
        self.stats.solver_time += start.elapsed();
        Ok(result)
    }
}
