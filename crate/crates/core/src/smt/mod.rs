//! Client for an external SMT-LIB2 solver running as a subprocess.

mod serialize;
mod sexp;

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::time::Duration;

use thiserror::Error;

use crate::formula::{Assignment, Formula, SymbolKind, SymbolRef, Term};
use crate::model::{CmpOp, Domain, Sort, Statechart, Value, VarId};

pub use serialize::{formula_to_smt, sort_name};
pub use sexp::Sexp;

/// Environment variable overriding the default solver command.
pub const SOLVER_ENV: &str = "HSC_SOLVER";

pub fn default_solver_command() -> String {
    std::env::var(SOLVER_ENV)
        .ok()
        .filter(|s| !s.trim().is_empty())
        .unwrap_or_else(|| "z3 -in".to_string())
}

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("cannot start solver `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("unexpected solver response to `{command}`: {response}")]
    Protocol { command: String, response: String },
    #[error("solver error: {0}")]
    Solver(String),
    #[error("pop on an empty assertion stack")]
    PopEmpty,
    #[error("no model available: last check was not sat")]
    NoModel,
    #[error("symbol `{0}` was never declared")]
    Undeclared(SymbolRef),
    #[error("cannot block on unbounded integer `{0}`")]
    UnboundedBlock(SymbolRef),
    #[error("sort of `{0}` is unknown")]
    UnknownSort(SymbolRef),
    #[error("solver terminated unexpectedly{}", if .0.is_empty() { String::new() } else { format!(": {}", .0) })]
    Crash(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Sat,
    Unsat,
    Unknown(String),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Command line, split on whitespace.
    pub command: String,
    pub logic: String,
    /// Per-query limit passed to the solver.
    pub timeout: Option<Duration>,
    /// File receiving every command and response.
    pub transcript: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            command: default_solver_command(),
            logic: "QF_LIA".into(),
            timeout: None,
            transcript: None,
        }
    }
}

impl SolverConfig {
    pub fn with_command(mut self, command: impl Into<String>) -> Self {
        self.command = command.into();
        self
    }

    pub fn with_timeout(mut self, t: Option<Duration>) -> Self {
        self.timeout = t;
        self
    }
}

/// Counters kept by a session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SessionStats {
    pub checks: usize,
    pub assertions: usize,
    pub declarations: usize,
    pub bytes_sent: usize,
    pub resets: usize,
}

/// Values for a set of symbols taken from a satisfying model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverModel {
    values: BTreeMap<SymbolRef, Value>,
}

impl SolverModel {
    pub fn get(&self, s: SymbolRef) -> Option<Value> {
        self.values.get(&s).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolRef, Value)> + '_ {
        self.values.iter().map(|(s, v)| (*s, *v))
    }

    pub fn assignment(&self) -> Assignment {
        self.values.iter().map(|(s, v)| (*s, *v)).collect()
    }

    pub fn extend(&mut self, other: SolverModel) {
        self.values.extend(other.values);
    }

    /// Conjunction fixing each of `symbols` to its value in the model.
    pub fn pin(&self, symbols: &[SymbolRef]) -> Formula {
        Formula::and(
            symbols
                .iter()
                .filter_map(|s| {
                    self.values.get(s).map(|v| match v {
                        Value::Bool(b) => Formula::lit(*s, *b),
                        Value::Int(i) => Formula::Cmp(CmpOp::Eq, Term::Sym(*s), Term::Const(*i)),
                    })
                })
                .collect(),
        )
    }
}

/// One live solver process. Not shareable between threads.
pub struct SolverSession {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    transcript: Option<BufWriter<File>>,
    config: SolverConfig,
    /// Symbols declared at each stack level; index 0 is the base level.
    declared: Vec<BTreeMap<SymbolRef, Sort>>,
    var_sorts: HashMap<VarId, Sort>,
    var_bounds: HashMap<VarId, (Option<i64>, Option<i64>)>,
    model_ready: bool,
    stats: SessionStats,
    dead: bool,
}

impl std::fmt::Debug for SolverSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverSession")
            .field("command", &self.config.command)
            .field("depth", &self.depth())
            .finish()
    }
}

impl SolverSession {
    pub fn open(config: &SolverConfig) -> Result<Self, SmtError> {
        let mut words = config.command.split_whitespace();
        let program = words.next().ok_or_else(|| SmtError::Spawn {
            command: config.command.clone(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
        })?;
        let mut child = Command::new(program)
            .args(words)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| SmtError::Spawn {
                command: config.command.clone(),
                source,
            })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let transcript = match &config.transcript {
            Some(p) => Some(BufWriter::new(File::create(p)?)),
            None => None,
        };
        let mut s = SolverSession {
            child,
            stdin,
            stdout,
            transcript,
            config: config.clone(),
            declared: vec![BTreeMap::new()],
            var_sorts: HashMap::new(),
            var_bounds: HashMap::new(),
            model_ready: false,
            stats: SessionStats::default(),
            dead: false,
        };
        s.handshake()?;
        Ok(s)
    }

    fn handshake(&mut self) -> Result<(), SmtError> {
        self.command("(set-option :print-success true)")?;
        self.command("(set-option :produce-models true)")?;
        if let Some(t) = self.config.timeout {
            let ms = t.as_millis().max(1);
            self.command(&format!("(set-option :timeout {ms})"))?;
        }
        let logic = self.config.logic.clone();
        self.command(&format!("(set-logic {logic})"))
    }

    /// Registers sorts and domain bounds of the chart's variables. Bounds
    /// are asserted whenever a variable symbol is declared.
    pub fn register_variables(&mut self, sc: &Statechart) {
        for v in sc.var_ids() {
            let d = sc.variable(v).domain;
            self.var_sorts.insert(v, d.sort());
            if let Domain::Int { lower, upper } = d {
                self.var_bounds.insert(v, (lower, upper));
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.declared.len() - 1
    }

    pub fn stats(&self) -> SessionStats {
        self.stats
    }

    pub fn is_declared(&self, s: SymbolRef) -> bool {
        self.declared.iter().any(|level| level.contains_key(&s))
    }

    fn declared_sort(&self, s: SymbolRef) -> Option<Sort> {
        self.declared.iter().find_map(|level| level.get(&s).copied())
    }

    fn implied_sort(&self, s: SymbolRef) -> Option<Sort> {
        match s.kind {
            SymbolKind::StateBit(_)
            | SymbolKind::EventFlag(_)
            | SymbolKind::Injected(_)
            | SymbolKind::Fired(_) => Some(Sort::Bool),
            SymbolKind::ModelVar(v) => self.var_sorts.get(&v).copied(),
            SymbolKind::Havoc(_) => None,
        }
    }

    fn declare(&mut self, s: SymbolRef, sort: Sort) -> Result<(), SmtError> {
        if self.is_declared(s) {
            return Ok(());
        }
        self.command(&format!(
            "(declare-const {} {})",
            s.smt_name(),
            sort_name(sort)
        ))?;
        self.declared
            .last_mut()
            .expect("base level")
            .insert(s, sort);
        self.stats.declarations += 1;
        if let (SymbolKind::ModelVar(v), Sort::Int) = (s.kind, sort) {
            if let Some(&(lo, hi)) = self.var_bounds.get(&v) {
                let name = s.smt_name();
                if let Some(lo) = lo {
                    self.command(&format!("(assert (<= {} {name}))", smt_int(lo)))?;
                }
                if let Some(hi) = hi {
                    self.command(&format!("(assert (<= {name} {}))", smt_int(hi)))?;
                }
            }
        }
        Ok(())
    }

    /// Declares every symbol whose sort can be inferred.
    pub fn declare_symbols(&mut self, symbols: &[SymbolRef]) -> Result<(), SmtError> {
        for s in symbols {
            if !self.is_declared(*s) {
                let sort = self.implied_sort(*s).ok_or(SmtError::UnknownSort(*s))?;
                self.declare(*s, sort)?;
            }
        }
        self.model_ready = false;
        Ok(())
    }

    /// Asserts `f`, declaring its symbols first.
    pub fn assert_formula(&mut self, f: &Formula) -> Result<(), SmtError> {
        for (s, sort) in f.symbols() {
            let sort = self.implied_sort(s).unwrap_or(sort);
            self.declare(s, sort)?;
        }
        let text = format!("(assert {})", formula_to_smt(f));
        self.command(&text)?;
        self.stats.assertions += 1;
        self.model_ready = false;
        Ok(())
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.command("(push 1)")?;
        self.declared.push(BTreeMap::new());
        self.model_ready = false;
        Ok(())
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        if self.depth() == 0 {
            return Err(SmtError::PopEmpty);
        }
        self.command("(pop 1)")?;
        self.declared.pop();
        self.model_ready = false;
        Ok(())
    }

    pub fn check(&mut self) -> Result<CheckResult, SmtError> {
        self.stats.checks += 1;
        let resp = self.exchange("(check-sat)")?;
        let result = match resp.as_str() {
            "sat" => CheckResult::Sat,
            "unsat" => CheckResult::Unsat,
            "unknown" => CheckResult::Unknown(self.reason_unknown()?),
            _ => {
                return Err(SmtError::Protocol {
                    command: "(check-sat)".into(),
                    response: resp,
                })
            }
        };
        self.model_ready = result == CheckResult::Sat;
        Ok(result)
    }

    fn reason_unknown(&mut self) -> Result<String, SmtError> {
        let resp = self.exchange("(get-info :reason-unknown)")?;
        let reason = sexp::parse(&resp)
            .ok()
            .and_then(|e| {
                e.as_list()
                    .and_then(|l| l.get(1))
                    .and_then(|r| r.as_atom().map(|a| a.trim_matches('"').to_string()))
            })
            .unwrap_or(resp);
        Ok(reason)
    }

    /// Values of `symbols` in the model of the last `sat` check.
    pub fn get_model(&mut self, symbols: &[SymbolRef]) -> Result<SolverModel, SmtError> {
        if !self.model_ready {
            return Err(SmtError::NoModel);
        }
        let mut model = SolverModel::default();
        if symbols.is_empty() {
            return Ok(model);
        }
        let mut sorts = HashMap::new();
        for s in symbols {
            let sort = self.declared_sort(*s).ok_or(SmtError::Undeclared(*s))?;
            sorts.insert(s.smt_name(), (*s, sort));
        }
        let names: Vec<String> = symbols.iter().map(SymbolRef::smt_name).collect();
        let cmd = format!("(get-value ({}))", names.join(" "));
        let resp = self.exchange(&cmd)?;
        let bad = |why: &str| SmtError::Protocol {
            command: "(get-value …)".into(),
            response: format!("{why}: {resp}"),
        };
        let parsed = sexp::parse(&resp).map_err(|e| bad(&e))?;
        for pair in parsed.as_list().ok_or_else(|| bad("not a list"))? {
            let [name, value] = pair.as_list().ok_or_else(|| bad("not a pair"))? else {
                return Err(bad("not a pair"));
            };
            let name = name.as_atom().ok_or_else(|| bad("bad name"))?;
            let (s, sort) = sorts.get(name).copied().ok_or_else(|| bad("unrequested symbol"))?;
            let v = match sort {
                Sort::Bool => Value::Bool(value.as_bool().ok_or_else(|| bad("bad boolean"))?),
                Sort::Int => Value::Int(value.as_int().ok_or_else(|| bad("bad integer"))?),
            };
            model.values.insert(s, v);
        }
        if model.len() != sorts.len() {
            return Err(bad("missing values"));
        }
        Ok(model)
    }

    /// Excludes the model's valuation of `symbols` from future checks.
    pub fn block(&mut self, m: &SolverModel, symbols: &[SymbolRef]) -> Result<(), SmtError> {
        for s in symbols {
            if let SymbolKind::ModelVar(v) = s.kind {
                let bounded = matches!(self.var_bounds.get(&v), Some((Some(_), Some(_))));
                if self.var_sorts.get(&v) == Some(&Sort::Int) && !bounded {
                    return Err(SmtError::UnboundedBlock(*s));
                }
            }
            if m.get(*s).is_none() {
                return Err(SmtError::Undeclared(*s));
            }
        }
        self.assert_formula(&Formula::not(m.pin(symbols)))
    }

    /// Clears all assertions and declarations, keeping the process.
    pub fn reset(&mut self) -> Result<(), SmtError> {
        self.command("(reset)")?;
        self.declared = vec![BTreeMap::new()];
        self.model_ready = false;
        self.stats.resets += 1;
        self.handshake()
    }

    fn log(&mut self, line: &str) {
        if let Some(t) = &mut self.transcript {
            let _ = writeln!(t, "{line}");
        }
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        if self.dead {
            return Err(SmtError::Crash("session already failed".into()));
        }
        self.log(text);
        self.stats.bytes_sent += text.len() + 1;
        let r = writeln!(self.stdin, "{text}").and_then(|_| self.stdin.flush());
        if r.is_err() {
            return Err(self.crashed());
        }
        Ok(())
    }

    fn crashed(&mut self) -> SmtError {
        self.dead = true;
        let mut err = String::new();
        if let Some(e) = self.child.stderr.as_mut() {
            let _ = e.read_to_string(&mut err);
        }
        SmtError::Crash(err.trim().to_string())
    }

    /// Reads one complete response: a balanced s-expression or a bare word.
    fn read_response(&mut self) -> Result<String, SmtError> {
        let mut acc = String::new();
        loop {
            let mut line = String::new();
            let n = self.stdout.read_line(&mut line)?;
            if n == 0 {
                return Err(self.crashed());
            }
            if acc.is_empty() && line.trim().is_empty() {
                continue;
            }
            acc.push_str(&line);
            if sexp::paren_balance(&acc) <= 0 {
                break;
            }
        }
        let resp = acc.trim().to_string();
        for l in resp.lines() {
            self.log(&format!("; {l}"));
        }
        if resp.starts_with("(error") {
            let msg = sexp::parse(&resp)
                .ok()
                .and_then(|e| {
                    e.as_list()
                        .and_then(|l| l.get(1))
                        .and_then(|m| m.as_atom().map(|a| a.trim_matches('"').to_string()))
                })
                .unwrap_or_else(|| resp.clone());
            return Err(SmtError::Solver(msg));
        }
        Ok(resp)
    }

    fn exchange(&mut self, text: &str) -> Result<String, SmtError> {
        self.send(text)?;
        self.read_response()
    }

    fn command(&mut self, text: &str) -> Result<(), SmtError> {
        let resp = self.exchange(text)?;
        if resp == "success" {
            Ok(())
        } else {
            Err(SmtError::Protocol {
                command: text.chars().take(80).collect(),
                response: resp,
            })
        }
    }
}

impl Drop for SolverSession {
    fn drop(&mut self) {
        if !self.dead {
            let _ = writeln!(self.stdin, "(exit)");
            let _ = self.stdin.flush();
        }
        if let Some(t) = &mut self.transcript {
            let _ = t.flush();
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn smt_int(i: i64) -> String {
    if i < 0 {
        format!("(- {})", i.unsigned_abs())
    } else {
        i.to_string()
    }
}

#[cfg(test)]
mod tests;
