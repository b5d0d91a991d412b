//! Solver-driven engines: three explorers (MON, MOP, OAO) and bounded model
//! checking.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::EncodingError;
use crate::formula::{EncodeOptions, SymbolRef, SymbolicChart};
use crate::model::{Configuration, Environment, ErrorSpec, Path, Statechart, TransitionId};
use crate::smt::{CheckResult, SmtError, SolverConfig, SolverModel, SolverSession};

#[cfg(test)]
mod tests;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Mon,
    Mop,
    Oao,
    Bmc,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Mon, Engine::Mop, Engine::Oao, Engine::Bmc];
    pub const EXPLORERS: [Engine; 3] = [Engine::Mon, Engine::Mop, Engine::Oao];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Mon => "mon",
            Engine::Mop => "mop",
            Engine::Oao => "oao",
            Engine::Bmc => "bmc",
        }
    }

    pub fn is_explorer(self) -> bool {
        self != Engine::Bmc
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown engine `{s}` (expected mon, mop, oao or bmc)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub timeout: Duration,
    pub config_limit: usize,
    pub k_max: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            timeout: Duration::from_secs(300),
            config_limit: 1_000_000,
            k_max: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub env: Environment,
    pub limits: Limits,
    pub solver: SolverConfig,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            env: Environment::Closed,
            limits: Limits::default(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Safe,
    Unsafe(Path),
    /// No error path up to this length; nothing is claimed beyond it.
    BoundExhausted(usize),
    ResourceExhausted(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Safe => "safe",
            Outcome::Unsafe(_) => "unsafe",
            Outcome::BoundExhausted(_) => "bound-exhausted",
            Outcome::ResourceExhausted(_) => "resource-exhausted",
        }
    }

    pub fn is_safe(&self) -> bool {
        matches!(self, Outcome::Safe)
    }

    pub fn is_unsafe(&self) -> bool {
        matches!(self, Outcome::Unsafe(_))
    }

    /// Agreement modulo bounded runs: a bound without error is consistent
    /// with `Safe`.
    pub fn agrees_with(&self, other: &Outcome) -> bool {
        let class = |o: &Outcome| match o {
            Outcome::Unsafe(_) => Some(true),
            Outcome::Safe | Outcome::BoundExhausted(_) => Some(false),
            Outcome::ResourceExhausted(_) => None,
        };
        class(self) == class(other)
    }

    pub fn path(&self) -> Option<&Path> {
        match self {
            Outcome::Unsafe(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub elapsed: Duration,
    pub iterations: usize,
    /// Largest number of configurations explored in one iteration.
    pub confs_max: Option<usize>,
    /// Configurations explored in the last iteration.
    pub confs_eve: Option<usize>,
    pub solver_queries: usize,
    /// How often the transition relation was sent to the solver.
    pub relation_assertions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: Stats,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("variable `{0}` is unbounded; explicit enumeration would not terminate")]
    UnboundedVariable(String),
    #[error("cannot decode solver model: {0}")]
    Decode(#[from] EncodingError),
    #[error("solver returned sat without naming a transition at step {0}")]
    NoTransition(usize),
}

/// Runs `engine` on `sc` against `spec`.
pub fn check(
    sc: &Statechart,
    spec: &ErrorSpec,
    engine: Engine,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    match engine {
        Engine::Mon => explore_mon(sc, spec, opts),
        Engine::Mop => explore_mop(sc, spec, opts),
        Engine::Oao => explore_oao(sc, spec, opts),
        Engine::Bmc => bmc(sc, spec, opts),
    }
}

/// Shared bookkeeping of the three explorers.
struct Explorer<'a> {
    sym: SymbolicChart<'a>,
    spec: &'a ErrorSpec,
    opts: &'a CheckOptions,
    start: Instant,
    parent: HashMap<Configuration, Option<(Configuration, TransitionId)>>,
    queue: VecDeque<Configuration>,
    stats: Stats,
    next_symbols: Vec<SymbolRef>,
    model_symbols: Vec<SymbolRef>,
}

enum Step {
    Continue,
    Done(Outcome),
}

impl<'a> Explorer<'a> {
    fn new(sc: &'a Statechart, spec: &'a ErrorSpec, opts: &'a CheckOptions) -> Result<Self, CheckError> {
        if let Some(v) = sc.variables().iter().find(|v| !v.domain.is_finite()) {
            return Err(CheckError::UnboundedVariable(v.name.clone()));
        }
        let sym = SymbolicChart::new(sc, EncodeOptions { env: opts.env, literal_target: false });
        let next_symbols = sym.config_symbols(1);
        let mut model_symbols = next_symbols.clone();
        model_symbols.extend(sym.selector_symbols(0));
        Ok(Explorer {
            sym,
            spec,
            opts,
            start: Instant::now(),
            parent: HashMap::new(),
            queue: VecDeque::new(),
            stats: Stats::default(),
            next_symbols,
            model_symbols,
        })
    }

    fn session(&self) -> Result<SolverSession, CheckError> {
        let cfg = self.opts.solver.clone().with_timeout(Some(self.opts.limits.timeout));
        let mut s = SolverSession::open(&cfg)?;
        s.register_variables(self.sym.chart());
        Ok(s)
    }

    /// Seeds the search; reports an error already in the initial configuration.
    fn seed(&mut self) -> Option<Outcome> {
        let init = self.sym.chart().initial_configuration();
        self.parent.insert(init.clone(), None);
        if self.spec.matches(&init) {
            return Some(Outcome::Unsafe(Path::new(init)));
        }
        self.queue.push_back(init);
        None
    }

    fn out_of_time(&self) -> Option<Outcome> {
        (self.start.elapsed() > self.opts.limits.timeout)
            .then(|| Outcome::ResourceExhausted(format!("timeout after {:?}", self.opts.limits.timeout)))
    }

    fn query(&mut self, s: &mut SolverSession) -> Result<Result<bool, Outcome>, CheckError> {
        self.stats.solver_queries += 1;
        Ok(match s.check()? {
            CheckResult::Sat => Ok(true),
            CheckResult::Unsat => Ok(false),
            CheckResult::Unknown(r) => Err(Outcome::ResourceExhausted(format!("solver returned unknown: {r}"))),
        })
    }

    /// Reads the successor from the current model and records it.
    fn take_successor(
        &mut self,
        s: &mut SolverSession,
        source: &Configuration,
    ) -> Result<(SolverModel, Step), CheckError> {
        let m = s.get_model(&self.model_symbols)?;
        let a = m.assignment();
        let next = self.sym.decode_configuration(&a, 1)?;
        let t = self.sym.fired_transition(&a, 0).ok_or(CheckError::NoTransition(0))?;
        if self.parent.contains_key(&next) {
            return Ok((m, Step::Continue));
        }
        if self.parent.len() >= self.opts.limits.config_limit {
            return Ok((
                m,
                Step::Done(Outcome::ResourceExhausted(format!(
                    "configuration limit {} reached",
                    self.opts.limits.config_limit
                ))),
            ));
        }
        self.parent.insert(next.clone(), Some((source.clone(), t)));
        if self.spec.matches(&next) {
            return Ok((m, Step::Done(Outcome::Unsafe(self.rebuild(next)))));
        }
        self.queue.push_back(next);
        Ok((m, Step::Continue))
    }

    /// Enumerates every successor of `source` in the current context.
    fn enumerate(&mut self, s: &mut SolverSession, source: &Configuration) -> Result<Step, CheckError> {
        s.assert_formula(&self.sym.config_constraint(source, 0)?)?;
        loop {
            match self.query(s)? {
                Err(o) => return Ok(Step::Done(o)),
                Ok(false) => return Ok(Step::Continue),
                Ok(true) => {}
            }
            let (m, step) = self.take_successor(s, source)?;
            if let Step::Done(o) = step {
                return Ok(Step::Done(o));
            }
            if let Some(o) = self.out_of_time() {
                return Ok(Step::Done(o));
            }
            s.block(&m, &self.next_symbols)?;
        }
    }

    fn rebuild(&self, last: Configuration) -> Path {
        let mut rev = vec![(last.clone(), None)];
        let mut cur = last;
        while let Some(Some((p, t))) = self.parent.get(&cur) {
            rev.push((p.clone(), Some(*t)));
            cur = p.clone();
        }
        rev.reverse();
        let mut path = Path::new(rev[0].0.clone());
        for w in rev.windows(2) {
            path.push(w[0].1.expect("edge label"), w[1].0.clone());
        }
        path
    }

    fn finish(mut self, outcome: Outcome) -> Verdict {
        let n = self.parent.len();
        self.stats.elapsed = self.start.elapsed();
        self.stats.iterations = 1;
        self.stats.confs_max = Some(n);
        self.stats.confs_eve = Some(n);
        Verdict {
            outcome,
            stats: self.stats,
        }
    }
}

/// Breadth-first exploration that rebuilds the solver context from scratch
/// for every configuration it expands.
pub fn explore_mon(sc: &Statechart, spec: &ErrorSpec, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let mut ex = Explorer::new(sc, spec, opts)?;
    if let Some(o) = ex.seed() {
        return Ok(ex.finish(o));
    }
    let mut s = ex.session()?;
    let relation = ex.sym.relation_with_selectors(0);
    while let Some(c) = ex.queue.pop_front() {
        if let Some(o) = ex.out_of_time() {
            return Ok(ex.finish(o));
        }
        s.reset()?;
        s.assert_formula(&relation)?;
        ex.stats.relation_assertions += 1;
        if let Step::Done(o) = ex.enumerate(&mut s, &c)? {
            return Ok(ex.finish(o));
        }
    }
    Ok(ex.finish(Outcome::Safe))
}

/// Like [`explore_mon`] but keeps the relation asserted and scopes each
/// source constraint with push/pop.
pub fn explore_mop(sc: &Statechart, spec: &ErrorSpec, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let mut ex = Explorer::new(sc, spec, opts)?;
    if let Some(o) = ex.seed() {
        return Ok(ex.finish(o));
    }
    let mut s = ex.session()?;
    s.assert_formula(&ex.sym.relation_with_selectors(0))?;
    ex.stats.relation_assertions += 1;
    while let Some(c) = ex.queue.pop_front() {
        if let Some(o) = ex.out_of_time() {
            return Ok(ex.finish(o));
        }
        s.push()?;
        let step = ex.enumerate(&mut s, &c)?;
        s.pop()?;
        if let Step::Done(o) = step {
            return Ok(ex.finish(o));
        }
    }
    Ok(ex.finish(Outcome::Safe))
}

/// Asks the solver for one new successor at a time. Every discovered
/// configuration is blocked permanently at the successor step, and a source
/// goes back to the end of the queue until it has no new successor left.
pub fn explore_oao(sc: &Statechart, spec: &ErrorSpec, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let mut ex = Explorer::new(sc, spec, opts)?;
    if let Some(o) = ex.seed() {
        return Ok(ex.finish(o));
    }
    let mut s = ex.session()?;
    s.assert_formula(&ex.sym.relation_with_selectors(0))?;
    ex.stats.relation_assertions += 1;
    let init = sc.initial_configuration();
    s.assert_formula(&crate::formula::Formula::not(ex.sym.config_constraint(&init, 1)?))?;
    while let Some(c) = ex.queue.pop_front() {
        if let Some(o) = ex.out_of_time() {
            return Ok(ex.finish(o));
        }
        s.push()?;
        s.assert_formula(&ex.sym.config_constraint(&c, 0)?)?;
        let found = match ex.query(&mut s)? {
            Err(o) => return Ok(ex.finish(o)),
            Ok(found) => found,
        };
        if !found {
            s.pop()?;
            continue;
        }
        let (m, step) = ex.take_successor(&mut s, &c)?;
        s.pop()?;
        if let Step::Done(o) = step {
            return Ok(ex.finish(o));
        }
        s.block(&m, &ex.next_symbols)?;
        ex.queue.push_back(c);
    }
    Ok(ex.finish(Outcome::Safe))
}

/// Bounded model checking for `k = 0..=k_max`; the first satisfiable bound
/// yields a shortest counterexample.
pub fn bmc(sc: &Statechart, spec: &ErrorSpec, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let start = Instant::now();
    let sym = SymbolicChart::new(sc, EncodeOptions { env: opts.env, literal_target: false });
    let cfg = opts.solver.clone().with_timeout(Some(opts.limits.timeout));
    let mut s = SolverSession::open(&cfg)?;
    s.register_variables(sc);
    let mut stats = Stats {
        iterations: 1,
        ..Stats::default()
    };
    let finish = |outcome, mut stats: Stats| {
        stats.elapsed = start.elapsed();
        Ok(Verdict { outcome, stats })
    };
    s.assert_formula(&sym.initial_formula())?;
    for k in 0..=opts.limits.k_max {
        if start.elapsed() > opts.limits.timeout {
            return finish(
                Outcome::ResourceExhausted(format!("timeout after {:?}", opts.limits.timeout)),
                stats,
            );
        }
        if k > 0 {
            s.assert_formula(&sym.relation_with_selectors(k - 1))?;
            stats.relation_assertions += 1;
        }
        s.push()?;
        s.assert_formula(&sym.error_formula(spec, k))?;
        stats.solver_queries += 1;
        match s.check()? {
            CheckResult::Unsat => {}
            CheckResult::Unknown(r) => {
                return finish(Outcome::ResourceExhausted(format!("solver returned unknown: {r}")), stats)
            }
            CheckResult::Sat => {
                let path = extract_path(&sym, &mut s, k)?;
                return finish(Outcome::Unsafe(path), stats);
            }
        }
        s.pop()?;
    }
    finish(Outcome::BoundExhausted(opts.limits.k_max), stats)
}

/// Decodes the length-`k` path of the current model.
pub(crate) fn extract_path(
    sym: &SymbolicChart<'_>,
    s: &mut SolverSession,
    k: usize,
) -> Result<Path, CheckError> {
    let mut symbols = Vec::new();
    for i in 0..=k {
        symbols.extend(sym.config_symbols(i));
        if i < k {
            symbols.extend(sym.selector_symbols(i));
        }
    }
    let a = s.get_model(&symbols)?.assignment();
    let mut path = Path::new(sym.decode_configuration(&a, 0)?);
    for i in 0..k {
        let t = sym.fired_transition(&a, i).ok_or(CheckError::NoTransition(i))?;
        path.push(t, sym.decode_configuration(&a, i + 1)?);
    }
    Ok(path)
}
