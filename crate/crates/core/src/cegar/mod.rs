//! Counterexample-guided abstraction refinement over hierarchy depth and
//! variable visibility.

mod abstraction;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use abstraction::{
    abstract_config, abstract_error_spec, abstract_path, abstract_statechart, AbstractChart,
    AbstractionFunction, Mode,
};

use crate::checkers::{self, extract_path, CheckError, CheckOptions, Engine, Outcome, Stats, Verdict};
use crate::formula::{bv_to_formula, var_equals_value, EncodeOptions, Formula, SymbolRef, SymbolicChart};
use crate::model::{Action, Configuration, ErrorSpec, Path, StateId, Statechart, VarId};
use crate::smt::{CheckResult, SolverSession};


#[derive(Debug, Error)]
pub enum CegarError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("solver returned unknown during concretization: {0}")]
    Unknown(String),
    #[error("abstract initial configuration has no concrete counterpart")]
    InitialMismatch,
    #[error("refinement stuck at {config}: every active state is refined and no hidden variable is involved, yet the abstract step has no concrete counterpart")]
    RefinementStuck { config: String },
}

impl From<crate::smt::SmtError> for CegarError {
    fn from(e: crate::smt::SmtError) -> Self {
        CegarError::Check(e.into())
    }
}

impl From<crate::encoding::EncodingError> for CegarError {
    fn from(e: crate::encoding::EncodingError) -> Self {
        CegarError::Check(e.into())
    }
}

/// Last abstract configuration up to which a spurious counterexample could
/// be matched by a concrete path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureConfiguration {
    /// In abstract ids.
    pub config: Configuration,
    pub index: usize,
    /// The prefix matched completely and only the error predicate failed.
    pub at_error: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Concretization {
    Concrete(Path),
    Failure(FailureConfiguration),
}

/// Constraint fixing the abstract image of the concrete configuration at
/// `step` to `c` (abstract ids).
pub fn abstract_constraint(
    sym: &SymbolicChart<'_>,
    abs: &AbstractChart,
    c: &Configuration,
    step: usize,
) -> Formula {
    let sc = sym.chart();
    let mut parts: Vec<Formula> = c
        .active
        .iter()
        .map(|a| bv_to_formula(&sym.layout().encode_state(abs.concrete_state[a.0]), step))
        .collect();
    for e in sc.event_ids() {
        parts.push(Formula::lit(SymbolRef::flag(e, step), c.events.contains(&e)));
    }
    for v in sc.var_ids() {
        if let Some(av) = abs.var_map[v.0] {
            parts.push(var_equals_value(v, step, c.values[av.0]));
        }
    }
    Formula::and(parts)
}

/// Searches for a concrete path whose image is a growing prefix of
/// `abstract_path`, one solver query per prefix length.
pub fn concretize(
    sc: &Statechart,
    spec: &ErrorSpec,
    abs: &AbstractChart,
    abstract_path: &Path,
    opts: &CheckOptions,
    stats: &mut Stats,
) -> Result<Concretization, CegarError> {
    let sym = SymbolicChart::new(sc, EncodeOptions { env: opts.env, literal_target: false });
    let mut s = SolverSession::open(&opts.solver.clone().with_timeout(Some(opts.limits.timeout)))?;
    s.register_variables(sc);
    s.assert_formula(&sym.initial_formula())?;
    let query = |s: &mut SolverSession, stats: &mut Stats| -> Result<bool, CegarError> {
        stats.solver_queries += 1;
        match s.check()? {
            CheckResult::Sat => Ok(true),
            CheckResult::Unsat => Ok(false),
            CheckResult::Unknown(r) => Err(CegarError::Unknown(r)),
        }
    };
    let n = abstract_path.len();
    for (i, c) in abstract_path.configurations.iter().enumerate() {
        if i > 0 {
            s.assert_formula(&sym.relation_with_selectors(i - 1))?;
            stats.relation_assertions += 1;
        }
        s.assert_formula(&abstract_constraint(&sym, abs, c, i))?;
        if !query(&mut s, stats)? {
            if i == 0 {
                return Err(CegarError::InitialMismatch);
            }
            return Ok(Concretization::Failure(FailureConfiguration {
                config: abstract_path.configurations[i - 1].clone(),
                index: i - 1,
                at_error: false,
            }));
        }
    }
    s.assert_formula(&sym.error_formula(spec, n))?;
    if !query(&mut s, stats)? {
        return Ok(Concretization::Failure(FailureConfiguration {
            config: abstract_path.last().clone(),
            index: n,
            at_error: true,
        }));
    }
    Ok(Concretization::Concrete(extract_path(&sym, &mut s, n)?))
}

/// What one refinement step changed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub states: Vec<StateId>,
    pub variables: Vec<VarId>,
}

impl Refinement {
    pub fn is_empty(&self) -> bool {
        self.states.is_empty() && self.variables.is_empty()
    }
}

/// Expands one more hierarchy level below the active states of the failure
/// configuration; once those are fully refined, GEN mode reveals the hidden
/// variables read by transitions leaving them.
pub fn refine(
    sc: &Statechart,
    h: &AbstractionFunction,
    abs: &AbstractChart,
    fc: &FailureConfiguration,
    mode: Mode,
) -> Result<(AbstractionFunction, Refinement), CegarError> {
    let mut next = h.clone();
    let mut r = Refinement::default();
    let active: BTreeSet<StateId> = fc.config.active.iter().map(|a| abs.concrete_state[a.0]).collect();
    for s in &active {
        r.states.extend(next.refine_children_of(sc, *s));
    }
    if r.is_empty() && mode == Mode::Gen {
        let read = |t: &crate::model::Transition| {
            let mut vs = t.guard.variables();
            if let Action::Assign(_, e) = &t.action {
                vs.extend(e.variables());
            }
            vs
        };
        let local: BTreeSet<VarId> = sc
            .transitions()
            .iter()
            .filter(|t| active.contains(&t.source))
            .flat_map(read)
            .filter(|v| !h.is_visible(*v))
            .collect();
        let candidates = if local.is_empty() {
            sc.transitions()
                .iter()
                .flat_map(read)
                .filter(|v| !h.is_visible(*v))
                .collect()
        } else {
            local
        };
        for v in candidates {
            if next.make_visible(v) {
                r.variables.push(v);
            }
        }
    }
    if r.is_empty() {
        let names: Vec<&str> = active.iter().map(|s| sc.state(*s).name.as_str()).collect();
        return Err(CegarError::RefinementStuck {
            config: format!("{{{}}}", names.join(", ")),
        });
    }
    r.states.sort();
    Ok((next, r))
}

/// Progress record emitted once per iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub abstract_states: usize,
    pub visible_variables: Vec<String>,
    pub abstract_verdict: String,
    pub abstract_path_length: Option<usize>,
    pub concretization: Option<String>,
    pub refined_states: Vec<String>,
    pub revealed_variables: Vec<String>,
    pub confs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CegarResult {
    pub verdict: Verdict,
    pub abstraction: AbstractionFunction,
    pub records: Vec<IterationRecord>,
    /// Number of refinement steps performed.
    pub refinements: usize,
}

/// The abstraction refinement loop. `on_iteration` sees every record as
/// soon as it is complete.
pub fn cegar_loop(
    sc: &Statechart,
    spec: &ErrorSpec,
    mode: Mode,
    engine: Engine,
    opts: &CheckOptions,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<CegarResult, CegarError> {
    let start = Instant::now();
    let mut h = AbstractionFunction::initial(sc, spec, mode);
    let mut stats = Stats::default();
    let mut records = Vec::new();
    let mut refinements = 0;
    let done = |outcome: Outcome, mut stats: Stats, h, records, refinements| {
        stats.elapsed = start.elapsed();
        Ok(CegarResult {
            verdict: Verdict { outcome, stats },
            abstraction: h,
            records,
            refinements,
        })
    };
    loop {
        stats.iterations += 1;
        let remaining = opts.limits.timeout.saturating_sub(start.elapsed());
        if remaining.is_zero() {
            let o = Outcome::ResourceExhausted(format!("timeout after {:?}", opts.limits.timeout));
            return done(o, stats, h, records, refinements);
        }
        let mut inner = opts.clone();
        inner.limits.timeout = remaining.max(Duration::from_millis(1));

        let abs = abstract_statechart(sc, &h);
        let aspec = abstract_error_spec(sc, spec, &h, &abs);
        let v = checkers::check(&abs.chart, &aspec, engine, &inner)?;
        stats.solver_queries += v.stats.solver_queries;
        stats.relation_assertions += v.stats.relation_assertions;
        if let Some(n) = v.stats.confs_max {
            stats.confs_max = Some(stats.confs_max.unwrap_or(0).max(n));
            stats.confs_eve = Some(n);
        }
        let mut rec = IterationRecord {
            iteration: stats.iterations,
            abstract_states: abs.chart.states().len(),
            visible_variables: h
                .visible_vars()
                .iter()
                .map(|v| sc.variable(*v).name.clone())
                .collect(),
            abstract_verdict: v.outcome.label().to_string(),
            abstract_path_length: v.outcome.path().map(Path::len),
            concretization: None,
            refined_states: Vec::new(),
            revealed_variables: Vec::new(),
            confs: v.stats.confs_max,
        };
        let apath = match v.outcome {
            Outcome::Unsafe(p) => p,
            other => {
                on_iteration(&rec);
                records.push(rec);
                return done(other, stats, h, records, refinements);
            }
        };
        match concretize(sc, spec, &abs, &apath, &inner, &mut stats)? {
            Concretization::Concrete(p) => {
                rec.concretization = Some("concrete".into());
                on_iteration(&rec);
                records.push(rec);
                return done(Outcome::Unsafe(p), stats, h, records, refinements);
            }
            Concretization::Failure(fc) => {
                rec.concretization = Some(if fc.at_error {
                    format!("failure at {} (error predicate)", fc.index)
                } else {
                    format!("failure at {}", fc.index)
                });
                let (next, r) = match refine(sc, &h, &abs, &fc, mode) {
                    Ok(x) => x,
                    Err(e) => {
                        on_iteration(&rec);
                        return Err(e);
                    }
                };
                rec.refined_states = r.states.iter().map(|s| sc.state(*s).name.clone()).collect();
                rec.revealed_variables = r
                    .variables
                    .iter()
                    .map(|v| sc.variable(*v).name.clone())
                    .collect();
                on_iteration(&rec);
                records.push(rec);
                refinements += 1;
                h = next;
            }
        }
    }
}
