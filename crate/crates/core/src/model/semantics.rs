use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Action, EvalError, EventId, StateId, Statechart, TransitionId, Value};

/// Snapshot of a running statechart: active states, active events and the
/// variable valuation (indexed by variable id).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub active: BTreeSet<StateId>,
    pub events: BTreeSet<EventId>,
    pub values: Vec<Value>,
}

/// How events reach the statechart.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Environment {
    /// Events appear only through `raise` actions.
    #[default]
    Closed,
    /// Before every step the environment may add any subset of the declared
    /// input events.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticError {
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("assignment of {value} to `{var}` leaves its domain")]
    OutOfBounds { var: String, value: Value },
    #[error("evaluating {what}: {source}")]
    Eval { what: String, source: EvalError },
    #[error("open environment with {0} input events is too large to enumerate")]
    TooManyInputs(usize),
}

/// A run from the initial configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub configurations: Vec<Configuration>,
    pub transitions: Vec<TransitionId>,
}

impl Path {
    pub fn new(initial: Configuration) -> Self {
        Path {
            configurations: vec![initial],
            transitions: Vec::new(),
        }
    }

    /// Number of fired transitions.
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn last(&self) -> &Configuration {
        self.configurations.last().expect("path has a configuration")
    }

    pub fn push(&mut self, t: TransitionId, c: Configuration) {
        self.transitions.push(t);
        self.configurations.push(c);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {index}: {reason}")]
pub struct ReplayError {
    pub index: usize,
    pub reason: String,
}

impl Statechart {
    pub fn initial_configuration(&self) -> Configuration {
        let mut active = BTreeSet::new();
        for &r in &self.top_regions {
            self.default_completion(self.regions[r.0].initial, &mut active);
        }
        Configuration {
            active,
            events: BTreeSet::new(),
            values: self.variables.iter().map(|v| v.initial).collect(),
        }
    }

    /// Checks the configuration invariants: one active state per region under
    /// an active container, none elsewhere, and a well-typed in-domain
    /// valuation.
    pub fn check_configuration(&self, c: &Configuration) -> Result<(), String> {
        if c.values.len() != self.variables.len() {
            return Err("valuation does not cover every variable".into());
        }
        for (v, decl) in c.values.iter().zip(&self.variables) {
            if !decl.domain.contains(*v) {
                return Err(format!("value {v} of `{}` is outside its domain", decl.name));
            }
        }
        if c.events.iter().any(|e| e.0 >= self.events.len()) {
            return Err("unknown active event".into());
        }
        if c.active.iter().any(|s| s.0 >= self.states.len()) {
            return Err("unknown active state".into());
        }
        for (ri, r) in self.regions.iter().enumerate() {
            let live = r.parent.is_none_or(|p| c.active.contains(&p));
            let n = r.states.iter().filter(|s| c.active.contains(s)).count();
            match (live, n) {
                (true, 1) | (false, 0) => {}
                (true, _) => {
                    return Err(format!(
                        "region `{}` (#{ri}) has {n} active states, expected exactly one",
                        r.name
                    ))
                }
                (false, _) => {
                    return Err(format!(
                        "region `{}` is inside an inactive state but has active states",
                        r.name
                    ))
                }
            }
        }
        Ok(())
    }

    fn eval_error(&self, t: TransitionId, source: EvalError) -> SemanticError {
        SemanticError::Eval {
            what: self.transition_label(t),
            source,
        }
    }

    /// Source active, trigger present, guard true. Domain bounds of an
    /// assignment are checked separately.
    fn fireable(&self, c: &Configuration, t: TransitionId) -> Result<bool, SemanticError> {
        let tr = &self.transitions[t.0];
        if !c.active.contains(&tr.source) {
            return Ok(false);
        }
        if let Some(e) = tr.trigger {
            if !c.events.contains(&e) {
                return Ok(false);
            }
        }
        tr.guard
            .eval_bool(&c.values)
            .map_err(|e| self.eval_error(t, e))
    }

    /// New value of the assigned variable, `Ok(None)` for other actions.
    fn assigned_value(
        &self,
        c: &Configuration,
        t: TransitionId,
    ) -> Result<Option<(usize, Value)>, SemanticError> {
        match &self.transitions[t.0].action {
            Action::Assign(v, e) => {
                let val = e.eval(&c.values).map_err(|err| self.eval_error(t, err))?;
                Ok(Some((v.0, val)))
            }
            _ => Ok(None),
        }
    }

    /// Transitions enabled in `c`, in declaration order. A transition whose
    /// assignment would leave the variable's domain is not enabled.
    pub fn enabled(&self, c: &Configuration) -> Result<Vec<TransitionId>, SemanticError> {
        let mut out = Vec::new();
        for t in self.transition_ids() {
            if !self.fireable(c, t)? {
                continue;
            }
            if let Some((v, val)) = self.assigned_value(c, t)? {
                if !self.variables[v].domain.contains(val) {
                    continue;
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    pub fn fire(&self, c: &Configuration, t: TransitionId) -> Result<Configuration, SemanticError> {
        if !self.fireable(c, t)? {
            return Err(SemanticError::NotEnabled(self.transition_label(t)));
        }
        let tr = &self.transitions[t.0];
        let mut values = c.values.clone();
        if let Some((v, val)) = self.assigned_value(c, t)? {
            if !self.variables[v].domain.contains(val) {
                return Err(SemanticError::OutOfBounds {
                    var: self.variables[v].name.clone(),
                    value: val,
                });
            }
            values[v] = val;
        }
        let effect = &self.effects[t.0];
        let mut active: BTreeSet<StateId> = c.active.difference(&effect.exit).copied().collect();
        active.extend(effect.entry.iter().copied());
        let mut events = c.events.clone();
        if let Some(e) = tr.trigger {
            events.remove(&e);
        }
        if let Action::Raise(e) = tr.action {
            events.insert(e);
        }
        Ok(Configuration {
            active,
            events,
            values,
        })
    }

    fn input_subsets(&self, env: Environment) -> Result<Vec<BTreeSet<EventId>>, SemanticError> {
        let inputs: Vec<EventId> = match env {
            Environment::Closed => Vec::new(),
            Environment::Open => self.event_ids().filter(|e| self.events[e.0].input).collect(),
        };
        if inputs.len() > 16 {
            return Err(SemanticError::TooManyInputs(inputs.len()));
        }
        Ok((0u32..(1 << inputs.len()))
            .map(|mask| {
                inputs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| *e)
                    .collect()
            })
            .collect())
    }

    /// One-step moves from `c` in canonical order (injected-event subset,
    /// then transition declaration order), without duplicate targets.
    pub fn steps(
        &self,
        c: &Configuration,
        env: Environment,
    ) -> Result<Vec<(TransitionId, Configuration)>, SemanticError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for injected in self.input_subsets(env)? {
            let mut pre = c.clone();
            pre.events.extend(injected);
            for t in self.enabled(&pre)? {
                let next = self.fire(&pre, t)?;
                if seen.insert(next.clone()) {
                    out.push((t, next));
                }
            }
        }
        Ok(out)
    }

    pub fn successors(
        &self,
        c: &Configuration,
        env: Environment,
    ) -> Result<BTreeSet<Configuration>, SemanticError> {
        Ok(self.steps(c, env)?.into_iter().map(|(_, c)| c).collect())
    }

    /// Checks that `path` starts in the initial configuration and that every
    /// step is a firing of the recorded transition.
    pub fn replay(&self, path: &Path, env: Environment) -> Result<(), ReplayError> {
        let fail = |index, reason: String| Err(ReplayError { index, reason });
        if path.configurations.len() != path.transitions.len() + 1 {
            return fail(0, "path has mismatched configuration and transition counts".into());
        }
        if path.configurations[0] != self.initial_configuration() {
            return fail(0, "path does not start in the initial configuration".into());
        }
        for (i, &t) in path.transitions.iter().enumerate() {
            if t.0 >= self.transitions.len() {
                return fail(i, format!("unknown transition #{}", t.0));
            }
            let cur = &path.configurations[i];
            let next = &path.configurations[i + 1];
            if let Err(msg) = self.check_configuration(next) {
                return fail(i + 1, msg);
            }
            let subsets = self.input_subsets(env).map_err(|e| ReplayError {
                index: i,
                reason: e.to_string(),
            })?;
            let mut matched = false;
            for injected in subsets {
                let mut pre = cur.clone();
                pre.events.extend(injected);
                match self.enabled(&pre) {
                    Ok(en) if en.contains(&t) => {}
                    Ok(_) => continue,
                    Err(e) => return fail(i, e.to_string()),
                }
                match self.fire(&pre, t) {
                    Ok(c) if &c == next => {
                        matched = true;
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => return fail(i, e.to_string()),
                }
            }
            if !matched {
                return fail(
                    i,
                    format!(
                        "firing {} does not produce the recorded configuration",
                        self.transition_label(t)
                    ),
                );
            }
        }
        Ok(())
    }

    pub fn replays(&self, path: &Path, env: Environment) -> bool {
        self.replay(path, env).is_ok()
    }
}
