//! Statechart data model, well-formedness checks and the explicit-state
//! operational semantics.
//!
//! A statechart is a tree of regions and states: every state lives in exactly
//! one region, every region belongs to a composite state or to the root. Ids
//! are dense indices in declaration order, which is also the canonical order
//! used for tie-breaking everywhere in the crate.

mod builder;
mod error_spec;
mod explore;
mod expr;
mod semantics;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagnostic::Diagnostic;

pub use builder::StatechartBuilder;
pub use error_spec::{ErrorSpec, VarBound};
pub use explore::{
    all_configurations, explore_explicit, legal_active_sets, reachable_layers, ExplicitOutcome,
};
pub use expr::{CmpOp, EvalError, Expr, HavocId, Sort, Value};
pub use semantics::{Configuration, Environment, Path, ReplayError, SemanticError};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(StateId);
id_type!(RegionId);
id_type!(VarId);
id_type!(EventId);
id_type!(TransitionId);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown state id {0}")]
    UnknownState(usize),
    #[error("unknown region id {0}")]
    UnknownRegion(usize),
    #[error("region `{0}` has no states")]
    EmptyRegion(String),
    #[error("variable `{0}` is unbounded; explicit exploration needs finite domains")]
    UnboundedVariable(String),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub region: RegionId,
    /// Child regions, in declaration order. Empty for simple states.
    pub regions: Vec<RegionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub name: String,
    /// Containing state, `None` for top-level regions.
    pub parent: Option<StateId>,
    pub states: Vec<StateId>,
    pub initial: StateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Bool,
    Int { lower: Option<i64>, upper: Option<i64> },
}

impl Domain {
    pub fn sort(self) -> Sort {
        match self {
            Domain::Bool => Sort::Bool,
            Domain::Int { .. } => Sort::Int,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Domain::Bool => true,
            Domain::Int { lower, upper } => lower.is_some() && upper.is_some(),
        }
    }

    pub fn contains(self, v: Value) -> bool {
        match (self, v) {
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::Int { lower, upper }, Value::Int(i)) => {
                lower.is_none_or(|l| i >= l) && upper.is_none_or(|u| i <= u)
            }
            _ => false,
        }
    }

    /// All values of a finite domain in ascending order.
    pub fn values(self) -> Option<Vec<Value>> {
        match self {
            Domain::Bool => Some(vec![Value::Bool(false), Value::Bool(true)]),
            Domain::Int {
                lower: Some(l),
                upper: Some(u),
            } => Some((l..=u).map(Value::Int).collect()),
            Domain::Int { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Domain,
    pub initial: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    /// Input events may be injected by the environment in open mode.
    pub input: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    None,
    Raise(EventId),
    Assign(VarId, Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub target: StateId,
    pub trigger: Option<EventId>,
    pub guard: Expr,
    pub action: Action,
}

/// Part of the hierarchy a transition may change when it fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Deepest region containing both source and target (as self or
    /// descendant of one of its states).
    Region(RegionId),
    /// Source and target sit in different top-level regions.
    Root,
}

/// Precomputed effect of a transition on the active-state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionEffect {
    pub scope: Scope,
    /// States deactivated when the transition fires (if active).
    pub exit: BTreeSet<StateId>,
    /// States active inside the scope afterwards.
    pub entry: BTreeSet<StateId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statechart {
    name: String,
    states: Vec<State>,
    regions: Vec<Region>,
    variables: Vec<VariableDecl>,
    events: Vec<EventDecl>,
    transitions: Vec<Transition>,
    top_regions: Vec<RegionId>,
    depth: Vec<usize>,
    ancestors: Vec<Vec<StateId>>,
    effects: Vec<TransitionEffect>,
}

impl Statechart {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn variables(&self) -> &[VariableDecl] {
        &self.variables
    }

    pub fn events(&self) -> &[EventDecl] {
        &self.events
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state(&self, s: StateId) -> &State {
        &self.states[s.0]
    }

    pub fn region(&self, r: RegionId) -> &Region {
        &self.regions[r.0]
    }

    pub fn variable(&self, v: VarId) -> &VariableDecl {
        &self.variables[v.0]
    }

    pub fn event(&self, e: EventId) -> &EventDecl {
        &self.events[e.0]
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn effect(&self, t: TransitionId) -> &TransitionEffect {
        &self.effects[t.0]
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn region_ids(&self) -> impl Iterator<Item = RegionId> + '_ {
        (0..self.regions.len()).map(RegionId)
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.variables.len()).map(VarId)
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len()).map(EventId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> + '_ {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn top_regions(&self) -> &[RegionId] {
        &self.top_regions
    }

    /// Regions directly inside a container (`None` is the root).
    pub fn container_regions(&self, container: Option<StateId>) -> &[RegionId] {
        match container {
            None => &self.top_regions,
            Some(s) => &self.states[s.0].regions,
        }
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(StateId)
    }

    pub fn region_id(&self, name: &str) -> Option<RegionId> {
        self.regions.iter().position(|r| r.name == name).map(RegionId)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.events.iter().position(|e| e.name == name).map(EventId)
    }

    fn check_state(&self, s: StateId) -> Result<(), ModelError> {
        if s.0 < self.states.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownState(s.0))
        }
    }

    /// Parent state of the state's region, `None` for top-level states.
    pub fn parent_state(&self, s: StateId) -> Option<StateId> {
        self.regions[self.states[s.0].region.0].parent
    }

    /// Ancestor states, innermost first. The root is not listed.
    pub fn ancestors(&self, s: StateId) -> Result<&[StateId], ModelError> {
        self.check_state(s)?;
        Ok(&self.ancestors[s.0])
    }

    /// Number of ancestor states plus one (top-level states have depth 1).
    pub fn depth(&self, s: StateId) -> Result<usize, ModelError> {
        self.check_state(s)?;
        Ok(self.depth[s.0])
    }

    /// Maximum state depth; zero only for the (impossible) empty chart.
    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self, s: StateId) -> bool {
        self.states[s.0].regions.is_empty()
    }

    pub fn is_ancestor(&self, a: StateId, s: StateId) -> bool {
        self.ancestors[s.0].contains(&a)
    }

    /// All states nested below `s`.
    pub fn state_descendants(&self, s: StateId) -> Result<BTreeSet<StateId>, ModelError> {
        self.check_state(s)?;
        let mut out = BTreeSet::new();
        for &r in &self.states[s.0].regions {
            self.collect_region(r, &mut out);
        }
        Ok(out)
    }

    /// All states in a region, at any depth.
    pub fn region_descendants(&self, r: RegionId) -> Result<BTreeSet<StateId>, ModelError> {
        if r.0 >= self.regions.len() {
            return Err(ModelError::UnknownRegion(r.0));
        }
        let mut out = BTreeSet::new();
        self.collect_region(r, &mut out);
        Ok(out)
    }

    fn collect_region(&self, r: RegionId, out: &mut BTreeSet<StateId>) {
        for &s in &self.regions[r.0].states {
            out.insert(s);
            for &sub in &self.states[s.0].regions {
                self.collect_region(sub, out);
            }
        }
    }

    /// Regions from the top level down to the region holding `s`.
    pub fn region_chain(&self, s: StateId) -> Vec<RegionId> {
        let mut chain: Vec<RegionId> = self.ancestors[s.0]
            .iter()
            .rev()
            .map(|a| self.states[a.0].region)
            .collect();
        chain.push(self.states[s.0].region);
        chain
    }

    /// Adds `s` and, recursively, the initial states of all its regions.
    pub fn default_completion(&self, s: StateId, out: &mut BTreeSet<StateId>) {
        out.insert(s);
        for &r in &self.states[s.0].regions {
            self.default_completion(self.regions[r.0].initial, out);
        }
    }

    pub fn has_finite_domains(&self) -> bool {
        self.variables.iter().all(|v| v.domain.is_finite())
    }

    /// Whether any guard or assignment contains an unconstrained value.
    pub fn has_havoc(&self) -> bool {
        self.transitions.iter().any(|t| {
            t.guard.has_havoc() || matches!(&t.action, Action::Assign(_, e) if e.has_havoc())
        })
    }

    /// Well-formedness diagnostics; empty when all invariants hold.
    pub fn validate(&self) -> Vec<Diagnostic> {
        builder::check_chart(self)
    }

    pub fn transition_label(&self, t: TransitionId) -> String {
        let tr = &self.transitions[t.0];
        format!(
            "{} -> {}",
            self.states[tr.source.0].name, self.states[tr.target.0].name
        )
    }

    /// Deepest region on both region chains, `None` when the endpoints sit
    /// in different top-level regions.
    fn common_region(&self, a: StateId, b: StateId) -> Option<RegionId> {
        self.region_chain(a)
            .into_iter()
            .zip(self.region_chain(b))
            .take_while(|(x, y)| x == y)
            .last()
            .map(|(r, _)| r)
    }

    /// Whether firing `t` exits or enters a composite state with parallel
    /// regions strictly inside the transition's scope. Only such transitions
    /// touch states outside the source and target branches.
    pub fn crosses_parallel_regions(&self, t: &Transition) -> bool {
        let Some(r) = self.common_region(t.source, t.target) else {
            return true;
        };
        let inside = |s: &StateId| self.region_chain(*s).contains(&r);
        [t.source, t.target].iter().any(|&end| {
            self.ancestors[end.0]
                .iter()
                .filter(|a| inside(a))
                .any(|a| self.states[a.0].regions.len() > 1)
        })
    }

    fn compute_effect(&self, t: &Transition) -> TransitionEffect {
        let trg_chain = self.region_chain(t.target);
        let common = self.common_region(t.source, t.target);
        let mut path: Vec<StateId> = self.ancestors[t.target.0].iter().rev().copied().collect();
        path.push(t.target);

        let mut entry = BTreeSet::new();
        let (scope, exit, roots) = match common {
            Some(r) => {
                let depth_of_r = trg_chain.iter().position(|x| *x == r).unwrap_or(0);
                let exit = {
                    let mut out = BTreeSet::new();
                    self.collect_region(r, &mut out);
                    out
                };
                (Scope::Region(r), exit, (vec![r], depth_of_r))
            }
            None => (
                Scope::Root,
                self.state_ids().collect(),
                (self.top_regions.clone(), 0),
            ),
        };
        let (scope_regions, path_start) = roots;
        for &r in &scope_regions {
            if self.regions[r.0].states.contains(&path[path_start]) {
                self.enter_path(&path[path_start..], &mut entry);
            } else {
                self.default_completion(self.regions[r.0].initial, &mut entry);
            }
        }
        TransitionEffect { scope, exit, entry }
    }

    fn enter_path(&self, path: &[StateId], out: &mut BTreeSet<StateId>) {
        let Some((&head, rest)) = path.split_first() else {
            return;
        };
        if rest.is_empty() {
            self.default_completion(head, out);
            return;
        }
        out.insert(head);
        for &r in &self.states[head.0].regions {
            if self.regions[r.0].states.contains(&rest[0]) {
                self.enter_path(rest, out);
            } else {
                self.default_completion(self.regions[r.0].initial, out);
            }
        }
    }
}
