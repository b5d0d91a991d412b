use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    Action, Configuration, ErrorSpec, Expr, HavocId, Path, StateId, Statechart, StatechartBuilder,
    Transition, VarId,
};

/// Which parts of the chart the abstraction may hide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Hierarchy only; every variable stays visible.
    Stt,
    /// Hierarchy and variables.
    Gen,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Stt => "stt",
            Mode::Gen => "gen",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "stt" => Ok(Mode::Stt),
            "gen" => Ok(Mode::Gen),
            _ => Err(format!("unknown abstraction `{s}` (expected stt or gen)")),
        }
    }
}

/// The pair `(h_S, h_V)`. A state is *refined* when it maps to itself; all
/// other states map to their nearest refined ancestor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionFunction {
    refined: BTreeSet<StateId>,
    visible: BTreeSet<VarId>,
}

impl AbstractionFunction {
    /// Top-level states refined; variables visible according to `mode`.
    pub fn initial(sc: &Statechart, spec: &ErrorSpec, mode: Mode) -> Self {
        let refined = sc
            .top_regions()
            .iter()
            .flat_map(|r| sc.region(*r).states.iter().copied())
            .collect();
        let visible = match mode {
            Mode::Stt => sc.var_ids().collect(),
            Mode::Gen => spec.variables.iter().map(|b| b.var).collect(),
        };
        AbstractionFunction { refined, visible }
    }

    /// Every state refined and every variable visible.
    pub fn identity(sc: &Statechart) -> Self {
        AbstractionFunction {
            refined: sc.state_ids().collect(),
            visible: sc.var_ids().collect(),
        }
    }

    /// Builds an abstraction from explicit sets; `None` if the refined set is
    /// not closed under parents, misses a top-level state, or splits a region.
    pub fn from_parts(
        sc: &Statechart,
        refined: BTreeSet<StateId>,
        visible: BTreeSet<VarId>,
    ) -> Option<Self> {
        let h = AbstractionFunction { refined, visible };
        h.is_valid(sc).then_some(h)
    }

    pub fn is_valid(&self, sc: &Statechart) -> bool {
        sc.region_ids().all(|r| {
            let region = sc.region(r);
            let kept = region.states.iter().filter(|s| self.refined.contains(s)).count();
            let parent_kept = region.parent.is_none_or(|p| self.refined.contains(&p));
            if region.parent.is_none() {
                kept == region.states.len()
            } else {
                kept == 0 || (kept == region.states.len() && parent_kept)
            }
        }) && self.visible.iter().all(|v| v.0 < sc.variables().len())
    }

    pub fn is_refined(&self, s: StateId) -> bool {
        self.refined.contains(&s)
    }

    pub fn refined_states(&self) -> &BTreeSet<StateId> {
        &self.refined
    }

    pub fn is_visible(&self, v: VarId) -> bool {
        self.visible.contains(&v)
    }

    pub fn visible_vars(&self) -> &BTreeSet<VarId> {
        &self.visible
    }

    /// `h_S(s)`.
    pub fn map_state(&self, sc: &Statechart, s: StateId) -> StateId {
        if self.refined.contains(&s) {
            return s;
        }
        let mut cur = s;
        while let Some(p) = sc.parent_state(cur) {
            if self.refined.contains(&p) {
                return p;
            }
            cur = p;
        }
        s
    }

    /// True when every concrete state is refined and every variable visible.
    pub fn is_identity(&self, sc: &Statechart) -> bool {
        self.refined.len() == sc.states().len() && self.visible.len() == sc.variables().len()
    }

    /// Refined composite states whose children are still hidden.
    pub fn has_hidden_children(&self, sc: &Statechart, s: StateId) -> bool {
        sc.state(s)
            .regions
            .iter()
            .any(|r| sc.region(*r).states.iter().any(|c| !self.refined.contains(c)))
    }

    pub(crate) fn refine_children_of(&mut self, sc: &Statechart, s: StateId) -> Vec<StateId> {
        let mut added = Vec::new();
        for r in &sc.state(s).regions {
            for c in &sc.region(*r).states {
                if self.refined.insert(*c) {
                    added.push(*c);
                }
            }
        }
        added
    }

    pub(crate) fn make_visible(&mut self, v: VarId) -> bool {
        self.visible.insert(v)
    }
}

/// An abstract statechart together with the id correspondence to the
/// concrete one. Transitions keep their ids; events keep their ids.
#[derive(Debug, Clone)]
pub struct AbstractChart {
    pub chart: Statechart,
    /// Concrete state for each abstract state id.
    pub concrete_state: Vec<StateId>,
    /// Abstract state for each concrete *refined* state.
    abstract_state: Vec<Option<StateId>>,
    /// Abstract variable for each concrete variable, when visible.
    pub var_map: Vec<Option<VarId>>,
    /// Variable each havoc stands for.
    pub havoc_origin: Vec<VarId>,
}

impl AbstractChart {
    pub fn abstract_state(&self, concrete: StateId) -> Option<StateId> {
        self.abstract_state[concrete.0]
    }
}

/// Statechart keeping only refined states and visible variables. Each
/// occurrence of a hidden variable in a guard or assignment becomes a fresh
/// unconstrained value; assignments to hidden variables are dropped.
pub fn abstract_statechart(sc: &Statechart, h: &AbstractionFunction) -> AbstractChart {
    let mut b = StatechartBuilder::new(format!("{}_abs", sc.name()));
    let mut abstract_state = vec![None; sc.states().len()];
    let mut concrete_state = Vec::new();
    fn add_regions(
        sc: &Statechart,
        h: &AbstractionFunction,
        b: &mut StatechartBuilder,
        container: Option<StateId>,
        abs_parent: Option<StateId>,
        abstract_state: &mut Vec<Option<StateId>>,
        concrete_state: &mut Vec<StateId>,
    ) {
        for r in sc.container_regions(container) {
            let region = sc.region(*r);
            if !region.states.iter().all(|s| h.is_refined(*s)) {
                continue;
            }
            let ar = b.region(region.name.clone(), abs_parent);
            for s in &region.states {
                let a = b.state(sc.state(*s).name.clone(), ar);
                if *s == region.initial {
                    b.mark_initial(ar, a);
                }
                abstract_state[s.0] = Some(a);
                concrete_state.push(*s);
                add_regions(sc, h, b, Some(*s), Some(a), abstract_state, concrete_state);
            }
        }
    }
    add_regions(sc, h, &mut b, None, None, &mut abstract_state, &mut concrete_state);

    let mut var_map = vec![None; sc.variables().len()];
    for v in sc.var_ids().filter(|v| h.is_visible(*v)) {
        let d = sc.variable(v);
        var_map[v.0] = Some(b.variable(d.name.clone(), d.domain, d.initial));
    }
    for e in sc.events() {
        b.event(e.name.clone(), e.input);
    }

    let mut havoc_origin = Vec::new();
    let hide = |e: &Expr, havoc_origin: &mut Vec<VarId>| {
        e.map_vars(&mut |v| match var_map[v.0] {
            Some(av) => Expr::Var(av),
            None => {
                havoc_origin.push(v);
                Expr::Havoc(HavocId(havoc_origin.len() - 1), sc.variable(v).domain.sort())
            }
        })
    };
    for t in sc.transitions() {
        let map = |s: StateId| abstract_state[h.map_state(sc, s).0].expect("refined state is kept");
        let guard = hide(&t.guard, &mut havoc_origin);
        let action = match &t.action {
            Action::Assign(v, e) => match var_map[v.0] {
                Some(av) => Action::Assign(av, hide(e, &mut havoc_origin)),
                None => Action::None,
            },
            other => other.clone(),
        };
        b.transition(Transition {
            source: map(t.source),
            target: map(t.target),
            trigger: t.trigger,
            guard,
            action,
        });
    }
    let chart = b
        .build()
        .unwrap_or_else(|d| panic!("abstraction of a valid chart is valid: {d:?}"));
    AbstractChart {
        chart,
        concrete_state,
        abstract_state,
        var_map,
        havoc_origin,
    }
}

/// Image of a concrete configuration, in abstract ids.
pub fn abstract_config(
    sc: &Statechart,
    h: &AbstractionFunction,
    abs: &AbstractChart,
    c: &Configuration,
) -> Configuration {
    Configuration {
        active: c
            .active
            .iter()
            .map(|s| abs.abstract_state(h.map_state(sc, *s)).expect("refined state is kept"))
            .collect(),
        events: c.events.clone(),
        values: sc
            .var_ids()
            .filter(|v| abs.var_map[v.0].is_some())
            .map(|v| c.values[v.0])
            .collect(),
    }
}

/// Pointwise image of a concrete path; transitions keep their ids.
pub fn abstract_path(
    sc: &Statechart,
    h: &AbstractionFunction,
    abs: &AbstractChart,
    p: &Path,
) -> Path {
    Path {
        configurations: p
            .configurations
            .iter()
            .map(|c| abstract_config(sc, h, abs, c))
            .collect(),
        transitions: p.transitions.clone(),
    }
}

/// Error states mapped through `h_S` and bounds on hidden variables
/// dropped, in abstract ids. Never stronger than the concrete spec.
pub fn abstract_error_spec(
    sc: &Statechart,
    spec: &ErrorSpec,
    h: &AbstractionFunction,
    abs: &AbstractChart,
) -> ErrorSpec {
    let mut out = ErrorSpec {
        states: spec
            .states
            .iter()
            .map(|s| abs.abstract_state(h.map_state(sc, *s)).expect("refined state is kept"))
            .collect(),
        ..ErrorSpec::default()
    };
    for b in &spec.variables {
        if let Some(av) = abs.var_map[b.var.0] {
            out.variables.push(crate::model::VarBound { var: av, ..*b });
        }
    }
    out.events = spec.events.clone();
    out
}
