use std::collections::HashMap;

use super::{
    Action, Domain, EventDecl, EventId, Expr, Region, RegionId, Sort, State, StateId, Statechart,
    Transition, TransitionId, Value, VarId, VariableDecl,
};
use crate::diagnostic::{has_errors, Diagnostic};

#[derive(Debug, Clone)]
struct RegionDraft {
    name: String,
    parent: Option<StateId>,
    states: Vec<StateId>,
    initial: Vec<StateId>,
}

/// Incremental construction of a [`Statechart`]. Parents must be created
/// before their children, so the hierarchy is acyclic by construction.
#[derive(Debug, Clone)]
pub struct StatechartBuilder {
    name: String,
    states: Vec<(String, RegionId)>,
    regions: Vec<RegionDraft>,
    variables: Vec<VariableDecl>,
    events: Vec<EventDecl>,
    transitions: Vec<Transition>,
}

impl StatechartBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        StatechartBuilder {
            name: name.into(),
            states: Vec::new(),
            regions: Vec::new(),
            variables: Vec::new(),
            events: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn region(&mut self, name: impl Into<String>, parent: Option<StateId>) -> RegionId {
        self.regions.push(RegionDraft {
            name: name.into(),
            parent,
            states: Vec::new(),
            initial: Vec::new(),
        });
        RegionId(self.regions.len() - 1)
    }

    pub fn state(&mut self, name: impl Into<String>, region: RegionId) -> StateId {
        let id = StateId(self.states.len());
        self.states.push((name.into(), region));
        if let Some(r) = self.regions.get_mut(region.0) {
            r.states.push(id);
        }
        id
    }

    pub fn initial_state(&mut self, name: impl Into<String>, region: RegionId) -> StateId {
        let id = self.state(name, region);
        self.mark_initial(region, id);
        id
    }

    pub fn mark_initial(&mut self, region: RegionId, state: StateId) {
        if let Some(r) = self.regions.get_mut(region.0) {
            r.initial.push(state);
        }
    }

    pub fn variable(&mut self, name: impl Into<String>, domain: Domain, initial: Value) -> VarId {
        self.variables.push(VariableDecl {
            name: name.into(),
            domain,
            initial,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn int_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<i64>,
        upper: Option<i64>,
        initial: i64,
    ) -> VarId {
        self.variable(name, Domain::Int { lower, upper }, Value::Int(initial))
    }

    pub fn bool_var(&mut self, name: impl Into<String>, initial: bool) -> VarId {
        self.variable(name, Domain::Bool, Value::Bool(initial))
    }

    pub fn event(&mut self, name: impl Into<String>, input: bool) -> EventId {
        self.events.push(EventDecl {
            name: name.into(),
            input,
        });
        EventId(self.events.len() - 1)
    }

    pub fn transition(&mut self, t: Transition) -> TransitionId {
        self.transitions.push(t);
        TransitionId(self.transitions.len() - 1)
    }

    pub fn simple_transition(&mut self, source: StateId, target: StateId) -> TransitionId {
        self.transition(Transition {
            source,
            target,
            trigger: None,
            guard: Expr::tt(),
            action: Action::None,
        })
    }

    fn structural_diagnostics(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut seen: HashMap<&str, &'static str> = HashMap::new();
        let names = self
            .states
            .iter()
            .map(|(n, _)| (n.as_str(), "state"))
            .chain(self.regions.iter().map(|r| (r.name.as_str(), "region")))
            .chain(self.variables.iter().map(|v| (v.name.as_str(), "variable")))
            .chain(self.events.iter().map(|e| (e.name.as_str(), "event")));
        for (name, kind) in names {
            if let Some(prev) = seen.insert(name, kind) {
                diags.push(Diagnostic::error(format!(
                    "duplicate identifier `{name}` (declared as {prev} and {kind})"
                )));
            }
        }
        if !self.regions.iter().any(|r| r.parent.is_none()) {
            diags.push(Diagnostic::error("no top-level region"));
        }
        for r in &self.regions {
            if let Some(p) = r.parent {
                if p.0 >= self.states.len() {
                    diags.push(Diagnostic::error(format!(
                        "region `{}` has an unknown parent state",
                        r.name
                    )));
                }
            }
            if r.states.is_empty() {
                diags.push(Diagnostic::error(format!("region `{}` has no states", r.name)));
            }
            match r.initial.len() {
                0 if !r.states.is_empty() => diags.push(Diagnostic::error(format!(
                    "region `{}` has no initial state",
                    r.name
                ))),
                0 | 1 => {}
                _ => diags.push(Diagnostic::error(format!(
                    "region `{}` has {} initial states",
                    r.name,
                    r.initial.len()
                ))),
            }
            for i in &r.initial {
                if !r.states.contains(i) {
                    diags.push(Diagnostic::error(format!(
                        "initial state of region `{}` is not one of its states",
                        r.name
                    )));
                }
            }
        }
        for (name, r) in &self.states {
            if r.0 >= self.regions.len() {
                diags.push(Diagnostic::error(format!("state `{name}` has an unknown region")));
            }
        }
        diags
    }

    /// Finalizes the chart. Fails with all error diagnostics if any
    /// well-formedness invariant is violated; warnings are available through
    /// [`Statechart::validate`].
    pub fn build(self) -> Result<Statechart, Vec<Diagnostic>> {
        let diags = self.structural_diagnostics();
        if has_errors(&diags) {
            return Err(diags);
        }
        let regions: Vec<Region> = self
            .regions
            .iter()
            .map(|r| Region {
                name: r.name.clone(),
                parent: r.parent,
                states: r.states.clone(),
                initial: r.initial[0],
            })
            .collect();
        let mut states: Vec<State> = self
            .states
            .iter()
            .map(|(name, region)| State {
                name: name.clone(),
                region: *region,
                regions: Vec::new(),
            })
            .collect();
        let mut top_regions = Vec::new();
        for (i, r) in regions.iter().enumerate() {
            match r.parent {
                Some(p) => states[p.0].regions.push(RegionId(i)),
                None => top_regions.push(RegionId(i)),
            }
        }
        // Parents precede children in id order, but resolve iteratively to
        // reject anything that slipped through (cycles, forward references).
        let n = states.len();
        let mut ancestors: Vec<Option<Vec<StateId>>> = vec![None; n];
        let mut progress = true;
        while progress {
            progress = false;
            for s in 0..n {
                if ancestors[s].is_some() {
                    continue;
                }
                match regions[states[s].region.0].parent {
                    None => {
                        ancestors[s] = Some(Vec::new());
                        progress = true;
                    }
                    Some(p) => {
                        if let Some(pa) = &ancestors[p.0] {
                            let mut v = vec![p];
                            v.extend(pa.iter().copied());
                            ancestors[s] = Some(v);
                            progress = true;
                        }
                    }
                }
            }
        }
        if ancestors.iter().any(Option::is_none) {
            return Err(vec![Diagnostic::error("hierarchy contains a cycle")]);
        }
        let ancestors: Vec<Vec<StateId>> = ancestors.into_iter().map(Option::unwrap).collect();
        let depth = ancestors.iter().map(|a| a.len() + 1).collect();

        let mut sc = Statechart {
            name: self.name,
            states,
            regions,
            variables: self.variables,
            events: self.events,
            transitions: self.transitions,
            top_regions,
            depth,
            ancestors,
            effects: Vec::new(),
        };
        let diags = check_chart(&sc);
        if has_errors(&diags) {
            return Err(diags);
        }
        sc.effects = sc.transitions.iter().map(|t| sc.compute_effect(t)).collect();
        Ok(sc)
    }
}

fn check_expr(
    sc: &Statechart,
    e: &Expr,
    want: Sort,
    what: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let var_sort = |v: VarId| sc.variables.get(v.0).map(|d| d.domain.sort());
    match e.sort(&var_sort) {
        Ok(s) if s == want => {}
        Ok(s) => diags.push(Diagnostic::error(format!("{what}: expected {want}, found {s}"))),
        Err(msg) => diags.push(Diagnostic::error(format!("{what}: {msg}"))),
    }
    if !e.is_linear() {
        diags.push(Diagnostic::error(format!(
            "{what}: non-linear multiplication is not supported"
        )));
    }
}

/// Checks every statechart invariant and emits warnings for transitions that
/// leave or enter a composite state with parallel regions.
pub(super) fn check_chart(sc: &Statechart) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if sc.top_regions.is_empty() {
        diags.push(Diagnostic::error("no top-level region"));
    }
    for (i, r) in sc.regions.iter().enumerate() {
        if r.states.is_empty() {
            diags.push(Diagnostic::error(format!("region `{}` has no states", r.name)));
        }
        if !r.states.contains(&r.initial) {
            diags.push(Diagnostic::error(format!(
                "initial state of region `{}` is not one of its states",
                r.name
            )));
        }
        for s in &r.states {
            if sc.states.get(s.0).map(|st| st.region) != Some(RegionId(i)) {
                diags.push(Diagnostic::error(format!(
                    "region `{}` lists a state it does not contain",
                    r.name
                )));
            }
        }
    }
    for v in &sc.variables {
        if let Domain::Int {
            lower: Some(l),
            upper: Some(u),
        } = v.domain
        {
            if l > u {
                diags.push(Diagnostic::error(format!(
                    "variable `{}` has empty domain [{l}..{u}]",
                    v.name
                )));
                continue;
            }
        }
        if !v.domain.contains(v.initial) {
            diags.push(Diagnostic::error(format!(
                "initial value {} of variable `{}` is outside its domain",
                v.initial, v.name
            )));
        }
    }
    let n_states = sc.states.len();
    for (i, t) in sc.transitions.iter().enumerate() {
        if t.source.0 >= n_states || t.target.0 >= n_states {
            diags.push(Diagnostic::error(format!("transition #{i} references an unknown state")));
            continue;
        }
        let label = format!(
            "transition {} -> {}",
            sc.states[t.source.0].name, sc.states[t.target.0].name
        );
        if let Some(e) = t.trigger {
            if e.0 >= sc.events.len() {
                diags.push(Diagnostic::error(format!("{label}: unknown trigger event")));
            }
        }
        check_expr(sc, &t.guard, Sort::Bool, &format!("{label} guard"), &mut diags);
        match &t.action {
            Action::None => {}
            Action::Raise(e) => {
                if e.0 >= sc.events.len() {
                    diags.push(Diagnostic::error(format!("{label}: raises an unknown event")));
                }
            }
            Action::Assign(v, e) => match sc.variables.get(v.0) {
                None => diags.push(Diagnostic::error(format!("{label}: assigns an unknown variable"))),
                Some(decl) => check_expr(
                    sc,
                    e,
                    decl.domain.sort(),
                    &format!("{label} assignment to `{}`", decl.name),
                    &mut diags,
                ),
            },
        }
        if sc.crosses_parallel_regions(t) {
            diags.push(Diagnostic::warning(format!(
                "{label} crosses region boundaries; the common enclosing scope is re-entered"
            )));
        }
    }
    diags
}
