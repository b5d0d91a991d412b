use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{CmpOp, Configuration, EventId, StateId, Statechart, Value, VarId};

/// A comparison `var op value` inside an error specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarBound {
    pub var: VarId,
    pub op: CmpOp,
    pub value: Value,
}

impl VarBound {
    pub fn holds(&self, values: &[Value]) -> bool {
        match (values[self.var.0], self.value) {
            (Value::Int(a), Value::Int(b)) => self.op.holds(a, b),
            (Value::Bool(a), Value::Bool(b)) => self.op.holds(a, b),
            _ => false,
        }
    }
}

/// Conjunction of required active states, variable constraints and active
/// events. The empty specification matches every configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub states: BTreeSet<StateId>,
    pub variables: Vec<VarBound>,
    pub events: BTreeSet<EventId>,
}

impl ErrorSpec {
    pub fn states(states: impl IntoIterator<Item = StateId>) -> Self {
        ErrorSpec {
            states: states.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn with_bound(mut self, var: VarId, op: CmpOp, value: Value) -> Self {
        self.variables.push(VarBound { var, op, value });
        self
    }

    pub fn with_event(mut self, e: EventId) -> Self {
        self.events.insert(e);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty() && self.variables.is_empty() && self.events.is_empty()
    }

    pub fn matches(&self, c: &Configuration) -> bool {
        self.states.is_subset(&c.active)
            && self.events.is_subset(&c.events)
            && self.variables.iter().all(|b| b.holds(&c.values))
    }

    /// Human-readable form, e.g. `state B2c && var x == 1`.
    pub fn describe(&self, sc: &Statechart) -> String {
        let mut parts: Vec<String> = self
            .states
            .iter()
            .map(|s| format!("state {}", sc.state(*s).name))
            .collect();
        parts.extend(self.variables.iter().map(|b| {
            format!("var {} {} {}", sc.variable(b.var).name, b.op.symbol(), b.value)
        }));
        parts.extend(self.events.iter().map(|e| format!("event {}", sc.event(*e).name)));
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" && ")
        }
    }
}
