//! Formula IR and the encoding of a statechart as a symbolic transition
//! system: configurations become state bits, event flags and variable copies
//! indexed by step, transitions become formulas between consecutive steps.

mod ir;

use std::collections::BTreeSet;

pub use ir::{Assignment, Formula, SymbolKind, SymbolRef, Term};

use crate::encoding::{EncodingError, EncodingLayout, Tern, TernaryBitVector};
use crate::model::{
    Action, CmpOp, Configuration, Environment, ErrorSpec, EventId, Expr, Sort, Statechart,
    TransitionId, Value, VarBound, VarId,
};

/// `⋀ lit(bv[i], i)` at `step`: `¬v` for 0, `v` for 1, `⊤` for X. The `⊤`
/// conjuncts are kept; an all-X vector is `⊤` and a one-bit vector is its
/// literal.
pub fn bv_to_formula(bv: &TernaryBitVector, step: usize) -> Formula {
    let lit = |i: usize, t: Tern| match t {
        Tern::Zero => Formula::not(Formula::atom(SymbolRef::bit(i, step))),
        Tern::One => Formula::atom(SymbolRef::bit(i, step)),
        Tern::X => Formula::True,
    };
    if bv.len() == 1 {
        return lit(0, bv.get(0));
    }
    if bv.x_count() == bv.len() {
        return Formula::True;
    }
    Formula::And(bv.bits().iter().enumerate().map(|(i, t)| lit(i, *t)).collect())
}

fn var_sort(sc: &Statechart, v: VarId) -> Sort {
    sc.variable(v).domain.sort()
}

/// Integer expression with every variable indexed at `step`.
pub fn expr_term(e: &Expr, step: usize) -> Term {
    let t = |x: &Expr| Box::new(expr_term(x, step));
    match e {
        Expr::Int(i) => Term::Const(*i),
        Expr::Var(v) => Term::Sym(SymbolRef::var(*v, step)),
        Expr::Havoc(h, _) => Term::Sym(SymbolRef::new(SymbolKind::Havoc(*h), step)),
        Expr::Neg(a) => Term::Neg(t(a)),
        Expr::Add(a, b) => Term::Add(t(a), t(b)),
        Expr::Sub(a, b) => Term::Sub(t(a), t(b)),
        Expr::Mul(a, b) => Term::Mul(t(a), t(b)),
        Expr::Bool(_) | Expr::Not(_) | Expr::And(..) | Expr::Or(..) | Expr::Cmp(..) => {
            panic!("boolean expression used as integer term")
        }
    }
}

fn is_bool(sc: &Statechart, e: &Expr) -> bool {
    e.sort(&|v| sc.variables().get(v.0).map(|d| d.domain.sort())) == Ok(Sort::Bool)
}

/// Guard with every variable indexed at `step`.
pub fn guard_formula(sc: &Statechart, g: &Expr, step: usize) -> Formula {
    let f = |x: &Expr| guard_formula(sc, x, step);
    match g {
        Expr::Bool(true) => Formula::True,
        Expr::Bool(false) => Formula::False,
        Expr::Var(v) => Formula::atom(SymbolRef::var(*v, step)),
        Expr::Havoc(h, _) => Formula::atom(SymbolRef::new(SymbolKind::Havoc(*h), step)),
        Expr::Not(a) => Formula::not(f(a)),
        Expr::And(a, b) => Formula::And(vec![f(a), f(b)]),
        Expr::Or(a, b) => Formula::Or(vec![f(a), f(b)]),
        Expr::Cmp(op, a, b) if is_bool(sc, a) => {
            let eq = Formula::iff(f(a), f(b));
            match op {
                CmpOp::Eq => eq,
                _ => Formula::not(eq),
            }
        }
        Expr::Cmp(op, a, b) => Formula::Cmp(*op, expr_term(a, step), expr_term(b, step)),
        Expr::Int(_) | Expr::Neg(_) | Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) => {
            panic!("integer expression used as guard")
        }
    }
}

/// `v_{i+1} = ψ_i` for assignments, the raised flag at `i+1`, `⊤` otherwise.
pub fn action_formula(sc: &Statechart, a: &Action, step: usize) -> Formula {
    match a {
        Action::None => Formula::True,
        Action::Raise(e) => Formula::atom(SymbolRef::flag(*e, step + 1)),
        Action::Assign(v, rhs) => var_equals_expr(sc, *v, step + 1, rhs, step),
    }
}

fn var_equals_expr(sc: &Statechart, v: VarId, at: usize, rhs: &Expr, step: usize) -> Formula {
    match var_sort(sc, v) {
        Sort::Bool => Formula::iff(
            Formula::atom(SymbolRef::var(v, at)),
            guard_formula(sc, rhs, step),
        ),
        Sort::Int => Formula::Cmp(
            CmpOp::Eq,
            Term::Sym(SymbolRef::var(v, at)),
            expr_term(rhs, step),
        ),
    }
}

pub fn var_equals_value(v: VarId, step: usize, value: Value) -> Formula {
    match value {
        Value::Bool(b) => Formula::lit(SymbolRef::var(v, step), b),
        Value::Int(i) => Formula::Cmp(CmpOp::Eq, Term::Sym(SymbolRef::var(v, step)), Term::Const(i)),
    }
}

fn var_frame(sc: &Statechart, v: VarId, step: usize) -> Formula {
    match var_sort(sc, v) {
        Sort::Bool => Formula::iff(
            Formula::atom(SymbolRef::var(v, step + 1)),
            Formula::atom(SymbolRef::var(v, step)),
        ),
        Sort::Int => Formula::Cmp(
            CmpOp::Eq,
            Term::Sym(SymbolRef::var(v, step + 1)),
            Term::Sym(SymbolRef::var(v, step)),
        ),
    }
}

pub fn bound_formula(b: &VarBound, step: usize) -> Formula {
    match b.value {
        Value::Int(i) => Formula::Cmp(b.op, Term::Sym(SymbolRef::var(b.var, step)), Term::Const(i)),
        Value::Bool(x) => {
            let eq = Formula::lit(SymbolRef::var(b.var, step), x);
            match b.op {
                CmpOp::Eq => eq,
                _ => Formula::not(eq),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    pub env: Environment,
    /// Clamp every `X` of the target vector to `0`, including slots of
    /// parallel siblings. Only for comparison with the scoped rule.
    pub literal_target: bool,
}

/// A statechart together with its layout, producing the step-indexed
/// formulas used by the engines.
#[derive(Debug, Clone)]
pub struct SymbolicChart<'a> {
    sc: &'a Statechart,
    layout: EncodingLayout,
    opts: EncodeOptions,
}

impl<'a> SymbolicChart<'a> {
    pub fn new(sc: &'a Statechart, opts: EncodeOptions) -> Self {
        SymbolicChart {
            sc,
            layout: EncodingLayout::build(sc),
            opts,
        }
    }

    pub fn chart(&self) -> &'a Statechart {
        self.sc
    }

    pub fn layout(&self) -> &EncodingLayout {
        &self.layout
    }

    pub fn options(&self) -> EncodeOptions {
        self.opts
    }

    fn is_injectable(&self, e: EventId) -> bool {
        self.opts.env == Environment::Open && self.sc.event(e).input
    }

    /// Event `e` is present for the step: active, or injected in open mode.
    fn available(&self, e: EventId, step: usize) -> Formula {
        let flag = Formula::atom(SymbolRef::flag(e, step));
        if self.is_injectable(e) {
            Formula::Or(vec![
                flag,
                Formula::atom(SymbolRef::new(SymbolKind::Injected(e), step)),
            ])
        } else {
            flag
        }
    }

    pub fn target_vector(&self, t: TransitionId) -> TernaryBitVector {
        let tr = self.sc.transition(t);
        if self.opts.literal_target {
            return self.layout.encode_target_literal(tr.target);
        }
        let mut v = self.layout.encode_state(tr.target);
        v.zero_x_at(self.layout.scope_positions(self.sc.effect(t).scope));
        v
    }

    /// Equalities for everything `t` leaves untouched: state bits outside its
    /// scope, unassigned variables, and events other than its trigger and
    /// raised event. The trigger is consumed unless raised again.
    pub fn frame_conditions(&self, t: TransitionId, step: usize) -> Formula {
        let tr = self.sc.transition(t);
        let mut parts = Vec::new();
        let scope: BTreeSet<usize> = self
            .layout
            .scope_positions(self.sc.effect(t).scope)
            .into_iter()
            .collect();
        for p in (0..self.layout.width()).filter(|p| !scope.contains(p)) {
            parts.push(Formula::iff(
                Formula::atom(SymbolRef::bit(p, step + 1)),
                Formula::atom(SymbolRef::bit(p, step)),
            ));
        }
        let assigned = match &tr.action {
            Action::Assign(v, _) => Some(*v),
            _ => None,
        };
        for v in self.sc.var_ids().filter(|v| Some(*v) != assigned) {
            parts.push(var_frame(self.sc, v, step));
        }
        let raised = match tr.action {
            Action::Raise(e) => Some(e),
            _ => None,
        };
        for e in self.sc.event_ids() {
            if Some(e) == raised {
                continue;
            }
            let next = Formula::atom(SymbolRef::flag(e, step + 1));
            if Some(e) == tr.trigger {
                parts.push(Formula::not(next));
            } else {
                parts.push(Formula::iff(next, self.available(e, step)));
            }
        }
        Formula::and(parts)
    }

    pub fn transition_formula(&self, t: TransitionId, step: usize) -> Formula {
        let tr = self.sc.transition(t);
        Formula::and(vec![
            bv_to_formula(&self.layout.encode_state(tr.source), step),
            tr.trigger
                .map(|e| self.available(e, step))
                .unwrap_or(Formula::True),
            guard_formula(self.sc, &tr.guard, step),
            bv_to_formula(&self.target_vector(t), step + 1),
            action_formula(self.sc, &tr.action, step),
            self.frame_conditions(t, step),
        ])
    }

    /// `⋁_t φ_t` at `step`; `⊥` for a chart without transitions.
    pub fn relation_formula(&self, step: usize) -> Formula {
        let parts: Vec<Formula> = self
            .sc
            .transition_ids()
            .map(|t| self.transition_formula(t, step))
            .collect();
        if parts.is_empty() {
            Formula::False
        } else {
            Formula::Or(parts)
        }
    }

    /// Same relation with a selector per transition, `(sel_t ⇒ φ_t) ∧ ⋁ sel_t`,
    /// so a model also names the transition taken.
    pub fn relation_with_selectors(&self, step: usize) -> Formula {
        let mut parts = Vec::new();
        let mut selectors = Vec::new();
        for t in self.sc.transition_ids() {
            let sel = Formula::atom(SymbolRef::new(SymbolKind::Fired(t), step));
            parts.push(Formula::implies(sel.clone(), self.transition_formula(t, step)));
            selectors.push(sel);
        }
        parts.push(Formula::or(selectors));
        Formula::and(parts)
    }

    /// Initial configuration at step 0 with padding bits zeroed.
    pub fn initial_formula(&self) -> Formula {
        let c = self.sc.initial_configuration();
        self.config_constraint(&c, 0)
            .expect("initial configuration is consistent")
    }

    /// Initial formula and `k` copies of the relation: models are exactly the
    /// paths of length `k`.
    pub fn unfold(&self, k: usize) -> Formula {
        let mut parts = vec![self.initial_formula()];
        parts.extend((0..k).map(|i| self.relation_with_selectors(i)));
        Formula::and(parts)
    }

    pub fn error_formula(&self, spec: &ErrorSpec, step: usize) -> Formula {
        let mut parts: Vec<Formula> = spec
            .states
            .iter()
            .map(|s| bv_to_formula(&self.layout.encode_state(*s), step))
            .collect();
        parts.extend(spec.variables.iter().map(|b| bound_formula(b, step)));
        parts.extend(
            spec.events
                .iter()
                .map(|e| Formula::atom(SymbolRef::flag(*e, step))),
        );
        Formula::and(parts)
    }

    /// Pins the active set (padding zeroed), every event flag and every
    /// variable at `step`.
    pub fn config_constraint(&self, c: &Configuration, step: usize) -> Result<Formula, EncodingError> {
        let bits = self.layout.encode_active_set(&c.active)?.zero_all_x();
        let mut parts = vec![bv_to_formula(&bits, step)];
        for e in self.sc.event_ids() {
            parts.push(Formula::lit(SymbolRef::flag(e, step), c.events.contains(&e)));
        }
        for (v, val) in self.sc.var_ids().zip(&c.values) {
            parts.push(var_equals_value(v, step, *val));
        }
        Ok(Formula::and(parts))
    }

    /// Like [`config_constraint`](Self::config_constraint) but only over the
    /// live code slots, so it matches any padding.
    pub fn live_constraint(&self, c: &Configuration, step: usize) -> Result<Formula, EncodingError> {
        let bits = self.layout.encode_active_set(&c.active)?;
        let mut parts = Vec::new();
        for p in self.layout.live_positions(&c.active) {
            if let Some(b) = bits.get(p).as_bool() {
                parts.push(Formula::lit(SymbolRef::bit(p, step), b));
            }
        }
        for e in self.sc.event_ids() {
            parts.push(Formula::lit(SymbolRef::flag(e, step), c.events.contains(&e)));
        }
        for (v, val) in self.sc.var_ids().zip(&c.values) {
            parts.push(var_equals_value(v, step, *val));
        }
        Ok(Formula::and(parts))
    }

    /// Symbols describing the configuration at `step`.
    pub fn config_symbols(&self, step: usize) -> Vec<SymbolRef> {
        let mut out: Vec<SymbolRef> = (0..self.layout.width())
            .map(|p| SymbolRef::bit(p, step))
            .collect();
        out.extend(self.sc.event_ids().map(|e| SymbolRef::flag(e, step)));
        out.extend(self.sc.var_ids().map(|v| SymbolRef::var(v, step)));
        out
    }

    pub fn selector_symbols(&self, step: usize) -> Vec<SymbolRef> {
        self.sc
            .transition_ids()
            .map(|t| SymbolRef::new(SymbolKind::Fired(t), step))
            .collect()
    }

    pub fn decode_configuration(
        &self,
        a: &Assignment,
        step: usize,
    ) -> Result<Configuration, EncodingError> {
        let bits: Vec<Tern> = (0..self.layout.width())
            .map(|p| {
                a.get(&SymbolRef::bit(p, step))
                    .and_then(|v| v.as_bool())
                    .map(Tern::from_bool)
                    .unwrap_or(Tern::X)
            })
            .collect();
        let active = self.layout.decode(&TernaryBitVector::from_bits(bits))?;
        let events = self
            .sc
            .event_ids()
            .filter(|e| a.get(&SymbolRef::flag(*e, step)) == Some(&Value::Bool(true)))
            .collect();
        let values = self
            .sc
            .var_ids()
            .map(|v| {
                a.get(&SymbolRef::var(v, step)).copied().ok_or_else(|| {
                    EncodingError::Decode(format!("no value for `{}`", self.sc.variable(v).name))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Configuration {
            active,
            events,
            values,
        })
    }

    /// Lowest-numbered transition whose selector is true at `step`.
    pub fn fired_transition(&self, a: &Assignment, step: usize) -> Option<TransitionId> {
        self.sc.transition_ids().find(|t| {
            a.get(&SymbolRef::new(SymbolKind::Fired(*t), step)) == Some(&Value::Bool(true))
        })
    }
}

#[cfg(test)]
mod tests;
