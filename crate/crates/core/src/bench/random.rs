use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Action, CmpOp, Domain, EventId, Expr, StateId, Statechart, StatechartBuilder, Transition,
    Value, VarId,
};

/// Size limits for [`random_statechart`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_depth: usize,
    pub max_vars: usize,
    /// Largest domain size of an integer variable.
    pub max_domain: i64,
    pub max_events: usize,
    pub max_transitions: usize,
    /// Allow input events (only meaningful in the open environment).
    pub inputs: bool,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_states: 12,
            max_depth: 3,
            max_vars: 2,
            max_domain: 4,
            max_events: 3,
            max_transitions: 14,
            inputs: false,
        }
    }
}

/// A small well-formed statechart drawn from `seed`.
pub fn random_statechart(seed: u64, shape: RandomShape) -> Statechart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = StatechartBuilder::new(format!("Random{seed}"));
    let mut states: Vec<StateId> = Vec::new();
    let mut entered: Vec<StateId> = Vec::new();
    let mut budget = shape.max_states.max(2);

    let top = b.region("main", None);
    let n_top = rng.gen_range(2..=3.min(budget));
    let mut frontier: Vec<(StateId, usize)> = Vec::new();
    for i in 0..n_top {
        let s = b.state(format!("s{}", states.len()), top);
        if i == 0 {
            b.mark_initial(top, s);
            entered.push(s);
        }
        states.push(s);
        frontier.push((s, 1));
    }
    budget -= n_top;
    let mut region_count = 1;
    while budget >= 2 && !frontier.is_empty() {
        let k = rng.gen_range(0..frontier.len());
        let (parent, depth) = frontier.swap_remove(k);
        if depth >= shape.max_depth || !rng.gen_bool(0.6) {
            continue;
        }
        let n_regions = if budget >= 4 && rng.gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..n_regions {
            if budget < 2 {
                break;
            }
            let r = b.region(format!("r{region_count}"), Some(parent));
            region_count += 1;
            let n = rng.gen_range(2..=3.min(budget));
            for i in 0..n {
                let s = b.state(format!("s{}", states.len()), r);
                if i == 0 {
                    b.mark_initial(r, s);
                    entered.push(s);
                }
                states.push(s);
                frontier.push((s, depth + 1));
            }
            budget -= n;
        }
    }

    let n_vars = rng.gen_range(0..=shape.max_vars);
    let mut vars: Vec<(VarId, Domain)> = Vec::new();
    for i in 0..n_vars {
        let d = if rng.gen_bool(0.25) {
            Domain::Bool
        } else {
            Domain::Int {
                lower: Some(0),
                upper: Some(rng.gen_range(1..shape.max_domain.max(2))),
            }
        };
        let init = match d {
            Domain::Bool => Value::Bool(false),
            Domain::Int { .. } => Value::Int(0),
        };
        vars.push((b.variable(format!("v{i}"), d, init), d));
    }
    let n_events = rng.gen_range(0..=shape.max_events);
    let events: Vec<EventId> = (0..n_events)
        .map(|i| b.event(format!("e{i}"), shape.inputs && rng.gen_bool(0.5)))
        .collect();

    let n_trans = rng.gen_range(3..=shape.max_transitions.max(3));
    for _ in 0..n_trans {
        // mostly from states entered initially or by an earlier target
        let pool = if rng.gen_bool(0.75) { &entered } else { &states };
        let source = *pool.choose(&mut rng).expect("states");
        let target = *states.choose(&mut rng).expect("states");
        if !entered.contains(&target) {
            entered.push(target);
        }
        let trigger = if !events.is_empty() && rng.gen_bool(0.3) {
            events.choose(&mut rng).copied()
        } else {
            None
        };
        let guard = if !vars.is_empty() && rng.gen_bool(0.4) {
            let (v, d) = *vars.choose(&mut rng).expect("vars");
            match d {
                Domain::Bool => {
                    if rng.gen_bool(0.5) {
                        Expr::Var(v)
                    } else {
                        Expr::not(Expr::Var(v))
                    }
                }
                Domain::Int { upper, .. } => {
                    let op = *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Ge]
                        .choose(&mut rng)
                        .expect("ops");
                    let c = rng.gen_range(0..=upper.unwrap_or(1));
                    Expr::cmp(op, Expr::Var(v), Expr::Int(c))
                }
            }
        } else {
            Expr::tt()
        };
        let action = match rng.gen_range(0..10) {
            0..=3 if !vars.is_empty() => {
                let (v, d) = *vars.choose(&mut rng).expect("vars");
                let e = match d {
                    Domain::Bool => Expr::not(Expr::Var(v)),
                    Domain::Int { upper, .. } => match rng.gen_range(0..3) {
                        0 => Expr::add(Expr::Var(v), Expr::Int(1)),
                        1 => Expr::Int(0),
                        _ => Expr::Int(rng.gen_range(0..=upper.unwrap_or(1))),
                    },
                };
                Action::Assign(v, e)
            }
            4..=5 if !events.is_empty() => Action::Raise(*events.choose(&mut rng).expect("events")),
            _ => Action::None,
        };
        b.transition(Transition {
            source,
            target,
            trigger,
            guard,
            action,
        });
    }
    b.build().expect("random chart is well formed")
}
