use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{
    Configuration, Environment, ErrorSpec, ModelError, Path, RegionId, StateId, Statechart,
    TransitionId, Value,
};

/// Result of explicit breadth-first exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExplicitOutcome {
    /// Shortest path to an error configuration.
    Unsafe(Path),
    /// The full reachable set was explored without meeting the error.
    Safe { configurations: usize },
    /// Stopped after visiting `limit` configurations.
    LimitReached { limit: usize },
}

/// Breadth-first search over concrete configurations. Serves as a reference
/// for the symbolic engines on small models.
pub fn explore_explicit(
    sc: &Statechart,
    spec: &ErrorSpec,
    env: Environment,
    limit: usize,
) -> Result<ExplicitOutcome, ModelError> {
    if let Some(v) = sc.variables().iter().find(|v| !v.domain.is_finite()) {
        return Err(ModelError::UnboundedVariable(v.name.clone()));
    }
    let init = sc.initial_configuration();
    let mut parent: BTreeMap<Configuration, Option<(Configuration, TransitionId)>> = BTreeMap::new();
    parent.insert(init.clone(), None);
    let mut queue = VecDeque::from([init]);
    while let Some(c) = queue.pop_front() {
        if spec.matches(&c) {
            return Ok(ExplicitOutcome::Unsafe(rebuild(&parent, c)));
        }
        for (t, next) in sc.steps(&c, env)? {
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= limit {
                return Ok(ExplicitOutcome::LimitReached { limit });
            }
            parent.insert(next.clone(), Some((c.clone(), t)));
            queue.push_back(next);
        }
    }
    Ok(ExplicitOutcome::Safe {
        configurations: parent.len(),
    })
}

fn rebuild(
    parent: &BTreeMap<Configuration, Option<(Configuration, TransitionId)>>,
    last: Configuration,
) -> Path {
    let mut rev = vec![(last.clone(), None)];
    let mut cur = last;
    while let Some(Some((p, t))) = parent.get(&cur) {
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

/// Configurations grouped by their shortest distance from the initial one,
/// up to distance `k` inclusive.
pub fn reachable_layers(
    sc: &Statechart,
    env: Environment,
    k: usize,
) -> Result<Vec<BTreeSet<Configuration>>, ModelError> {
    let init = sc.initial_configuration();
    let mut seen = BTreeSet::from([init.clone()]);
    let mut layers = vec![BTreeSet::from([init])];
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for c in layers.last().expect("non-empty") {
            for s in sc.successors(c, env)? {
                if seen.insert(s.clone()) {
                    next.insert(s);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    Ok(layers)
}

/// Every active-state set satisfying the configuration invariants.
pub fn legal_active_sets(sc: &Statechart) -> Vec<BTreeSet<StateId>> {
    fn regions(sc: &Statechart, rs: &[RegionId]) -> Vec<BTreeSet<StateId>> {
        let mut acc = vec![BTreeSet::new()];
        for &r in rs {
            let mut options = Vec::new();
            for &s in &sc.region(r).states {
                for mut inner in regions(sc, &sc.state(s).regions) {
                    inner.insert(s);
                    options.push(inner);
                }
            }
            acc = acc
                .iter()
                .flat_map(|a| {
                    options.iter().map(move |o| a.union(o).copied().collect::<BTreeSet<_>>())
                })
                .collect();
        }
        acc
    }
    regions(sc, sc.top_regions())
}

/// Every configuration of a chart with finite domains: legal active sets
/// times event subsets times valuations. Exponential; meant for tests.
pub fn all_configurations(sc: &Statechart) -> Result<Vec<Configuration>, ModelError> {
    let mut valuations: Vec<Vec<Value>> = vec![Vec::new()];
    for v in sc.variables() {
        let dom = v
            .domain
            .values()
            .ok_or_else(|| ModelError::UnboundedVariable(v.name.clone()))?;
        valuations = valuations
            .iter()
            .flat_map(|prefix| {
                dom.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(*x);
                    p
                })
            })
            .collect();
    }
    let events: Vec<_> = sc.event_ids().collect();
    let mut out = Vec::new();
    for active in legal_active_sets(sc) {
        for mask in 0u64..(1 << events.len()) {
            let ev: BTreeSet<_> = events
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| *e)
                .collect();
            for values in &valuations {
                out.push(Configuration {
                    active: active.clone(),
                    events: ev.clone(),
                    values: values.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;
    use crate::model::{CmpOp, Value};

    #[test]
    fn finds_shortest_path_to_b2c() {
        let sc = fig1();
        let spec = ErrorSpec::states([sc.state_id("B2c").unwrap()]);
        match explore_explicit(&sc, &spec, Environment::Closed, 10_000).unwrap() {
            ExplicitOutcome::Unsafe(p) => {
                assert_eq!(p.len(), 4);
                assert!(sc.replays(&p, Environment::Closed));
                assert!(spec.matches(p.last()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unreachable_value_is_safe() {
        let sc = fig1();
        let x = sc.var_id("x").unwrap();
        let spec = ErrorSpec::states([sc.state_id("A").unwrap()]).with_bound(x, CmpOp::Eq, Value::Int(5));
        assert!(matches!(
            explore_explicit(&sc, &spec, Environment::Closed, 100_000).unwrap(),
            ExplicitOutcome::Safe { .. }
        ));
    }

    #[test]
    fn legal_sets_of_running_example() {
        let sc = fig1();
        let sets = legal_active_sets(&sc);
        // A: 3 * (1 + 2) choices, B: 1 + 3 choices.
        assert_eq!(sets.len(), 13);
        for s in &sets {
            let c = Configuration {
                active: s.clone(),
                events: BTreeSet::new(),
                values: vec![Value::Int(0)],
            };
            sc.check_configuration(&c).unwrap();
        }
    }

    #[test]
    fn layers_start_with_initial() {
        let sc = fig1();
        let layers = reachable_layers(&sc, Environment::Closed, 3).unwrap();
        assert_eq!(layers[0].len(), 1);
        assert!(layers.len() == 4);
    }
}
