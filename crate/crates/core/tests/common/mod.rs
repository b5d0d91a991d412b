#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use hsc::bench::{random_statechart, RandomShape};
use hsc::cegar::{abstract_statechart, AbstractChart, AbstractionFunction};
use hsc::formula::{EncodeOptions, SymbolicChart};
use hsc::model::{
    all_configurations, explore_explicit, reachable_layers, CmpOp, Configuration, Environment, ErrorSpec,
    ExplicitOutcome, Path, StateId, Statechart,
};
use hsc::smt::{CheckResult, SolverConfig, SolverSession};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: u64 = 60;

/// Random models used by the differential tests, with the seed each came
/// from. Charts with fewer than 4 reachable configurations are skipped.
pub fn corpus() -> Vec<(u64, Statechart)> {
    (0..)
        .map(|seed| (seed, random_statechart(seed, RandomShape::default())))
        .filter(|(_, sc)| reachable_set(sc).len() >= 4)
        .take(CORPUS_SIZE as usize)
        .collect()
}

pub fn oracle(sc: &Statechart, spec: &ErrorSpec) -> ExplicitOutcome {
    explore_explicit(sc, spec, Environment::Closed, 1 << 22).expect("finite model")
}

pub fn is_unsafe(o: &ExplicitOutcome) -> bool {
    matches!(o, ExplicitOutcome::Unsafe(_))
}

/// Every configuration reachable from the initial one.
pub fn reachable_set(sc: &Statechart) -> HashSet<Configuration> {
    let mut seen = HashSet::from([sc.initial_configuration()]);
    let mut stack = vec![sc.initial_configuration()];
    while let Some(c) = stack.pop() {
        for n in sc.successors(&c, Environment::Closed).unwrap() {
            if seen.insert(n.clone()) {
                stack.push(n);
            }
        }
    }
    seen
}

/// Ends of paths of length exactly `i`, for `i = 0..=k`.
pub fn exact_step_sets(sc: &Statechart, k: usize) -> Vec<BTreeSet<Configuration>> {
    let mut out = vec![BTreeSet::from([sc.initial_configuration()])];
    for _ in 0..k {
        let next = out
            .last()
            .unwrap()
            .iter()
            .flat_map(|c| sc.successors(c, Environment::Closed).unwrap())
            .collect();
        out.push(next);
    }
    out
}

/// Configurations decoded from every model of `unfold(i)`, for `i = 0..=k`.
pub fn symbolic_step_sets(sc: &Statechart, k: usize) -> Vec<BTreeSet<Configuration>> {
    let sym = SymbolicChart::new(sc, EncodeOptions::default());
    let mut s = SolverSession::open(&SolverConfig::default()).unwrap();
    s.register_variables(sc);
    s.assert_formula(&sym.initial_formula()).unwrap();
    let mut out = Vec::new();
    for i in 0..=k {
        if i > 0 {
            s.assert_formula(&sym.relation_formula(i - 1)).unwrap();
        }
        let symbols = sym.config_symbols(i);
        s.declare_symbols(&symbols).unwrap();
        s.push().unwrap();
        let mut set = BTreeSet::new();
        while s.check().unwrap() == CheckResult::Sat {
            let m = s.get_model(&symbols).unwrap();
            set.insert(sym.decode_configuration(&m.assignment(), i).unwrap());
            s.block(&m, &symbols).unwrap();
        }
        s.pop().unwrap();
        out.push(set);
    }
    out
}

/// A spec hit by some reachable configuration far from the start, and one
/// that no reachable configuration satisfies.
pub fn spec_pair(sc: &Statechart, seed: u64) -> (ErrorSpec, ErrorSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let reach = reachable_set(sc);
    let layers = reachable_layers(sc, Environment::Closed, usize::MAX).unwrap();
    let deepest: Vec<&Configuration> = layers.last().unwrap().iter().collect();
    let target = deepest.choose(&mut rng).copied().cloned().unwrap();
    let reachable = pin(sc, &target, rng.gen_bool(0.5));

    let mut candidates = all_configurations(sc).unwrap();
    candidates.shuffle(&mut rng);
    let unreachable = candidates
        .into_iter()
        .filter(|c| !reach.contains(c))
        .map(|c| pin(sc, &c, true))
        .find(|spec| !reach.iter().any(|c| spec.matches(c)))
        .unwrap_or_else(|| sibling_conflict(sc));
    (reachable, unreachable)
}

/// Spec naming the leaves of `c` and, optionally, its variable values.
fn pin(sc: &Statechart, c: &Configuration, with_values: bool) -> ErrorSpec {
    let leaves = c
        .active
        .iter()
        .copied()
        .filter(|s| !c.active.iter().any(|d| sc.parent_state(*d) == Some(*s)));
    let mut spec = ErrorSpec::states(leaves);
    if with_values {
        for (v, val) in sc.var_ids().zip(&c.values) {
            spec = spec.with_bound(v, CmpOp::Eq, *val);
        }
        for e in &c.events {
            spec = spec.with_event(*e);
        }
    }
    spec
}

/// Two states of the same region can never be active together.
fn sibling_conflict(sc: &Statechart) -> ErrorSpec {
    let top = sc.region(sc.top_regions()[0]);
    ErrorSpec::states([top.states[0], top.states[1]])
}

/// Random valid abstraction: every refined composite state refines its
/// children with probability one half.
pub fn random_abstraction(sc: &Statechart, rng: &mut impl Rng) -> AbstractionFunction {
    let mut refined: BTreeSet<StateId> = BTreeSet::new();
    let mut stack: Vec<StateId> = sc
        .top_regions()
        .iter()
        .flat_map(|r| sc.region(*r).states.clone())
        .collect();
    refined.extend(stack.iter().copied());
    while let Some(s) = stack.pop() {
        if rng.gen_bool(0.5) {
            for r in &sc.state(s).regions {
                for c in &sc.region(*r).states {
                    refined.insert(*c);
                    stack.push(*c);
                }
            }
        }
    }
    let visible = sc.var_ids().filter(|_| rng.gen_bool(0.5)).collect();
    AbstractionFunction::from_parts(sc, refined, visible).expect("valid by construction")
}

/// Random walk of at most `max_len` steps.
pub fn random_path(sc: &Statechart, max_len: usize, rng: &mut impl Rng) -> Path {
    let mut p = Path::new(sc.initial_configuration());
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        let steps = sc.steps(p.last(), Environment::Closed).unwrap();
        match steps.choose(rng) {
            Some((t, c)) => p.push(*t, c.clone()),
            None => break,
        }
    }
    p
}

/// Whether each step of `ap` is a step of the abstract chart, checked with
/// the solver so hidden values may take any value.
pub fn abstract_steps_hold(abs: &AbstractChart, ap: &Path, s: &mut SolverSession) -> bool {
    let sym = SymbolicChart::new(&abs.chart, EncodeOptions::default());
    s.reset().unwrap();
    s.register_variables(&abs.chart);
    if ap.configurations[0] != abs.chart.initial_configuration() {
        return false;
    }
    for (i, t) in ap.transitions.iter().enumerate() {
        s.push().unwrap();
        s.assert_formula(&sym.config_constraint(&ap.configurations[i], 0).unwrap()).unwrap();
        s.assert_formula(&sym.transition_formula(*t, 0)).unwrap();
        s.assert_formula(&sym.config_constraint(&ap.configurations[i + 1], 1).unwrap()).unwrap();
        let ok = s.check().unwrap() == CheckResult::Sat;
        s.pop().unwrap();
        if !ok {
            return false;
        }
    }
    true
}

pub fn abstraction_of(sc: &Statechart, h: &AbstractionFunction) -> AbstractChart {
    abstract_statechart(sc, h)
}

/// Reachable-set size and error distance of the reachable spec, per chart.
pub fn corpus_profile() -> (usize, usize, usize) {
    let mut configs = 0;
    let mut max_dist = 0;
    let mut deep = 0;
    for (seed, sc) in corpus() {
        configs += reachable_set(&sc).len();
        let (reach, _) = spec_pair(&sc, seed);
        if let ExplicitOutcome::Unsafe(p) = oracle(&sc, &reach) {
            max_dist = max_dist.max(p.len());
            if p.len() >= 3 {
                deep += 1;
            }
        }
    }
    (configs, max_dist, deep)
}
