use super::*;
use crate::model::{CmpOp, ExplicitOutcome, Value, VarId};
use crate::samples;

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn state_spec(sc: &Statechart, name: &str) -> ErrorSpec {
    ErrorSpec::states([sc.state_id(name).unwrap()])
}

fn oracle_distance(sc: &Statechart, spec: &ErrorSpec) -> Option<usize> {
    match crate::model::explore_explicit(sc, spec, Environment::Closed, 1_000_000).unwrap() {
        ExplicitOutcome::Unsafe(p) => Some(p.len()),
        _ => None,
    }
}

#[test]
fn explorers_find_b2c() {
    let sc = samples::fig1(Some((0, 7)));
    let spec = state_spec(&sc, "B2c");
    let want = oracle_distance(&sc, &spec).unwrap();
    for e in Engine::ALL {
        let v = check(&sc, &spec, e, &opts()).unwrap();
        let p = v.outcome.path().unwrap_or_else(|| panic!("{e}: {:?}", v.outcome));
        assert!(sc.replays(p, Environment::Closed), "{e}");
        assert!(spec.matches(p.last()));
        if e != Engine::Oao {
            assert_eq!(p.len(), want, "{e}");
        }
    }
}

#[test]
fn unreachable_value_is_safe() {
    let sc = samples::fig1(Some((0, 3)));
    let spec = ErrorSpec::default().with_bound(VarId(0), CmpOp::Eq, Value::Int(7));
    for e in Engine::EXPLORERS {
        let v = check(&sc, &spec, e, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Safe, "{e}");
        assert_eq!(v.stats.confs_max, v.stats.confs_eve);
    }
    let mut o = opts();
    o.limits.k_max = 5;
    assert_eq!(bmc(&sc, &spec, &o).unwrap().outcome, Outcome::BoundExhausted(5));
}

#[test]
fn explorers_count_the_reachable_set() {
    let sc = samples::fig1(Some((0, 3)));
    let spec = ErrorSpec::default().with_bound(VarId(0), CmpOp::Eq, Value::Int(7));
    let n = match crate::model::explore_explicit(&sc, &spec, Environment::Closed, 1 << 20).unwrap() {
        ExplicitOutcome::Safe { configurations } => configurations,
        o => panic!("{o:?}"),
    };
    for e in Engine::EXPLORERS {
        assert_eq!(check(&sc, &spec, e, &opts()).unwrap().stats.confs_max, Some(n));
    }
}

#[test]
fn configuration_limit_is_enforced() {
    let sc = samples::fig1(Some((0, 7)));
    let spec = state_spec(&sc, "B2c");
    let mut o = opts();
    o.limits.config_limit = 1;
    for e in Engine::EXPLORERS {
        assert!(matches!(
            check(&sc, &spec, e, &o).unwrap().outcome,
            Outcome::ResourceExhausted(_)
        ));
    }
}

#[test]
fn bmc_path_to_b1_is_minimal() {
    let sc = samples::fig1(Some((0, 7)));
    let spec = state_spec(&sc, "B1");
    let v = bmc(&sc, &spec, &opts()).unwrap();
    let p = v.outcome.path().unwrap();
    // B1 is the initial state of B, so `A -> B` alone reaches it
    assert_eq!(p.len(), 1);
    assert_eq!(Some(p.len()), oracle_distance(&sc, &spec));
    assert_eq!(sc.transition_label(p.transitions[0]), "A -> B");
    assert!(sc.replays(p, Environment::Closed));
    assert_eq!(v.stats.confs_max, None);

    // the two-step path through A2b also ends in B1 and is found once the
    // first step is forced
    let mut o = opts();
    o.limits.k_max = 2;
    let spec2 = spec.clone();
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    let mut s = SolverSession::open(&o.solver).unwrap();
    s.register_variables(&sc);
    s.assert_formula(&sym.unfold(2)).unwrap();
    s.assert_formula(&sym.error_formula(&spec2, 2)).unwrap();
    let a2b = crate::model::ErrorSpec::states([sc.state_id("A2b").unwrap()]);
    s.assert_formula(&sym.error_formula(&a2b, 1)).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    let p = extract_path(&sym, &mut s, 2).unwrap();
    assert!(sc.replays(&p, Environment::Closed));
    assert_eq!(sc.transition_label(p.transitions[0]), "A2a -> A2b");
}

#[test]
fn initial_error_is_found_at_length_zero() {
    let sc = samples::fig1(Some((0, 7)));
    let spec = state_spec(&sc, "A1a");
    for e in Engine::ALL {
        let v = check(&sc, &spec, e, &opts()).unwrap();
        assert_eq!(v.outcome.path().unwrap().len(), 0, "{e}");
    }
}

#[test]
fn popping_reuses_the_relation() {
    let sc = samples::fig1(Some((0, 7)));
    let spec = state_spec(&sc, "B2c");
    let mon = explore_mon(&sc, &spec, &opts()).unwrap();
    let mop = explore_mop(&sc, &spec, &opts()).unwrap();
    assert!(mon.stats.relation_assertions >= 2);
    assert_eq!(mop.stats.relation_assertions, 1);
    assert_eq!(
        mon.outcome.path().unwrap().len(),
        mop.outcome.path().unwrap().len()
    );
}

#[test]
fn dead_end_configuration_is_handled() {
    let (sc, spec) = samples::state_failure();
    for e in Engine::EXPLORERS {
        assert_eq!(check(&sc, &spec, e, &opts()).unwrap().outcome, Outcome::Safe, "{e}");
    }
}

#[test]
fn unbounded_variables_are_refused_by_explorers_only() {
    let sc = samples::fig1(None);
    let spec = state_spec(&sc, "B1");
    assert!(matches!(
        explore_oao(&sc, &spec, &opts()),
        Err(CheckError::UnboundedVariable(_))
    ));
    assert!(bmc(&sc, &spec, &opts()).unwrap().outcome.is_unsafe());
}

#[test]
fn engine_names_parse() {
    for e in Engine::ALL {
        assert_eq!(e.name().parse::<Engine>().unwrap(), e);
    }
    assert!("dfs".parse::<Engine>().is_err());
}
