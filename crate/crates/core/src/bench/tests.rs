use super::*;
use crate::model::{explore_explicit, Environment, ExplicitOutcome};

fn small(n: u32) -> BenchmarkParams {
    BenchmarkParams {
        counter_max: n,
        parallel_regions: 2,
        hierarchy_depth: 3,
        seed: 1,
    }
}

fn oracle(b: &Benchmark) -> (ExplicitOutcome, ExplicitOutcome) {
    let sc = b.statechart();
    let (r, u) = b.specs(&sc);
    (
        explore_explicit(&sc, &r, Environment::Closed, 1 << 20).unwrap(),
        explore_explicit(&sc, &u, Environment::Closed, 1 << 20).unwrap(),
    )
}

#[test]
fn generation_is_deterministic_and_parses() {
    let a = generate_benchmark(BenchmarkParams::default()).unwrap();
    let b = generate_benchmark(BenchmarkParams::default()).unwrap();
    assert_eq!(a, b);
    let sc = a.statechart();
    assert_eq!(sc.max_depth(), 3);
    assert!(sc.validate().is_empty(), "{:?}", sc.validate());
    assert!(generate_benchmark(small(0)).is_err());
    let shallow = BenchmarkParams {
        hierarchy_depth: 2,
        ..small(2)
    };
    assert_eq!(generate_benchmark(shallow).unwrap().statechart().max_depth(), 2);
}

#[test]
fn specs_have_the_intended_status() {
    for n in 1..=2 {
        let (r, u) = oracle(&generate_benchmark(small(n)).unwrap());
        assert!(matches!(r, ExplicitOutcome::Unsafe(_)), "{n}");
        assert!(matches!(u, ExplicitOutcome::Safe { .. }), "{n}");
    }
}

#[test]
fn state_space_grows_with_counter_max() {
    let count = |n| match oracle(&generate_benchmark(small(n)).unwrap()).1 {
        ExplicitOutcome::Safe { configurations } => configurations,
        o => panic!("{o:?}"),
    };
    let sizes: Vec<usize> = (1..=3).map(count).collect();
    assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
}

#[test]
fn random_charts_are_well_formed() {
    for seed in 0..200 {
        let sc = random_statechart(seed, RandomShape::default());
        assert!(sc.states().len() <= 12);
        assert!(sc.max_depth() <= 3);
        assert!(sc.variables().len() <= 2);
        assert!(sc.events().len() <= 3);
        assert!(sc.variables().iter().all(|v| v.domain.values().is_some_and(|d| d.len() <= 4)));
        assert_eq!(random_statechart(seed, RandomShape::default()).transitions(), sc.transitions());
    }
}

#[test]
fn sweep_cardinality_and_agreement() {
    let cfg = SweepConfig {
        base: small(1),
        counter_max: vec![1, 2, 3, 4],
        engines: Engine::ALL.to_vec(),
        abstractions: vec![Abstraction::Gen],
        reachable: false,
        options: CheckOptions::default(),
        jobs: 2,
    };
    let rows = sweep(&cfg);
    assert_eq!(rows.len(), 16);
    assert!(verdicts_agree(&rows), "{rows:?}");
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("engine,abstraction,counter_max,verdict,time_ms"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn sweep_drops_cells_after_running_out() {
    let mut options = CheckOptions::default();
    options.limits.config_limit = 5;
    let cfg = SweepConfig {
        base: small(1),
        counter_max: vec![1, 2, 3],
        engines: vec![Engine::Mon],
        abstractions: vec![Abstraction::None],
        reachable: false,
        options,
        jobs: 1,
    };
    let rows = sweep(&cfg);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].verdict, "resource-exhausted");
}
