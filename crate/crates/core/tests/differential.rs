mod common;

use common::{corpus, is_unsafe, oracle, spec_pair};
use hsc::bench::{random_statechart, RandomShape};
use hsc::cegar::{cegar_loop, Mode};
use hsc::checkers::{check, CheckOptions, Engine};
use hsc::model::{explore_explicit, Environment, ExplicitOutcome};

#[test]
fn engines_match_explicit_search_on_corpus() {
    let opts = CheckOptions::default();
    for (seed, sc) in corpus() {
        let (reach, unreach) = spec_pair(&sc, seed);
        for spec in [&reach, &unreach] {
            let expected = oracle(&sc, spec);
            for engine in Engine::ALL {
                let v = check(&sc, spec, engine, &opts).unwrap();
                assert_eq!(
                    v.outcome.is_unsafe(),
                    is_unsafe(&expected),
                    "seed {seed} engine {} spec {}",
                    engine.name(),
                    spec.describe(&sc)
                );
                if let Some(p) = v.outcome.path() {
                    assert!(sc.replays(p, Environment::Closed), "seed {seed}");
                    assert!(spec.matches(p.last()));
                }
            }
        }
        assert!(is_unsafe(&oracle(&sc, &reach)), "seed {seed}");
        assert!(!is_unsafe(&oracle(&sc, &unreach)), "seed {seed}");
    }
}

#[test]
fn shortest_paths_agree_with_breadth_first_search() {
    let opts = CheckOptions::default();
    for (seed, sc) in corpus().into_iter().take(20) {
        let (reach, _) = spec_pair(&sc, seed);
        let ExplicitOutcome::Unsafe(best) = oracle(&sc, &reach) else {
            panic!("seed {seed}: reachable spec not reached");
        };
        for engine in [Engine::Mon, Engine::Mop, Engine::Bmc] {
            let v = check(&sc, &reach, engine, &opts).unwrap();
            assert_eq!(v.outcome.path().unwrap().len(), best.len(), "seed {seed}");
        }
    }
}

#[test]
fn open_environment_matches_explicit_search() {
    let shape = RandomShape {
        inputs: true,
        ..RandomShape::default()
    };
    let opts = CheckOptions {
        env: Environment::Open,
        ..CheckOptions::default()
    };
    for seed in 0..15 {
        let sc = random_statechart(seed, shape);
        let (spec, _) = spec_pair(&sc, seed);
        let expected = explore_explicit(&sc, &spec, Environment::Open, 1 << 20).unwrap();
        for engine in Engine::ALL {
            let v = check(&sc, &spec, engine, &opts).unwrap();
            assert_eq!(v.outcome.is_unsafe(), is_unsafe(&expected), "seed {seed}");
            if let Some(p) = v.outcome.path() {
                assert!(sc.replays(p, Environment::Open));
            }
        }
    }
}

#[test]
fn refinement_loop_matches_explicit_search() {
    let opts = CheckOptions::default();
    for (seed, sc) in corpus().into_iter().take(25) {
        let (reach, unreach) = spec_pair(&sc, seed);
        for spec in [&reach, &unreach] {
            let expected = is_unsafe(&oracle(&sc, spec));
            for mode in [Mode::Stt, Mode::Gen] {
                let r = cegar_loop(&sc, spec, mode, Engine::Oao, &opts, &mut |_| {}).unwrap();
                assert_eq!(r.verdict.outcome.is_unsafe(), expected, "seed {seed} {mode}");
                if let Some(p) = r.verdict.outcome.path() {
                    assert!(sc.replays(p, Environment::Closed));
                    assert!(spec.matches(p.last()));
                }
                assert!(r.refinements <= sc.states().len() + sc.variables().len());
            }
        }
    }
}
