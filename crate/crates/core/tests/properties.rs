mod common;

use hsc::bench::{random_statechart, RandomShape};
use hsc::encoding::{EncodingLayout, Tern, TernaryBitVector};
use hsc::model::{legal_active_sets, Environment};
use hsc::parser::{parse_error_spec, parse_statechart, print_error_spec, print_statechart};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tern() -> impl Strategy<Value = Tern> {
    prop_oneof![Just(Tern::Zero), Just(Tern::One), Just(Tern::X)]
}

fn triple() -> impl Strategy<Value = (TernaryBitVector, TernaryBitVector, TernaryBitVector)> {
    (0usize..12).prop_flat_map(|n| {
        let v = || prop::collection::vec(tern(), n).prop_map(TernaryBitVector::from_bits);
        (v(), v(), v())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn combine_is_commutative((a, b, _) in triple()) {
        prop_assert_eq!(a.combine(&b).ok(), b.combine(&a).ok());
        prop_assert_eq!(a.conflicting(&b).unwrap(), a.combine(&b).is_err());
    }

    #[test]
    fn combine_is_associative((a, b, c) in triple()) {
        let left = a.combine(&b).and_then(|ab| ab.combine(&c)).ok();
        let right = b.combine(&c).and_then(|bc| a.combine(&bc)).ok();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn all_x_is_the_identity((a, _, _) in triple()) {
        let id = TernaryBitVector::all_x(a.len());
        prop_assert_eq!(a.combine(&id).unwrap(), a.clone());
        prop_assert_eq!(a.combine(&a).unwrap(), a);
    }

    #[test]
    fn text_round_trip((a, _, _) in triple()) {
        prop_assert_eq!(a.to_string().parse::<TernaryBitVector>().unwrap(), a);
    }

    #[test]
    fn ancestors_prefix_descendants(seed in any::<u64>()) {
        let sc = random_statechart(seed, RandomShape::default());
        let l = EncodingLayout::build(&sc);
        for s in sc.state_ids() {
            let enc = l.encode_state(s);
            if let Some(p) = sc.parent_state(s) {
                let parent = l.encode_state(p);
                prop_assert!(!parent.conflicting(&enc).unwrap());
                prop_assert_eq!(parent.combine(&enc).unwrap(), enc.clone());
            }
            for &sib in &sc.region(sc.state(s).region).states {
                if sib != s {
                    prop_assert!(enc.conflicting(&l.encode_state(sib)).unwrap());
                }
            }
        }
    }

    #[test]
    fn decode_inverts_encode(seed in any::<u64>()) {
        let sc = random_statechart(seed, RandomShape::default());
        let l = EncodingLayout::build(&sc);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = legal_active_sets(&sc);
        let set = &sets[rng.gen_range(0..sets.len())];
        let enc = l.encode_active_set(set).unwrap();
        prop_assert_eq!(&l.decode(&enc).unwrap(), set);
        let filled: Vec<Tern> = enc
            .bits()
            .iter()
            .map(|b| if *b == Tern::X { Tern::from_bool(rng.gen()) } else { *b })
            .collect();
        prop_assert_eq!(&l.decode(&TernaryBitVector::from_bits(filled)).unwrap(), set);
    }

    #[test]
    fn printed_models_parse_back(seed in 0u64..300) {
        let sc = random_statechart(seed, RandomShape::default());
        let text = print_statechart(&sc);
        let back = parse_statechart(&text).unwrap();
        prop_assert_eq!(print_statechart(&back), text);
        let names = |m: &hsc::model::Statechart, c: &hsc::model::Configuration| {
            let mut v: Vec<String> = c.active.iter().map(|s| m.state(*s).name.clone()).collect();
            v.sort();
            (v, c.values.clone())
        };
        let init = sc.initial_configuration();
        prop_assert_eq!(names(&back, &back.initial_configuration()), names(&sc, &init));
        prop_assert_eq!(
            back.successors(&back.initial_configuration(), Environment::Closed).unwrap().len(),
            sc.successors(&init, Environment::Closed).unwrap().len()
        );
        let (spec, _) = common::spec_pair(&sc, seed);
        let spec_text = print_error_spec(&spec, &sc);
        let reparsed = parse_error_spec(&spec_text, &back).unwrap();
        prop_assert_eq!(parse_error_spec(&spec_text, &sc).unwrap(), spec);
        let lines = |t: String| {
            let mut v: Vec<String> = t.lines().map(str::to_string).collect();
            v.sort();
            v
        };
        prop_assert_eq!(lines(print_error_spec(&reparsed, &back)), lines(spec_text));
    }
}

#[test]
fn abstract_paths_are_abstract_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut s = hsc::smt::SolverSession::open(&Default::default()).unwrap();
    for seed in 0..150 {
        let sc = random_statechart(seed, RandomShape::default());
        let h = common::random_abstraction(&sc, &mut rng);
        let abs = common::abstraction_of(&sc, &h);
        let p = common::random_path(&sc, 5, &mut rng);
        let ap = hsc::cegar::abstract_path(&sc, &h, &abs, &p);
        assert!(common::abstract_steps_hold(&abs, &ap, &mut s), "seed {seed}");
    }
}
