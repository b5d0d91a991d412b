use std::collections::{BTreeSet, HashMap};

use super::*;
use crate::model::{all_configurations, StatechartBuilder, Transition};
use crate::samples::fig1;

fn assignment_for(sym: &SymbolicChart, c: &Configuration, step: usize, a: &mut Assignment) {
    let bits = sym
        .layout()
        .encode_active_set(&c.active)
        .unwrap()
        .zero_all_x();
    for p in 0..bits.len() {
        a.insert(SymbolRef::bit(p, step), Value::Bool(bits.get(p) == Tern::One));
    }
    for e in sym.chart().event_ids() {
        a.insert(SymbolRef::flag(e, step), Value::Bool(c.events.contains(&e)));
    }
    for (v, x) in sym.chart().var_ids().zip(&c.values) {
        a.insert(SymbolRef::var(v, step), *x);
    }
}

/// Successors of `c` according to the transition formulas, by evaluating
/// them on every candidate configuration and injected-event subset.
fn formula_successors(sym: &SymbolicChart, c: &Configuration) -> BTreeSet<Configuration> {
    let sc = sym.chart();
    let inputs: Vec<_> = sc.event_ids().filter(|e| sc.event(*e).input).collect();
    let candidates = all_configurations(sc).unwrap();
    let mut out = BTreeSet::new();
    for next in candidates {
        let mut a = HashMap::new();
        assignment_for(sym, c, 0, &mut a);
        assignment_for(sym, &next, 1, &mut a);
        for mask in 0u32..(1 << inputs.len()) {
            for (i, e) in inputs.iter().enumerate() {
                a.insert(
                    SymbolRef::new(SymbolKind::Injected(*e), 0),
                    Value::Bool(mask & (1 << i) != 0),
                );
            }
            if sym.relation_formula(0).eval_in(&a) == Some(true) {
                out.insert(next.clone());
                break;
            }
        }
    }
    out
}

#[test]
fn bit_vector_formula_keeps_dont_cares() {
    let bv: TernaryBitVector = "01X0".parse().unwrap();
    let f = bv_to_formula(&bv, 0);
    let v = |p| Formula::atom(SymbolRef::bit(p, 0));
    assert_eq!(
        f,
        Formula::And(vec![Formula::not(v(0)), v(1), Formula::True, Formula::not(v(3))])
    );
    assert_eq!(f.to_string(), "¬v1_0 ∧ v2_0 ∧ ⊤ ∧ ¬v4_0");
    let mut models = 0;
    for m in 0u32..16 {
        let a: Assignment = (0..4)
            .map(|p| (SymbolRef::bit(p, 0), Value::Bool(m & (1 << p) != 0)))
            .collect();
        if f.eval_in(&a).unwrap() {
            models += 1;
        }
    }
    assert_eq!(models, 2);
    assert_eq!(bv_to_formula(&"XXX".parse().unwrap(), 0), Formula::True);
    assert_eq!(
        bv_to_formula(&"1".parse().unwrap(), 3),
        Formula::atom(SymbolRef::bit(0, 3))
    );
}

#[test]
fn guard_and_action_indexing() {
    let sc = fig1(Some((0, 7)));
    let x = sc.var_id("x").unwrap();
    let back = &sc.transitions()[2];
    assert_eq!(
        guard_formula(&sc, &back.guard, 2),
        Formula::Cmp(CmpOp::Gt, Term::Sym(SymbolRef::var(x, 2)), Term::Const(5))
    );
    assert_eq!(guard_formula(&sc, &Expr::tt(), 0), Formula::True);
    let inc = &sc.transitions()[6];
    assert_eq!(
        action_formula(&sc, &inc.action, 1),
        Formula::Cmp(
            CmpOp::Eq,
            Term::Sym(SymbolRef::var(x, 2)),
            Term::Add(Box::new(Term::Sym(SymbolRef::var(x, 1))), Box::new(Term::Const(1)))
        )
    );
    assert_eq!(action_formula(&sc, &Action::None, 0), Formula::True);
}

#[test]
fn mixed_guard_indexing() {
    let text = "statechart M { var x: int[0..3] = 0; var y: int[0..3] = 0; var b: bool = false; \
                event e; region r { initial state a; } \
                transition a -> a when x + 1 <= y && b do raise e; }";
    let sc = crate::parser::parse_statechart(text).unwrap();
    let t = &sc.transitions()[0];
    assert_eq!(guard_formula(&sc, &t.guard, 0).to_string(), "(x0_0 + 1) <= x1_0 ∧ x2_0");
    assert_eq!(
        action_formula(&sc, &t.action, 0),
        Formula::atom(SymbolRef::flag(EventId(0), 1))
    );
}

#[test]
fn relation_has_one_disjunct_per_transition() {
    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    match sym.relation_formula(0) {
        Formula::Or(parts) => assert_eq!(parts.len(), 7),
        other => panic!("unexpected {other}"),
    }
    let mut b = StatechartBuilder::new("dead");
    let r = b.region("r", None);
    b.initial_state("s", r);
    let dead = b.build().unwrap();
    assert_eq!(
        SymbolicChart::new(&dead, EncodeOptions::default()).relation_formula(0),
        Formula::False
    );
}

#[test]
fn frames_keep_parallel_sibling_slot() {
    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    let t = crate::model::TransitionId(0);
    assert_eq!(sc.transition_label(t), "A2a -> A2b");
    let frames = sym.frame_conditions(t, 0);
    let framed = |p: usize| {
        let eq = Formula::iff(
            Formula::atom(SymbolRef::bit(p, 1)),
            Formula::atom(SymbolRef::bit(p, 0)),
        );
        matches!(&frames, Formula::And(fs) if fs.contains(&eq))
    };
    // A1 owns positions 1 and 2; A2 owns 3 and 5.
    assert!(framed(0) && framed(1) && framed(2) && framed(4));
    assert!(!framed(3) && !framed(5));
}

#[test]
fn transition_formula_matches_fire_on_every_configuration() {
    let sc = fig1(Some((0, 3)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    for c in all_configurations(&sc).unwrap() {
        let want = sc.successors(&c, Environment::Closed).unwrap();
        assert_eq!(formula_successors(&sym, &c), want, "from {c:?}");
    }
}

#[test]
fn open_environment_injection() {
    let text = "statechart M { input event go; event done; region r { initial state a; state b; } \
                transition a -> b on go do raise done; transition b -> a on done; }";
    let sc = crate::parser::parse_statechart(text).unwrap();
    let opts = EncodeOptions {
        env: Environment::Open,
        literal_target: false,
    };
    let sym = SymbolicChart::new(&sc, opts);
    for c in all_configurations(&sc).unwrap() {
        assert_eq!(
            formula_successors(&sym, &c),
            sc.successors(&c, Environment::Open).unwrap()
        );
    }
}

#[test]
fn literal_target_clobbers_sibling_region() {
    let sc = fig1(Some((0, 3)));
    let scoped = SymbolicChart::new(&sc, EncodeOptions::default());
    let literal = SymbolicChart::new(
        &sc,
        EncodeOptions {
            literal_target: true,
            ..Default::default()
        },
    );
    let ids = |ns: &[&str]| ns.iter().map(|n| sc.state_id(n).unwrap()).collect();
    let c = Configuration {
        active: ids(&["A", "A1c", "A2a"]),
        events: BTreeSet::new(),
        values: vec![Value::Int(0)],
    };
    let next = Configuration {
        active: ids(&["A", "A1c", "A2b", "A2b1"]),
        ..c.clone()
    };
    assert!(formula_successors(&scoped, &c).contains(&next));
    assert!(!formula_successors(&literal, &c).contains(&next));
}

#[test]
fn cross_region_transition_formula_matches_fire() {
    let mut b = StatechartBuilder::new("cross");
    let top = b.region("top", None);
    let p = b.initial_state("P", top);
    let q = b.state("Q", top);
    let r1 = b.region("R1", Some(p));
    let r2 = b.region("R2", Some(p));
    let a = b.initial_state("a", r1);
    let a2 = b.state("a2", r1);
    b.initial_state("c", r2);
    let c2 = b.state("c2", r2);
    b.simple_transition(a, c2);
    b.simple_transition(q, a2);
    b.simple_transition(a, a2);
    b.transition(Transition {
        source: c2,
        target: q,
        trigger: None,
        guard: Expr::tt(),
        action: Action::None,
    });
    let sc = b.build().unwrap();
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    for c in all_configurations(&sc).unwrap() {
        assert_eq!(
            formula_successors(&sym, &c),
            sc.successors(&c, Environment::Closed).unwrap()
        );
    }
}

#[test]
fn error_and_config_constraints() {
    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    let x = sc.var_id("x").unwrap();
    let spec = ErrorSpec::default().with_bound(x, CmpOp::Eq, Value::Int(1));
    assert_eq!(
        sym.error_formula(&spec, 4),
        Formula::Cmp(CmpOp::Eq, Term::Sym(SymbolRef::var(x, 4)), Term::Const(1))
    );
    let b2c = sc.state_id("B2c").unwrap();
    assert_eq!(
        sym.error_formula(&ErrorSpec::states([b2c]), 2),
        Formula::and(vec![bv_to_formula(&sym.layout().encode_state(b2c), 2)])
    );
    let init = sc.initial_configuration();
    assert_eq!(sym.config_constraint(&init, 0).unwrap(), sym.initial_formula());
    let mut c = init.clone();
    c.values[0] = Value::Int(2);
    let f = sym.config_constraint(&c, 3).unwrap();
    assert!(matches!(&f, Formula::And(fs) if fs.contains(
        &Formula::Cmp(CmpOp::Eq, Term::Sym(SymbolRef::var(x, 3)), Term::Const(2)))));
}

#[test]
fn decode_from_assignment() {
    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    let init = sc.initial_configuration();
    let mut a = HashMap::new();
    assignment_for(&sym, &init, 5, &mut a);
    assert_eq!(sym.decode_configuration(&a, 5).unwrap(), init);
    a.insert(SymbolRef::new(SymbolKind::Fired(crate::model::TransitionId(3)), 5), Value::Bool(true));
    assert_eq!(sym.fired_transition(&a, 5), Some(crate::model::TransitionId(3)));
}

#[test]
fn smt_names_round_trip() {
    for s in [
        SymbolRef::bit(12, 3),
        SymbolRef::flag(EventId(2), 0),
        SymbolRef::var(VarId(1), 7),
        SymbolRef::new(SymbolKind::Havoc(crate::model::HavocId(4)), 1),
        SymbolRef::new(SymbolKind::Injected(EventId(0)), 2),
        SymbolRef::new(SymbolKind::Fired(crate::model::TransitionId(9)), 11),
    ] {
        assert_eq!(SymbolRef::parse_smt_name(&s.smt_name()), Some(s));
    }
}
