use super::*;
use crate::formula::{EncodeOptions, SymbolicChart};
use crate::model::{ErrorSpec, VarId};

fn open() -> SolverSession {
    SolverSession::open(&SolverConfig::default()).expect("solver available")
}

fn b(p: usize) -> SymbolRef {
    SymbolRef::bit(p, 0)
}

#[test]
fn trivial_checks() {
    let mut s = open();
    s.assert_formula(&Formula::True).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    let v = Formula::atom(b(0));
    s.assert_formula(&Formula::and(vec![v.clone(), Formula::not(v)])).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Unsat);
    assert!(matches!(s.get_model(&[b(0)]), Err(SmtError::NoModel)));
}

#[test]
fn bad_executable_is_a_spawn_error() {
    let cfg = SolverConfig::default().with_command("/nonexistent/solver -in");
    assert!(matches!(SolverSession::open(&cfg), Err(SmtError::Spawn { .. })));
}

#[test]
fn tiny_timeout_is_accepted() {
    let cfg = SolverConfig::default().with_timeout(Some(Duration::from_millis(0)));
    let mut s = SolverSession::open(&cfg).unwrap();
    s.assert_formula(&Formula::atom(b(0))).unwrap();
    assert!(matches!(
        s.check().unwrap(),
        CheckResult::Sat | CheckResult::Unknown(_)
    ));
}

#[test]
fn push_pop_discipline() {
    let mut s = open();
    assert!(matches!(s.pop(), Err(SmtError::PopEmpty)));
    s.push().unwrap();
    s.assert_formula(&Formula::False).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Unsat);
    s.pop().unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    for _ in 0..3 {
        s.push().unwrap();
    }
    assert_eq!(s.depth(), 3);
    for _ in 0..3 {
        s.pop().unwrap();
    }
    assert_eq!(s.depth(), 0);
}

#[test]
fn declarations_are_scoped_to_push_levels() {
    let mut s = open();
    s.push().unwrap();
    s.assert_formula(&Formula::atom(b(3))).unwrap();
    assert!(s.is_declared(b(3)));
    s.pop().unwrap();
    assert!(!s.is_declared(b(3)));
    // redeclaring after the pop must be accepted by the solver
    s.assert_formula(&Formula::not(Formula::atom(b(3)))).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
}

#[test]
fn model_values() {
    let mut s = open();
    s.assert_formula(&Formula::and(vec![
        Formula::atom(b(0)),
        Formula::not(Formula::atom(b(1))),
    ]))
    .unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    let m = s.get_model(&[b(0), b(1)]).unwrap();
    assert_eq!(m.get(b(0)), Some(Value::Bool(true)));
    assert_eq!(m.get(b(1)), Some(Value::Bool(false)));
    assert!(matches!(s.get_model(&[b(7)]), Err(SmtError::Undeclared(_))));
}

#[test]
fn negative_integers_round_trip() {
    let sc = crate::samples::fig1(Some((-5, 5)));
    let mut s = open();
    s.register_variables(&sc);
    let x = SymbolRef::var(VarId(0), 0);
    s.assert_formula(&Formula::Cmp(CmpOp::Lt, Term::Sym(x), Term::Const(-4)))
        .unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    assert_eq!(s.get_model(&[x]).unwrap().get(x), Some(Value::Int(-5)));
}

#[test]
fn declared_bounds_are_enforced() {
    let sc = crate::samples::fig1(Some((0, 3)));
    let mut s = open();
    s.register_variables(&sc);
    let x = SymbolRef::var(VarId(0), 2);
    s.assert_formula(&Formula::Cmp(CmpOp::Gt, Term::Sym(x), Term::Const(3)))
        .unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Unsat);
}

#[test]
fn blocking_enumerates_solutions() {
    let mut s = open();
    // exactly one of two bits
    let (p, q) = (Formula::atom(b(0)), Formula::atom(b(1)));
    s.assert_formula(&Formula::not(Formula::iff(p.clone(), q))).unwrap();
    let syms = [b(0), b(1)];
    let mut seen = Vec::new();
    while s.check().unwrap() == CheckResult::Sat {
        let m = s.get_model(&syms).unwrap();
        seen.push((m.get(b(0)), m.get(b(1))));
        s.block(&m, &syms).unwrap();
    }
    assert_eq!(seen.len(), 2);

    let mut s = open();
    s.assert_formula(&Formula::and(vec![p, Formula::not(Formula::atom(b(1)))]))
        .unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    let m = s.get_model(&syms).unwrap();
    s.block(&m, &syms).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Unsat);
}

#[test]
fn blocking_unbounded_integers_is_refused() {
    let sc = crate::samples::fig1(None);
    let mut s = open();
    s.register_variables(&sc);
    let x = SymbolRef::var(VarId(0), 0);
    s.assert_formula(&Formula::Cmp(CmpOp::Eq, Term::Sym(x), Term::Const(1)))
        .unwrap();
    s.check().unwrap();
    let m = s.get_model(&[x]).unwrap();
    assert!(matches!(s.block(&m, &[x]), Err(SmtError::UnboundedBlock(_))));
}

#[test]
fn solver_errors_are_reported() {
    let mut s = open();
    let e = s.command("(assert undeclared_thing)").unwrap_err();
    assert!(matches!(e, SmtError::Solver(ref m) if m.contains("unknown constant")), "{e}");
    // session keeps working after a reported error
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
}

#[test]
fn reset_clears_everything() {
    let mut s = open();
    s.push().unwrap();
    s.assert_formula(&Formula::False).unwrap();
    s.reset().unwrap();
    assert_eq!(s.depth(), 0);
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    assert_eq!(s.stats().resets, 1);
}

#[test]
fn fig1_unfold_reaches_b1_in_two_steps() {
    let sc = crate::samples::fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    let spec = ErrorSpec::states([sc.state_id("B1").unwrap()]);
    let mut s = open();
    s.register_variables(&sc);
    s.assert_formula(&sym.unfold(2)).unwrap();
    s.push().unwrap();
    s.assert_formula(&sym.error_formula(&spec, 2)).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat);
    let mut syms = Vec::new();
    for i in 0..=2 {
        syms.extend(sym.config_symbols(i));
    }
    let m = s.get_model(&syms).unwrap().assignment();
    for i in 0..=2 {
        let c = sym.decode_configuration(&m, i).unwrap();
        assert!(sc.check_configuration(&c).is_ok(), "{c:?}");
    }
    s.pop().unwrap();
    s.assert_formula(&sym.error_formula(&spec, 1)).unwrap();
    assert_eq!(s.check().unwrap(), CheckResult::Sat, "unfold(2) alone stays sat");
}

#[test]
fn transcript_records_commands_and_responses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.smt2");
    let cfg = SolverConfig {
        transcript: Some(path.clone()),
        ..SolverConfig::default()
    };
    {
        let mut s = SolverSession::open(&cfg).unwrap();
        s.assert_formula(&Formula::atom(b(0))).unwrap();
        s.check().unwrap();
    }
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("(declare-const sb0_0 Bool)"));
    assert!(text.contains("(check-sat)\n; sat"));
}
