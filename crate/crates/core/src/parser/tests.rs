use super::*;
use crate::model::{CmpOp, Configuration, Value};
use crate::samples::{fig1, FIG1_SOURCE};

#[test]
fn running_example_structure() {
    let sc = parse_statechart(FIG1_SOURCE).unwrap();
    assert_eq!(sc.states().len(), 14);
    // Five named regions plus the implicit top-level one.
    assert_eq!(sc.regions().len(), 6);
    assert_eq!(sc.variables().len(), 1);
    assert_eq!(sc.transitions().len(), 7);
    assert!(sc.validate().is_empty());
}

#[test]
fn empty_input_has_no_top_region() {
    let diags = parse_statechart("").unwrap_err();
    assert_eq!(diags[0].message, "no top-level region");
    let diags = parse_statechart("statechart E { }").unwrap_err();
    assert!(diags.iter().any(|d| d.message == "no top-level region"));
}

#[test]
fn undeclared_state_in_transition() {
    let text = "statechart M {\n  region r { initial state a; }\n  transition a -> ghost;\n}";
    let diags = parse_statechart(text).unwrap_err();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].message, "unknown state `ghost`");
    let span = diags[0].span.unwrap();
    assert_eq!((span.line, span.column), (3, 19));
}

#[test]
fn syntax_error_location() {
    let diags = parse_statechart("statechart M {\n  region r { initial state a }\n}").unwrap_err();
    let span = diags[0].span.unwrap();
    assert_eq!(span.line, 2);
    assert!(diags[0].message.contains("expected `;`"));
}

#[test]
fn duplicate_and_initial_errors() {
    let text = "statechart M { region r { initial state a; initial state b; state a; } }";
    let diags = parse_statechart(text).unwrap_err();
    assert!(diags[0].message.contains("duplicate identifier `a`"));
    let text = "statechart M { region r { initial state a; initial state b; } }";
    let diags = parse_statechart(text).unwrap_err();
    assert!(diags.iter().any(|d| d.message.contains("2 initial states")));
}

#[test]
fn nonlinear_guard_rejected() {
    let text = "statechart M { var x: int[0..3] = 0; region r { initial state a; } \
                transition a -> a when x * x > 1; }";
    let diags = parse_statechart(text).unwrap_err();
    assert!(diags.iter().any(|d| d.message.contains("non-linear")));
}

#[test]
fn at_most_one_action() {
    let text = "statechart M { var x: int = 0; event e; region r { initial state a; } \
                transition a -> a do x := 1 | raise e; }";
    let diags = parse_statechart(text).unwrap_err();
    assert!(diags[0].message.contains("at most one action"));
}

#[test]
fn expressions_precedence() {
    let text = "statechart M { var x: int[-4..4] = -1; var b: bool = true; event e; \
                region r { initial state a; } \
                transition a -> a on e when !b || x + 2 * x >= -3 && (x - (1 - x)) != 0 do b := not b; }";
    let sc = parse_statechart(text).unwrap();
    let g = &sc.transitions()[0].guard;
    let vals = |x: i64, b: bool| vec![Value::Int(x), Value::Bool(b)];
    assert!(g.eval_bool(&vals(0, false)).unwrap());
    assert!(!g.eval_bool(&vals(-4, true)).unwrap());
    assert_eq!(print_expr(g, &sc), "!b || x + 2 * x >= -3 && x - (1 - x) != 0");
}

#[test]
fn round_trip_running_example() {
    let sc = fig1(Some((0, 7)));
    let printed = print_statechart(&sc);
    let again = parse_statechart(&printed).unwrap();
    assert_eq!(again, sc);
    assert_eq!(print_statechart(&again), printed);
}

#[test]
fn round_trip_events_and_open_bounds() {
    let text = "statechart M { var y: int[..3] = -2; var z: int[1..] = 1; var w: int = 5; \
                input event go, stop; event tick; \
                region r { initial state a; state b { region q { initial state c; } } } \
                region p { initial state d; } \
                transition a -> b on go when y < 3 do raise tick; \
                transition b -> a on tick do z := -(z + 1) * 2; }";
    let sc = parse_statechart(text).unwrap();
    assert_eq!(parse_statechart(&print_statechart(&sc)).unwrap(), sc);
}

#[test]
fn error_spec_items() {
    let sc = fig1(Some((0, 7)));
    let spec = parse_error_spec("var x == 1", &sc).unwrap();
    assert_eq!(spec.variables[0].op, CmpOp::Eq);
    let c = |x| Configuration {
        active: sc.initial_configuration().active,
        events: Default::default(),
        values: vec![Value::Int(x)],
    };
    assert!(spec.matches(&c(1)));
    assert!(!spec.matches(&c(0)));

    let spec = parse_error_spec("state B2c", &sc).unwrap();
    assert!(spec.states.contains(&sc.state_id("B2c").unwrap()));

    let diags = parse_error_spec("state Bogus", &sc).unwrap_err();
    assert_eq!(diags[0].message, "unknown state `Bogus`");

    let spec = parse_error_spec("state B; var x >= 1\nstate B1 && var x < -1", &sc).unwrap();
    assert_eq!(spec.states.len(), 2);
    assert_eq!(spec.variables.len(), 2);
    assert_eq!(parse_error_spec(&print_error_spec(&spec, &sc), &sc).unwrap(), spec);

    assert!(parse_error_spec("// nothing\n", &sc).is_err());
    assert!(parse_error_spec("var x == true", &sc).is_err());
}
