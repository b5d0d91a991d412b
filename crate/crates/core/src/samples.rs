//! Small models used throughout the documentation, examples and tests.

use crate::model::{ErrorSpec, Statechart};
use crate::parser::{parse_error_spec, parse_statechart};

/// Source of the running example with `x: int[0..7]`.
pub const FIG1_SOURCE: &str = include_str!("../models/fig1.hsc");

/// The running example, with the bounds of `x` replaced (`None` leaves `x`
/// unbounded).
pub fn fig1(bounds: Option<(i64, i64)>) -> Statechart {
    let ty = match bounds {
        Some((lo, hi)) => format!("int[{lo}..{hi}]"),
        None => "int".to_string(),
    };
    let text = FIG1_SOURCE.replace("int[0..7]", &ty);
    parse_statechart(&text).expect("bundled model parses")
}

/// State abstraction failure: `s2` is only reachable from the hidden child
/// `s1b` of `s1`, which is not refined in the initial abstraction.
pub const STATE_FAILURE_SOURCE: &str = "statechart StateFailure {
    region main {
        initial state s0;
        state s1 {
            region inner {
                initial state s1a;
                state s1b;
            }
        }
        state s2;
    }
    transition s0 -> s1;
    transition s1b -> s2;
}
";

/// Variable abstraction failure: `s2` needs `x == 0` but `x` is set to 1 on
/// the way, and `x` starts hidden under GEN.
pub const VARIABLE_FAILURE_SOURCE: &str = "statechart VariableFailure {
    var x: int[0..1] = 0;
    region main {
        initial state s0;
        state s1;
        state s2;
    }
    transition s0 -> s1 do x := 1;
    transition s1 -> s2 when x == 0;
}
";

pub fn state_failure() -> (Statechart, ErrorSpec) {
    let sc = parse_statechart(STATE_FAILURE_SOURCE).expect("bundled model parses");
    let spec = parse_error_spec("state s2", &sc).expect("bundled spec parses");
    (sc, spec)
}

pub fn variable_failure() -> (Statechart, ErrorSpec) {
    let sc = parse_statechart(VARIABLE_FAILURE_SOURCE).expect("bundled model parses");
    let spec = parse_error_spec("state s2", &sc).expect("bundled spec parses");
    (sc, spec)
}
