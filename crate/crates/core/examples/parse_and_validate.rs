//! Parses the running example, prints a summary and shows diagnostics for a
//! broken model.

use hsc::diagnostic::render;
use hsc::parser::{parse_error_spec, parse_statechart, print_statechart};
use hsc::samples::FIG1_SOURCE;

fn main() {
    let sc = parse_statechart(FIG1_SOURCE).expect("running example parses");
    println!(
        "{}: {} states, {} regions, {} transitions, depth {}",
        sc.name(),
        sc.states().len(),
        sc.regions().len(),
        sc.transitions().len(),
        sc.max_depth()
    );
    for t in sc.transition_ids() {
        println!("  {}", sc.transition_label(t));
    }
    let spec = parse_error_spec("state B2c && var x >= 3", &sc).unwrap();
    println!("error spec: {}", spec.describe(&sc));

    println!("\npretty-printed:\n{}", print_statechart(&sc));

    let broken = "statechart Broken {
    region main {
        initial state A;
        state A;
    }
    transition A -> C;
}";
    match parse_statechart(broken) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(d) => println!("diagnostics:\n{}", render(&d)),
    }
}
