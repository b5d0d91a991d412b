//! Steps the interpreter by hand and runs the explicit breadth-first
//! explorer on the running example.

use hsc::model::{explore_explicit, reachable_layers, Environment, ErrorSpec, ExplicitOutcome};
use hsc::samples::fig1;

fn main() {
    let sc = fig1(Some((0, 3)));
    let names = |c: &hsc::model::Configuration| -> Vec<String> {
        c.active.iter().map(|s| sc.state(*s).name.clone()).collect()
    };
    let mut c = sc.initial_configuration();
    println!("initial: {:?} x={:?}", names(&c), c.values);
    for step in 0..4 {
        let enabled = sc.enabled(&c).unwrap();
        let labels: Vec<String> = enabled.iter().map(|t| sc.transition_label(*t)).collect();
        println!("step {step}: enabled {labels:?}");
        let t = *enabled.last().expect("the running example never deadlocks");
        c = sc.fire(&c, t).unwrap();
        println!("  fired {} -> {:?}", sc.transition_label(t), names(&c));
    }

    let layers = reachable_layers(&sc, Environment::Closed, 6).unwrap();
    let sizes: Vec<usize> = layers.iter().map(|l| l.len()).collect();
    println!("configurations first reached at each distance: {sizes:?}");

    let spec = ErrorSpec::states([sc.state_id("B2c").unwrap()]);
    match explore_explicit(&sc, &spec, Environment::Closed, 100_000).unwrap() {
        ExplicitOutcome::Unsafe(p) => {
            println!("B2c reachable in {} steps:", p.len());
            for t in &p.transitions {
                println!("  {}", sc.transition_label(*t));
            }
        }
        other => println!("{other:?}"),
    }
}
