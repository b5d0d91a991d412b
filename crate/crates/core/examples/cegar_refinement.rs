//! Abstraction refinement on the two failure patterns and on the running
//! example, printing one JSON progress line per iteration.

use hsc::cegar::{cegar_loop, Mode};
use hsc::checkers::{CheckOptions, Engine};
use hsc::model::ErrorSpec;
use hsc::samples::{fig1, state_failure, variable_failure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = CheckOptions::default();
    let fig = fig1(Some((0, 7)));
    let b2c = ErrorSpec::states([fig.state_id("B2c").unwrap()]);
    let cases = [
        ("hidden child state", state_failure()),
        ("hidden variable", variable_failure()),
        ("running example, B2c", (fig, b2c)),
    ];
    for (label, (sc, spec)) in &cases {
        println!("== {label} ==");
        let r = cegar_loop(sc, spec, Mode::Gen, Engine::Oao, &opts, &mut |rec| {
            println!("{}", serde_json::to_string(rec).unwrap());
        })?;
        println!(
            "verdict {} after {} refinements\n",
            r.verdict.outcome.label(),
            r.refinements
        );
    }
    Ok(())
}
