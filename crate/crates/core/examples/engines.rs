//! Runs the four engines on the running example against a reachable and an
//! unreachable error specification.

use hsc::checkers::{check, CheckOptions, Engine};
use hsc::model::{CmpOp, ErrorSpec, Value};
use hsc::samples::fig1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = fig1(Some((0, 3)));
    let x = sc.var_id("x").unwrap();
    let specs = [
        ("B2c active", ErrorSpec::states([sc.state_id("B2c").unwrap()])),
        ("x == 3 in A", ErrorSpec::states([sc.state_id("A").unwrap()]).with_bound(x, CmpOp::Eq, Value::Int(3))),
    ];
    let mut opts = CheckOptions::default();
    opts.limits.k_max = 20;
    for (label, spec) in &specs {
        println!("{label}:");
        for e in Engine::ALL {
            let v = check(&sc, spec, e, &opts)?;
            let len = v.outcome.path().map(|p| format!(" path length {}", p.len())).unwrap_or_default();
            println!(
                "  {e}: {}{len} ({:.1?}, {} queries, confs {:?})",
                v.outcome.label(),
                v.stats.elapsed,
                v.stats.solver_queries,
                v.stats.confs_max
            );
        }
    }
    Ok(())
}
