//! Talks to the external solver directly: assertions, push/pop, models and
//! blocking clauses. Needs `z3` on the PATH or `HSC_SOLVER`.

use hsc::formula::{EncodeOptions, Formula, SymbolRef, SymbolicChart};
use hsc::model::ErrorSpec;
use hsc::samples::fig1;
use hsc::smt::{CheckResult, SolverConfig, SolverSession};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = SolverSession::open(&SolverConfig::default())?;
    let (p, q) = (SymbolRef::bit(0, 0), SymbolRef::bit(1, 0));
    s.assert_formula(&Formula::or(vec![Formula::atom(p), Formula::atom(q)]))?;
    let mut n = 0;
    while s.check()? == CheckResult::Sat {
        let m = s.get_model(&[p, q])?;
        println!("model {n}: p={:?} q={:?}", m.get(p), m.get(q));
        s.block(&m, &[p, q])?;
        n += 1;
    }
    println!("{n} models of p or q");

    s.reset()?;
    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    s.register_variables(&sc);
    s.assert_formula(&sym.initial_formula())?;
    let spec = ErrorSpec::states([sc.state_id("B2b").unwrap()]);
    for k in 0..5 {
        if k > 0 {
            s.assert_formula(&sym.relation_with_selectors(k - 1))?;
        }
        s.push()?;
        s.assert_formula(&sym.error_formula(&spec, k))?;
        let r = s.check()?;
        println!("B2b reachable in exactly {k} steps: {r:?}");
        s.pop()?;
    }
    println!("{:?}", s.stats());
    Ok(())
}
