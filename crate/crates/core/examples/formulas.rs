//! Builds transition formulas and a two-step unfolding, printed both in
//! mathematical notation and as SMT-LIB.

use hsc::encoding::TernaryBitVector;
use hsc::formula::{bv_to_formula, EncodeOptions, SymbolicChart};
use hsc::samples::fig1;
use hsc::smt::formula_to_smt;

fn main() {
    let v: TernaryBitVector = "01X0".parse().unwrap();
    println!("01X0 -> {}", bv_to_formula(&v, 0));

    let sc = fig1(Some((0, 7)));
    let sym = SymbolicChart::new(&sc, EncodeOptions::default());
    for t in sc.transition_ids().take(3) {
        println!("\n{}:", sc.transition_label(t));
        println!("  target vector {}", sym.layout().format(&sym.target_vector(t)));
        println!("  {}", sym.transition_formula(t, 0));
    }
    let unfold = sym.unfold(2);
    let smt = formula_to_smt(&unfold);
    println!(
        "\nunfold(2): {} nodes, {} symbols, {} bytes of SMT-LIB",
        unfold.size(),
        unfold.symbols().len(),
        smt.len()
    );
    println!("{}...", &smt[..smt.len().min(300)]);
}
