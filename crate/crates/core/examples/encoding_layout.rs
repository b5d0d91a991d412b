//! Prints the ternary state encoding of the running example and combines
//! the vectors of an active set.

use hsc::encoding::{EncodingLayout, TernaryBitVector};
use hsc::samples::fig1;

fn main() {
    let sc = fig1(Some((0, 7)));
    let layout = EncodingLayout::build(&sc);
    println!("width {} level bits {:?}", layout.width(), layout.level_bits());
    print!("{}", layout.dump());

    let active = ["A", "A1c", "A2b", "A2b2"].map(|n| sc.state_id(n).unwrap());
    let combined = layout.encode_active_set(active.iter()).unwrap();
    println!("{{A, A1c, A2b, A2b2}} = {}", layout.format(&combined));
    let decoded = layout.decode(&combined.zero_all_x()).unwrap();
    let names: Vec<&str> = decoded.iter().map(|s| sc.state(*s).name.as_str()).collect();
    println!("decoded back: {names:?}");

    let a: TernaryBitVector = "01X".parse().unwrap();
    let b: TernaryBitVector = "00X".parse().unwrap();
    println!("01X combined with 00X: {:?}", a.combine(&b));
}
