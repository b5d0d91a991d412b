pub mod diagnostic;
pub mod model;
pub mod parser;
pub mod samples;
pub mod encoding;
pub mod formula;
pub mod smt;
pub mod checkers;
pub mod cegar;
pub mod bench;
pub mod run;
