//! Front end for the `.hsc` statechart language and `.spec` error
//! specifications, plus a pretty-printer for both.

mod lexer;
mod printer;
mod statechart;

pub use printer::{print_error_spec, print_expr, print_statechart};
pub use statechart::{parse_error_spec, parse_statechart};

#[cfg(test)]
mod tests;
