use std::fmt::Write;

use crate::formula::{Formula, Term};
use crate::model::{CmpOp, Sort};

fn write_int(out: &mut String, i: i64) {
    if i < 0 {
        let _ = write!(out, "(- {})", i.unsigned_abs());
    } else {
        let _ = write!(out, "{i}");
    }
}

pub fn write_term(out: &mut String, t: &Term) {
    let bin = |op: &str, a: &Term, b: &Term, out: &mut String| {
        let _ = write!(out, "({op} ");
        write_term(out, a);
        out.push(' ');
        write_term(out, b);
        out.push(')');
    };
    match t {
        Term::Const(c) => write_int(out, *c),
        Term::Sym(s) => out.push_str(&s.smt_name()),
        Term::Neg(a) => {
            out.push_str("(- ");
            write_term(out, a);
            out.push(')');
        }
        Term::Add(a, b) => bin("+", a, b, out),
        Term::Sub(a, b) => bin("-", a, b, out),
        Term::Mul(a, b) => bin("*", a, b, out),
    }
}

/// SMT-LIB2 text of a formula. Identical formulas give identical text.
pub fn formula_to_smt(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_nary(out: &mut String, op: &str, fs: &[Formula], empty: &str) {
    match fs {
        [] => out.push_str(empty),
        [one] => write_formula(out, one),
        _ => {
            let _ = write!(out, "({op}");
            for f in fs {
                out.push(' ');
                write_formula(out, f);
            }
            out.push(')');
        }
    }
}

pub fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(s) => out.push_str(&s.smt_name()),
        Formula::Not(a) => {
            out.push_str("(not ");
            write_formula(out, a);
            out.push(')');
        }
        Formula::And(fs) => write_nary(out, "and", fs, "true"),
        Formula::Or(fs) => write_nary(out, "or", fs, "false"),
        Formula::Iff(a, b) => {
            out.push_str("(= ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        Formula::Cmp(op, a, b) => {
            let sym = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "distinct",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            let _ = write!(out, "({sym} ");
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
    }
}

pub fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Bool => "Bool",
        Sort::Int => "Int",
    }
}
