use std::fmt::Write;

use crate::model::{Action, Domain, ErrorSpec, Expr, RegionId, Statechart, Value};

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Cmp(..) => 3,
        Expr::Add(..) | Expr::Sub(..) => 4,
        Expr::Mul(..) => 5,
        Expr::Neg(_) | Expr::Not(_) => 6,
        Expr::Int(i) if *i < 0 => 6,
        _ => 7,
    }
}

/// Renders an expression in DSL syntax with the fewest parentheses that
/// still parse back to the same tree.
pub fn print_expr(e: &Expr, sc: &Statechart) -> String {
    let mut out = String::new();
    write_expr(e, sc, &mut out);
    out
}

fn write_child(e: &Expr, min: u8, sc: &Statechart, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write_expr(e, sc, out);
        out.push(')');
    } else {
        write_expr(e, sc, out);
    }
}

fn write_expr(e: &Expr, sc: &Statechart, out: &mut String) {
    let bin = |op: &str, a: &Expr, b: &Expr, p: u8, assoc: bool, out: &mut String| {
        write_child(a, if assoc { p } else { p + 1 }, sc, out);
        let _ = write!(out, " {op} ");
        write_child(b, p + 1, sc, out);
    };
    match e {
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Expr::Var(v) => out.push_str(&sc.variable(*v).name),
        Expr::Havoc(h, s) => {
            let _ = write!(out, "?{}:{s}", h.0);
        }
        Expr::Neg(a) => {
            out.push_str("-(");
            write_expr(a, sc, out);
            out.push(')');
        }
        Expr::Not(a) => {
            out.push('!');
            write_child(a, 6, sc, out);
        }
        Expr::Add(a, b) => bin("+", a, b, 4, true, out),
        Expr::Sub(a, b) => bin("-", a, b, 4, true, out),
        Expr::Mul(a, b) => bin("*", a, b, 5, true, out),
        Expr::And(a, b) => bin("&&", a, b, 2, true, out),
        Expr::Or(a, b) => bin("||", a, b, 1, true, out),
        Expr::Cmp(op, a, b) => bin(op.symbol(), a, b, 3, false, out),
    }
}

fn write_region(sc: &Statechart, r: RegionId, indent: usize, out: &mut String) {
    let pad = "    ".repeat(indent);
    let region = sc.region(r);
    let _ = writeln!(out, "{pad}region {} {{", region.name);
    for &s in &region.states {
        let st = sc.state(s);
        let init = if region.initial == s { "initial " } else { "" };
        if st.regions.is_empty() {
            let _ = writeln!(out, "{pad}    {init}state {};", st.name);
        } else {
            let _ = writeln!(out, "{pad}    {init}state {} {{", st.name);
            for &sub in &st.regions {
                write_region(sc, sub, indent + 2, out);
            }
            let _ = writeln!(out, "{pad}    }}");
        }
    }
    let _ = writeln!(out, "{pad}}}");
}

/// Pretty-prints a statechart in the `.hsc` language. Parsing the output
/// yields an identical model when ids follow declaration order.
pub fn print_statechart(sc: &Statechart) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "statechart {} {{", sc.name());
    for v in sc.variables() {
        let ty = match v.domain {
            Domain::Bool => "bool".to_string(),
            Domain::Int {
                lower: None,
                upper: None,
            } => "int".to_string(),
            Domain::Int { lower, upper } => format!(
                "int[{}..{}]",
                lower.map(|l| l.to_string()).unwrap_or_default(),
                upper.map(|u| u.to_string()).unwrap_or_default()
            ),
        };
        let _ = writeln!(out, "    var {}: {ty} = {};", v.name, v.initial);
    }
    for e in sc.events() {
        let input = if e.input { "input " } else { "" };
        let _ = writeln!(out, "    {input}event {};", e.name);
    }
    for &r in sc.top_regions() {
        write_region(sc, r, 1, &mut out);
    }
    for t in sc.transitions() {
        let _ = write!(
            out,
            "    transition {} -> {}",
            sc.state(t.source).name,
            sc.state(t.target).name
        );
        if let Some(e) = t.trigger {
            let _ = write!(out, " on {}", sc.event(e).name);
        }
        if !t.guard.is_true() {
            let _ = write!(out, " when {}", print_expr(&t.guard, sc));
        }
        match &t.action {
            Action::None => {}
            Action::Raise(e) => {
                let _ = write!(out, " do raise {}", sc.event(*e).name);
            }
            Action::Assign(v, rhs) => {
                let _ = write!(out, " do {} := {}", sc.variable(*v).name, print_expr(rhs, sc));
            }
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

/// One item per line, in the `.spec` syntax.
pub fn print_error_spec(spec: &ErrorSpec, sc: &Statechart) -> String {
    let mut out = String::new();
    for s in &spec.states {
        let _ = writeln!(out, "state {}", sc.state(*s).name);
    }
    for b in &spec.variables {
        let lit = match b.value {
            Value::Bool(v) => v.to_string(),
            Value::Int(i) => i.to_string(),
        };
        let _ = writeln!(out, "var {} {} {lit}", sc.variable(b.var).name, b.op.symbol());
    }
    for e in &spec.events {
        let _ = writeln!(out, "event {}", sc.event(*e).name);
    }
    out
}
