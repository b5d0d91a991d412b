use std::fmt;

/// Minimal s-expression, enough for solver responses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l) => Some(l),
            Sexp::Atom(_) => None,
        }
    }

    /// Integer literal, accepting `(- n)` for negatives.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(l) => match l.as_slice() {
                [Sexp::Atom(m), x] if m == "-" => x.as_int()?.checked_neg(),
                _ => None,
            },
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.as_atom()? {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(l) => {
                f.write_str("(")?;
                for (i, x) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Net parenthesis depth of `text`, ignoring string literals.
pub fn paren_balance(text: &str) -> i64 {
    let mut depth = 0;
    let mut in_str = false;
    for c in text.chars() {
        match c {
            '"' => in_str = !in_str,
            '(' if !in_str => depth += 1,
            ')' if !in_str => depth -= 1,
            _ => {}
        }
    }
    depth
}

pub fn parse(text: &str) -> Result<Sexp, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let e = parse_at(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(format!("trailing input after s-expression: {text}"));
    }
    Ok(e)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_at(chars: &[char], pos: &mut usize) -> Result<Sexp, String> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        None => Err("unexpected end of s-expression".into()),
        Some('(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    None => return Err("unbalanced parentheses".into()),
                    Some(')') => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_at(chars, pos)?),
                }
            }
        }
        Some(')') => Err("unexpected `)`".into()),
        Some('"') => {
            let start = *pos;
            *pos += 1;
            while *pos < chars.len() && chars[*pos] != '"' {
                *pos += 1;
            }
            if *pos >= chars.len() {
                return Err("unterminated string".into());
            }
            *pos += 1;
            Ok(Sexp::Atom(chars[start..*pos].iter().collect()))
        }
        Some(_) => {
            let start = *pos;
            while *pos < chars.len()
                && !chars[*pos].is_whitespace()
                && chars[*pos] != '('
                && chars[*pos] != ')'
            {
                *pos += 1;
            }
            Ok(Sexp::Atom(chars[start..*pos].iter().collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_get_value_response() {
        let e = parse("((sb0_0 true) (mv0_1 (- 3))\n (x 12))").unwrap();
        let l = e.as_list().unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l[0].as_list().unwrap()[1].as_bool(), Some(true));
        assert_eq!(l[1].as_list().unwrap()[1].as_int(), Some(-3));
        assert_eq!(e.to_string(), "((sb0_0 true) (mv0_1 (- 3)) (x 12))");
    }

    #[test]
    fn balance_and_errors() {
        assert_eq!(paren_balance("((a \"(\" b)"), 1);
        assert!(parse("(a b").is_err());
        assert!(parse("a b").is_err());
        assert_eq!(parse("\"x y\"").unwrap(), Sexp::Atom("\"x y\"".into()));
    }
}
