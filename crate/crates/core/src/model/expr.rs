use std::fmt;

use serde::{Deserialize, Serialize};

use super::VarId;

/// Runtime value of a statechart variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn sort(self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Int(_) => Sort::Int,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Bool,
    Int,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("bool"),
            Sort::Int => f.write_str("int"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// Identifies an unconstrained value standing in for a hidden variable
/// occurrence. Each occurrence gets its own id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HavocId(pub usize);

/// Guard and action expressions: booleans, linear integer arithmetic and
/// comparisons over statechart variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Var(VarId),
    Havoc(HavocId, Sort),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("type mismatch: expected {expected}")]
    Type { expected: Sort },
    #[error("integer overflow")]
    Overflow,
    #[error("expression contains an unconstrained value and cannot be evaluated")]
    Nondeterministic,
    #[error("unknown variable index {0}")]
    UnknownVariable(usize),
}

impl Expr {
    pub fn tt() -> Expr {
        Expr::Bool(true)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Bool(true))
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn eval(&self, values: &[Value]) -> Result<Value, EvalError> {
        Ok(match self {
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Int(i) => Value::Int(*i),
            Expr::Var(v) => *values.get(v.0).ok_or(EvalError::UnknownVariable(v.0))?,
            Expr::Havoc(..) => return Err(EvalError::Nondeterministic),
            Expr::Neg(a) => Value::Int(a.eval_int(values)?.checked_neg().ok_or(EvalError::Overflow)?),
            Expr::Add(a, b) => Value::Int(
                a.eval_int(values)?
                    .checked_add(b.eval_int(values)?)
                    .ok_or(EvalError::Overflow)?,
            ),
            Expr::Sub(a, b) => Value::Int(
                a.eval_int(values)?
                    .checked_sub(b.eval_int(values)?)
                    .ok_or(EvalError::Overflow)?,
            ),
            Expr::Mul(a, b) => Value::Int(
                a.eval_int(values)?
                    .checked_mul(b.eval_int(values)?)
                    .ok_or(EvalError::Overflow)?,
            ),
            Expr::Not(a) => Value::Bool(!a.eval_bool(values)?),
            Expr::And(a, b) => Value::Bool(a.eval_bool(values)? && b.eval_bool(values)?),
            Expr::Or(a, b) => Value::Bool(a.eval_bool(values)? || b.eval_bool(values)?),
            Expr::Cmp(op, a, b) => {
                let (x, y) = (a.eval(values)?, b.eval(values)?);
                match (x, y) {
                    (Value::Int(x), Value::Int(y)) => Value::Bool(op.holds(x, y)),
                    (Value::Bool(x), Value::Bool(y)) => Value::Bool(op.holds(x, y)),
                    _ => return Err(EvalError::Type { expected: x.sort() }),
                }
            }
        })
    }

    pub fn eval_bool(&self, values: &[Value]) -> Result<bool, EvalError> {
        self.eval(values)?
            .as_bool()
            .ok_or(EvalError::Type { expected: Sort::Bool })
    }

    pub fn eval_int(&self, values: &[Value]) -> Result<i64, EvalError> {
        self.eval(values)?
            .as_int()
            .ok_or(EvalError::Type { expected: Sort::Int })
    }

    /// Infers the sort of the expression given the variable sorts.
    pub fn sort(&self, var_sort: &dyn Fn(VarId) -> Option<Sort>) -> Result<Sort, String> {
        let expect = |e: &Expr, s: Sort| -> Result<(), String> {
            let got = e.sort(var_sort)?;
            if got == s {
                Ok(())
            } else {
                Err(format!("expected {s} operand, found {got}"))
            }
        };
        match self {
            Expr::Bool(_) => Ok(Sort::Bool),
            Expr::Int(_) => Ok(Sort::Int),
            Expr::Var(v) => var_sort(*v).ok_or_else(|| format!("unknown variable index {}", v.0)),
            Expr::Havoc(_, s) => Ok(*s),
            Expr::Neg(a) => expect(a, Sort::Int).map(|_| Sort::Int),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                expect(a, Sort::Int)?;
                expect(b, Sort::Int)?;
                Ok(Sort::Int)
            }
            Expr::Not(a) => expect(a, Sort::Bool).map(|_| Sort::Bool),
            Expr::And(a, b) | Expr::Or(a, b) => {
                expect(a, Sort::Bool)?;
                expect(b, Sort::Bool)?;
                Ok(Sort::Bool)
            }
            Expr::Cmp(op, a, b) => {
                let sa = a.sort(var_sort)?;
                let sb = b.sort(var_sort)?;
                if sa != sb {
                    return Err(format!("cannot compare {sa} with {sb}"));
                }
                if sa == Sort::Bool && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                    return Err(format!("operator {} is not defined on bool", op.symbol()));
                }
                Ok(Sort::Bool)
            }
        }
    }

    /// True when the expression mentions no variable or unconstrained value.
    pub fn is_constant(&self) -> bool {
        let mut constant = true;
        self.visit(&mut |e| {
            if matches!(e, Expr::Var(_) | Expr::Havoc(..)) {
                constant = false;
            }
        });
        constant
    }

    /// Products must keep at least one constant factor.
    pub fn is_linear(&self) -> bool {
        let mut linear = true;
        self.visit(&mut |e| {
            if let Expr::Mul(a, b) = e {
                if !a.is_constant() && !b.is_constant() {
                    linear = false;
                }
            }
        });
        linear
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(_) | Expr::Havoc(..) => {}
            Expr::Neg(a) | Expr::Not(a) => a.visit(f),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Cmp(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn variables(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    pub fn has_havoc(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Havoc(..)));
        found
    }

    /// Rebuilds the expression, replacing each variable occurrence with the
    /// result of `f`.
    pub fn map_vars(&self, f: &mut dyn FnMut(VarId) -> Expr) -> Expr {
        let bx = |e: &Expr, f: &mut dyn FnMut(VarId) -> Expr| Box::new(e.map_vars(f));
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Havoc(..) => self.clone(),
            Expr::Var(v) => f(*v),
            Expr::Neg(a) => Expr::Neg(bx(a, f)),
            Expr::Not(a) => Expr::Not(bx(a, f)),
            Expr::Add(a, b) => Expr::Add(bx(a, f), bx(b, f)),
            Expr::Sub(a, b) => Expr::Sub(bx(a, f), bx(b, f)),
            Expr::Mul(a, b) => Expr::Mul(bx(a, f), bx(b, f)),
            Expr::And(a, b) => Expr::And(bx(a, f), bx(b, f)),
            Expr::Or(a, b) => Expr::Or(bx(a, f), bx(b, f)),
            Expr::Cmp(op, a, b) => Expr::Cmp(*op, bx(a, f), bx(b, f)),
        }
    }
}
