use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::model::{CmpOp, EventId, HavocId, Sort, TransitionId, Value, VarId};

/// What a solver symbol stands for, independent of the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// Bit `p` (0-based) of the state vector.
    StateBit(usize),
    EventFlag(EventId),
    ModelVar(VarId),
    /// Unconstrained value standing in for a hidden variable occurrence.
    Havoc(HavocId),
    /// Input event offered by the environment before the step.
    Injected(EventId),
    /// Selector: transition `t` fires between this step and the next.
    Fired(TransitionId),
}

/// A symbol indexed by a path step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolRef {
    pub kind: SymbolKind,
    pub step: usize,
}

impl SymbolRef {
    pub fn new(kind: SymbolKind, step: usize) -> Self {
        SymbolRef { kind, step }
    }

    pub fn bit(p: usize, step: usize) -> Self {
        SymbolRef::new(SymbolKind::StateBit(p), step)
    }

    pub fn flag(e: EventId, step: usize) -> Self {
        SymbolRef::new(SymbolKind::EventFlag(e), step)
    }

    pub fn var(v: VarId, step: usize) -> Self {
        SymbolRef::new(SymbolKind::ModelVar(v), step)
    }

    /// SMT-LIB identifier, e.g. `sb3_0` or `mv0_2`.
    pub fn smt_name(&self) -> String {
        let (prefix, i) = match self.kind {
            SymbolKind::StateBit(p) => ("sb", p),
            SymbolKind::EventFlag(e) => ("ev", e.0),
            SymbolKind::ModelVar(v) => ("mv", v.0),
            SymbolKind::Havoc(h) => ("hv", h.0),
            SymbolKind::Injected(e) => ("in", e.0),
            SymbolKind::Fired(t) => ("tr", t.0),
        };
        format!("{prefix}{i}_{}", self.step)
    }

    pub fn parse_smt_name(name: &str) -> Option<SymbolRef> {
        let (head, step) = name.rsplit_once('_')?;
        let step = step.parse().ok()?;
        let split = head.find(|c: char| c.is_ascii_digit())?;
        let (prefix, idx) = head.split_at(split);
        let i: usize = idx.parse().ok()?;
        let kind = match prefix {
            "sb" => SymbolKind::StateBit(i),
            "ev" => SymbolKind::EventFlag(EventId(i)),
            "mv" => SymbolKind::ModelVar(VarId(i)),
            "hv" => SymbolKind::Havoc(HavocId(i)),
            "in" => SymbolKind::Injected(EventId(i)),
            "tr" => SymbolKind::Fired(TransitionId(i)),
            _ => return None,
        };
        Some(SymbolRef { kind, step })
    }
}

impl fmt::Display for SymbolRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::StateBit(p) => write!(f, "v{}_{}", p + 1, self.step),
            SymbolKind::EventFlag(e) => write!(f, "e{}_{}", e.0, self.step),
            SymbolKind::ModelVar(v) => write!(f, "x{}_{}", v.0, self.step),
            SymbolKind::Havoc(h) => write!(f, "h{}_{}", h.0, self.step),
            SymbolKind::Injected(e) => write!(f, "in{}_{}", e.0, self.step),
            SymbolKind::Fired(t) => write!(f, "t{}_{}", t.0, self.step),
        }
    }
}

/// Integer-valued term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(i64),
    Sym(SymbolRef),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

/// Quantifier-free formula over boolean and integer symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(SymbolRef),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Cmp(CmpOp, Term, Term),
}

/// Values for some symbols, e.g. a solver model.
pub type Assignment = HashMap<SymbolRef, Value>;

impl Term {
    pub fn sym(s: SymbolRef) -> Term {
        Term::Sym(s)
    }

    pub fn eval(&self, a: &dyn Fn(SymbolRef) -> Option<Value>) -> Option<i64> {
        match self {
            Term::Const(c) => Some(*c),
            Term::Sym(s) => a(*s)?.as_int(),
            Term::Neg(x) => x.eval(a)?.checked_neg(),
            Term::Add(x, y) => x.eval(a)?.checked_add(y.eval(a)?),
            Term::Sub(x, y) => x.eval(a)?.checked_sub(y.eval(a)?),
            Term::Mul(x, y) => x.eval(a)?.checked_mul(y.eval(a)?),
        }
    }

    fn symbols(&self, out: &mut BTreeMap<SymbolRef, Sort>) {
        match self {
            Term::Const(_) => {}
            Term::Sym(s) => {
                out.insert(*s, Sort::Int);
            }
            Term::Neg(x) => x.symbols(out),
            Term::Add(x, y) | Term::Sub(x, y) | Term::Mul(x, y) => {
                x.symbols(out);
                y.symbols(out);
            }
        }
    }
}

impl Formula {
    pub fn atom(s: SymbolRef) -> Formula {
        Formula::Atom(s)
    }

    /// Negation without simplification.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    /// Literal for a boolean symbol taking `value`.
    pub fn lit(s: SymbolRef, value: bool) -> Formula {
        if value {
            Formula::Atom(s)
        } else {
            Formula::not(Formula::Atom(s))
        }
    }

    /// Conjunction that drops `⊤`, flattens nested conjunctions and
    /// collapses to `⊥` on a `⊥` operand.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => {
                    if inner.contains(&Formula::False) {
                        return Formula::False;
                    }
                    out.extend(inner.into_iter().filter(|f| *f != Formula::True))
                }
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one element"),
            _ => Formula::And(out),
        }
    }

    /// Dual of [`Formula::and`].
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => {
                    if inner.contains(&Formula::True) {
                        return Formula::True;
                    }
                    out.extend(inner.into_iter().filter(|f| *f != Formula::False))
                }
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().expect("one element"),
            _ => Formula::Or(out),
        }
    }

    /// Truth value under `a`; `None` when a symbol is missing.
    pub fn eval(&self, a: &dyn Fn(SymbolRef) -> Option<Value>) -> Option<bool> {
        Some(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(s) => a(*s)?.as_bool()?,
            Formula::Not(f) => !f.eval(a)?,
            Formula::And(fs) => {
                let mut all = true;
                for f in fs {
                    all &= f.eval(a)?;
                }
                all
            }
            Formula::Or(fs) => {
                let mut any = false;
                for f in fs {
                    any |= f.eval(a)?;
                }
                any
            }
            Formula::Iff(x, y) => x.eval(a)? == y.eval(a)?,
            Formula::Cmp(op, x, y) => op.holds(x.eval(a)?, y.eval(a)?),
        })
    }

    pub fn eval_in(&self, a: &Assignment) -> Option<bool> {
        self.eval(&|s| a.get(&s).copied())
    }

    /// Every symbol with the sort implied by its position.
    pub fn symbols(&self) -> BTreeMap<SymbolRef, Sort> {
        let mut out = BTreeMap::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeMap<SymbolRef, Sort>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(s) => {
                out.insert(*s, Sort::Bool);
            }
            Formula::Not(f) => f.collect(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect(out)),
            Formula::Iff(x, y) => {
                x.collect(out);
                y.collect(out);
            }
            Formula::Cmp(_, x, y) => {
                x.symbols(out);
                y.symbols(out);
            }
        }
    }

    /// Number of nodes, for statistics.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Cmp(..) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Iff(x, y) => 1 + x.size() + y.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Sym(s) => write!(f, "{s}"),
            Term::Neg(x) => write!(f, "-({x})"),
            Term::Add(x, y) => write!(f, "({x} + {y})"),
            Term::Sub(x, y) => write!(f, "({x} - {y})"),
            Term::Mul(x, y) => write!(f, "({x} * {y})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], sep: &str| -> fmt::Result {
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                match x {
                    Formula::And(_) | Formula::Or(_) => write!(f, "({x})")?,
                    _ => write!(f, "{x}")?,
                }
            }
            Ok(())
        };
        match self {
            Formula::True => f.write_str("⊤"),
            Formula::False => f.write_str("⊥"),
            Formula::Atom(s) => write!(f, "{s}"),
            Formula::Not(x) => match **x {
                Formula::Atom(_) | Formula::True | Formula::False => write!(f, "¬{x}"),
                _ => write!(f, "¬({x})"),
            },
            Formula::And(fs) => join(f, fs, "∧"),
            Formula::Or(fs) => join(f, fs, "∨"),
            Formula::Iff(x, y) => write!(f, "({x} ⇔ {y})"),
            Formula::Cmp(op, x, y) => write!(f, "{x} {} {y}", op.symbol()),
        }
    }
}
