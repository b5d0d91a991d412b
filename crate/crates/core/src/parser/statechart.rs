use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use crate::diagnostic::{has_errors, Diagnostic, Span};
use crate::model::{
    Action, CmpOp, Domain, ErrorSpec, EventId, Expr, RegionId, StateId, Statechart,
    StatechartBuilder, Transition, Value, VarBound, VarId,
};

const KEYWORDS: &[&str] = &[
    "statechart", "var", "event", "input", "region", "initial", "state", "transition", "on",
    "when", "do", "raise", "true", "false", "and", "or", "not", "int", "bool",
];

/// Expression as written, before names are resolved.
#[derive(Debug, Clone)]
enum Raw {
    Int(i64),
    Bool(bool),
    Name(String, Span),
    Neg(Box<Raw>),
    Not(Box<Raw>),
    Bin(BinOp, Box<Raw>, Box<Raw>),
}

#[derive(Debug, Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Cmp(CmpOp),
}

#[derive(Debug, Clone)]
enum RawAction {
    None,
    Raise(String, Span),
    Assign(String, Span, Raw),
}

#[derive(Debug, Clone)]
struct RawTransition {
    source: (String, Span),
    target: (String, Span),
    trigger: Option<(String, Span)>,
    guard: Option<Raw>,
    action: RawAction,
}

pub(super) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Cursor {
    pub(super) fn new(text: &str) -> PResult<Self> {
        Ok(Cursor {
            toks: lex(text)?,
            pos: 0,
        })
    }

    pub(super) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(super) fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub(super) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(super) fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(super) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn unexpected(&self, want: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {want}, found {}", self.peek().describe()))
            .at(self.span())
    }

    pub(super) fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(super) fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub(super) fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Integer literal with optional leading minus.
    pub(super) fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(if neg { -i } else { i })
            }
            _ => Err(self.unexpected("integer literal")),
        }
    }

    fn expr(&mut self) -> PResult<(Raw, Span)> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<(Raw, Span)> {
        let (mut lhs, mut span) = self.and_expr()?;
        while self.eat(&Tok::OrOr) || self.eat_kw("or") {
            let (rhs, s) = self.and_expr()?;
            lhs = Raw::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
            span = span.to(s);
        }
        Ok((lhs, span))
    }

    fn and_expr(&mut self) -> PResult<(Raw, Span)> {
        let (mut lhs, mut span) = self.cmp_expr()?;
        while self.eat(&Tok::AndAnd) || self.eat_kw("and") {
            let (rhs, s) = self.cmp_expr()?;
            lhs = Raw::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
            span = span.to(s);
        }
        Ok((lhs, span))
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> PResult<(Raw, Span)> {
        let (lhs, span) = self.add_expr()?;
        if let Some(op) = self.cmp_op() {
            self.bump();
            let (rhs, s) = self.add_expr()?;
            if self.cmp_op().is_some() {
                return Err(Diagnostic::error("comparisons cannot be chained; use parentheses")
                    .at(self.span()));
            }
            return Ok((Raw::Bin(BinOp::Cmp(op), Box::new(lhs), Box::new(rhs)), span.to(s)));
        }
        Ok((lhs, span))
    }

    fn add_expr(&mut self) -> PResult<(Raw, Span)> {
        let (mut lhs, mut span) = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let (rhs, s) = self.mul_expr()?;
            lhs = Raw::Bin(op, Box::new(lhs), Box::new(rhs));
            span = span.to(s);
        }
        Ok((lhs, span))
    }

    fn mul_expr(&mut self) -> PResult<(Raw, Span)> {
        let (mut lhs, mut span) = self.unary()?;
        while self.eat(&Tok::Star) {
            let (rhs, s) = self.unary()?;
            lhs = Raw::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
            span = span.to(s);
        }
        Ok((lhs, span))
    }

    fn unary(&mut self) -> PResult<(Raw, Span)> {
        let start = self.span();
        if self.eat(&Tok::Minus) {
            if let Tok::Int(i) = *self.peek() {
                let s = self.bump().span;
                return Ok((Raw::Int(-i), start.to(s)));
            }
            let (e, s) = self.unary()?;
            return Ok((Raw::Neg(Box::new(e)), start.to(s)));
        }
        if self.eat(&Tok::Bang) || self.eat_kw("not") {
            let (e, s) = self.unary()?;
            return Ok((Raw::Not(Box::new(e)), start.to(s)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<(Raw, Span)> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok((Raw::Int(i), span))
            }
            Tok::LParen => {
                self.bump();
                let (e, _) = self.expr()?;
                let end = self.expect(Tok::RParen)?;
                Ok((e, span.to(end)))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok((Raw::Bool(s == "true"), span))
            }
            Tok::Ident(_) => {
                let (name, span) = self.ident("expression")?;
                Ok((Raw::Name(name, span.to(span)), span))
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

struct Ctx {
    builder: StatechartBuilder,
    diags: Vec<Diagnostic>,
    names: HashMap<String, Span>,
    states: HashMap<String, StateId>,
    vars: HashMap<String, VarId>,
    events: HashMap<String, EventId>,
    transitions: Vec<RawTransition>,
}

impl Ctx {
    fn declare(&mut self, name: &str, span: Span) {
        if let Some(prev) = self.names.get(name) {
            self.diags.push(
                Diagnostic::error(format!(
                    "duplicate identifier `{name}` (first declared at {}:{})",
                    prev.line, prev.column
                ))
                .at(span),
            );
        } else {
            self.names.insert(name.to_string(), span);
        }
    }

    fn region(&mut self, cur: &mut Cursor, parent: Option<StateId>) -> PResult<()> {
        cur.expect_kw("region")?;
        let (name, span) = cur.ident("region name")?;
        self.declare(&name, span);
        let r = self.builder.region(name.clone(), parent);
        cur.expect(Tok::LBrace)?;
        let mut count = 0;
        while !cur.eat(&Tok::RBrace) {
            self.state(cur, r)?;
            count += 1;
        }
        if count == 0 {
            self.diags
                .push(Diagnostic::error(format!("region `{name}` has no states")).at(span));
        }
        Ok(())
    }

    fn state(&mut self, cur: &mut Cursor, region: RegionId) -> PResult<()> {
        let initial = cur.eat_kw("initial");
        if !cur.at_kw("state") {
            return Err(cur.unexpected("`state` or `}`"));
        }
        cur.bump();
        let (name, span) = cur.ident("state name")?;
        self.declare(&name, span);
        let s = self.builder.state(name.clone(), region);
        if initial {
            self.builder.mark_initial(region, s);
        }
        self.states.entry(name).or_insert(s);
        if cur.eat(&Tok::LBrace) {
            while !cur.eat(&Tok::RBrace) {
                if !cur.at_kw("region") {
                    return Err(cur.unexpected("`region` or `}`"));
                }
                self.region(cur, Some(s))?;
            }
        } else {
            cur.expect(Tok::Semi)?;
        }
        Ok(())
    }

    fn variable(&mut self, cur: &mut Cursor) -> PResult<()> {
        cur.expect_kw("var")?;
        let (name, span) = cur.ident("variable name")?;
        self.declare(&name, span);
        cur.expect(Tok::Colon)?;
        let domain = if cur.eat_kw("bool") {
            Domain::Bool
        } else if cur.eat_kw("int") {
            if cur.eat(&Tok::LBracket) {
                let lower = if matches!(cur.peek(), Tok::DotDot) {
                    None
                } else {
                    Some(cur.int()?)
                };
                cur.expect(Tok::DotDot)?;
                let upper = if matches!(cur.peek(), Tok::RBracket) {
                    None
                } else {
                    Some(cur.int()?)
                };
                cur.expect(Tok::RBracket)?;
                Domain::Int { lower, upper }
            } else {
                Domain::Int {
                    lower: None,
                    upper: None,
                }
            }
        } else {
            return Err(cur.unexpected("`int` or `bool`"));
        };
        let initial = if cur.eat(&Tok::Assign) {
            let at = cur.span();
            match domain {
                Domain::Bool => {
                    if cur.eat_kw("true") {
                        Value::Bool(true)
                    } else if cur.eat_kw("false") {
                        Value::Bool(false)
                    } else {
                        return Err(cur.unexpected("`true` or `false`"));
                    }
                }
                Domain::Int { .. } => {
                    let v = Value::Int(cur.int()?);
                    if !domain.contains(v) {
                        self.diags.push(
                            Diagnostic::error(format!(
                                "initial value {v} of variable `{name}` is outside its domain"
                            ))
                            .at(at),
                        );
                    }
                    v
                }
            }
        } else {
            match domain {
                Domain::Bool => Value::Bool(false),
                Domain::Int { lower, upper } => {
                    let zero = Value::Int(0);
                    if domain.contains(zero) {
                        zero
                    } else {
                        Value::Int(lower.or(upper).unwrap_or(0))
                    }
                }
            }
        };
        cur.expect(Tok::Semi)?;
        let v = self.builder.variable(name.clone(), domain, initial);
        self.vars.entry(name).or_insert(v);
        Ok(())
    }

    fn events(&mut self, cur: &mut Cursor) -> PResult<()> {
        let input = cur.eat_kw("input");
        cur.expect_kw("event")?;
        loop {
            let (name, span) = cur.ident("event name")?;
            self.declare(&name, span);
            let e = self.builder.event(name.clone(), input);
            self.events.entry(name).or_insert(e);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(Tok::Semi)?;
        Ok(())
    }

    fn transition(&mut self, cur: &mut Cursor) -> PResult<()> {
        cur.expect_kw("transition")?;
        let source = cur.ident("source state")?;
        cur.expect(Tok::Arrow)?;
        let target = cur.ident("target state")?;
        let trigger = if cur.eat_kw("on") {
            Some(cur.ident("trigger event")?)
        } else {
            None
        };
        let guard = if cur.eat_kw("when") {
            Some(cur.expr()?.0)
        } else {
            None
        };
        let action = if cur.eat_kw("do") {
            if cur.eat_kw("raise") {
                let (e, s) = cur.ident("event name")?;
                RawAction::Raise(e, s)
            } else {
                let (v, s) = cur.ident("variable or `raise`")?;
                cur.expect(Tok::ColonEq)?;
                RawAction::Assign(v, s, cur.expr()?.0)
            }
        } else {
            RawAction::None
        };
        if matches!(cur.peek(), Tok::Pipe) || cur.at_kw("do") {
            return Err(Diagnostic::error("a transition carries at most one action").at(cur.span()));
        }
        cur.expect(Tok::Semi)?;
        self.transitions.push(RawTransition {
            source,
            target,
            trigger,
            guard,
            action,
        });
        Ok(())
    }

    fn lookup_state(&mut self, (name, span): &(String, Span)) -> Option<StateId> {
        let s = self.states.get(name).copied();
        if s.is_none() {
            self.diags
                .push(Diagnostic::error(format!("unknown state `{name}`")).at(*span));
        }
        s
    }

    fn lookup_event(&mut self, name: &str, span: Span) -> Option<EventId> {
        let e = self.events.get(name).copied();
        if e.is_none() {
            self.diags
                .push(Diagnostic::error(format!("unknown event `{name}`")).at(span));
        }
        e
    }

    fn resolve(&mut self, raw: &Raw) -> Option<Expr> {
        Some(match raw {
            Raw::Int(i) => Expr::Int(*i),
            Raw::Bool(b) => Expr::Bool(*b),
            Raw::Name(n, span) => match self.vars.get(n) {
                Some(v) => Expr::Var(*v),
                None => {
                    self.diags
                        .push(Diagnostic::error(format!("unknown variable `{n}`")).at(*span));
                    return None;
                }
            },
            Raw::Neg(a) => Expr::Neg(Box::new(self.resolve(a)?)),
            Raw::Not(a) => Expr::Not(Box::new(self.resolve(a)?)),
            Raw::Bin(op, a, b) => {
                let (a, b) = (self.resolve(a), self.resolve(b));
                let (a, b) = (Box::new(a?), Box::new(b?));
                match op {
                    BinOp::Add => Expr::Add(a, b),
                    BinOp::Sub => Expr::Sub(a, b),
                    BinOp::Mul => Expr::Mul(a, b),
                    BinOp::And => Expr::And(a, b),
                    BinOp::Or => Expr::Or(a, b),
                    BinOp::Cmp(op) => Expr::Cmp(*op, a, b),
                }
            }
        })
    }

    fn resolve_transitions(&mut self) {
        for rt in std::mem::take(&mut self.transitions) {
            let source = self.lookup_state(&rt.source);
            let target = self.lookup_state(&rt.target);
            let trigger = match &rt.trigger {
                Some((e, s)) => self.lookup_event(e, *s).map(Some),
                None => Some(None),
            };
            let guard = match &rt.guard {
                Some(g) => self.resolve(g),
                None => Some(Expr::tt()),
            };
            let action = match &rt.action {
                RawAction::None => Some(Action::None),
                RawAction::Raise(e, s) => self.lookup_event(e, *s).map(Action::Raise),
                RawAction::Assign(v, s, rhs) => {
                    let var = self.vars.get(v).copied();
                    if var.is_none() {
                        self.diags
                            .push(Diagnostic::error(format!("unknown variable `{v}`")).at(*s));
                    }
                    let rhs = self.resolve(rhs);
                    match (var, rhs) {
                        (Some(var), Some(rhs)) => Some(Action::Assign(var, rhs)),
                        _ => None,
                    }
                }
            };
            if let (Some(source), Some(target), Some(trigger), Some(guard), Some(action)) =
                (source, target, trigger, guard, action)
            {
                self.builder.transition(Transition {
                    source,
                    target,
                    trigger,
                    guard,
                    action,
                });
            }
        }
    }
}

/// Parses the `.hsc` statechart language. On failure every diagnostic found
/// is returned; syntax errors stop at the first one.
pub fn parse_statechart(text: &str) -> Result<Statechart, Vec<Diagnostic>> {
    let mut cur = Cursor::new(text).map_err(|d| vec![d])?;
    if matches!(cur.peek(), Tok::Eof) {
        return Err(vec![Diagnostic::error("no top-level region").at(cur.span())]);
    }
    let syntax = |d| vec![d];
    cur.expect_kw("statechart").map_err(syntax)?;
    let (name, _) = cur.ident("statechart name").map_err(syntax)?;
    cur.expect(Tok::LBrace).map_err(syntax)?;
    let mut ctx = Ctx {
        builder: StatechartBuilder::new(name),
        diags: Vec::new(),
        names: HashMap::new(),
        states: HashMap::new(),
        vars: HashMap::new(),
        events: HashMap::new(),
        transitions: Vec::new(),
    };
    let mut top_regions = 0;
    let stop = |ctx: &mut Ctx, d: Diagnostic| {
        let mut all = std::mem::take(&mut ctx.diags);
        all.push(d);
        all
    };
    loop {
        let r = if cur.eat(&Tok::RBrace) {
            break;
        } else if cur.at_kw("var") {
            ctx.variable(&mut cur)
        } else if cur.at_kw("event") || cur.at_kw("input") {
            ctx.events(&mut cur)
        } else if cur.at_kw("region") {
            top_regions += 1;
            ctx.region(&mut cur, None)
        } else if cur.at_kw("transition") {
            ctx.transition(&mut cur)
        } else {
            Err(cur.unexpected("`var`, `event`, `region`, `transition` or `}`"))
        };
        if let Err(d) = r {
            return Err(stop(&mut ctx, d));
        }
    }
    if !matches!(cur.peek(), Tok::Eof) {
        let d = cur.unexpected("end of input");
        return Err(stop(&mut ctx, d));
    }
    if top_regions == 0 {
        ctx.diags.push(Diagnostic::error("no top-level region"));
    }
    ctx.resolve_transitions();
    if has_errors(&ctx.diags) {
        return Err(ctx.diags);
    }
    ctx.builder.build()
}

/// Parses an error specification against `sc`. Items are `state S`,
/// `var v <op> literal` and `event e`, separated by newlines, `;` or `&&`.
pub fn parse_error_spec(text: &str, sc: &Statechart) -> Result<ErrorSpec, Vec<Diagnostic>> {
    let mut cur = Cursor::new(text).map_err(|d| vec![d])?;
    let mut spec = ErrorSpec::default();
    let mut diags = Vec::new();
    let mut items = 0;
    loop {
        while cur.eat(&Tok::Semi) || cur.eat(&Tok::AndAnd) || cur.eat_kw("and") {}
        if matches!(cur.peek(), Tok::Eof) {
            break;
        }
        let r: PResult<()> = (|| {
            if cur.eat_kw("state") {
                let (n, s) = cur.ident("state name")?;
                match sc.state_id(&n) {
                    Some(id) => {
                        spec.states.insert(id);
                    }
                    None => diags.push(Diagnostic::error(format!("unknown state `{n}`")).at(s)),
                }
            } else if cur.eat_kw("event") {
                let (n, s) = cur.ident("event name")?;
                match sc.event_id(&n) {
                    Some(id) => {
                        spec.events.insert(id);
                    }
                    None => diags.push(Diagnostic::error(format!("unknown event `{n}`")).at(s)),
                }
            } else if cur.eat_kw("var") {
                let (n, s) = cur.ident("variable name")?;
                let op = cur.cmp_op().ok_or_else(|| cur.unexpected("comparison operator"))?;
                cur.bump();
                let lit_span = cur.span();
                let value = if cur.eat_kw("true") {
                    Value::Bool(true)
                } else if cur.eat_kw("false") {
                    Value::Bool(false)
                } else {
                    Value::Int(cur.int()?)
                };
                match sc.var_id(&n) {
                    Some(var) => {
                        let sort = sc.variable(var).domain.sort();
                        if value.sort() != sort {
                            diags.push(
                                Diagnostic::error(format!(
                                    "variable `{n}` has sort {sort}, literal is {}",
                                    value.sort()
                                ))
                                .at(lit_span),
                            );
                        } else if sort == crate::model::Sort::Bool
                            && !matches!(op, CmpOp::Eq | CmpOp::Ne)
                        {
                            diags.push(
                                Diagnostic::error(format!(
                                    "operator {} is not defined on bool",
                                    op.symbol()
                                ))
                                .at(lit_span),
                            );
                        } else {
                            spec.variables.push(VarBound { var, op, value });
                        }
                    }
                    None => {
                        diags.push(Diagnostic::error(format!("unknown variable `{n}`")).at(s))
                    }
                }
            } else {
                return Err(cur.unexpected("`state`, `var` or `event`"));
            }
            Ok(())
        })();
        if let Err(d) = r {
            diags.push(d);
            return Err(diags);
        }
        items += 1;
    }
    if items == 0 {
        diags.push(Diagnostic::error("error specification is empty").at(cur.span()));
    }
    if diags.is_empty() {
        Ok(spec)
    } else {
        Err(diags)
    }
}
