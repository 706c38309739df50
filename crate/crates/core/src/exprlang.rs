//! Arithmetic expressions in the chart variables `u`, `v` and named parameters.
//!
//! Grammar, from loosest to tightest binding:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers `u` and `v` are the chart variables, `pi` is a constant,
//! `sqrt`, `sin`, `cos` are functions and every other identifier is a
//! parameter resolved at evaluation time.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jets::{Jet2, JetError};

/// Named parameter values.
pub type Params = BTreeMap<String, f64>;

/// Errors raised while parsing or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    /// Malformed input, located by 1-based line and column.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    /// A parameter was referenced but never given a value.
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    /// Evaluation left the domain of an elementary function.
    #[error("domain error: {0}")]
    Domain(String),
}

impl From<JetError> for ExprError {
    fn from(e: JetError) -> Self {
        ExprError::Domain(e.to_string())
    }
}

/// Elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    U,
    V,
    Pi,
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize, usize)>, ExprError> {
        let mut lx = Lexer { chars: src.char_indices().peekable(), line: 1, col: 1 };
        let mut out = Vec::new();
        loop {
            let t = lx.next_token(src)?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn next_token(&mut self, src: &str) -> Result<(Tok, usize, usize), ExprError> {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(&(start, c)) = self.chars.peek() else {
            return Ok((Tok::End, line, col));
        };
        if c.is_ascii_digit() || c == '.' {
            let mut end = start;
            let mut prev = ' ';
            while let Some(&(i, d)) = self.chars.peek() {
                let exp_sign = (d == '+' || d == '-') && (prev == 'e' || prev == 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    end = i + d.len_utf8();
                    prev = d;
                    self.bump();
                } else {
                    break;
                }
            }
            let text = &src[start..end];
            let x: f64 = text.parse().map_err(|_| ExprError::Syntax {
                line,
                col,
                msg: format!("malformed number `{text}`"),
            })?;
            return Ok((Tok::Num(x), line, col));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = self.chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok((Tok::Ident(src[start..end].to_string()), line, col));
        }
        if "+-*/^()".contains(c) {
            self.bump();
            return Ok((Tok::Sym(c), line, col));
        }
        Err(ExprError::Syntax { line, col, msg: format!("unexpected character `{c}`") })
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        let (_, line, col) = self.toks[self.pos];
        Err(ExprError::Syntax { line, col, msg: msg.into() })
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if *self.peek() == Tok::Sym(c) {
            self.advance();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.advance();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.advance();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.advance();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.advance();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Sym('-') {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.advance();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.advance();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(x) if x.fract() == 0.0 && x.abs() <= i32::MAX as f64 => {
                self.advance();
                let n = x as i32;
                if *self.peek() == Tok::Sym('^') {
                    return self.err("chained exponents need parentheses");
                }
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => self.err("exponent must be an integer literal"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.advance() {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                Ok(match name.as_str() {
                    "u" => Expr::U,
                    "v" => Expr::V,
                    "pi" => Expr::Pi,
                    _ => Expr::Param(name),
                })
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                self.err("unexpected end of input")
            }
            Tok::Sym(c) => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!("unexpected `{c}`"))
            }
        }
    }
}

/// Parses an expression; any identifier that is not a variable, constant or
/// function becomes a parameter.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses an expression and rejects parameters outside `known`.
pub fn parse_with_params(src: &str, known: &Params) -> Result<Expr, ExprError> {
    let e = parse(src)?;
    let mut names = Vec::new();
    e.param_names(&mut names);
    for n in names {
        if !known.contains_key(&n) {
            return Err(ExprError::UnknownIdentifier(n));
        }
    }
    Ok(e)
}

impl Expr {
    /// Collects parameter names in first-use order without duplicates.
    pub fn param_names(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.param_names(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.param_names(out);
                b.param_names(out);
            }
            _ => {}
        }
    }

    /// Replaces parameters by their numeric values.
    pub fn bind(&self, params: &Params) -> Result<Expr, ExprError> {
        let b = |e: &Expr| e.bind(params).map(Box::new);
        Ok(match self {
            Expr::Param(n) => Expr::Num(
                *params.get(n).ok_or_else(|| ExprError::UnknownIdentifier(n.clone()))?,
            ),
            Expr::Neg(a) => Expr::Neg(b(a)?),
            Expr::Pow(a, n) => Expr::Pow(b(a)?, *n),
            Expr::Call(f, a) => Expr::Call(*f, b(a)?),
            Expr::Add(x, y) => Expr::Add(b(x)?, b(y)?),
            Expr::Sub(x, y) => Expr::Sub(b(x)?, b(y)?),
            Expr::Mul(x, y) => Expr::Mul(b(x)?, b(y)?),
            Expr::Div(x, y) => Expr::Div(b(x)?, b(y)?),
            other => other.clone(),
        })
    }

    /// Scalar evaluation at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64, params: &Params) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(x) => *x,
            Expr::U => u,
            Expr::V => v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Param(n) => {
                *params.get(n).ok_or_else(|| ExprError::UnknownIdentifier(n.clone()))?
            }
            Expr::Neg(a) => -a.eval(u, v, params)?,
            Expr::Add(a, b) => a.eval(u, v, params)? + b.eval(u, v, params)?,
            Expr::Sub(a, b) => a.eval(u, v, params)? - b.eval(u, v, params)?,
            Expr::Mul(a, b) => a.eval(u, v, params)? * b.eval(u, v, params)?,
            Expr::Div(a, b) => {
                let d = b.eval(u, v, params)?;
                if d == 0.0 {
                    return Err(ExprError::Domain("division by zero".into()));
                }
                a.eval(u, v, params)? / d
            }
            Expr::Pow(a, n) => {
                let x = a.eval(u, v, params)?;
                if *n < 0 && x == 0.0 {
                    return Err(ExprError::Domain("negative power of zero".into()));
                }
                x.powi(*n)
            }
            Expr::Call(f, a) => {
                let x = a.eval(u, v, params)?;
                match f {
                    Func::Sqrt if x < 0.0 => {
                        return Err(ExprError::Domain(format!("sqrt of {x}")))
                    }
                    Func::Sqrt => x.sqrt(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                }
            }
        })
    }

    /// Jet evaluation: the Taylor expansion of order `order` about `(u0, v0)`.
    pub fn eval_jet(
        &self,
        u0: f64,
        v0: f64,
        order: usize,
        params: &Params,
    ) -> Result<Jet2, ExprError> {
        let c = |x: f64| Jet2::constant(x, order).map_err(ExprError::from);
        Ok(match self {
            Expr::Num(x) => c(*x)?,
            Expr::U => Jet2::var_u(u0, order)?,
            Expr::V => Jet2::var_v(v0, order)?,
            Expr::Pi => c(std::f64::consts::PI)?,
            Expr::Param(n) => {
                c(*params.get(n).ok_or_else(|| ExprError::UnknownIdentifier(n.clone()))?)?
            }
            Expr::Neg(a) => -a.eval_jet(u0, v0, order, params)?,
            Expr::Add(a, b) => {
                a.eval_jet(u0, v0, order, params)? + b.eval_jet(u0, v0, order, params)?
            }
            Expr::Sub(a, b) => {
                a.eval_jet(u0, v0, order, params)? - b.eval_jet(u0, v0, order, params)?
            }
            Expr::Mul(a, b) => {
                a.eval_jet(u0, v0, order, params)? * b.eval_jet(u0, v0, order, params)?
            }
            Expr::Div(a, b) => {
                let den = b.eval_jet(u0, v0, order, params)?;
                a.eval_jet(u0, v0, order, params)?.div(&den)?
            }
            Expr::Pow(a, n) => a.eval_jet(u0, v0, order, params)?.powi(*n)?,
            Expr::Call(f, a) => {
                let x = a.eval_jet(u0, v0, order, params)?;
                match f {
                    Func::Sqrt => x.sqrt()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                }
            }
        })
    }

    /// Symbolic partial derivative with respect to `u` (`var = 0`) or `v`.
    pub fn derivative(&self, var: usize) -> Expr {
        use Expr::*;
        let bx = Box::new;
        match self {
            Num(_) | Pi | Param(_) => Num(0.0),
            U => Num(if var == 0 { 1.0 } else { 0.0 }),
            V => Num(if var == 1 { 1.0 } else { 0.0 }),
            Neg(a) => Neg(bx(a.derivative(var))),
            Add(a, b) => Add(bx(a.derivative(var)), bx(b.derivative(var))),
            Sub(a, b) => Sub(bx(a.derivative(var)), bx(b.derivative(var))),
            Mul(a, b) => Add(
                bx(Mul(bx(a.derivative(var)), b.clone())),
                bx(Mul(a.clone(), bx(b.derivative(var)))),
            ),
            Div(a, b) => Div(
                bx(Sub(
                    bx(Mul(bx(a.derivative(var)), b.clone())),
                    bx(Mul(a.clone(), bx(b.derivative(var)))),
                )),
                bx(Pow(b.clone(), 2)),
            ),
            // a⁰ is constant; writing n·a⁻¹·a' would fail where a = 0
            Pow(_, 0) => Num(0.0),
            Pow(a, n) => Mul(
                bx(Mul(bx(Num(*n as f64)), bx(Pow(a.clone(), n - 1)))),
                bx(a.derivative(var)),
            ),
            Call(Func::Sqrt, a) => Div(
                bx(a.derivative(var)),
                bx(Mul(bx(Num(2.0)), bx(Call(Func::Sqrt, a.clone())))),
            ),
            Call(Func::Sin, a) => Mul(bx(Call(Func::Cos, a.clone())), bx(a.derivative(var))),
            Call(Func::Cos, a) => {
                Neg(bx(Mul(bx(Call(Func::Sin, a.clone())), bx(a.derivative(var)))))
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::U => write!(f, "u"),
            Expr::V => write!(f, "v"),
            Expr::Pi => write!(f, "pi"),
            Expr::Param(n) => write!(f, "{n}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_prec(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.write_prec(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.write_prec(f, 3)
            }
            Expr::Pow(a, n) => {
                a.write_prec(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
