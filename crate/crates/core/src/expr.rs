//! Small expression language for graph segments, sources and coefficients.
//!
//! Grammar: numbers, named variables, `pi`, `e`, the binary operators
//! `+ - * / ^`, unary minus, parentheses, and the functions
//! `sin cos exp tanh abs sign`. Division is restricted to constant
//! denominators and powers to constant exponents, which keeps every
//! expression locally bounded.

use crate::error::{Error, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Abs,
    Sign,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "tanh" => Self::Tanh,
            "abs" => Self::Abs,
            "sign" => Self::Sign,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Self::Sin => x.sin(),
            Self::Cos => x.cos(),
            Self::Exp => x.exp(),
            Self::Tanh => x.tanh(),
            Self::Abs => x.abs(),
            Self::Sign => sign(x),
        }
    }
}

/// `sign(0) = 0`, unlike `f64::signum`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parses `src` with the given variable names, bound to indices in order.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            vars,
        };
        let e = p.expr()?;
        if let Some(tok) = p.tokens.get(p.pos) {
            return Err(err(tok.col, "unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn constant(c: f64) -> Self {
        Self::Const(c)
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Self::Const(c) => *c,
            Self::Var(i) => vars[*i],
            Self::Neg(a) => -a.eval(vars),
            Self::Add(a, b) => a.eval(vars) + b.eval(vars),
            Self::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Self::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Self::Div(a, b) => a.eval(vars) / b.eval(vars),
            Self::Pow(a, b) => {
                let e = b.eval(vars);
                let base = a.eval(vars);
                if e.fract() == 0.0 && e.abs() < 64.0 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Self::Call(f, a) => f.apply(a.eval(vars)),
        }
    }

    /// Value if the expression references no variable.
    pub fn const_value(&self) -> Option<f64> {
        if self.references_vars() {
            None
        } else {
            Some(self.eval(&[]))
        }
    }

    fn references_vars(&self) -> bool {
        match self {
            Self::Const(_) => false,
            Self::Var(_) => true,
            Self::Neg(a) | Self::Call(_, a) => a.references_vars(),
            Self::Add(a, b)
            | Self::Sub(a, b)
            | Self::Mul(a, b)
            | Self::Div(a, b)
            | Self::Pow(a, b) => a.references_vars() || b.references_vars(),
        }
    }

    /// Converts to a polynomial in variable 0, if the expression is one.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        match self {
            Self::Const(c) => Some(Polynomial::constant(*c)),
            Self::Var(0) => Some(Polynomial::identity()),
            Self::Var(_) => None,
            Self::Neg(a) => Some(-&a.to_polynomial()?),
            Self::Add(a, b) => Some(&a.to_polynomial()? + &b.to_polynomial()?),
            Self::Sub(a, b) => Some(&a.to_polynomial()? - &b.to_polynomial()?),
            Self::Mul(a, b) => Some(&a.to_polynomial()? * &b.to_polynomial()?),
            Self::Div(a, b) => Some(a.to_polynomial()?.scale(1.0 / b.const_value()?)),
            Self::Pow(a, b) => {
                let n = nonneg_int(b.const_value()?)?;
                Some(a.to_polynomial()?.powi(n))
            }
            Self::Call(..) => self.const_value().map(Polynomial::constant),
        }
    }

    /// Total polynomial degree in all variables, if polynomial.
    pub fn poly_degree(&self) -> Option<u32> {
        match self {
            Self::Const(_) => Some(0),
            Self::Var(_) => Some(1),
            Self::Neg(a) => a.poly_degree(),
            Self::Add(a, b) | Self::Sub(a, b) => Some(a.poly_degree()?.max(b.poly_degree()?)),
            Self::Mul(a, b) => Some(a.poly_degree()? + b.poly_degree()?),
            Self::Div(a, b) => {
                b.const_value()?;
                a.poly_degree()
            }
            Self::Pow(a, b) => Some(a.poly_degree()? * nonneg_int(b.const_value()?)?),
            Self::Call(..) => self.const_value().map(|_| 0),
        }
    }

    /// Arguments of every `sign(...)` and `abs(...)` occurring in the expression.
    pub fn kink_arguments(&self) -> Vec<(Func, &Expr)> {
        let mut out = Vec::new();
        self.collect_kinks(&mut out);
        out
    }

    fn collect_kinks<'a>(&'a self, out: &mut Vec<(Func, &'a Expr)>) {
        match self {
            Self::Const(_) | Self::Var(_) => {}
            Self::Call(f @ (Func::Sign | Func::Abs), a) => {
                out.push((*f, a));
                a.collect_kinks(out);
            }
            Self::Neg(a) | Self::Call(_, a) => a.collect_kinks(out),
            Self::Add(a, b)
            | Self::Sub(a, b)
            | Self::Mul(a, b)
            | Self::Div(a, b)
            | Self::Pow(a, b) => {
                a.collect_kinks(out);
                b.collect_kinks(out);
            }
        }
    }

    /// Replaces every `sign(arg)` by the constant `sign(arg(at))`, and every
    /// `abs(arg)` with polynomial `arg` by `sign(arg(at)) * arg`.
    ///
    /// Valid on an interval where none of these arguments changes sign.
    pub fn freeze_kinks(&self, at: &[f64]) -> Expr {
        let rec = |e: &Expr| Box::new(e.freeze_kinks(at));
        match self {
            Self::Const(_) | Self::Var(_) => self.clone(),
            Self::Call(Func::Sign, a) => Self::Const(sign(a.eval(at))),
            Self::Call(Func::Abs, a) if a.to_polynomial().is_some() => {
                Self::Mul(Box::new(Self::Const(sign(a.eval(at)))), rec(a))
            }
            Self::Neg(a) => Self::Neg(rec(a)),
            Self::Call(f, a) => Self::Call(*f, rec(a)),
            Self::Add(a, b) => Self::Add(rec(a), rec(b)),
            Self::Sub(a, b) => Self::Sub(rec(a), rec(b)),
            Self::Mul(a, b) => Self::Mul(rec(a), rec(b)),
            Self::Div(a, b) => Self::Div(rec(a), rec(b)),
            Self::Pow(a, b) => Self::Pow(rec(a), rec(b)),
        }
    }
}

fn nonneg_int(x: f64) -> Option<u32> {
    (x >= 0.0 && x.fract() == 0.0 && x <= 64.0).then_some(x as u32)
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Expression {
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| err(col, format!("invalid number '{text}'")))?;
            out.push(Token {
                tok: Tok::Num(v),
                col,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                col,
            });
            i += 1;
        } else {
            return Err(err(col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token { tok: Tok::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.col + 1)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            let col = self.tokens[self.pos].col;
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                match rhs.const_value() {
                    Some(d) if d != 0.0 => Expr::Div(Box::new(lhs), Box::new(rhs)),
                    Some(_) => return Err(err(col, "division by zero")),
                    None => return Err(err(col, "denominator must be a constant")),
                }
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            let col = self.tokens[self.pos].col;
            self.pos += 1;
            let exp = self.unary()?;
            let Some(v) = exp.const_value() else {
                return Err(err(col, "exponent must be a constant"));
            };
            if v < 0.0 {
                return Err(err(col, "exponent must be non-negative"));
            }
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(err(self.end_col(), "unexpected end of expression"));
        };
        self.pos += 1;
        match tok.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_close(tok.col)?;
                Ok(e)
            }
            Tok::Op(c) => Err(err(tok.col, format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if self.peek_op() != Some('(') {
                        return Err(err(tok.col, format!("'{name}' must be called")));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_close(tok.col)?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    _ => Err(err(tok.col, format!("unknown identifier '{name}'"))),
                }
            }
        }
    }

    fn expect_close(&mut self, open_col: usize) -> Result<()> {
        if self.peek_op() == Some(')') {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(open_col, "unbalanced parenthesis"))
        }
    }
}
