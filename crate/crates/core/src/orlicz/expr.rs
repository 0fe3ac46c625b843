//! Expression trees for closed-form Orlicz functions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term   { ("+" | "-") term }
//! term   := factor { ("*" | "/") factor }
//! factor := "t" [ "^" number ] | number | "ln" "(" expr ")"
//!         | "max" "(" expr "," expr ")" | "(" expr ")"
//! ```
//!
//! `/` is accepted so piecewise definitions can carry rational coefficients.
//! `ln(1 + X)` is rewritten to a `ln_1p` node, which keeps functions such as
//! `(1+t)ln(1+t) - t` accurate at tiny `t`.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    T,
    /// `base^p` with a constant exponent.
    Pow(Box<Expr>, f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    /// `ln(1 + x)`.
    Ln1p(Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    /// Derivative of `max(f, g)`: `df` where `f > g`, `dg` where `g > f`, and
    /// the larger of the two at a crossing (the branch that dominates just to
    /// the right).
    MaxDeriv { f: Box<Expr>, g: Box<Expr>, df: Box<Expr>, dg: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    /// Byte offset into `source`.
    pub position: usize,
    pub source: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at position {}", self.message, self.position)?;
        writeln!(f, "  {}", self.source)?;
        write!(f, "  {}^", " ".repeat(self.position))
    }
}

impl std::error::Error for ParseError {}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::T => t,
            Expr::Pow(base, p) => base.eval(t).powf(*p),
            Expr::Add(a, c) => a.eval(t) + c.eval(t),
            Expr::Sub(a, c) => a.eval(t) - c.eval(t),
            Expr::Mul(a, c) => a.eval(t) * c.eval(t),
            Expr::Div(a, c) => a.eval(t) / c.eval(t),
            Expr::Ln(a) => a.eval(t).ln(),
            Expr::Ln1p(a) => a.eval(t).ln_1p(),
            Expr::Max(a, c) => a.eval(t).max(c.eval(t)),
            Expr::MaxDeriv { f, g, df, dg } => {
                let (fv, gv) = (f.eval(t), g.eval(t));
                if fv > gv {
                    df.eval(t)
                } else if gv > fv {
                    dg.eval(t)
                } else {
                    df.eval(t).max(dg.eval(t))
                }
            }
        }
    }

    /// Symbolic derivative with respect to `t`, lightly simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::T => Expr::Const(1.0),
            Expr::Pow(base, p) => {
                let outer = if *p == 0.0 {
                    return Expr::Const(0.0);
                } else if *p == 1.0 {
                    Expr::Const(1.0)
                } else if *p == 2.0 {
                    mul(Expr::Const(2.0), (**base).clone())
                } else {
                    mul(Expr::Const(*p), Expr::Pow(base.clone(), p - 1.0))
                };
                mul(outer, base.derivative())
            }
            Expr::Add(a, c) => add(a.derivative(), c.derivative()),
            Expr::Sub(a, c) => sub(a.derivative(), c.derivative()),
            Expr::Mul(a, c) => add(
                mul(a.derivative(), (**c).clone()),
                mul((**a).clone(), c.derivative()),
            ),
            Expr::Div(a, c) => {
                if let Expr::Const(k) = **c {
                    div(a.derivative(), Expr::Const(k))
                } else {
                    div(
                        sub(mul(a.derivative(), (**c).clone()), mul((**a).clone(), c.derivative())),
                        Expr::Pow(c.clone(), 2.0),
                    )
                }
            }
            Expr::Ln(a) => div(a.derivative(), (**a).clone()),
            Expr::Ln1p(a) => div(a.derivative(), add(Expr::Const(1.0), (**a).clone())),
            Expr::Max(f, g) => Expr::MaxDeriv {
                f: f.clone(),
                g: g.clone(),
                df: b(f.derivative()),
                dg: b(g.derivative()),
            },
            Expr::MaxDeriv { .. } => {
                // Only first derivatives are ever needed.
                Expr::Const(f64::NAN)
            }
        }
    }

    /// Number of nodes; used only to keep derived trees in check in tests.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::T => 1,
            Expr::Pow(a, _) | Expr::Ln(a) | Expr::Ln1p(a) => 1 + a.size(),
            Expr::Add(a, c) | Expr::Sub(a, c) | Expr::Mul(a, c) | Expr::Div(a, c) | Expr::Max(a, c) => {
                1 + a.size() + c.size()
            }
            Expr::MaxDeriv { f, g, df, dg } => 1 + f.size() + g.size() + df.size() + dg.size(),
        }
    }
}

fn add(a: Expr, c: Expr) -> Expr {
    match (&a, &c) {
        (Expr::Const(x), _) if *x == 0.0 => c,
        (_, Expr::Const(y)) if *y == 0.0 => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ => Expr::Add(b(a), b(c)),
    }
}

fn sub(a: Expr, c: Expr) -> Expr {
    match (&a, &c) {
        (_, Expr::Const(y)) if *y == 0.0 => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ => Expr::Sub(b(a), b(c)),
    }
}

fn mul(a: Expr, c: Expr) -> Expr {
    match (&a, &c) {
        (Expr::Const(x), _) | (_, Expr::Const(x)) if *x == 0.0 => Expr::Const(0.0),
        (Expr::Const(x), _) if *x == 1.0 => c,
        (_, Expr::Const(y)) if *y == 1.0 => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ => Expr::Mul(b(a), b(c)),
    }
}

fn div(a: Expr, c: Expr) -> Expr {
    match (&a, &c) {
        (Expr::Const(x), _) if *x == 0.0 => Expr::Const(0.0),
        (_, Expr::Const(y)) if *y == 1.0 => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x / y),
        _ => Expr::Div(b(a), b(c)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::T => write!(f, "t"),
            Expr::Pow(a, p) => match **a {
                Expr::T => write!(f, "t^{p}"),
                _ => write!(f, "({a})^{p}"),
            },
            Expr::Add(a, c) => write!(f, "({a} + {c})"),
            Expr::Sub(a, c) => write!(f, "({a} - {c})"),
            Expr::Mul(a, c) => write!(f, "{a}*{c}"),
            Expr::Div(a, c) => write!(f, "{a}/{c}"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Ln1p(a) => write!(f, "ln(1 + {a})"),
            Expr::Max(a, c) => write!(f, "max({a}, {c})"),
            Expr::MaxDeriv { f: a, g: c, .. } => write!(f, "d/dt max({a}, {c})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    T,
    Ln,
    Max,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match c {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                _ => None,
            };
            if let Some(t) = single {
                lx.toks.push((t, i));
                i += 1;
                continue;
            }
            if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Optional exponent part, e.g. 1e-3.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| lx.err(format!("malformed number '{text}'"), start))?;
                lx.toks.push((Tok::Num(v), start));
                continue;
            }
            if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let tok = match &src[start..i] {
                    "t" => Tok::T,
                    "ln" => Tok::Ln,
                    "max" => Tok::Max,
                    w => return Err(lx.err(format!("unknown identifier '{w}'"), start)),
                };
                lx.toks.push((tok, start));
                continue;
            }
            return Err(lx.err(format!("unexpected character '{c}'"), i));
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }

    fn err(&self, message: String, position: usize) -> ParseError {
        ParseError { message, position, source: self.src.to_string() }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { message: message.into(), position: self.at(), source: self.src.to_string() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(b(lhs), b(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(b(lhs), b(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(b(lhs), b(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(b(lhs), b(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.err("expected a number")),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::T => {
                self.bump();
                if *self.peek() == Tok::Caret {
                    self.bump();
                    let p = self.number()?;
                    Ok(if p == 1.0 { Expr::T } else { Expr::Pow(b(Expr::T), p) })
                } else {
                    Ok(Expr::T)
                }
            }
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Ln => {
                self.bump();
                self.expect(Tok::LParen, "'(' after ln")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(rewrite_ln(inner))
            }
            Tok::Max => {
                self.bump();
                self.expect(Tok::LParen, "'(' after max")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let c = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Max(b(a), b(c)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::End => Err(self.err("unexpected end of input")),
            _ => Err(self.err("expected 't', a number, 'ln', 'max' or '('")),
        }
    }
}

fn rewrite_ln(inner: Expr) -> Expr {
    match inner {
        Expr::Add(a, c) if *a == Expr::Const(1.0) => Expr::Ln1p(c),
        Expr::Add(a, c) if *c == Expr::Const(1.0) => Expr::Ln1p(a),
        other => Expr::Ln(b(other)),
    }
}

/// Parse an expression in the grammar above.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::run(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}
