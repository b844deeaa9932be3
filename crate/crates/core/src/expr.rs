//! Scalar expressions over named coordinates.
//!
//! Grammar (as it appears verbatim in scenario files):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' signed-integer)?
//! base   := number | name | func '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Functions: `sin cos tan exp log sqrt`, angles in radians. Exponents are
//! integer literals only; fractional powers are spelled via `sqrt` or
//! `exp`/`log`. Constant subtrees are folded at construction; no other
//! rewriting happens, so comparisons stay numeric.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// Expression AST. Variables carry both their display name and their index
/// into the owning chart's coordinate list, so evaluation binds positionally
/// against a plain `&[f64]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var { name: String, index: usize },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// `base ^ n` with a literal integer exponent.
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// Syntax error with the byte offset where scanning stopped.
    Syntax { offset: usize, message: String },
    /// An identifier that is neither a function nor a declared coordinate.
    UnknownIdentifier { offset: usize, name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, message } => {
                write!(f, "syntax error at byte {offset}: {message}")
            }
            ParseError::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at byte {offset}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// log of a non-positive value, sqrt of a negative value, or division
    /// by zero; carries a rendering of the offending subexpression.
    Domain { subexpr: String, detail: String },
    /// The result overflowed to a non-finite value.
    NonFinite { subexpr: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain { subexpr, detail } => {
                write!(f, "domain error in `{subexpr}`: {detail}")
            }
            EvalError::NonFinite { subexpr } => {
                write!(f, "non-finite value in `{subexpr}`")
            }
        }
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(name: &str, index: usize) -> Expr {
        Expr::Var {
            name: name.to_string(),
            index,
        }
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// `a + b` with constant folding.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x + y).is_finite() => Expr::Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x - y).is_finite() => Expr::Const(x - y),
            (_, Some(y)) if y == 0.0 => a,
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            _ => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
        }
    }

    /// `a * b`. Zero absorbs only when the dropped side cannot raise a
    /// domain error on its own (derivative construction relies on this).
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x * y).is_finite() => Expr::Const(x * y),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == 0.0 && b.is_total() => Expr::Const(0.0),
            (_, Some(y)) if y == 0.0 && a.is_total() => Expr::Const(0.0),
            _ => Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 && (x / y).is_finite() => Expr::Const(x / y),
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == 0.0 && b.is_total() => Expr::Const(0.0),
            _ => Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Unary(UnaryOp::Neg, inner) => *inner,
            other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
        }
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        if op == UnaryOp::Neg {
            return Expr::neg(a);
        }
        if let Some(c) = a.as_const() {
            let v = apply_unary(op, c);
            if let Ok(v) = v {
                if v.is_finite() {
                    return Expr::Const(v);
                }
            }
        }
        Expr::Unary(op, Box::new(a))
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match n {
            0 => Expr::Const(1.0),
            1 => a,
            _ => {
                if let Some(c) = a.as_const() {
                    let v = powi(c, n);
                    if v.is_finite() {
                        return Expr::Const(v);
                    }
                }
                Expr::Pow(Box::new(a), n)
            }
        }
    }

    /// True when evaluation can never raise a domain error (no log, sqrt,
    /// division, or negative power anywhere in the tree).
    fn is_total(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var { .. } => true,
            Expr::Unary(op, a) => {
                !matches!(op, UnaryOp::Log | UnaryOp::Sqrt) && a.is_total()
            }
            Expr::Binary(op, a, b) => {
                !matches!(op, BinaryOp::Div) && a.is_total() && b.is_total()
            }
            Expr::Pow(a, n) => *n >= 0 && a.is_total(),
        }
    }

    /// Indices of all variables appearing in the expression, deduplicated.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var { index, .. } => out.push(*index),
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(a, _) => a.collect_vars(out),
        }
    }

    /// Evaluates against positional bindings (`vars[i]` is coordinate `i`).
    pub fn eval(&self, vars: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var { index, .. } => vars[*index],
            Expr::Unary(op, a) => {
                let x = a.eval(vars)?;
                apply_unary(*op, x).map_err(|detail| EvalError::Domain {
                    subexpr: self.to_string(),
                    detail,
                })?
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(vars)?;
                let y = b.eval(vars)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::Domain {
                                subexpr: self.to_string(),
                                detail: "division by zero".to_string(),
                            });
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, n) => {
                let x = a.eval(vars)?;
                if x == 0.0 && *n < 0 {
                    return Err(EvalError::Domain {
                        subexpr: self.to_string(),
                        detail: "zero raised to a negative power".to_string(),
                    });
                }
                powi(x, *n)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                subexpr: self.to_string(),
            })
        }
    }

    /// Exact symbolic derivative with respect to coordinate `index`.
    pub fn derivative(&self, index: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var { index: i, .. } => {
                if *i == index {
                    Expr::Const(1.0)
                } else {
                    Expr::zero()
                }
            }
            Expr::Unary(op, a) => {
                let da = a.derivative(index);
                if da.is_zero_const() && *op != UnaryOp::Neg {
                    return Expr::zero();
                }
                let a = (**a).clone();
                match op {
                    UnaryOp::Neg => Expr::neg(da),
                    UnaryOp::Sin => Expr::mul(Expr::unary(UnaryOp::Cos, a), da),
                    UnaryOp::Cos => {
                        Expr::neg(Expr::mul(Expr::unary(UnaryOp::Sin, a), da))
                    }
                    UnaryOp::Tan => {
                        // d tan u = du / cos(u)^2
                        Expr::div(da, Expr::pow(Expr::unary(UnaryOp::Cos, a), 2))
                    }
                    UnaryOp::Exp => Expr::mul(Expr::unary(UnaryOp::Exp, a), da),
                    UnaryOp::Log => Expr::div(da, a),
                    UnaryOp::Sqrt => Expr::div(
                        da,
                        Expr::mul(Expr::Const(2.0), Expr::unary(UnaryOp::Sqrt, a)),
                    ),
                }
            }
            Expr::Binary(op, a, b) => {
                let da = a.derivative(index);
                let db = b.derivative(index);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => Expr::add(da, db),
                    BinaryOp::Sub => Expr::sub(da, db),
                    BinaryOp::Mul => {
                        Expr::add(Expr::mul(da, b), Expr::mul(a, db))
                    }
                    BinaryOp::Div => {
                        // (da*b - a*db) / b^2
                        Expr::div(
                            Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                            Expr::pow(b, 2),
                        )
                    }
                }
            }
            Expr::Pow(a, n) => {
                let da = a.derivative(index);
                if da.is_zero_const() {
                    return Expr::zero();
                }
                let a = (**a).clone();
                Expr::mul(
                    Expr::mul(Expr::Const(f64::from(*n)), Expr::pow(a, n - 1)),
                    da,
                )
            }
        }
    }
}

fn apply_unary(op: UnaryOp, x: f64) -> Result<f64, String> {
    Ok(match op {
        UnaryOp::Neg => -x,
        UnaryOp::Sin => libm::sin(x),
        UnaryOp::Cos => libm::cos(x),
        UnaryOp::Tan => libm::tan(x),
        UnaryOp::Exp => libm::exp(x),
        UnaryOp::Log => {
            if x <= 0.0 {
                return Err(format!("log of non-positive value {x}"));
            }
            libm::log(x)
        }
        UnaryOp::Sqrt => {
            if x < 0.0 {
                return Err(format!("sqrt of negative value {x}"));
            }
            libm::sqrt(x)
        }
    })
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 || c.is_sign_negative() {
                    // print through the parser's negative-literal folding
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var { name, .. } => write!(f, "{name}"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "-({a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "(({a}) {} ({b}))", op.symbol()),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
        }
    }
}

/// Parses `text` against the declared coordinate names.
pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars: allowed_vars,
    };
    p.skip_ws();
    if p.pos >= p.bytes.len() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(ParseError::Syntax {
            offset: p.pos,
            message: format!("unexpected trailing input `{}`", p.rest()),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &str {
        core::str::from_utf8(&self.bytes[self.pos..]).unwrap_or("")
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::add(acc, rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::sub(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = Expr::mul(acc, rhs);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = Expr::div(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let n = self.signed_integer()?;
            Ok(Expr::pow(base, n))
        } else {
            Ok(base)
        }
    }

    fn signed_integer(&mut self) -> Result<i32, ParseError> {
        let start = self.pos;
        let negative = self.eat(b'-');
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ParseError::Syntax {
                offset: self.pos,
                message: "expected an integer exponent".to_string(),
            });
        }
        let text = core::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
        let mag: i64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "integer exponent out of range".to_string(),
        })?;
        let signed = if negative { -mag } else { mag };
        i32::try_from(signed).map_err(|_| ParseError::Syntax {
            offset: start,
            message: "integer exponent out of range".to_string(),
        })
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ParseError::Syntax {
                offset: self.pos,
                message: "unexpected end of input".to_string(),
            }),
            Some(b'-') => {
                self.pos += 1;
                let inner = self.base()?;
                Ok(Expr::neg(inner))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(ParseError::Syntax {
                        offset: self.pos,
                        message: "expected `)`".to_string(),
                    });
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(ParseError::Syntax {
                offset: self.pos,
                message: format!("unexpected character `{}`", c as char),
            }),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.eat(b'.') {
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `e` belonged to a following identifier, not this literal
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("invalid number `{text}`"),
        })?;
        Ok(Expr::Const(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let func = match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "tan" => Some(UnaryOp::Tan),
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        };
        if let Some(op) = func {
            self.skip_ws();
            if !self.eat(b'(') {
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: format!("expected `(` after function `{name}`"),
                });
            }
            let arg = self.expr()?;
            self.skip_ws();
            if !self.eat(b')') {
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: "expected `)`".to_string(),
                });
            }
            return Ok(Expr::unary(op, arg));
        }
        if let Some(index) = self.vars.iter().position(|v| *v == name) {
            return Ok(Expr::var(name, index));
        }
        Err(ParseError::UnknownIdentifier {
            offset: start,
            name: name.to_string(),
        })
    }
}
