//! Scalar field expressions over `ℝ_s × M`, evaluated on [`Jet2`].
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, the constants `pi` and `e`, the
//! variable `s`, the three model coordinates, and the functions
//! `sin cos tan exp ln log sqrt sinh cosh tanh atan`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{LisError, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan => "atan",
        }
    }

    fn apply(self, j: Jet2) -> Jet2 {
        match self {
            Func::Sin => j.sin(),
            Func::Cos => j.cos(),
            Func::Tan => j.tan(),
            Func::Exp => j.exp(),
            Func::Ln => j.ln(),
            Func::Sqrt => j.sqrt(),
            Func::Sinh => j.sinh(),
            Func::Cosh => j.cosh(),
            Func::Tanh => j.tanh(),
            Func::Atan => j.atan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    S,
    Coord(usize),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Call(Func, Arc<Expr>),
}

/// Where an expression is evaluated: `s`, the base point, and `X` at the point.
#[derive(Debug, Clone, Copy)]
pub struct EvalAt {
    pub s: f64,
    pub point: [f64; 3],
    pub flow: [f64; 3],
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// `mean + amp·cos(2πθ)` with `θ` the third coordinate.
    pub fn cos_theta(mean: f64, amp: f64) -> Expr {
        let arg = Expr::Const(2.0 * std::f64::consts::PI) * Expr::Coord(2);
        Expr::Const(mean) + Expr::Const(amp) * arg.call(Func::Cos)
    }

    pub fn call(self, f: Func) -> Expr {
        Expr::Call(f, Arc::new(self))
    }

    pub fn exp(self) -> Expr {
        self.call(Func::Exp)
    }

    pub fn pow(self, p: Expr) -> Expr {
        Expr::Pow(Arc::new(self), Arc::new(p))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn depends_on_s(&self) -> bool {
        match self {
            Expr::S => true,
            Expr::Const(_) | Expr::Coord(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_s(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on_s() || b.depends_on_s()
            }
        }
    }

    pub fn eval(&self, at: &EvalAt) -> Jet2 {
        match self {
            Expr::Const(c) => Jet2::constant(*c),
            Expr::S => Jet2::s_variable(at.s),
            Expr::Coord(i) => Jet2::coordinate(at.point[*i], at.flow[*i]),
            Expr::Neg(a) => -a.eval(at),
            Expr::Add(a, b) => a.eval(at) + b.eval(at),
            Expr::Sub(a, b) => a.eval(at) - b.eval(at),
            Expr::Mul(a, b) => a.eval(at) * b.eval(at),
            Expr::Div(a, b) => a.eval(at) / b.eval(at),
            Expr::Pow(a, b) => match b.as_const() {
                Some(p) => a.eval(at).powf(p),
                None => (b.eval(at) * a.eval(at).ln()).exp(),
            },
            Expr::Call(f, a) => f.apply(a.eval(at)),
        }
    }

    pub fn value(&self, at: &EvalAt) -> f64 {
        self.eval(at).value
    }

    /// Parse with the given coordinate names; `theta` always names the third one.
    pub fn parse(src: &str, coords: [&str; 3]) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, coords };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(LisError::Parse(format!("unexpected trailing input in `{src}`")));
        }
        Ok(e)
    }

    /// Render using the given coordinate names; `parse` inverts this.
    pub fn render(&self, coords: [&str; 3]) -> String {
        Render(self, coords).to_string()
    }
}

struct Render<'a>(&'a Expr, [&'a str; 3]);

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |e: &'_ Arc<Expr>| Render(e, self.1).to_string();
        match self.0 {
            Expr::Const(c) => write!(f, "({c:?})"),
            Expr::S => write!(f, "s"),
            Expr::Coord(i) => write!(f, "{}", self.1[*i]),
            Expr::Neg(a) => write!(f, "(-{})", r(a)),
            Expr::Add(a, b) => write!(f, "({} + {})", r(a), r(b)),
            Expr::Sub(a, b) => write!(f, "({} - {})", r(a), r(b)),
            Expr::Mul(a, b) => write!(f, "({} * {})", r(a), r(b)),
            Expr::Div(a, b) => write!(f, "({} / {})", r(a), r(b)),
            Expr::Pow(a, b) => write!(f, "({} ^ {})", r(a), r(b)),
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), r(a)),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                Expr::$v(Arc::new(self), Arc::new(o))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
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
                .map_err(|_| LisError::Parse(format!("bad number `{text}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(LisError::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    coords: [&'a str; 3],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LisError::Parse(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { lhs + rhs } else { lhs - rhs };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { lhs * rhs } else { Expr::Div(Arc::new(lhs), Arc::new(rhs)) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
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
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| LisError::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(LisError::Parse(format!("unexpected `{c}`"))),
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(arg.call(func));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    "s" => Ok(Expr::S),
                    "theta" => Ok(Expr::Coord(2)),
                    other => self
                        .coords
                        .iter()
                        .position(|c| *c == other)
                        .map(Expr::Coord)
                        .ok_or_else(|| LisError::Parse(format!("unknown identifier `{other}`"))),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UVT: [&str; 3] = ["u", "v", "theta"];

    fn at(s: f64, theta: f64) -> EvalAt {
        EvalAt { s, point: [0.3, -0.2, theta], flow: [0.0, 0.0, 1.0] }
    }

    #[test]
    fn parses_precedence_and_functions() {
        let e = Expr::parse("1 + 2*3^2 - -4/2", UVT).unwrap();
        assert_eq!(e.value(&at(0.0, 0.0)), 1.0 + 18.0 + 2.0);
        let e = Expr::parse("exp(s) * cos(2*pi*theta) + u", UVT).unwrap();
        let j = e.eval(&at(0.5, 0.25));
        assert!((j.value - (0.5f64.exp() * (0.5 * std::f64::consts::PI).cos() + 0.3)).abs() < 1e-15);
        assert!((j.d_x + 0.5f64.exp() * 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(e.depends_on_s());
        assert!(!Expr::parse("1 + 0.5*cos(2*pi*theta)", UVT).unwrap().depends_on_s());
        assert_eq!(Expr::parse("2.5e-1", UVT).unwrap(), Expr::Const(0.25));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +", UVT).is_err());
        assert!(Expr::parse("foo(s)", UVT).is_err());
        assert!(Expr::parse("x", UVT).is_err());
        assert!(Expr::parse("(s", UVT).is_err());
        assert!(Expr::parse("s $ 2", UVT).is_err());
    }

    #[test]
    fn render_round_trips() {
        let e = Expr::parse("exp(-s)*(1 + 0.5*cos(2*pi*theta))^2 / sqrt(2 + u)", UVT).unwrap();
        let back = Expr::parse(&e.render(UVT), UVT).unwrap();
        for &(s, t) in &[(0.1, 0.2), (-1.0, 0.9)] {
            assert_eq!(e.eval(&at(s, t)), back.eval(&at(s, t)));
        }
    }

    #[test]
    fn cos_theta_matches_library_examples() {
        let e = Expr::cos_theta(1.0, 0.5);
        let j0 = e.eval(&at(0.0, 0.0));
        assert_eq!((j0.value, j0.d_x), (1.5, 0.0));
        let j = e.eval(&at(0.0, 0.25));
        assert!((j.value - 1.0).abs() < 1e-15);
        assert!((j.d_x + std::f64::consts::PI).abs() < 1e-14);
    }
}
