//! Arithmetic expressions in one free variable.
//!
//! Grammar (whitespace-insensitive, `^` right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | VAR | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := 'exp' | 'log'
//! ```
//!
//! The variable is `theta` for wave speeds and `x` for profile expressions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, v: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => v,
            Expr::Add(a, b) => a.eval(v)? + b.eval(v)?,
            Expr::Sub(a, b) => a.eval(v)? - b.eval(v)?,
            Expr::Mul(a, b) => a.eval(v)? * b.eval(v)?,
            Expr::Div(a, b) => {
                let den = b.eval(v)?;
                if den == 0.0 {
                    return Err(Error::Eval("division by zero".into()));
                }
                a.eval(v)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(v)?;
                let exponent = b.eval(v)?;
                if base < 0.0 && exponent.fract() != 0.0 {
                    return Err(Error::Eval(format!(
                        "non-integer power {exponent} of negative base {base}"
                    )));
                }
                if base == 0.0 && exponent < 0.0 {
                    return Err(Error::Eval("division by zero".into()));
                }
                base.powf(exponent)
            }
            Expr::Exp(a) => a.eval(v)?.exp(),
            Expr::Log(a) => {
                let arg = a.eval(v)?;
                if arg <= 0.0 {
                    return Err(Error::Eval(format!("log of non-positive value {arg}")));
                }
                arg.ln()
            }
            Expr::Neg(a) => -a.eval(v)?,
        })
    }

    /// True when the expression does not reference the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Exp(a) | Expr::Log(a) | Expr::Neg(a) => a.is_constant(),
        }
    }

    /// Symbolic derivative with respect to the variable.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), Const(2.0)),
            ),
            Pow(a, b) if b.is_constant() => {
                // d(a^k) = k a^(k-1) a'
                let k = (**b).clone();
                mul(
                    mul(k.clone(), pow((**a).clone(), sub(k, Const(1.0)))),
                    a.derivative(),
                )
            }
            Pow(a, b) => {
                // d(a^b) = a^b (b' ln a + b a'/a)
                mul(
                    self.clone(),
                    add(
                        mul(b.derivative(), log((**a).clone())),
                        div(mul((**b).clone(), a.derivative()), (**a).clone()),
                    ),
                )
            }
            Exp(a) => mul(exp((**a).clone()), a.derivative()),
            Log(a) => div(a.derivative(), (**a).clone()),
            Neg(a) => neg(a.derivative()),
        }
    }
}

fn lit(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
        (Some(x), _) if x == 0.0 => Expr::Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) if x > 0.0 || y.fract() == 0.0 => Expr::Const(x.powf(y)),
        (_, Some(y)) if y == 1.0 => a,
        (_, Some(y)) if y == 0.0 => Expr::Const(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => Expr::Const(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn exp(a: Expr) -> Expr {
    Expr::Exp(Box::new(a))
}

fn log(a: Expr) -> Expr {
    Expr::Log(Box::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => write!(f, "VAR"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
        }
    }
}

impl Expr {
    /// Renders the expression with the given variable name; the output
    /// parses back to an equivalent tree.
    pub fn render(&self, var: &str) -> String {
        self.to_string().replace("VAR", var)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let s = &text[start..i];
                let value: f64 = s.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{s}`"),
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Error::Syntax {
            offset: self.offset(),
            message: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let save = self.pos;
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.base()?))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if name == self.var {
                    return Ok(Expr::Var);
                }
                let wrap: fn(Box<Expr>) -> Expr = match name.as_str() {
                    "exp" => Expr::Exp,
                    "log" => Expr::Log,
                    _ => return Err(Error::UnknownIdentifier { name, offset }),
                };
                self.expect(Tok::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(wrap(Box::new(arg)))
            }
            _ => {
                self.pos = save;
                Err(self.unexpected("a number, variable, function or `(`"))
            }
        }
    }
}

/// Parses an expression whose only free variable is `var`.
pub fn parse_expr(text: &str, var: &str) -> Result<Expr> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, var };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Parses a wave-speed expression in `theta`.
pub fn parse_speed_expr(text: &str) -> Result<Expr> {
    parse_expr(text, "theta")
}

/// Symbolic d/dtheta of a wave-speed expression.
pub fn derive_speed_expr(ast: &Expr) -> Expr {
    ast.derivative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_like_power() {
        let e = parse_speed_expr("(1+theta)^1").unwrap();
        for t in [-0.5, 0.0, 2.0] {
            assert_eq!(e.eval(t).unwrap(), 1.0 + t);
        }
    }

    #[test]
    fn unbound_name_reports_its_offset() {
        let err = parse_speed_expr("(1 + theta)^(a/2)").unwrap_err();
        assert_eq!(
            err,
            Error::UnknownIdentifier {
                name: "a".into(),
                offset: 13
            }
        );
    }

    #[test]
    fn exp_minus_one_plus_one() {
        let e = parse_speed_expr("exp(theta) - 1 + 1").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_speed_expr("2^3^2").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 512.0);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse_speed_expr("1 + 2*theta - -3/4").unwrap();
        assert_eq!(e.eval(1.0).unwrap(), 3.75);
        // '-' binds to a base, so -theta^2 is (-theta)^2
        let e = parse_speed_expr("-theta^2").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), 9.0);
    }

    #[test]
    fn numbers_with_exponents() {
        let e = parse_speed_expr("1.5e-1 + .5E+1 + 2.").unwrap();
        assert!((e.eval(0.0).unwrap() - 7.15).abs() < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_speed_expr("1 + * 2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_speed_expr("(theta + 1") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 10),
            other => panic!("unexpected {other:?}"),
        }
        match parse_speed_expr("theta $ 2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_speed_expr(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_speed_expr("theta theta"), Err(Error::Syntax { offset: 6, .. })));
        assert!(matches!(parse_speed_expr("sin(theta)"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_speed_expr("exp theta"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn evaluation_domain_errors() {
        assert!(parse_speed_expr("1/theta").unwrap().eval(0.0).is_err());
        assert!(parse_speed_expr("log(theta)").unwrap().eval(0.0).is_err());
        assert!(parse_speed_expr("log(theta)").unwrap().eval(-1.0).is_err());
        assert!(parse_speed_expr("theta^0.5").unwrap().eval(-1.0).is_err());
        assert_eq!(parse_speed_expr("theta^2").unwrap().eval(-3.0).unwrap(), 9.0);
    }

    #[test]
    fn derivative_of_variable_is_one() {
        let d = derive_speed_expr(&parse_speed_expr("theta").unwrap());
        assert_eq!(d, Expr::Const(1.0));
    }

    #[test]
    fn derivative_of_square() {
        let d = derive_speed_expr(&parse_speed_expr("(1+theta)^2").unwrap());
        assert_eq!(d.eval(0.0).unwrap(), 2.0);
        assert_eq!(d.eval(1.5).unwrap(), 5.0);
    }

    #[test]
    fn derivative_of_exp_is_exp() {
        let e = parse_speed_expr("exp(theta)").unwrap();
        assert_eq!(derive_speed_expr(&e), e);
    }

    #[test]
    fn variable_exponent_derivative() {
        // d/dt t^t = t^t (ln t + 1)
        let d = derive_speed_expr(&parse_speed_expr("theta^theta").unwrap());
        let t: f64 = 1.7;
        let want = t.powf(t) * (t.ln() + 1.0);
        assert!((d.eval(t).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn render_round_trips() {
        let e = parse_speed_expr("2 - (1+theta)^(3/2) / exp(theta) - log(2*theta) + -4").unwrap();
        let again = parse_speed_expr(&e.render("theta")).unwrap();
        for t in [0.3, 1.0, 2.5] {
            assert_eq!(e.eval(t).unwrap(), again.eval(t).unwrap());
        }
    }

    #[test]
    fn custom_variable_name() {
        let e = parse_expr("x^2 - 1", "x").unwrap();
        assert_eq!(e.eval(2.0).unwrap(), 3.0);
        assert!(matches!(parse_expr("theta", "x"), Err(Error::UnknownIdentifier { .. })));
    }
}
