//! Rational expressions in the coordinates `z_1..z_n` and their conjugates
//! `zb_1..zb_n`, used to describe metric components.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | 'i' | ident | 'conj' '(' expr ')' | '(' expr ')' | '-' factor
//! ident  := 'z' digits | 'zb' digits        (1-based index)
//! number := decimal float, optionally suffixed by 'i'
//! ```
//!
//! `conj` is normalized structurally (pushed to variables and literals), so
//! an `Expr` tree contains no `Conj` nodes. Printing produces a string that
//! parses back to the identical tree.

use std::fmt;

use crate::{Cx, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Cx),
    /// `z_index` (`barred = false`) or `zb_index` (`barred = true`), 0-based.
    Var { index: usize, barred: bool },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: Cx) -> Expr {
        Expr::Const(c)
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Cx::new(x, 0.0))
    }

    pub fn var(index: usize) -> Expr {
        Expr::Var { index, barred: false }
    }

    pub fn barred_var(index: usize) -> Expr {
        Expr::Var { index, barred: true }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.re == 1.0 && c.im == 0.0)
    }

    /// Structural complex conjugate: swaps barred and unbarred variables.
    pub fn conj(&self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.conj()),
            Expr::Var { index, barred } => Expr::Var { index: *index, barred: !barred },
            Expr::Neg(a) => Expr::Neg(Box::new(a.conj())),
            Expr::Add(a, b) => Expr::Add(Box::new(a.conj()), Box::new(b.conj())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.conj()), Box::new(b.conj())),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.conj()), Box::new(b.conj())),
            Expr::Div(a, b) => Expr::Div(Box::new(a.conj()), Box::new(b.conj())),
        }
    }

    /// Light-simplifying sum (drops zero operands).
    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::Neg(Box::new(b))
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    /// Light-simplifying product (folds zero and one operands).
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::real(0.0)
        } else if a.is_one() {
            b
        } else if b.is_one() {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            Expr::real(0.0)
        } else if b.is_one() {
            a
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    /// Evaluate at a point, with `zb_k = conj(z_k)`.
    pub fn eval(&self, z: &[Cx]) -> Result<Cx> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var { index, barred } => {
                let v = *z.get(*index).ok_or(Error::IndexOutOfRange {
                    index: *index,
                    n: z.len(),
                })?;
                if *barred {
                    v.conj()
                } else {
                    v
                }
            }
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let d = b.eval(z)?;
                if d.norm() == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval(z)? / d
            }
        })
    }

    /// Symbolic partial derivative with respect to `z_k` (`barred = false`)
    /// or `zb_k` (`barred = true`); the two are independent variables.
    pub fn d(&self, k: usize, barred: bool) -> Expr {
        match self {
            Expr::Const(_) => Expr::real(0.0),
            Expr::Var { index, barred: vb } => {
                if *index == k && *vb == barred {
                    Expr::real(1.0)
                } else {
                    Expr::real(0.0)
                }
            }
            Expr::Neg(a) => {
                let da = a.d(k, barred);
                if da.is_zero() {
                    da
                } else {
                    Expr::Neg(Box::new(da))
                }
            }
            Expr::Add(a, b) => Expr::add(a.d(k, barred), b.d(k, barred)),
            Expr::Sub(a, b) => Expr::sub(a.d(k, barred), b.d(k, barred)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.d(k, barred), (**b).clone()),
                Expr::mul((**a).clone(), b.d(k, barred)),
            ),
            Expr::Div(a, b) => {
                let num = Expr::sub(
                    Expr::mul(a.d(k, barred), (**b).clone()),
                    Expr::mul((**a).clone(), b.d(k, barred)),
                );
                Expr::div(num, Expr::mul((**b).clone(), (**b).clone()))
            }
        }
    }

    /// Substitute `z_k := subs[k]` (and `zb_k := conj(subs[k])`).
    pub fn substitute(&self, subs: &[Expr]) -> Result<Expr> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var { index, barred } => {
                let e = subs.get(*index).ok_or(Error::IndexOutOfRange {
                    index: *index,
                    n: subs.len(),
                })?;
                if *barred {
                    e.conj()
                } else {
                    e.clone()
                }
            }
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(subs)?)),
            Expr::Add(a, b) => {
                Expr::Add(Box::new(a.substitute(subs)?), Box::new(b.substitute(subs)?))
            }
            Expr::Sub(a, b) => {
                Expr::Sub(Box::new(a.substitute(subs)?), Box::new(b.substitute(subs)?))
            }
            Expr::Mul(a, b) => {
                Expr::Mul(Box::new(a.substitute(subs)?), Box::new(b.substitute(subs)?))
            }
            Expr::Div(a, b) => {
                Expr::Div(Box::new(a.substitute(subs)?), Box::new(b.substitute(subs)?))
            }
        })
    }

    /// Largest variable index mentioned, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var { index, .. } => Some(*index),
            Expr::Neg(a) => a.max_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_index(), b.max_index()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, None) => x,
                    (None, y) => y,
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Const(_) | Expr::Var { .. } => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.precedence();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write_const(f, *c)?,
            Expr::Var { index, barred } => {
                write!(f, "{}{}", if *barred { "zb" } else { "z" }, index + 1)?
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Cx) -> fmt::Result {
    if c.im == 0.0 {
        if c.re < 0.0 {
            write!(f, "({})", c.re)
        } else {
            write!(f, "{}", c.re)
        }
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else if c.im < 0.0 {
            write!(f, "({}i)", c.im)
        } else {
            write!(f, "{}i", c.im)
        }
    } else if c.im < 0.0 {
        write!(f, "({} - {}i)", c.re, -c.im)
    } else {
        write!(f, "({} + {}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => self.err(format!("expected '{}', found '{}'", c as char, got as char)),
            None => self.err(format!("expected '{}', found end of input", c as char)),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' | b'-' => {
                    self.pos += 1;
                    acc = fold_binary(c, acc, self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' | b'/' => {
                    self.pos += 1;
                    acc = fold_binary(c, acc, self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'-') => {
                self.pos += 1;
                Ok(match self.factor()? {
                    Expr::Const(c) => Expr::Const(-c),
                    other => Expr::Neg(Box::new(other)),
                })
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
        {
            self.pos += 1;
        }
        if self.src.get(self.pos).is_some_and(|c| *c == b'e' || *c == b'E') {
            let mut p = self.pos + 1;
            if self.src.get(p).is_some_and(|c| *c == b'+' || *c == b'-') {
                p += 1;
            }
            if self.src.get(p).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = p;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = match text.parse() {
            Ok(v) => v,
            Err(_) => {
                self.pos = start;
                return self.err(format!("malformed number '{text}'"));
            }
        };
        if self.src.get(self.pos).is_some_and(|c| *c == b'i') {
            self.pos += 1;
            Ok(Expr::Const(Cx::new(0.0, value)))
        } else {
            Ok(Expr::Const(Cx::new(value, 0.0)))
        }
    }

    fn ident(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if text == "i" {
            return Ok(Expr::Const(Cx::new(0.0, 1.0)));
        }
        if text == "conj" {
            self.expect(b'(')?;
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner.conj());
        }
        let (prefix, barred) = if let Some(rest) = text.strip_prefix("zb") {
            (rest, true)
        } else if let Some(rest) = text.strip_prefix('z') {
            (rest, false)
        } else {
            self.pos = start;
            return self.err(format!("unknown identifier '{text}'"));
        };
        match prefix.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Expr::Var { index: k - 1, barred }),
            _ => {
                self.pos = start;
                self.err(format!("bad variable '{text}' (expected z<k> or zb<k>, k >= 1)"))
            }
        }
    }
}

/// Literal arithmetic folds at parse time so that printed constants (which
/// may carry parentheses, signs, and `i` suffixes) reparse to a single
/// `Const` node.
fn fold_binary(op: u8, a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        match op {
            b'+' => return Expr::Const(x + y),
            b'-' => return Expr::Const(x - y),
            b'*' => return Expr::Const(x * y),
            b'/' if y.norm() != 0.0 => return Expr::Const(x / y),
            _ => {}
        }
    }
    match op {
        b'+' => Expr::Add(Box::new(a), Box::new(b)),
        b'-' => Expr::Sub(Box::new(a), Box::new(b)),
        b'*' => Expr::Mul(Box::new(a), Box::new(b)),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

/// Parse an expression source string.
pub fn parse(src: &str) -> Result<Expr> {
    if !src.is_ascii() {
        return Err(Error::Parse { pos: 0, msg: "expression must be ASCII".to_string() });
    }
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, z: &[Cx]) -> Cx {
        parse(src).unwrap().eval(z).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        let z = [Cx::new(2.0, 0.0)];
        assert_eq!(ev("1 + 2*3", &z), Cx::new(7.0, 0.0));
        assert_eq!(ev("(1 + 2)*3", &z), Cx::new(9.0, 0.0));
        assert_eq!(ev("2*z1 - 1", &z), Cx::new(3.0, 0.0));
        assert_eq!(ev("1/2", &z), Cx::new(0.5, 0.0));
        assert_eq!(ev("-z1*z1", &z), Cx::new(-4.0, 0.0));
        assert_eq!(ev("2 - 1 - 1", &z), Cx::new(0.0, 0.0));
    }

    #[test]
    fn complex_literals_and_conj() {
        let z = [Cx::new(1.0, 2.0)];
        assert_eq!(ev("i*i", &z), Cx::new(-1.0, 0.0));
        assert_eq!(ev("2.5i", &z), Cx::new(0.0, 2.5));
        assert_eq!(ev("conj(z1)", &z), Cx::new(1.0, -2.0));
        assert_eq!(ev("zb1", &z), Cx::new(1.0, -2.0));
        assert_eq!(ev("z1*zb1", &z), Cx::new(5.0, 0.0));
        // conj normalizes away: no Conj node survives parsing
        let e = parse("conj(z1 + i)").unwrap();
        let expect =
            Expr::Add(Box::new(Expr::barred_var(0)), Box::new(Expr::Const(Cx::new(0.0, -1.0))));
        assert_eq!(e, expect);
    }

    #[test]
    fn conj_pushdown() {
        let e = parse("conj(z1*z2 + 3i)").unwrap();
        let z = [Cx::new(1.0, 1.0), Cx::new(2.0, -1.0)];
        let direct = (z[0] * z[1] + Cx::new(0.0, 3.0)).conj();
        assert_eq!(e.eval(&z).unwrap(), direct);
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "1 + 2*3",
            "(1 + 2)*(3 - z1)",
            "-z1*zb2/(1 + z1*zb1)",
            "conj(z1)*z2 + 0.5i",
            "z1/(z2/z3)",
            "1 - (2 - 3)",
            "-(z1 + z2)",
            "(1.5 - 2i)*z1",
            "-0.25*zb2",
            "(3 + 4i)/(z1 - i)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "round trip failed for '{src}' -> '{printed}'");
        }
    }

    #[test]
    fn derivative_rules() {
        // d/dz1 (z1*z1*zb1) = 2 z1 zb1; d/dzb1 = z1^2
        let e = parse("z1*z1*zb1").unwrap();
        let z = [Cx::new(2.0, 1.0)];
        let dz = e.d(0, false).eval(&z).unwrap();
        assert_eq!(dz, 2.0 * z[0] * z[0].conj());
        let dzb = e.d(0, true).eval(&z).unwrap();
        assert_eq!(dzb, z[0] * z[0]);
        // quotient rule: d/dz1 (1/(1+z1*zb1)) = -zb1/(1+z1*zb1)^2
        let q = parse("1/(1 + z1*zb1)").unwrap();
        let dq = q.d(0, false).eval(&z).unwrap();
        let denom = Cx::new(1.0, 0.0) + z[0] * z[0].conj();
        assert!((dq + z[0].conj() / (denom * denom)).norm() < 1e-15);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse("z1 + ") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse("w3").is_err());
        assert!(parse("z0").is_err());
        assert!(parse("(1 + 2").is_err());
        assert!(parse("1 + 2)").is_err());
    }

    #[test]
    fn division_by_zero_reported() {
        let e = parse("1/z1").unwrap();
        assert!(matches!(e.eval(&[Cx::new(0.0, 0.0)]), Err(Error::DivisionByZero)));
    }
}
