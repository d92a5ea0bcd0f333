//! Polynomial expressions in `x`, `y` as they appear in curve files.
//!
//! Grammar: `+ - * / ^`, parentheses, juxtaposition as multiplication,
//! integers and decimals (both exact), `i`, `pi`, `zeta(n, k)` for
//! `exp(2 pi i k / n)`, and `sqrt(c)` for constants. Division and
//! non-integer powers are allowed only on constant subexpressions.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly2;
use crate::error::{NumError, NumResult};
use crate::scalar::{c, cone, Real, Rational, GaussianRational, C};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    I,
    Pi,
    X,
    Y,
    Zeta(i64, i64),
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn err(src: &str, msg: impl Into<String>) -> NumError {
    NumError::Config(format!("in expression {src:?}: {}", msg.into()))
}

fn tokenize(src: &str) -> NumResult<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(err(src, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

fn parse_decimal(s: &str) -> Option<Rational> {
    match s.split_once('.') {
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
        Some((a, b)) => {
            let digits = format!("{a}{b}");
            let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
            let den = num_traits::pow(BigInt::from(10), b.len());
            Some(Rational::new(num, den))
        }
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> NumResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.src, format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> NumResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> NumResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> NumResult<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> NumResult<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn int_arg(&mut self) -> NumResult<i64> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let v: i64 = s.parse().map_err(|_| err(self.src, format!("expected an integer, got {s:?}")))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(err(self.src, "expected an integer argument")),
        }
    }

    fn atom(&mut self) -> NumResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                parse_decimal(&s).map(Expr::Num).ok_or_else(|| err(self.src, format!("bad number {s:?}")))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "x" => Ok(Expr::X),
                    "y" => Ok(Expr::Y),
                    "i" | "I" => Ok(Expr::I),
                    "pi" => Ok(Expr::Pi),
                    "zeta" => {
                        self.expect('(')?;
                        let n = self.int_arg()?;
                        self.expect(',')?;
                        let k = self.int_arg()?;
                        self.expect(')')?;
                        if n <= 0 {
                            return Err(err(self.src, "zeta(n, k) needs n > 0"));
                        }
                        Ok(Expr::Zeta(n, k))
                    }
                    "sqrt" => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Sqrt(Box::new(e)))
                    }
                    other => Err(err(self.src, format!("unknown identifier {other:?}"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(err(self.src, format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse(src: &str) -> NumResult<Expr> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(err(src, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, src };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(src, format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::X | Expr::Y => false,
            Expr::Num(_) | Expr::I | Expr::Pi | Expr::Zeta(..) => true,
            Expr::Sqrt(a) | Expr::Neg(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Numerical value as a polynomial in `x`, `y`.
    pub fn to_poly<T: Real>(&self) -> NumResult<Poly2<T>> {
        let k = |z: C<T>| Ok(Poly2::constant(z));
        match self {
            Expr::Num(q) => k(c(rat_to_real(q), T::zero())),
            Expr::I => k(c(T::zero(), T::one())),
            Expr::Pi => k(c(T::PI(), T::zero())),
            Expr::X => Ok(Poly2::x()),
            Expr::Y => Ok(Poly2::y()),
            Expr::Zeta(n, j) => {
                let th = T::TAU() * T::from_i64(*j).unwrap() / T::from_i64(*n).unwrap();
                k(c(th.cos(), th.sin()))
            }
            Expr::Sqrt(a) => {
                let v = a.constant_value::<T>()?;
                k(v.sqrt())
            }
            Expr::Neg(a) => Ok(a.to_poly::<T>()?.neg()),
            Expr::Add(a, b) => Ok(a.to_poly::<T>()?.add(&b.to_poly()?)),
            Expr::Sub(a, b) => Ok(a.to_poly::<T>()?.add(&b.to_poly::<T>()?.neg())),
            Expr::Mul(a, b) => Ok(a.to_poly::<T>()?.mul(&b.to_poly()?)),
            Expr::Div(a, b) => {
                let d = b.constant_value::<T>().map_err(|_| {
                    NumError::Config("division by a non-constant polynomial is not supported".into())
                })?;
                if d.norm() == T::zero() {
                    return Err(NumError::Config("division by zero".into()));
                }
                Ok(a.to_poly::<T>()?.scale(cone::<T>() / d))
            }
            Expr::Pow(a, b) => {
                if let Some(e) = b.exact_integer() {
                    if e >= 0 {
                        return Ok(a.to_poly::<T>()?.pow(e as u32));
                    }
                    if a.is_constant() {
                        let v = a.constant_value::<T>()?;
                        return k(v.powi(e as i32));
                    }
                }
                if a.is_constant() && b.is_constant() {
                    let v = a.constant_value::<T>()?;
                    let e = b.constant_value::<T>()?;
                    return k(v.powc(e));
                }
                Err(NumError::Config("powers of polynomials need a non-negative integer exponent".into()))
            }
        }
    }

    pub fn constant_value<T: Real>(&self) -> NumResult<C<T>> {
        if !self.is_constant() {
            return Err(NumError::Config("expected a constant expression".into()));
        }
        Ok(self.to_poly::<T>()?.get(0, 0))
    }

    fn exact_integer(&self) -> Option<i64> {
        match self.exact()? {
            m if m.len() <= 1 => {
                let v = m.get(&(0, 0)).cloned().unwrap_or_else(GaussianRational::zero);
                if v.im.is_zero() && v.re.is_integer() {
                    v.re.to_integer().to_i64()
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Exact coefficients over `Q(i)`, keyed by `(deg_x, deg_y)`; `None` when
    /// the expression involves transcendental or irrational constants.
    pub fn exact(&self) -> Option<BTreeMap<(usize, usize), GaussianRational>> {
        type M = BTreeMap<(usize, usize), GaussianRational>;
        fn konst(z: GaussianRational) -> M {
            let mut m = M::new();
            if !z.is_zero() {
                m.insert((0, 0), z);
            }
            m
        }
        fn add(a: M, b: M, sign: i64) -> M {
            let mut out = a;
            for (k, v) in b {
                let e = out.entry(k).or_insert_with(GaussianRational::zero);
                *e = e.clone() + v * GaussianRational::from(Rational::from_integer(sign.into()));
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
        fn mul(a: &M, b: &M) -> M {
            let mut out = M::new();
            for ((i, j), u) in a {
                for ((k, l), v) in b {
                    let e = out.entry((i + k, j + l)).or_insert_with(GaussianRational::zero);
                    *e = e.clone() + u.clone() * v.clone();
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
        let one = || Rational::one();
        let zero = || Rational::zero();
        Some(match self {
            Expr::Num(q) => konst(GaussianRational::new(q.clone(), zero())),
            Expr::I => konst(GaussianRational::new(zero(), one())),
            Expr::X => M::from([((1, 0), GaussianRational::new(one(), zero()))]),
            Expr::Y => M::from([((0, 1), GaussianRational::new(one(), zero()))]),
            Expr::Pi | Expr::Sqrt(_) => return None,
            Expr::Zeta(n, k) => match (k.rem_euclid(*n) * 4) % n {
                0 => konst(match (k.rem_euclid(*n) * 4) / n {
                    0 => GaussianRational::new(one(), zero()),
                    1 => GaussianRational::new(zero(), one()),
                    2 => GaussianRational::new(-one(), zero()),
                    _ => GaussianRational::new(zero(), -one()),
                }),
                _ => return None,
            },
            Expr::Neg(a) => add(M::new(), a.exact()?, -1),
            Expr::Add(a, b) => add(a.exact()?, b.exact()?, 1),
            Expr::Sub(a, b) => add(a.exact()?, b.exact()?, -1),
            Expr::Mul(a, b) => mul(&a.exact()?, &b.exact()?),
            Expr::Div(a, b) => {
                let d = b.exact()?;
                if d.keys().any(|k| *k != (0, 0)) {
                    return None;
                }
                let d = d.get(&(0, 0))?.clone();
                let inv = GaussianRational::new(Rational::one(), Rational::zero()) / d;
                mul(&a.exact()?, &konst(inv))
            }
            Expr::Pow(a, b) => {
                let e = b.exact_integer()?;
                let base = a.exact()?;
                if e >= 0 {
                    (0..e).fold(konst(GaussianRational::new(one(), zero())), |acc, _| mul(&acc, &base))
                } else {
                    if base.keys().any(|k| *k != (0, 0)) {
                        return None;
                    }
                    let v = base.get(&(0, 0))?.clone();
                    let inv = GaussianRational::new(one(), zero()) / v;
                    (0..(-e)).fold(konst(GaussianRational::new(one(), zero())), |acc, _| mul(&acc, &konst(inv.clone())))
                }
            }
        })
    }
}

fn rat_to_real<T: Real>(q: &Rational) -> T {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        T::lit(n) / T::lit(d)
    } else {
        let sign = if q.is_negative() { -1.0 } else { 1.0 };
        T::lit(sign * q.abs().to_f64().unwrap_or(f64::NAN))
    }
}

/// Parses a constant such as `"1/2"`, `"zeta(5,1)"` or `"2^(-1/3)"`.
pub fn parse_constant<T: Real>(src: &str) -> NumResult<C<T>> {
    parse(src)?.constant_value()
}

/// Parses a polynomial in `x`, `y`.
pub fn parse_poly<T: Real>(src: &str) -> NumResult<Poly2<T>> {
    parse(src)?.to_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn parses_polynomials_and_constants() {
        let p: Poly2<f64> = parse_poly("x^5 - 1").unwrap();
        assert_eq!(p.deg_x(), 5);
        assert_eq!(p.get(0, 0), cl(-1.0, 0.0));
        let z: C<f64> = parse_constant("zeta(5,1)").unwrap();
        assert!((z - cl((0.4f64 * std::f64::consts::PI).cos(), (0.4f64 * std::f64::consts::PI).sin())).norm() < 1e-15);
        let w: C<f64> = parse_constant("2^(-1/3)").unwrap();
        assert!((w.re - 0.5f64.cbrt()).abs() < 1e-15);
        let q: Poly2<f64> = parse_poly("3/4 x y^2 + (1+2i)(x - 1)").unwrap();
        assert_eq!(q.get(1, 2), cl(0.75, 0.0));
        assert_eq!(q.get(1, 0), cl(1.0, 2.0));
    }

    #[test]
    fn exactness_tracking() {
        assert!(parse("x^5 - 1/3").unwrap().exact().is_some());
        assert!(parse("x - zeta(5,1)").unwrap().exact().is_none());
        assert!(parse("x - zeta(4,1)").unwrap().exact().is_some());
        assert!(parse("x / (x + 1)").unwrap().to_poly::<f64>().is_err());
        assert!(parse("x +").is_err());
    }
}
