//! The base field `K` (either `Q` or `Q(sqrt m)`) and its elements.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// `Q` or a quadratic field `Q(sqrt m)` with `m` squarefree, `m ∉ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Quadratic(i64),
}

impl Field {
    pub fn quadratic(m: i64) -> Result<Self> {
        if m == 0 || m == 1 || !arith::is_squarefree(m) {
            return Err(Error::invalid(format!("{m} is not a squarefree integer other than 0, 1")));
        }
        Ok(Field::Quadratic(m))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Field::Rational => 1,
            Field::Quadratic(_) => 2,
        }
    }

    /// The radicand `m`, or 0 for `Q`.
    pub fn radicand(&self) -> i64 {
        match *self {
            Field::Rational => 0,
            Field::Quadratic(m) => m,
        }
    }

    pub fn discriminant(&self) -> Option<i64> {
        match *self {
            Field::Rational => None,
            Field::Quadratic(m) if m.rem_euclid(4) == 1 => Some(m),
            Field::Quadratic(m) => Some(4 * m),
        }
    }

    pub fn is_real(&self) -> bool {
        self.radicand() >= 0
    }

    /// The generator `sqrt m` as an element, or `None` over `Q`.
    pub fn sqrt_generator(&self) -> Option<Scalar> {
        match *self {
            Field::Rational => None,
            Field::Quadratic(m) => Some(Scalar::new(BigRational::zero(), BigRational::one(), m)),
        }
    }

    /// Parses a scalar written in this field's syntax: `a/b` or `a/b+c/d*r`
    /// where `r` stands for `sqrt m`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        parse_scalar_at(self, s, 0)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(-1) => write!(f, "Q(i)"),
            Field::Quadratic(m) => write!(f, "Q(sqrt{m})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "Q" || t == "QQ" {
            return Ok(Field::Rational);
        }
        if t == "Q(i)" {
            return Field::quadratic(-1);
        }
        let inner = t
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(0, format!("unrecognised field '{s}'")))?;
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        let m: i64 = inner
            .parse()
            .map_err(|_| Error::parse(6, format!("bad radicand '{inner}'")))?;
        Field::quadratic(m)
    }
}

/// An exact element `a + b sqrt m`. Rational elements have `b = 0` and carry
/// `m = 0`, so they combine freely with elements of any quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    m: i64,
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational, m: i64) -> Self {
        if b.is_zero() || m == 0 {
            assert!(b.is_zero(), "irrational part without a radicand");
            Scalar { a, b, m: 0 }
        } else {
            Scalar { a, b, m }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero(), m: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Scalar::from_int(0)
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// The radicand this element lives over, 0 when rational.
    pub fn radicand(&self) -> i64 {
        self.m
    }

    /// `a^2 - m b^2`.
    pub fn norm(&self) -> BigRational {
        if self.b.is_zero() {
            return &self.a * &self.a;
        }
        &self.a * &self.a - BigRational::from_integer(BigInt::from(self.m)) * &self.b * &self.b
    }

    /// Galois conjugate `a - b sqrt m`.
    pub fn conj(&self) -> Scalar {
        Scalar { a: self.a.clone(), b: -&self.b, m: self.m }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(Scalar::new(c.a / &n, c.b / &n, self.m))
    }

    pub fn scale(&self, r: &BigRational) -> Scalar {
        Scalar::new(&self.a * r, &self.b * r, self.m)
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Splits `x = (A + B sqrt m) / D` with integers `A, B` and positive `D`.
    pub fn integral_form(&self) -> (BigInt, BigInt, BigInt) {
        let d = num_integer::Integer::lcm(self.a.denom(), self.b.denom());
        let a = self.a.numer() * (&d / self.a.denom());
        let b = self.b.numer() * (&d / self.b.denom());
        (a, b, d)
    }

    fn join_radicand(&self, other: &Scalar) -> i64 {
        match (self.m, other.m) {
            (0, m) | (m, 0) => m,
            (m1, m2) if m1 == m2 => m1,
            (m1, m2) => panic!("mixing elements of Q(sqrt {m1}) and Q(sqrt {m2})"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &'a Scalar) -> Scalar {
        let m = self.join_radicand(o);
        Scalar::new(&self.a + &o.a, &self.b + &o.b, m)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &'a Scalar) -> Scalar {
        let m = self.join_radicand(o);
        Scalar::new(&self.a - &o.a, &self.b - &o.b, m)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &'a Scalar) -> Scalar {
        if self.b.is_zero() && o.b.is_zero() {
            return Scalar::rational(&self.a * &o.a);
        }
        let m = self.join_radicand(o);
        let mr = BigRational::from_integer(BigInt::from(m));
        let a = &self.a * &o.a + mr * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        Scalar::new(a, b, m)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &'a Scalar) -> Scalar {
        let inv = o.inverse().expect("division by zero");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { a: -&self.a, b: -&self.b, m: self.m }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &'a Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let b = fmt_rational(&self.b.abs());
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{b}*r")
        } else {
            write!(f, "{}{sign}{b}*r", fmt_rational(&self.a))
        }
    }
}

/// Parses a scalar; `offset` is added to reported error positions so callers
/// parsing nested structures can report absolute positions.
pub(crate) fn parse_scalar_at(field: &Field, s: &str, offset: usize) -> Result<Scalar> {
    let bytes: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if bytes.is_empty() {
        return Err(Error::parse(offset, "empty scalar"));
    }
    let mut i = 0;
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    let mut first = true;
    while i < bytes.len() {
        let mut neg = false;
        if bytes[i].1 == '+' || bytes[i].1 == '-' {
            neg = bytes[i].1 == '-';
            i += 1;
        } else if !first {
            return Err(Error::parse(offset + bytes[i].0, "expected '+' or '-'"));
        }
        first = false;
        let start = i;
        let mut num = String::new();
        while i < bytes.len() && (bytes[i].1.is_ascii_digit() || bytes[i].1 == '/') {
            num.push(bytes[i].1);
            i += 1;
        }
        let mut coeff = if num.is_empty() {
            BigRational::one()
        } else {
            parse_rational(&num).ok_or_else(|| {
                Error::parse(offset + bytes.get(start).map_or(s.len(), |b| b.0), format!("bad rational '{num}'"))
            })?
        };
        if neg {
            coeff = -coeff;
        }
        let mut irrational = false;
        if i < bytes.len() && bytes[i].1 == '*' {
            i += 1;
            if i >= bytes.len() || bytes[i].1 != 'r' {
                return Err(Error::parse(offset + bytes.get(i).map_or(s.len(), |b| b.0), "expected 'r' after '*'"));
            }
        }
        if i < bytes.len() && bytes[i].1 == 'r' {
            irrational = true;
            i += 1;
        } else if num.is_empty() {
            return Err(Error::parse(offset + bytes.get(start).map_or(s.len(), |b| b.0), "expected a number"));
        }
        if irrational {
            b += coeff;
        } else {
            a += coeff;
        }
    }
    let m = field.radicand();
    if !b.is_zero() && m == 0 {
        return Err(Error::parse(offset, "'r' is only meaningful over a quadratic field"));
    }
    Ok(Scalar::new(a, b, m))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let mut parts = s.split('/');
    let n: BigInt = parts.next()?.parse().ok()?;
    let d: BigInt = match parts.next() {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if parts.next().is_some() || d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
