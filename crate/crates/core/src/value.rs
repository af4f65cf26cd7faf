//! Height values split into an exact finite-place factor and an archimedean
//! float factor.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith;

/// An exact positive real of the form `radicand^(1/index)` with a positive
/// rational radicand. Kept in lowest terms: the radicand is never a perfect
/// `t`-th power for a divisor `t > 1` of the index, which makes the
/// representation canonical and equality structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePart {
    radicand: BigRational,
    index: u32,
}

impl FinitePart {
    pub fn one() -> Self {
        FinitePart { radicand: BigRational::one(), index: 1 }
    }

    pub fn from_rational(r: BigRational) -> Self {
        assert!(r.is_positive(), "finite part must be positive");
        FinitePart { radicand: r, index: 1 }
    }

    /// `p^exponent` for a prime (or any positive integer) `p`.
    pub fn prime_power(p: &BigUint, exponent: &BigRational) -> Self {
        let index = exponent.denom().to_u32().expect("exponent denominator fits u32");
        let n = exponent.numer();
        let e = n.magnitude().to_u32().expect("exponent numerator fits u32");
        let pe = BigInt::from(p.pow(e));
        let radicand = if n.is_negative() {
            BigRational::new(BigInt::one(), pe)
        } else {
            BigRational::from_integer(pe)
        };
        FinitePart { radicand, index }.normalized()
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_one(&self) -> bool {
        self.radicand.is_one()
    }

    /// The value as a rational when the index is 1.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.index == 1).then_some(&self.radicand)
    }

    pub fn ln(&self) -> f64 {
        arith::ln_abs_rational(&self.radicand) / self.index as f64
    }

    pub fn mul(&self, other: &FinitePart) -> FinitePart {
        let l = self.index.lcm(&other.index);
        let a = pow_rational(&self.radicand, (l / self.index) as i64);
        let b = pow_rational(&other.radicand, (l / other.index) as i64);
        FinitePart { radicand: a * b, index: l }.normalized()
    }

    pub fn recip(&self) -> FinitePart {
        FinitePart { radicand: self.radicand.recip(), index: self.index }
    }

    pub fn div(&self, other: &FinitePart) -> FinitePart {
        self.mul(&other.recip())
    }

    pub fn pow(&self, k: i64) -> FinitePart {
        FinitePart { radicand: pow_rational(&self.radicand, k), index: self.index }.normalized()
    }

    /// `k`-th root.
    pub fn root(&self, k: u32) -> FinitePart {
        assert!(k > 0);
        FinitePart { radicand: self.radicand.clone(), index: self.index * k }.normalized()
    }

    /// Raises to a rational power `num/den`.
    pub fn pow_ratio(&self, exponent: &BigRational) -> FinitePart {
        let n = exponent.numer().to_i64().expect("small exponent");
        let d = exponent.denom().to_u32().expect("small exponent");
        self.pow(n).root(d)
    }

    fn normalized(mut self) -> Self {
        if self.radicand.is_one() {
            self.index = 1;
            return self;
        }
        let mut idx = self.index;
        for (t, _) in num_prime::nt_funcs::factorize64(idx as u64) {
            let t = t as u32;
            while idx % t == 0 {
                let num = arith::exact_root(self.radicand.numer().magnitude(), t);
                let den = arith::exact_root(self.radicand.denom().magnitude(), t);
                match (num, den) {
                    (Some(n), Some(d)) => {
                        self.radicand = BigRational::new(BigInt::from(n), BigInt::from(d));
                        idx /= t;
                    }
                    _ => break,
                }
            }
        }
        self.index = idx;
        self
    }

    /// Prime factorisation `[(p, exponent)]` of the value, exponents rational.
    pub fn factored(&self) -> Vec<(BigUint, BigRational)> {
        let mut out = Vec::new();
        let idx = BigInt::from(self.index);
        for (n, sign) in [(self.radicand.numer(), 1i64), (self.radicand.denom(), -1i64)] {
            let m = n.magnitude();
            if m.is_one() {
                continue;
            }
            let fac = if let Some(small) = m.to_u64() {
                num_prime::nt_funcs::factorize64(small)
                    .into_iter()
                    .map(|(p, e)| (BigUint::from(p), e))
                    .collect::<Vec<_>>()
            } else {
                num_prime::nt_funcs::factorize(m.clone()).into_iter().collect()
            };
            for (p, e) in fac {
                out.push((p, BigRational::new(BigInt::from(e as i64 * sign), idx.clone())));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

fn pow_rational(r: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        let e = k as u32;
        BigRational::new(r.numer().pow(e), r.denom().pow(e))
    } else {
        let e = (-k) as u32;
        BigRational::new(r.denom().pow(e), r.numer().pow(e))
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FinitePart {
    /// `p1^q1 * p2^q2 * ...`, or `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factored()
            .into_iter()
            .map(|(p, q)| {
                if q.is_one() {
                    p.to_string()
                } else if q.denom().is_one() {
                    format!("{p}^{}", q.numer())
                } else {
                    format!("{p}^({})", fmt_ratio(&q))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// A height: exact finite-place factor times an archimedean factor kept as
/// a natural log with a relative error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightValue {
    pub finite: FinitePart,
    pub arch_ln: f64,
    pub rel_err: f64,
}

impl HeightValue {
    pub fn one() -> Self {
        HeightValue { finite: FinitePart::one(), arch_ln: 0.0, rel_err: 0.0 }
    }

    pub fn new(finite: FinitePart, arch_ln: f64, rel_err: f64) -> Self {
        HeightValue { finite, arch_ln, rel_err }
    }

    pub fn arch(&self) -> f64 {
        self.arch_ln.exp()
    }

    pub fn ln(&self) -> f64 {
        self.finite.ln() + self.arch_ln
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }

    pub fn mul(&self, o: &HeightValue) -> HeightValue {
        HeightValue {
            finite: self.finite.mul(&o.finite),
            arch_ln: self.arch_ln + o.arch_ln,
            rel_err: self.rel_err + o.rel_err,
        }
    }

    pub fn div(&self, o: &HeightValue) -> HeightValue {
        HeightValue {
            finite: self.finite.div(&o.finite),
            arch_ln: self.arch_ln - o.arch_ln,
            rel_err: self.rel_err + o.rel_err,
        }
    }

    pub fn pow(&self, k: i64) -> HeightValue {
        HeightValue {
            finite: self.finite.pow(k),
            arch_ln: self.arch_ln * k as f64,
            rel_err: self.rel_err * k.unsigned_abs() as f64,
        }
    }

    pub fn root(&self, k: u32) -> HeightValue {
        HeightValue {
            finite: self.finite.root(k),
            arch_ln: self.arch_ln / k as f64,
            rel_err: self.rel_err / k as f64,
        }
    }

    /// Finite parts identical and archimedean factors within relative `tol`.
    pub fn approx_eq(&self, o: &HeightValue, tol: f64) -> bool {
        self.finite == o.finite && (self.arch_ln - o.arch_ln).abs() <= tol
    }

    /// Whole values within relative `tol`, ignoring how they split.
    pub fn value_close(&self, o: &HeightValue, tol: f64) -> bool {
        (self.ln() - o.ln()).abs() <= tol
    }
}

/// Rounds to 15 significant digits, hiding last-bit noise from `exp(ln x)`.
fn round_sig(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arch = round_sig(self.arch());
        if self.finite.is_one() {
            write!(f, "{arch}")
        } else {
            write!(f, "({}) * {arch}", self.finite)
        }
    }
}

impl Serialize for HeightValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HeightValue", 8)?;
        st.serialize_field("finite", &self.finite.to_string())?;
        st.serialize_field(
            "finiteRational",
            &self.finite.as_rational().map(fmt_ratio),
        )?;
        st.serialize_field("finiteRadicand", &fmt_ratio(self.finite.radicand()))?;
        st.serialize_field("finiteIndex", &self.finite.index())?;
        st.serialize_field("arch", &self.arch())?;
        st.serialize_field("log", &self.ln())?;
        st.serialize_field("relErr", &self.rel_err)?;
        st.serialize_field(
            "exactness",
            &serde_json::json!({
                "finite": "exact-rational",
                "arch": "float+relErr",
                "log": "float+relErr",
            }),
        )?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_roots() {
        let four = FinitePart::from_rational(q(4, 1));
        assert_eq!(four.root(2), FinitePart::from_rational(q(2, 1)));
        let a = FinitePart::prime_power(&BigUint::from(2u32), &q(-1, 2));
        let b = FinitePart::from_rational(q(1, 4)).root(4);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2^(-1/2)");
        assert_eq!(a.mul(&a), FinitePart::from_rational(q(1, 2)));
        assert!(a.pow(2).mul(&FinitePart::from_rational(q(2, 1))).is_one());
    }

    #[test]
    fn display_factored() {
        let v = FinitePart::from_rational(q(12, 5));
        assert_eq!(v.to_string(), "2^2 * 3 * 5^-1");
        assert_eq!(FinitePart::one().to_string(), "1");
    }

    #[test]
    fn height_value_json_shape() {
        let h = HeightValue::new(FinitePart::from_rational(q(1, 6)), 6f64.ln(), 1e-16);
        let j = serde_json::to_value(&h).unwrap();
        assert_eq!(j["finiteRational"], "1/6");
        assert!((j["arch"].as_f64().unwrap() - 6.0).abs() < 1e-12);
        assert!(j["log"].as_f64().unwrap().abs() < 1e-12);
        assert_eq!(j["exactness"]["finite"], "exact-rational");
    }
}
