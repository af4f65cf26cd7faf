//! Places of `K`, normalised absolute values and local magnitudes.
//!
//! At a finite place `v | p` the absolute value is normalised by `|p|_v = 1/p`,
//! so magnitudes are exact powers `p^q` with rational `q`. At an archimedean
//! place it is `|σ(x)|` for the corresponding embedding `σ`, restricting to the
//! usual absolute value on `Q`. The weight of a place is `d_v = n_v / [K:Q]`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::value::{FinitePart, HeightValue};

const ARCH_EPS: f64 = 4.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceKind {
    /// Real embedding; `conjugate` selects `sqrt m -> -sqrt m`.
    Real { conjugate: bool },
    /// The complex place of an imaginary quadratic field.
    Complex,
    /// A prime above `p` with ramification `e` and residue degree `f`.
    /// Split primes carry `branch ∈ {0, 1}` naming the `p`-adic square root
    /// of `m` the place embeds through (see [`arith::padic_sqrt`]).
    Finite { p: BigUint, e: u8, f: u8, branch: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    pub field: Field,
    pub kind: PlaceKind,
}

impl Place {
    pub fn is_finite(&self) -> bool {
        matches!(self.kind, PlaceKind::Finite { .. })
    }

    pub fn prime(&self) -> Option<&BigUint> {
        match &self.kind {
            PlaceKind::Finite { p, .. } => Some(p),
            _ => None,
        }
    }

    /// `n_v = [K_v : Q_p]` (or `[K_v : R]`).
    pub fn local_degree(&self) -> u32 {
        match &self.kind {
            PlaceKind::Real { .. } => 1,
            PlaceKind::Complex => 2,
            PlaceKind::Finite { e, f, .. } => (*e as u32) * (*f as u32),
        }
    }

    /// `d_v = n_v / d`.
    pub fn weight(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.local_degree()),
            BigInt::from(self.field.degree()),
        )
    }

    pub fn weight_f64(&self) -> f64 {
        self.local_degree() as f64 / self.field.degree() as f64
    }

    /// Parses `inf`, `inf'`, `C`, `p`, or `p'` (second place above a split `p`).
    pub fn parse(field: Field, s: &str) -> Result<Place> {
        let s = s.trim();
        let arch = archimedean_places(field);
        match s {
            "inf" | "oo" | "R" => return Ok(arch[0].clone()),
            "inf'" | "oo'" => {
                return arch
                    .get(1)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("{field} has one archimedean place")))
            }
            "C" => return Ok(arch[0].clone()),
            _ => {}
        }
        let (digits, second) = match s.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (s, false),
        };
        let p: BigUint = digits.parse().map_err(|_| Error::parse(0, format!("bad place '{s}'")))?;
        let above = places_above(field, &p)?;
        let idx = usize::from(second);
        above
            .get(idx)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("only one place above {p} in {field}")))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Real { conjugate: false } => write!(f, "inf"),
            PlaceKind::Real { conjugate: true } => write!(f, "inf'"),
            PlaceKind::Complex => write!(f, "C"),
            PlaceKind::Finite { p, branch, .. } => {
                write!(f, "{p}{}", if *branch == 1 { "'" } else { "" })
            }
        }
    }
}

/// The finite places above a rational prime, split places ordered by branch.
pub fn places_above(field: Field, p: &BigUint) -> Result<Vec<Place>> {
    if !arith::is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let fin = |e, f, branch| Place {
        field,
        kind: PlaceKind::Finite { p: p.clone(), e, f, branch },
    };
    let m = match field {
        Field::Rational => return Ok(vec![fin(1, 1, 0)]),
        Field::Quadratic(m) => m,
    };
    let two = BigUint::from(2u32);
    let behaviour = if *p == two {
        match m.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    } else {
        match arith::legendre(&BigInt::from(m), p) {
            0 => Splitting::Ramified,
            1 => Splitting::Split,
            _ => Splitting::Inert,
        }
    };
    Ok(match behaviour {
        Splitting::Split => vec![fin(1, 1, 0), fin(1, 1, 1)],
        Splitting::Inert => vec![fin(1, 2, 0)],
        Splitting::Ramified => vec![fin(2, 1, 0)],
    })
}

enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn archimedean_places(field: Field) -> Vec<Place> {
    match field {
        Field::Rational => vec![Place { field, kind: PlaceKind::Real { conjugate: false } }],
        Field::Quadratic(m) if m > 0 => vec![
            Place { field, kind: PlaceKind::Real { conjugate: false } },
            Place { field, kind: PlaceKind::Real { conjugate: true } },
        ],
        Field::Quadratic(_) => vec![Place { field, kind: PlaceKind::Complex }],
    }
}

/// All finite places above the given rational primes.
pub fn finite_places_over(field: Field, primes: &BTreeSet<BigUint>) -> Vec<Place> {
    primes
        .iter()
        .flat_map(|p| places_above(field, p).expect("support primes are prime"))
        .collect()
}

/// The value of an absolute value at one place.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalMagnitude {
    Zero,
    /// Exactly `p^exponent`.
    PrimePower { p: BigUint, exponent: BigRational },
    /// `exp(ln)` with relative error `rel_err`.
    Arch { ln: f64, rel_err: f64 },
}

impl LocalMagnitude {
    pub fn unit(p: &BigUint) -> Self {
        LocalMagnitude::PrimePower { p: p.clone(), exponent: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LocalMagnitude::Zero)
    }

    /// Natural log; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        match self {
            LocalMagnitude::Zero => f64::NEG_INFINITY,
            LocalMagnitude::PrimePower { p, exponent } => {
                exponent.to_f64().unwrap() * arith::ln_biguint(p)
            }
            LocalMagnitude::Arch { ln, .. } => *ln,
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }

    pub fn exponent(&self) -> Option<&BigRational> {
        match self {
            LocalMagnitude::PrimePower { exponent, .. } => Some(exponent),
            _ => None,
        }
    }

    /// `self^weight` as a height factor. Zero is not allowed here.
    pub fn weighted(&self, weight: &BigRational) -> HeightValue {
        match self {
            LocalMagnitude::Zero => panic!("zero magnitude has no height factor"),
            LocalMagnitude::PrimePower { p, exponent } => HeightValue::new(
                FinitePart::prime_power(p, &(exponent * weight)),
                0.0,
                0.0,
            ),
            LocalMagnitude::Arch { ln, rel_err } => {
                let w = weight.to_f64().unwrap();
                HeightValue::new(FinitePart::one(), ln * w, rel_err * w)
            }
        }
    }

    /// Multiplicative combination at the same place.
    pub fn mul(&self, o: &LocalMagnitude) -> LocalMagnitude {
        match (self, o) {
            (LocalMagnitude::Zero, _) | (_, LocalMagnitude::Zero) => LocalMagnitude::Zero,
            (
                LocalMagnitude::PrimePower { p, exponent: a },
                LocalMagnitude::PrimePower { exponent: b, .. },
            ) => LocalMagnitude::PrimePower { p: p.clone(), exponent: a + b },
            (
                LocalMagnitude::Arch { ln: a, rel_err: ea },
                LocalMagnitude::Arch { ln: b, rel_err: eb },
            ) => LocalMagnitude::Arch { ln: a + b, rel_err: ea + eb },
            _ => panic!("combining magnitudes from different places"),
        }
    }

    pub fn div(&self, o: &LocalMagnitude) -> LocalMagnitude {
        match (self, o) {
            (_, LocalMagnitude::Zero) => panic!("division by zero magnitude"),
            (LocalMagnitude::Zero, _) => LocalMagnitude::Zero,
            (
                LocalMagnitude::PrimePower { p, exponent: a },
                LocalMagnitude::PrimePower { exponent: b, .. },
            ) => LocalMagnitude::PrimePower { p: p.clone(), exponent: a - b },
            (
                LocalMagnitude::Arch { ln: a, rel_err: ea },
                LocalMagnitude::Arch { ln: b, rel_err: eb },
            ) => LocalMagnitude::Arch { ln: a - b, rel_err: ea + eb },
            _ => panic!("combining magnitudes from different places"),
        }
    }

    /// `self^(1/k)`.
    pub fn root(&self, k: u64) -> LocalMagnitude {
        match self {
            LocalMagnitude::Zero => LocalMagnitude::Zero,
            LocalMagnitude::PrimePower { p, exponent } => LocalMagnitude::PrimePower {
                p: p.clone(),
                exponent: exponent / BigRational::from_integer(BigInt::from(k)),
            },
            LocalMagnitude::Arch { ln, rel_err } => LocalMagnitude::Arch {
                ln: ln / k as f64,
                rel_err: rel_err / k as f64,
            },
        }
    }

    /// Exact comparison at finite places, plain float comparison otherwise.
    pub fn le(&self, o: &LocalMagnitude) -> bool {
        match (self, o) {
            (LocalMagnitude::Zero, _) => true,
            (_, LocalMagnitude::Zero) => false,
            (
                LocalMagnitude::PrimePower { exponent: a, .. },
                LocalMagnitude::PrimePower { exponent: b, .. },
            ) => a <= b,
            _ => self.ln() <= o.ln(),
        }
    }

    /// Larger of two magnitudes at the same place.
    pub fn max(self, o: LocalMagnitude) -> LocalMagnitude {
        if self.le(&o) {
            o
        } else {
            self
        }
    }
}

impl fmt::Display for LocalMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalMagnitude::Zero => write!(f, "0"),
            LocalMagnitude::PrimePower { p, exponent } => {
                if exponent.denom().is_one() {
                    write!(f, "{p}^{}", exponent.numer())
                } else {
                    write!(f, "{p}^({}/{})", exponent.numer(), exponent.denom())
                }
            }
            LocalMagnitude::Arch { ln, .. } => write!(f, "{}", ln.exp()),
        }
    }
}

/// Normalised valuation `w(x)` at a finite place, with `w(p) = 1`.
/// Half-integers occur at ramified places.
pub fn finite_valuation(x: &Scalar, v: &Place) -> Option<BigRational> {
    let p = v.prime().expect("finite_valuation at an archimedean place");
    if x.is_zero() {
        return None;
    }
    if x.is_rational() {
        return Some(BigRational::from_integer(BigInt::from(arith::rational_valuation(
            x.rational_part(),
            p,
        ))));
    }
    let (a, b, d) = x.integral_form();
    let w = integral_valuation(&a, &b, v)?;
    Some(w - BigRational::from_integer(BigInt::from(arith::valuation(&d, p))))
}

/// `w(A + B sqrt m)` for integers `A, B` (not both zero), `m` the radicand of
/// the place's field.
pub fn integral_valuation(a: &BigInt, b: &BigInt, v: &Place) -> Option<BigRational> {
    let (p, e, f, branch) = match &v.kind {
        PlaceKind::Finite { p, e, f, branch } => (p, *e, *f, *branch),
        _ => panic!("integral_valuation at an archimedean place"),
    };
    if b.is_zero() {
        if a.is_zero() {
            return None;
        }
        return Some(BigRational::from_integer(BigInt::from(arith::valuation(a, p))));
    }
    let m = v.field.radicand();
    let norm = a * a - BigInt::from(m) * b * b;
    if e * f == 2 {
        // one place above p: |x|_v^2 = |N(x)|_p
        let w = arith::valuation(&norm, p);
        return Some(BigRational::new(BigInt::from(w), BigInt::from(2)));
    }
    // v(A + B r) + v(A - B r) = v_p(N) with both terms nonnegative, so the
    // residue is nonzero modulo p^(v_p(N) + 1)
    let bound = arith::valuation(&norm, p) as u32 + 1;
    let pi = BigInt::from(p.clone());
    let mut prec = 8u32.min(bound);
    let w = loop {
        let mut r = arith::padic_sqrt(m, p, prec);
        if branch == 1 {
            r = -r;
        }
        let modulus = pi.pow(prec);
        let residue = (a + b * &r).mod_floor(&modulus);
        if !residue.is_zero() {
            break arith::valuation(&residue, p);
        }
        assert!(prec < bound, "p-adic precision bound violated");
        prec = (prec * 2).min(bound);
    };
    Some(BigRational::from_integer(BigInt::from(w)))
}

/// `|x|_v`.
pub fn abs_value(x: &Scalar, v: &Place) -> LocalMagnitude {
    if x.is_zero() {
        return LocalMagnitude::Zero;
    }
    match &v.kind {
        PlaceKind::Finite { p, .. } => LocalMagnitude::PrimePower {
            p: p.clone(),
            exponent: -finite_valuation(x, v).unwrap(),
        },
        PlaceKind::Real { conjugate } => LocalMagnitude::Arch {
            ln: ln_abs_real(x, v.field.radicand(), if *conjugate { -1 } else { 1 }),
            rel_err: ARCH_EPS,
        },
        PlaceKind::Complex => LocalMagnitude::Arch {
            ln: 0.5 * arith::ln_abs_rational(&x.norm()),
            rel_err: ARCH_EPS,
        },
    }
}

/// `ln |a + sign * b sqrt m|` for a nonzero element, avoiding cancellation by
/// going through the norm when the two terms have opposite signs.
pub(crate) fn ln_abs_real(x: &Scalar, m: i64, sign: i32) -> f64 {
    if x.is_rational() {
        return arith::ln_abs_rational(x.rational_part());
    }
    let (a, b, d) = x.integral_form();
    let sb = if sign < 0 { -&b } else { b.clone() };
    let sum_ln = ln_abs_sum(&a.abs(), &b.abs(), m);
    let ln_d = arith::ln_biguint(d.magnitude());
    if a.is_zero() || a.is_positive() == sb.is_positive() {
        sum_ln - ln_d
    } else {
        let norm = &a * &a - BigInt::from(m) * &b * &b;
        arith::ln_biguint(norm.magnitude()) - sum_ln - ln_d
    }
}

/// `ln(|a| + |b| sqrt m)` for nonnegative integers, not both zero.
fn ln_abs_sum(a: &BigInt, b: &BigInt, m: i64) -> f64 {
    let shift = a.bits().max(b.bits()) as i64;
    let af = arith::rational_to_f64_scaled(&BigRational::from_integer(a.clone()), shift);
    let bf = arith::rational_to_f64_scaled(&BigRational::from_integer(b.clone()), shift);
    (af + bf * (m as f64).sqrt()).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Real embedding `a + sign * b sqrt m` divided by `2^shift`.
pub(crate) fn embed_real_scaled(x: &Scalar, m: i64, sign: i32, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_rational() {
        return arith::rational_to_f64_scaled(x.rational_part(), shift);
    }
    let a = x.rational_part();
    let b = if sign < 0 { -x.irrational_part() } else { x.irrational_part().clone() };
    let sqrt_m = (m as f64).sqrt();
    if a.is_zero() || a.is_positive() == b.is_positive() {
        return arith::rational_to_f64_scaled(a, shift)
            + arith::rational_to_f64_scaled(&b, shift) * sqrt_m;
    }
    // x = N / y with y = a - b sqrt m free of cancellation
    let y_shift = arith::rational_log2_hint(a).max(arith::rational_log2_hint(&b));
    let y = arith::rational_to_f64_scaled(a, y_shift) - arith::rational_to_f64_scaled(&b, y_shift) * sqrt_m;
    arith::rational_to_f64_scaled(&x.norm(), shift + y_shift) / y
}

/// Real embedding of an integral `A + sign * B sqrt m`, divided by `2^shift`.
pub(crate) fn embed_int_real_scaled(a: &BigInt, b: &BigInt, m: i64, sign: i32, shift: i64) -> f64 {
    if b.is_zero() {
        return arith::int_to_f64_scaled(a, shift);
    }
    let b = if sign < 0 { -b } else { b.clone() };
    let sqrt_m = (m as f64).sqrt();
    if a.is_zero() || a.is_positive() == b.is_positive() {
        return arith::int_to_f64_scaled(a, shift) + arith::int_to_f64_scaled(&b, shift) * sqrt_m;
    }
    let y_shift = a.bits().max(b.bits()) as i64;
    let y = arith::int_to_f64_scaled(a, y_shift) - arith::int_to_f64_scaled(&b, y_shift) * sqrt_m;
    let norm = a * a - BigInt::from(m) * &b * &b;
    arith::int_to_f64_scaled(&norm, shift + y_shift) / y
}

/// Complex embedding `(re, im)` of an element of an imaginary quadratic field,
/// scaled by `2^-shift`.
pub(crate) fn embed_complex_scaled(x: &Scalar, m: i64, shift: i64) -> (f64, f64) {
    let re = arith::rational_to_f64_scaled(x.rational_part(), shift);
    let im = arith::rational_to_f64_scaled(x.irrational_part(), shift) * ((-m) as f64).sqrt();
    (re, im)
}

/// Rational primes at which `x` can fail to be a unit: primes of the common
/// denominator and of the norm of the integral numerator.
pub fn scalar_support(x: &Scalar, primes: &mut BTreeSet<BigUint>) {
    if x.is_zero() {
        return;
    }
    let (a, b, d) = x.integral_form();
    let m = x.radicand();
    let n = &a * &a - BigInt::from(m) * &b * &b;
    for p in arith::prime_divisors(d.magnitude()) {
        primes.insert(p);
    }
    for p in arith::prime_divisors(n.magnitude()) {
        primes.insert(p);
    }
}

/// Primes at which some root of the monic `f` (zero roots aside) can fail
/// to be a unit: those of the coefficient denominators, and those dividing
/// the norm of every nonzero lower coefficient. Much cheaper than factoring
/// each coefficient.
pub fn root_support(coeffs: &[Scalar]) -> BTreeSet<BigUint> {
    let mut primes = BTreeSet::new();
    let mut g = BigInt::zero();
    let lower = &coeffs[..coeffs.len().saturating_sub(1)];
    for x in lower.iter().filter(|x| !x.is_zero()) {
        let (a, b, d) = x.integral_form();
        primes.extend(arith::prime_divisors(d.magnitude()));
        g = g.gcd(&(&a * &a - BigInt::from(x.radicand()) * &b * &b));
    }
    if !g.is_zero() {
        primes.extend(arith::prime_divisors(g.magnitude()));
    }
    primes.retain(|p| !p.is_one());
    primes
}

/// `∏_v |x|_v^{d_v}`; the product formula says this is exactly 1.
pub fn product_formula_check(field: Field, x: &Scalar) -> Result<HeightValue> {
    if x.is_zero() {
        return Err(Error::Degenerate("product formula needs a nonzero element".into()));
    }
    let mut primes = BTreeSet::new();
    scalar_support(x, &mut primes);
    let mut acc = HeightValue::one();
    for v in finite_places_over(field, &primes).iter().chain(archimedean_places(field).iter()) {
        acc = acc.mul(&abs_value(x, v).weighted(&v.weight()));
    }
    Ok(acc)
}

/// Convenience: `|p|_v` for an integer prime at a finite place, used in tests.
pub fn prime_magnitude(v: &Place) -> LocalMagnitude {
    let p = v.prime().expect("finite place");
    abs_value(&Scalar::rational(BigRational::from_integer(BigInt::from(p.clone()))), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn exp_of(m: &LocalMagnitude) -> BigRational {
        m.exponent().unwrap().clone()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn splitting_examples() {
        let q_seven = places_above(Field::Rational, &big(7)).unwrap();
        assert_eq!(q_seven.len(), 1);
        assert_eq!(q_seven[0].weight(), q(1, 1));

        let gauss = Field::Quadratic(-1);
        let five = places_above(gauss, &big(5)).unwrap();
        assert_eq!(five.len(), 2);
        for v in &five {
            assert_eq!(v.weight(), q(1, 2));
        }
        let two = places_above(gauss, &big(2)).unwrap();
        assert_eq!(two.len(), 1);
        assert!(matches!(two[0].kind, PlaceKind::Finite { e: 2, f: 1, .. }));
        assert_eq!(two[0].weight(), q(1, 1));
        let three = places_above(gauss, &big(3)).unwrap();
        assert!(matches!(three[0].kind, PlaceKind::Finite { e: 1, f: 2, .. }));

        assert!(places_above(Field::Rational, &big(9)).is_err());
    }

    #[test]
    fn local_degrees_sum_to_field_degree() {
        for m in [-1i64, -5, 2, 3, 5, 17, -7, 6] {
            let k = Field::Quadratic(m);
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
                let total: u32 = places_above(k, &big(p)).unwrap().iter().map(Place::local_degree).sum();
                assert_eq!(total, 2, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn archimedean_examples() {
        assert_eq!(archimedean_places(Field::Rational).len(), 1);
        let r2 = archimedean_places(Field::Quadratic(2));
        assert_eq!(r2.len(), 2);
        assert!(r2.iter().all(|v| v.weight() == q(1, 2)));
        let c = archimedean_places(Field::Quadratic(-5));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].weight(), q(1, 1));
    }

    #[test]
    fn abs_value_examples() {
        let v = &places_above(Field::Rational, &big(7)).unwrap()[0];
        assert_eq!(exp_of(&prime_magnitude(v)), q(-1, 1));
        assert!(abs_value(&Scalar::zero(), v).is_zero());

        let gauss = Field::Quadratic(-1);
        let v2 = &places_above(gauss, &big(2)).unwrap()[0];
        let x = gauss.parse_scalar("1+r").unwrap();
        assert_eq!(exp_of(&abs_value(&x, v2)), q(-1, 2));
        assert_eq!(exp_of(&prime_magnitude(v2)), q(-1, 1));
    }

    #[test]
    fn split_valuations_pick_one_branch() {
        // 5 = (2+i)(2-i): each factor is a uniformiser at exactly one place above 5
        let gauss = Field::Quadratic(-1);
        let places = places_above(gauss, &big(5)).unwrap();
        let x = gauss.parse_scalar("2+r").unwrap();
        let y = gauss.parse_scalar("2-r").unwrap();
        let wx: Vec<_> = places.iter().map(|v| finite_valuation(&x, v).unwrap()).collect();
        let wy: Vec<_> = places.iter().map(|v| finite_valuation(&y, v).unwrap()).collect();
        assert_eq!(&wx[0] + &wx[1], q(1, 1));
        assert_eq!(&wy[0] + &wy[1], q(1, 1));
        assert_ne!(wx, wy);
        // high valuation input forces precision growth
        let z = x.pow(40);
        let wz: Vec<_> = places.iter().map(|v| finite_valuation(&z, v).unwrap()).collect();
        assert_eq!(&wz[0] + &wz[1], q(40, 1));
        assert!(wz.contains(&q(40, 1)));
    }

    #[test]
    fn two_adic_split_valuations() {
        // Q(sqrt 17): 2 splits; (1 + sqrt17)/2 has norm -4
        let k = Field::Quadratic(17);
        let places = places_above(k, &big(2)).unwrap();
        assert_eq!(places.len(), 2);
        let x = k.parse_scalar("1/2+1/2*r").unwrap();
        let w: Vec<_> = places.iter().map(|v| finite_valuation(&x, v).unwrap()).collect();
        assert_eq!(&w[0] + &w[1], q(2, 1));
        assert!(w.iter().all(|wi| *wi >= q(0, 1)));
    }

    #[test]
    fn product_formula_examples() {
        let six = Scalar::from_int(6);
        let h = product_formula_check(Field::Rational, &six).unwrap();
        assert_eq!(h.finite, FinitePart::from_rational(q(1, 6)));
        assert!((h.arch() - 6.0).abs() < 1e-12);
        assert!(h.value_close(&HeightValue::one(), 1e-12));
        let h1 = product_formula_check(Field::Rational, &Scalar::one()).unwrap();
        assert!(h1.finite.is_one());
        assert_eq!(h1.arch_ln, 0.0);

        let gauss = Field::Quadratic(-1);
        let x = gauss.parse_scalar("1+r").unwrap();
        let h = product_formula_check(gauss, &x).unwrap();
        assert_eq!(h.finite, FinitePart::prime_power(&BigUint::from(2u32), &q(-1, 2)));
        assert!(h.value_close(&HeightValue::one(), 1e-12));
        assert!(product_formula_check(Field::Rational, &Scalar::zero()).is_err());
    }

    #[test]
    fn real_embedding_without_cancellation() {
        let k = Field::Quadratic(2);
        // (1 + sqrt2)^-30 is tiny under the identity embedding
        let u = k.parse_scalar("1+r").unwrap().pow(30);
        let small = u.conj();
        let ln = ln_abs_real(&small, 2, 1);
        let expected = -30.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((ln - expected).abs() < 1e-12, "{ln} vs {expected}");
        let scaled = embed_real_scaled(&small, 2, 1, 0);
        assert!((scaled.abs().ln() - expected).abs() < 1e-12);
    }
}
