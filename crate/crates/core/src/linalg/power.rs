//! Powers `T^k` with the rational content divided out after every product.
//!
//! Entries are kept as integer pairs `A + B sqrt m` so that no rational
//! normalisation (and no gcd) runs in the inner loop. Content is found by
//! trial valuation at a short list of candidate primes: if `M` is integral
//! and primitive and `p` divides the content of `M^k`, then `M` is nilpotent
//! modulo `p`, so `p` divides every non-leading coefficient of its
//! characteristic polynomial (or their norms over a quadratic field).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::matrix::MatrixK;

pub const DEFAULT_BITS_BUDGET: u64 = 10_000_000;

/// Entry-size budget in bits for a whole matrix. Read from
/// `HEIGHTLAB_BITS_BUDGET` when set.
pub fn bits_budget() -> u64 {
    std::env::var("HEIGHTLAB_BITS_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BITS_BUDGET)
}

/// An `n×n` matrix over `Z[sqrt m]`, row-major. `m = 0` means rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    m: i64,
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl IntMatrix {
    /// `T = M / d` with `M` integral and `d > 0`.
    pub fn from_matrix(t: &MatrixK) -> (IntMatrix, BigInt) {
        let (a, b, d) = t.integral_parts();
        (IntMatrix { n: t.dim(), m: t.radicand(), a, b }, d)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radicand(&self) -> i64 {
        self.m
    }

    /// Rational and `sqrt m` coordinates of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> (&BigInt, &BigInt) {
        (&self.a[i * self.n + j], &self.b[i * self.n + j])
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(Zero::is_zero)
    }

    /// Total size of all coordinates in bits.
    pub fn bits(&self) -> u64 {
        self.a.iter().chain(self.b.iter()).map(|x| x.bits()).sum()
    }

    pub fn max_entry_bits(&self) -> u64 {
        self.a.iter().chain(self.b.iter()).map(|x| x.bits()).max().unwrap_or(0)
    }

    pub fn to_matrix(&self) -> MatrixK {
        let entries = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| {
                let m = if b.is_zero() { 0 } else { self.m };
                Scalar::new(
                    BigRational::from_integer(a.clone()),
                    BigRational::from_integer(b.clone()),
                    m,
                )
            })
            .collect();
        MatrixK::new(self.n, entries).expect("square by construction")
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let m = BigInt::from(self.m);
        let rational = self.m == 0 || (self.b.iter().all(Zero::is_zero) && o.b.iter().all(Zero::is_zero));
        let mut a = vec![BigInt::zero(); n * n];
        let mut b = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut sa = BigInt::zero();
                let mut sb = BigInt::zero();
                let mut mb = BigInt::zero();
                for l in 0..n {
                    let (x, y) = (i * n + l, l * n + j);
                    if self.a[x].is_zero() && self.b[x].is_zero() {
                        continue;
                    }
                    sa += &self.a[x] * &o.a[y];
                    if !rational {
                        mb += &self.b[x] * &o.b[y];
                        sb += &self.a[x] * &o.b[y];
                        sb += &self.b[x] * &o.a[y];
                    }
                }
                if !rational {
                    sa += mb * &m;
                }
                a[i * n + j] = sa;
                b[i * n + j] = sb;
            }
        }
        IntMatrix { n, m: self.m, a, b }
    }

    /// Full gcd of all coordinates; zero for the zero matrix.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in self.a.iter().chain(self.b.iter()) {
            if !x.is_zero() {
                g = g.gcd(x);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// The part of the content supported on `primes`.
    pub fn content_at(&self, primes: &[BigUint]) -> BigInt {
        let mut c = BigInt::one();
        for p in primes {
            let pi = BigInt::from(p.clone());
            let mut v = i64::MAX;
            for x in self.a.iter().chain(self.b.iter()) {
                if x.is_zero() {
                    continue;
                }
                if !x.is_multiple_of(&pi) {
                    v = 0;
                    break;
                }
                v = v.min(arith::valuation(x, p));
            }
            if v > 0 && v != i64::MAX {
                c *= pi.pow(v as u32);
            }
        }
        c
    }

    pub fn div_exact(&self, c: &BigInt) -> IntMatrix {
        if c.is_one() {
            return self.clone();
        }
        let div = |x: &BigInt| x / c;
        IntMatrix {
            n: self.n,
            m: self.m,
            a: self.a.iter().map(div).collect(),
            b: self.b.iter().map(div).collect(),
        }
    }
}

/// Candidate primes for the content of powers of a primitive integral `M`.
/// `None` when `M` is nilpotent (every prime is a candidate, but `M^n = 0`).
fn content_candidates(m: &IntMatrix) -> Option<Vec<BigUint>> {
    let cp = m.to_matrix().char_poly();
    let coeffs = cp.coeffs();
    let mut g = BigInt::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        if c.is_zero() {
            continue;
        }
        let v = if c.is_rational() { c.rational_part().numer().clone() } else { c.norm().numer().clone() };
        g = g.gcd(&v);
    }
    if g.is_zero() {
        return None;
    }
    Some(arith::prime_divisors(g.magnitude()))
}

/// Repeated-squaring state: `T^k = stripped * ledger_num / d^k`.
#[derive(Clone, Debug)]
pub struct PowerEngine {
    d: BigInt,
    c0: BigInt,
    base: IntMatrix,
    candidates: Option<Vec<BigUint>>,
    budget: u64,
}

impl PowerEngine {
    pub fn new(t: &MatrixK, budget: u64) -> Self {
        let (m, d) = IntMatrix::from_matrix(t);
        let c0 = m.content();
        let base = if c0.is_zero() { m } else { m.div_exact(&c0) };
        let candidates = if base.is_zero() { None } else { content_candidates(&base) };
        PowerEngine { d, c0, base, candidates, budget }
    }

    /// Primitive integral matrix proportional to `T`.
    pub fn primitive(&self) -> &IntMatrix {
        &self.base
    }

    fn strip(&self, x: IntMatrix) -> (IntMatrix, BigInt) {
        let c = match &self.candidates {
            Some(ps) => x.content_at(ps),
            None => x.content(),
        };
        if c.is_zero() {
            return (x, BigInt::one());
        }
        (x.div_exact(&c), c)
    }

    fn product(&self, x: &IntMatrix, y: &IntMatrix) -> Result<(IntMatrix, BigInt)> {
        let (p, c) = self.strip(x.mul(y));
        let bits = p.bits();
        if bits > self.budget {
            return Err(Error::Resource { bits, budget: self.budget });
        }
        Ok((p, c))
    }

    /// `(stripped, c)` with `M^k = c * stripped` for the primitive `M`.
    pub fn power(&self, k: u64) -> Result<(IntMatrix, BigInt)> {
        assert!(k >= 1, "power_stripped needs k >= 1");
        let mut acc: Option<(IntMatrix, BigInt)> = None;
        let mut base = (self.base.clone(), BigInt::one());
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some((m, c)) => {
                        let (p, c2) = self.product(&m, &base.0)?;
                        (p, c * &base.1 * c2)
                    }
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            let (sq, c2) = self.product(&base.0, &base.0)?;
            base = (sq, &base.1 * &base.1 * c2);
        }
        Ok(acc.unwrap())
    }

    /// The scalar `c * c0^k / d^k` restoring `T^k` from a stripped power.
    pub fn ledger(&self, c: &BigInt, k: u64) -> BigRational {
        let k = u32::try_from(k).expect("ledger exponent fits u32");
        BigRational::new(c * self.c0.pow(k), self.d.pow(k))
    }

    /// Iterates `k = 1, 2, 4, ..., 2^jmax`.
    pub fn squares(&self, jmax: u32) -> PowerSquares<'_> {
        PowerSquares { engine: self, cur: None, j: 0, jmax, failed: false }
    }
}

/// Stripped powers `T^(2^j)` for `j = 0..=jmax`. Stops after the first error.
pub struct PowerSquares<'a> {
    engine: &'a PowerEngine,
    cur: Option<(IntMatrix, BigInt)>,
    j: u32,
    jmax: u32,
    failed: bool,
}

impl Iterator for PowerSquares<'_> {
    /// `(k, stripped, c)` with `M^k = c * stripped`.
    type Item = Result<(u64, IntMatrix, BigInt)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.j > self.jmax {
            return None;
        }
        let next = match self.cur.take() {
            None => Ok((self.engine.base.clone(), BigInt::one())),
            Some((m, c)) => self.engine.product(&m, &m).map(|(p, c2)| (p, &c * &c * c2)),
        };
        let k = 1u64 << self.j;
        self.j += 1;
        match next {
            Ok((m, c)) => {
                self.cur = Some((m.clone(), c.clone()));
                Some(Ok((k, m, c)))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// `T^k = stripped * scalar` with `stripped` integral and primitive.
pub fn power_stripped(t: &MatrixK, k: u64, budget: u64) -> Result<(MatrixK, Scalar)> {
    let engine = PowerEngine::new(t, budget);
    if engine.base.is_zero() {
        return Ok((MatrixK::zero(t.dim()), Scalar::one()));
    }
    let (m, c) = engine.power(k)?;
    if m.is_zero() {
        return Ok((MatrixK::zero(t.dim()), Scalar::one()));
    }
    Ok((m.to_matrix(), Scalar::rational(engine.ledger(&c, k))))
}

/// Primes at which `T^k` can have a non-unit entry for some `k`: those of the
/// entries of `T` together with those of its characteristic polynomial.
pub fn power_support(t: &MatrixK) -> BTreeSet<BigUint> {
    let mut primes = BTreeSet::new();
    for x in t.entries() {
        crate::place::scalar_support(x, &mut primes);
    }
    for c in t.char_poly().coeffs() {
        crate::place::scalar_support(c, &mut primes);
    }
    primes.retain(|p| !p.is_zero() && !p.is_one());
    primes
}
