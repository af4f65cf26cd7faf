//! Integer and rational helpers: valuations, factoring, square roots modulo
//! prime powers and a few conversions between big numbers and floats.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Distinct prime divisors of `n`, ascending. `n = 0` and `n = 1` have none.
pub fn prime_divisors(n: &BigUint) -> Vec<BigUint> {
    if n.is_zero() || n.is_one() {
        return Vec::new();
    }
    if let Some(small) = n.to_u64() {
        return num_prime::nt_funcs::factorize64(small)
            .into_keys()
            .map(BigUint::from)
            .collect();
    }
    num_prime::nt_funcs::factorize(n.clone()).into_keys().collect()
}

/// Collects the prime divisors of the numerator and denominator of `r`.
pub fn extend_with_rational_primes(primes: &mut BTreeSet<BigUint>, r: &BigRational) {
    for p in prime_divisors(r.numer().magnitude()) {
        primes.insert(p);
    }
    for p in prime_divisors(r.denom().magnitude()) {
        primes.insert(p);
    }
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return num_prime::nt_funcs::is_prime64(small);
    }
    num_prime::nt_funcs::is_prime(n, None).probably()
}

/// Largest `k` with `p^k | n`. `n` must be nonzero.
///
/// Divides by `p^(2^i)` for growing `i` and then walks back down, so large
/// valuations cost a logarithmic number of divisions.
pub fn valuation(n: &BigInt, p: &BigUint) -> i64 {
    debug_assert!(!n.is_zero());
    if *p == BigUint::from(2u32) {
        return n.trailing_zeros().unwrap_or(0) as i64;
    }
    let mut m = n.clone();
    let mut powers = vec![BigInt::from(p.clone())];
    let mut k = 0i64;
    loop {
        let top = powers.last().unwrap();
        let (q, r) = m.div_rem(top);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1 << (powers.len() - 1);
        let sq = top * top;
        powers.push(sq);
    }
    while let Some(pw) = powers.pop() {
        let (q, r) = m.div_rem(&pw);
        if r.is_zero() {
            m = q;
            k += 1 << powers.len();
        }
    }
    k
}

/// `n / 2^shift` as a float for an integer `n`.
pub fn int_to_f64_scaled(n: &BigInt, shift: i64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let (mant, e) = split_biguint(n.magnitude());
    let v = ldexp(mant, e - shift);
    if n.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// p-adic valuation of a nonzero rational.
pub fn rational_valuation(r: &BigRational, p: &BigUint) -> i64 {
    valuation(r.numer(), p) - valuation(r.denom(), p)
}

/// Squarefree test for a machine integer (sign ignored).
pub fn is_squarefree(m: i64) -> bool {
    if m == 0 {
        return false;
    }
    let mut n = m.unsigned_abs();
    let mut d = 2u64;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        if n % d == 0 {
            n /= d;
        }
        d += 1;
    }
    true
}

/// Legendre symbol (a / p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigUint) -> i32 {
    let pi = BigInt::from(p.clone());
    let a = a.mod_floor(&pi).to_biguint().unwrap();
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) >> 1;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root of a quadratic residue `a` modulo an odd prime.
fn sqrt_mod_prime(a: &BigUint, p: &BigUint) -> BigUint {
    let a = a % p;
    if a.is_zero() {
        return a;
    }
    let one = BigUint::one();
    let pm1 = p - &one;
    if (p % 4u32) == BigUint::from(3u32) {
        return a.modpow(&((p + &one) >> 2), p);
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let half = &pm1 >> 1;
    let mut z = BigUint::from(2u32);
    while z.modpow(&half, p) != pm1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    r
}

/// A square root of `m` in `Z_p`, reduced modulo `p^precision`.
///
/// Requires `m` to be a nonzero square unit in `Z_p` (for `p = 2` that means
/// `m ≡ 1 mod 8`). The branch is fixed: for odd `p` the root whose residue mod
/// `p` is the smaller of the two, for `p = 2` the root that is `1 mod 4`.
pub fn padic_sqrt(m: i64, p: &BigUint, precision: u32) -> BigInt {
    let mi = BigInt::from(m);
    let two = BigUint::from(2u32);
    if *p == two {
        // bitwise lift of an odd root: r^2 ≡ m mod 2^j for increasing j
        let modulus_bits = precision.max(3) + 1;
        let mut r = BigInt::one();
        for j in 3..modulus_bits {
            let modj1 = BigInt::one() << (j + 1);
            if (&r * &r - &mi).mod_floor(&modj1) != BigInt::zero() {
                r += BigInt::one() << (j - 1);
            }
        }
        let modk = BigInt::one() << precision;
        let mut r = r.mod_floor(&modk);
        if (&r % 4u32) != BigInt::one() && precision >= 2 {
            r = (-r).mod_floor(&modk);
        }
        return r;
    }
    let pm = mi.mod_floor(&BigInt::from(p.clone())).to_biguint().unwrap();
    let mut r0 = sqrt_mod_prime(&pm, p);
    let other = (p - &r0) % p;
    if other < r0 {
        r0 = other;
    }
    // Newton lifting, doubling precision
    let pi = BigInt::from(p.clone());
    let mut r = BigInt::from(r0);
    let mut prec = 1u32;
    while prec < precision {
        prec = (prec * 2).min(precision);
        let modulus = pi.pow(prec);
        let f = &r * &r - &mi;
        let df = (BigInt::from(2) * &r).mod_floor(&modulus);
        let inv = mod_inverse(&df, &modulus).expect("unit derivative");
        r = (&r - f * inv).mod_floor(&modulus);
    }
    r.mod_floor(&pi.pow(precision.max(1)))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Exact `k`-th root of a nonnegative integer, if it is a perfect power.
pub fn exact_root(n: &BigUint, k: u32) -> Option<BigUint> {
    if k == 1 || n.is_zero() || n.is_one() {
        return Some(n.clone());
    }
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

/// Natural log of a positive big integer, good to double precision.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of |r| for nonzero rational r.
pub fn ln_abs_rational(r: &BigRational) -> f64 {
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// `r / 2^shift` as a float, without overflowing intermediate values.
pub fn rational_to_f64_scaled(r: &BigRational, shift: i64) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (nm, ne) = split_biguint(r.numer().magnitude());
    let (dm, de) = split_biguint(r.denom().magnitude());
    let e = ne - de - shift;
    let v = ldexp(nm / dm, e);
    if r.numer().sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// Binary size used to pick a common scale for a batch of rationals:
/// `floor(log2 |r|)` roughly, 0 for zero.
pub fn rational_log2_hint(r: &BigRational) -> i64 {
    if r.is_zero() {
        return i64::MIN / 4;
    }
    r.numer().bits() as i64 - r.denom().bits() as i64
}

fn split_biguint(n: &BigUint) -> (f64, i64) {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_f64().unwrap(), 0);
    }
    let shift = bits - 64;
    ((n >> shift).to_f64().unwrap(), shift as i64)
}

/// `x * 2^e` with graceful underflow.
pub fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return 0.0;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Content of a list of rationals: `gcd(numerators) / lcm(denominators)`,
/// positive; zero when every entry is zero.
pub fn rational_content<'a, I>(values: I) -> BigRational
where
    I: IntoIterator<Item = &'a BigRational>,
{
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        g = g.gcd(v.numer());
        l = l.lcm(v.denom());
    }
    if g.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(g.abs(), l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(-5));
        assert!(is_squarefree(2));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(-9));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn padic_roots_square_to_m() {
        for &(m, p) in &[(2i64, 7u64), (-1, 5), (-1, 13), (3, 11), (17, 2), (-7, 2), (41, 2)] {
            let p = big(p);
            for prec in [1u32, 3, 10, 40] {
                let r = padic_sqrt(m, &p, prec);
                let modulus = BigInt::from(p.clone()).pow(prec);
                let sq = (&r * &r - BigInt::from(m)).mod_floor(&modulus);
                if p == big(2) {
                    // a 2-adic root known mod 2^prec squares correctly mod 2^(prec+1)
                    let m2 = BigInt::one() << prec;
                    assert!((&r * &r - BigInt::from(m)).mod_floor(&m2).is_zero());
                } else {
                    assert!(sq.is_zero(), "m={m} p={p} prec={prec}");
                }
            }
        }
    }

    #[test]
    fn factoring_small_and_large() {
        assert_eq!(prime_divisors(&big(360)), vec![big(2), big(3), big(5)]);
        let n = BigUint::from(1_000_000_007u64) * BigUint::from(998_244_353u64) * big(6);
        assert_eq!(
            prime_divisors(&n),
            vec![big(2), big(3), big(998_244_353), big(1_000_000_007)]
        );
    }

    #[test]
    fn scaled_conversion() {
        let r = BigRational::new(BigInt::from(3), BigInt::from(4));
        assert_eq!(rational_to_f64_scaled(&r, 0), 0.75);
        assert_eq!(rational_to_f64_scaled(&r, -2), 3.0);
        let huge = BigRational::from_integer(BigInt::one() << 5000u32);
        assert_eq!(rational_to_f64_scaled(&huge, 4999), 2.0);
        assert!((ln_abs_rational(&huge) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn content_of_rationals() {
        let v: Vec<BigRational> = [(2, 3), (4, 5), (0, 1)]
            .iter()
            .map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
            .collect();
        assert_eq!(
            rational_content(&v),
            BigRational::new(BigInt::from(2), BigInt::from(15))
        );
    }

    #[test]
    fn valuations_large_and_small() {
        for &(p, e) in &[(2u64, 0u32), (2, 37), (3, 1), (3, 1000), (7, 77), (101, 5)] {
            let n = BigInt::from(big(p).pow(e)) * BigInt::from(-10_007i64);
            assert_eq!(valuation(&n, &big(p)), e as i64, "p={p} e={e}");
        }
        assert_eq!(valuation(&BigInt::from(-12), &big(2)), 2);
        assert_eq!(int_to_f64_scaled(&-(BigInt::one() << 3000u32), 2999), -2.0);
    }
}
