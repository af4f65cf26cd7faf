//! Dense univariate polynomials over `K`, coefficients in ascending order.

use std::fmt;

use crate::field::Scalar;

/// The monic characteristic polynomial `det(xI - T)`, coefficients `a_0..a_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    coeffs: Vec<Scalar>,
}

impl CharPoly {
    pub(crate) fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        debug_assert!(coeffs.last().map_or(false, |c| *c == Scalar::one()));
        CharPoly { coeffs }
    }

    /// Builds `∏ (x - r)` for the given roots.
    pub fn from_roots(roots: &[Scalar]) -> Self {
        let mut coeffs = vec![Scalar::one()];
        for r in roots {
            let mut next = vec![Scalar::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * r);
            }
            coeffs = next;
        }
        CharPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of leading zero coefficients `a_0 = a_1 = ... = 0`, i.e. the
    /// multiplicity of the root 0.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// `f = x^n`: every root is zero.
    pub fn is_monomial(&self) -> bool {
        self.zero_root_multiplicity() == self.degree()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Monic squarefree part `f / gcd(f, f')`.
    pub fn squarefree_part(&self) -> Vec<Scalar> {
        let f = self.coeffs.clone();
        let df: Vec<Scalar> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &Scalar::from_int(i as i64))
            .collect();
        let g = poly_gcd(&f, &df);
        let (q, _) = poly_divrem(&f, &g);
        make_monic(q)
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i > 0 && *c == Scalar::one() {
                terms.push(mono);
            } else if mono.is_empty() {
                terms.push(format!("({c})"));
            } else {
                terms.push(format!("({c})*{mono}"));
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

fn trim(mut p: Vec<Scalar>) -> Vec<Scalar> {
    while p.len() > 1 && p.last().map_or(false, Scalar::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Scalar::zero());
    }
    p
}

fn is_zero_poly(p: &[Scalar]) -> bool {
    p.iter().all(Scalar::is_zero)
}

fn make_monic(p: Vec<Scalar>) -> Vec<Scalar> {
    let p = trim(p);
    let lead = p.last().unwrap().clone();
    if lead.is_zero() {
        return p;
    }
    p.iter().map(|c| c / &lead).collect()
}

pub(crate) fn poly_divrem(a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
    let b = trim(b.to_vec());
    assert!(!is_zero_poly(&b), "polynomial division by zero");
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![Scalar::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() >= b.len() && !is_zero_poly(&r) {
        let dr = r.len() - 1;
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &(&c * bi);
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

pub(crate) fn poly_gcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !is_zero_poly(&y) {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn roots_and_squarefree() {
        let f = CharPoly::from_roots(&[s(1), s(1), s(2)]);
        assert_eq!(f.coeffs(), &[s(-2), s(5), s(-4), s(1)]);
        assert_eq!(f.squarefree_part(), vec![s(2), s(-3), s(1)]);
        assert_eq!(f.eval(&s(2)), s(0));
        assert_eq!(f.zero_root_multiplicity(), 0);
        let g = CharPoly::from_roots(&[s(0), s(0), s(3)]);
        assert_eq!(g.zero_root_multiplicity(), 2);
        assert!(!g.is_monomial());
        assert!(CharPoly::from_roots(&[s(0), s(0)]).is_monomial());
    }

    #[test]
    fn division_identity() {
        let a = vec![s(1), s(0), s(0), s(1)];
        let b = vec![s(1), s(1)];
        let (q, r) = poly_divrem(&a, &b);
        assert_eq!(q, vec![s(1), s(-1), s(1)]);
        assert!(is_zero_poly(&r));
    }
}
