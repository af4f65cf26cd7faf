use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::poly::CharPoly;
use crate::linalg::subspace::Subspace;

/// A vector in `K^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorK(Vec<Scalar>);

impl VectorK {
    pub fn new(entries: Vec<Scalar>) -> Self {
        assert!(!entries.is_empty(), "vectors have dimension at least 1");
        VectorK(entries)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        VectorK::new(v.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        VectorK(vec![Scalar::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = VectorK::zero(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> VectorK {
        VectorK(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &VectorK) -> VectorK {
        VectorK(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &VectorK) -> VectorK {
        VectorK(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// Largest radicand among the entries (0 when all rational).
    pub fn radicand(&self) -> i64 {
        self.0.iter().map(Scalar::radicand).find(|&m| m != 0).unwrap_or(0)
    }

    /// `gcd / lcm` over every rational coordinate of every entry.
    pub fn rational_content(&self) -> BigRational {
        let parts: Vec<&BigRational> = self
            .0
            .iter()
            .flat_map(|x| [x.rational_part(), x.irrational_part()])
            .collect();
        arith::rational_content(parts)
    }

    /// Divides out the rational content; zero vectors are returned unchanged.
    pub fn strip_content(&self) -> VectorK {
        let c = self.rational_content();
        if c.is_zero() {
            return self.clone();
        }
        let inv = c.recip();
        VectorK(self.0.iter().map(|x| x.scale(&inv)).collect())
    }

    /// Over `Q`: the primitive integer representative whose first nonzero
    /// entry is positive. Over a quadratic field only the rational content is
    /// removed and the sign of the first nonzero rational coordinate is fixed.
    pub fn primitive(&self) -> VectorK {
        let v = self.strip_content();
        let lead = v.0.iter().find(|x| !x.is_zero());
        let negate = match lead {
            Some(x) if !x.rational_part().is_zero() => x.rational_part().is_negative(),
            Some(x) => x.irrational_part().is_negative(),
            None => false,
        };
        if negate {
            v.scale(&Scalar::from_int(-1))
        } else {
            v
        }
    }
}

impl fmt::Display for VectorK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A square matrix over `K`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixK {
    n: usize,
    entries: Vec<Scalar>,
}

impl MatrixK {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {n}x{n} = {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(MatrixK { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must form a square"));
        }
        MatrixK::new(n, rows.into_iter().flatten().collect())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        MatrixK::from_rows(rows).expect("square integer matrix")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixK::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        MatrixK { n, entries: vec![Scalar::zero(); n * n] }
    }

    pub fn diagonal(d: &[Scalar]) -> Self {
        let n = d.len();
        let mut m = MatrixK::zero(n);
        for (i, x) in d.iter().enumerate() {
            m.entries[i * n + i] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> VectorK {
        VectorK::new(self.entries[i * self.n..(i + 1) * self.n].to_vec())
    }

    pub fn col(&self, j: usize) -> VectorK {
        VectorK::new((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn radicand(&self) -> i64 {
        self.entries.iter().map(Scalar::radicand).find(|&m| m != 0).unwrap_or(0)
    }

    pub fn mul(&self, o: &MatrixK) -> MatrixK {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Scalar::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.push(acc);
            }
        }
        MatrixK { n, entries: out }
    }

    pub fn mul_vec(&self, x: &VectorK) -> VectorK {
        assert_eq!(self.n, x.dim());
        VectorK::new(
            (0..self.n)
                .map(|i| {
                    (0..self.n).fold(Scalar::zero(), |acc, j| &acc + &(self.get(i, j) * &x.entries()[j]))
                })
                .collect(),
        )
    }

    pub fn add(&self, o: &MatrixK) -> MatrixK {
        MatrixK { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &MatrixK) -> MatrixK {
        MatrixK { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> MatrixK {
        MatrixK { n: self.n, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn transpose(&self) -> MatrixK {
        let n = self.n;
        MatrixK { n, entries: (0..n * n).map(|idx| self.get(idx % n, idx / n).clone()).collect() }
    }

    /// Entrywise Galois conjugation.
    pub fn conj(&self) -> MatrixK {
        MatrixK { n: self.n, entries: self.entries.iter().map(Scalar::conj).collect() }
    }

    /// Plain repeated squaring without content control.
    pub fn pow(&self, k: u32) -> MatrixK {
        let mut acc = MatrixK::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub(crate) fn rref(rows: &[Vec<Scalar>], ncols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut a: Vec<Vec<Scalar>> = rows.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == a.len() {
                break;
            }
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].inverse().unwrap();
            a[r] = a[r].iter().map(|x| x * &inv).collect();
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(pivot_row.iter()) {
                        *x = &*x - &(&f * y);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        MatrixK::rref(&self.rows(), self.n).1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn det(&self) -> Scalar {
        determinant(self.rows())
    }

    pub fn inverse(&self) -> Option<MatrixK> {
        let n = self.n;
        let aug: Vec<Vec<Scalar>> = self
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
                row
            })
            .collect();
        let (red, pivots) = MatrixK::rref(&aug, n);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let entries = red.into_iter().flat_map(|row| row[n..].to_vec()).collect();
        Some(MatrixK { n, entries })
    }

    /// `ker T`, or `None` when `T` is invertible.
    pub fn kernel(&self) -> Option<Subspace> {
        let n = self.n;
        let (red, pivots) = MatrixK::rref(&self.rows(), n);
        if pivots.len() == n {
            return None;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&fc| {
                let mut v = vec![Scalar::zero(); n];
                v[fc] = Scalar::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&red[r][fc];
                }
                VectorK::new(v)
            })
            .collect();
        Some(Subspace::new(n, basis).expect("kernel basis is independent"))
    }

    /// `ker T^n`, which equals `ker T^k` for all `k >= n`.
    pub fn stable_kernel(&self) -> Option<Subspace> {
        self.pow(self.n as u32).kernel()
    }

    /// The column space.
    pub fn image(&self) -> Option<Subspace> {
        let (red, pivots) = MatrixK::rref(&self.transpose().rows(), self.n);
        if pivots.is_empty() {
            return None;
        }
        let basis = red.into_iter().take(pivots.len()).map(VectorK::new).collect();
        Some(Subspace::new(self.n, basis).expect("row-reduced rows are independent"))
    }

    /// `det(xI - T)` by reduction to upper Hessenberg form followed by the
    /// standard three-term recurrence; `O(n^3)` field operations.
    pub fn char_poly(&self) -> CharPoly {
        let n = self.n;
        let mut h = self.rows();
        for j in 0..n.saturating_sub(2) {
            let Some(p) = (j + 1..n).find(|&i| !h[i][j].is_zero()) else {
                continue;
            };
            if p != j + 1 {
                h.swap(p, j + 1);
                for row in h.iter_mut() {
                    row.swap(p, j + 1);
                }
            }
            let inv = h[j + 1][j].inverse().unwrap();
            for i in j + 2..n {
                if h[i][j].is_zero() {
                    continue;
                }
                let f = &h[i][j] * &inv;
                let pivot_row = h[j + 1].clone();
                for (x, y) in h[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &(&f * y);
                }
                for row in h.iter_mut() {
                    let add = &f * &row[i];
                    row[j + 1] = &row[j + 1] + &add;
                }
            }
        }
        // p_m(x) = (x - h_mm) p_{m-1} - sum_{i<m} h_im (prod_{j=i+1}^{m} h_{j,j-1}) p_{i-1}
        let mut polys: Vec<Vec<Scalar>> = vec![vec![Scalar::one()]];
        for m in 0..n {
            let prev = &polys[m];
            let mut next = vec![Scalar::zero(); m + 2];
            for (k, c) in prev.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * &h[m][m]);
            }
            let mut prod = Scalar::one();
            for i in (0..m).rev() {
                prod = &prod * &h[i + 1][i];
                if prod.is_zero() {
                    break;
                }
                let coef = &h[i][m] * &prod;
                if coef.is_zero() {
                    continue;
                }
                for (k, c) in polys[i].iter().enumerate() {
                    next[k] = &next[k] - &(&coef * c);
                }
            }
            polys.push(next);
        }
        CharPoly::from_coeffs(polys.pop().unwrap())
    }

    pub fn is_nilpotent(&self) -> bool {
        self.char_poly().is_monomial()
    }

    /// `gcd / lcm` over every rational coordinate of every entry.
    pub fn rational_content(&self) -> BigRational {
        let parts: Vec<&BigRational> = self
            .entries
            .iter()
            .flat_map(|x| [x.rational_part(), x.irrational_part()])
            .collect();
        arith::rational_content(parts)
    }

    /// `T = M / d` with `M` integral (pairs of integers) and `d > 0` the common
    /// denominator of all rational coordinates.
    pub(crate) fn integral_parts(&self) -> (Vec<BigInt>, Vec<BigInt>, BigInt) {
        let mut d = BigInt::one();
        for x in &self.entries {
            d = num_integer::Integer::lcm(&d, x.rational_part().denom());
            d = num_integer::Integer::lcm(&d, x.irrational_part().denom());
        }
        let scale = |r: &BigRational| r.numer() * (&d / r.denom());
        let a = self.entries.iter().map(|x| scale(x.rational_part())).collect();
        let b = self.entries.iter().map(|x| scale(x.irrational_part())).collect();
        (a, b, d)
    }
}

/// Determinant of a square array by fraction-tracking Gaussian elimination.
pub(crate) fn determinant(mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inverse().unwrap();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let pivot_row = a[c].clone();
            for (x, y) in a[i].iter_mut().zip(pivot_row.iter()).skip(c) {
                *x = &*x - &(&f * y);
            }
        }
    }
    det
}

impl fmt::Display for MatrixK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n).map(|i| self.row(i).to_string()).collect();
        write!(f, "[{}]", rows.join(","))
    }
}
