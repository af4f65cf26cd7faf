//! Bounded-height enumeration over `Q`.
//!
//! A class in projective space has a unique primitive integer representative
//! whose first nonzero entry is positive; its finite-place factor is 1, so
//! its height is just the Euclidean (or largest singular value) size of that
//! representative. All scans walk a box that provably contains every class
//! of height at most `B` and keep exactly the canonical representatives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::exec::Exec;
use crate::field::Field;
use crate::heights::{height_matrix, height_operator, height_vector, OperatorHeight, OperatorOptions};
use crate::linalg::{MatrixK, VectorK};
use crate::value::{FinitePart, HeightValue};

/// A primitive, sign-normalised integer vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint {
    pub coords: Vec<i64>,
}

impl ProjectivePoint {
    pub fn norm2(&self) -> i128 {
        self.coords.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    pub fn vector(&self) -> VectorK {
        VectorK::from_ints(&self.coords)
    }

    /// `H = |x|_2` exactly for a primitive representative.
    pub fn height(&self) -> HeightValue {
        HeightValue::new(FinitePart::one(), 0.5 * (self.norm2() as f64).ln(), f64::EPSILON)
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProjectivePoint", 3)?;
        st.serialize_field("point", &self.coords)?;
        st.serialize_field("heightSquared", &self.norm2().to_string())?;
        st.serialize_field("height", &self.height())?;
        st.end()
    }
}

pub(crate) fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub(crate) fn is_sign_normalized(xs: &[i64]) -> bool {
    xs.iter().find(|&&x| x != 0).map_or(false, |&x| x > 0)
}

/// `B^2` as an exact rational; `B` is taken at its exact binary value.
fn bound_squared(b: f64) -> BigRational {
    let r = BigRational::from_float(b).expect("finite bound");
    &r * &r
}

fn le_bound2(n2: i128, b2: &BigRational) -> bool {
    BigRational::from_integer(BigInt::from(n2)) <= *b2
}

/// Cartesian product `[-r, r]^len`, visited in lexicographic order.
fn box_iter(len: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as u64;
    let total = side.checked_pow(len as u32).expect("box too large");
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; len];
        for slot in v.iter_mut().rev() {
            *slot = (idx % side) as i64 - r;
            idx /= side;
        }
        v
    })
}

/// Every class `[x] ∈ P^{n-1}(Q)` with `H(x) <= bound`, sorted.
pub fn enum_projective_points(n: usize, bound: f64, exec: Exec) -> Vec<ProjectivePoint> {
    if !(bound >= 1.0) || n == 0 {
        return Vec::new();
    }
    let r = bound.floor() as i64;
    let b2 = bound_squared(bound);
    let leads: Vec<i64> = (0..=r).collect();
    let chunks = exec.map(&leads, |&lead| {
        box_iter(n - 1, r)
            .filter_map(|tail| {
                let mut coords = Vec::with_capacity(n);
                coords.push(lead);
                coords.extend(tail);
                let p = ProjectivePoint { coords };
                (is_sign_normalized(&p.coords) && gcd_all(&p.coords) == 1 && le_bound2(p.norm2(), &b2))
                    .then_some(p)
            })
            .collect::<Vec<_>>()
    });
    let mut out: Vec<ProjectivePoint> = chunks.into_iter().flatten().collect();
    out.sort();
    out
}

/// An endomorphism class with its primitive integer representative.
#[derive(Clone, Debug)]
pub struct EndoClass {
    pub n: usize,
    pub entries: Vec<i64>,
    pub rank: usize,
    pub op_height: OperatorHeight,
    pub kernel_height: Option<HeightValue>,
    /// False for the best-effort intermediate-rank scan.
    pub certified: bool,
}

impl EndoClass {
    pub fn matrix(&self) -> MatrixK {
        let rows: Vec<&[i64]> = self.entries.chunks(self.n).collect();
        MatrixK::from_ints(&rows)
    }
}

impl Serialize for EndoClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EndoClass", 5)?;
        let rows: Vec<&[i64]> = self.entries.chunks(self.n).collect();
        st.serialize_field("matrix", &rows)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("opHeight", &self.op_height)?;
        st.serialize_field("kernelHeight", &self.kernel_height)?;
        st.serialize_field("certified", &self.certified)?;
        st.end()
    }
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub(crate) fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `σ_max(T) <= B`, i.e. `B^2 I - T^t T` positive semidefinite: every
/// principal minor of `den (B^2 I - T^t T)` is nonnegative.
fn sigma_max_within(t: &[i64], n: usize, b2: &BigRational) -> bool {
    let num = b2.numer().to_i128().expect("bound fits i128");
    let den = b2.denom().to_i128().expect("bound fits i128");
    let mut g = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let s: i128 = (0..n).map(|l| t[l * n + i] as i128 * t[l * n + j] as i128).sum();
            g[i][j] = if i == j { num - den * s } else { -den * s };
        }
    }
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<i128>> = idx.iter().map(|&i| idx.iter().map(|&j| g[i][j]).collect()).collect();
        if det_i128(sub) < 0 {
            return false;
        }
    }
    true
}

/// Every invertible class `[T]` with `H(T) <= bound`, sorted by representative.
///
/// For a primitive integer matrix the finite factor of `H` is 1 and
/// `σ_max >= max |t_ij|`, so the box `|t_ij| <= floor(B)` is complete.
pub fn enum_invertible_endos(n: usize, bound: f64, exec: Exec) -> Result<Vec<EndoClass>> {
    if !(bound >= 1.0) || n == 0 {
        return Ok(Vec::new());
    }
    let r = bound.floor() as i64;
    let b2 = bound_squared(bound);
    let leads: Vec<i64> = (0..=r).collect();
    let chunks = exec.map(&leads, |&lead| -> Result<Vec<EndoClass>> {
        let mut found = Vec::new();
        for tail in box_iter(n * n - 1, r) {
            let mut t = Vec::with_capacity(n * n);
            t.push(lead);
            t.extend(tail);
            if !is_sign_normalized(&t) || gcd_all(&t) != 1 || !sigma_max_within(&t, n, &b2) {
                continue;
            }
            let rows: Vec<Vec<i128>> = t.chunks(n).map(|r| r.iter().map(|&x| x as i128).collect()).collect();
            if det_i128(rows) == 0 {
                continue;
            }
            let m = MatrixK::from_ints(&t.chunks(n).collect::<Vec<_>>());
            found.push(EndoClass {
                n,
                entries: t,
                rank: n,
                op_height: OperatorHeight::Exact(height_matrix(Field::Rational, &m)?),
                kernel_height: None,
                certified: true,
            });
        }
        Ok(found)
    });
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    out.sort_by(|a, b| a.entries.cmp(&b.entries));
    Ok(out)
}

/// Rank-one classes `u w^t` with `H([u]) <= bound` and `H(ker) = H(w) <= cap`.
pub fn enum_rank1_endos(n: usize, bound: f64, cap: f64, exec: Exec) -> Vec<EndoClass> {
    let us = enum_projective_points(n, bound, exec);
    let ws = enum_projective_points(n, cap, exec);
    let mut out = Vec::with_capacity(us.len() * ws.len());
    for u in &us {
        for w in &ws {
            let entries: Vec<i64> =
                u.coords.iter().flat_map(|&a| w.coords.iter().map(move |&b| a * b)).collect();
            out.push(EndoClass {
                n,
                entries,
                rank: 1,
                op_height: OperatorHeight::Exact(u.height()),
                kernel_height: Some(w.height()),
                certified: true,
            });
        }
    }
    out.sort_by(|a, b| a.entries.cmp(&b.entries));
    out
}

/// Best-effort scan of intermediate ranks `1 < rank < n` in the box
/// `|t_ij| <= radius`, keeping classes whose lower bound does not already
/// exceed `bound`. Not certified: the lower bound rests on `Ĉ`.
pub fn scan_middle_rank(n: usize, radius: i64, bound: f64, opts: &OperatorOptions) -> Result<Vec<EndoClass>> {
    let leads: Vec<i64> = (0..=radius).collect();
    let inner = OperatorOptions { exec: Exec::Sequential, ..opts.clone() };
    let chunks = opts.exec.map(&leads, |&lead| -> Result<Vec<EndoClass>> {
        let mut found = Vec::new();
        for tail in box_iter(n * n - 1, radius) {
            let mut t = Vec::with_capacity(n * n);
            t.push(lead);
            t.extend(tail);
            if !is_sign_normalized(&t) || gcd_all(&t) != 1 {
                continue;
            }
            let m = MatrixK::from_ints(&t.chunks(n).collect::<Vec<_>>());
            let rank = m.rank();
            if rank <= 1 || rank == n {
                continue;
            }
            let op = height_operator(Field::Rational, &m, &inner)?;
            let OperatorHeight::Bounded { lower, .. } = &op else { unreachable!() };
            if lower.value() > bound {
                continue;
            }
            let ker = m.kernel().expect("singular");
            found.push(EndoClass {
                n,
                entries: t,
                rank,
                op_height: op,
                kernel_height: Some(crate::heights::height_subspace(Field::Rational, &ker)?),
                certified: false,
            });
        }
        Ok(found)
    });
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    out.sort_by(|a, b| a.entries.cmp(&b.entries));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Rank1DemoRow {
    pub n: i64,
    pub matrix: String,
    pub op_height: HeightValue,
    pub kernel: String,
    pub kernel_height: HeightValue,
}

/// `T_j = [[1, j], [1, j]]` for `j = 1..=count`: pairwise non-homothetic,
/// all of operator height `sqrt 2`, with kernel heights `sqrt(j^2 + 1)`.
pub fn rank1_unbounded_demo(count: usize) -> Result<Vec<Rank1DemoRow>> {
    (1..=count as i64)
        .map(|j| {
            let t = MatrixK::from_ints(&[&[1, j], &[1, j]]);
            let op = height_operator(Field::Rational, &t, &OperatorOptions::default())?;
            let ker = t.kernel().expect("rank one");
            Ok(Rank1DemoRow {
                n: j,
                matrix: t.to_string(),
                op_height: op.exact().expect("rank one is exact").clone(),
                kernel: ker.plucker().to_string(),
                kernel_height: height_vector(Field::Rational, &ker.plucker(), None)?,
            })
        })
        .collect()
}

/// JSON-lines rendering, one record per line.
pub fn to_json_lines<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("serializable"));
        out.push('\n');
    }
    out
}
