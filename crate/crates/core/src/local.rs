//! Local norms and spectral radii at a single place.
//!
//! Finite places give exact magnitudes `p^q`. At archimedean places the
//! operator norm is the largest singular value, read off the exact Gram
//! product `T*T` before any rounding, and the spectral radius comes from the
//! complex roots of the squarefree part of the characteristic polynomial.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::power::{IntMatrix, PowerEngine};
use crate::linalg::subspace::plucker_raw;
use crate::linalg::{CharPoly, MatrixK, Subspace, VectorK};
use crate::numeric;
use crate::place::{
    abs_value, embed_complex_scaled, embed_int_real_scaled, embed_real_scaled, finite_valuation,
    integral_valuation, LocalMagnitude, Place, PlaceKind,
};

pub const DEFAULT_TOL: f64 = 1e-9;

const ARCH_EPS: f64 = 8.0 * f64::EPSILON;

/// Embeds a scalar at an archimedean place as `(re, im) / 2^shift`.
fn embed(x: &Scalar, v: &Place, shift: i64) -> (f64, f64) {
    let m = v.field.radicand();
    match v.kind {
        PlaceKind::Real { conjugate } => {
            (embed_real_scaled(x, m, if conjugate { -1 } else { 1 }, shift), 0.0)
        }
        PlaceKind::Complex => embed_complex_scaled(x, m, shift),
        PlaceKind::Finite { .. } => unreachable!("embedding at a finite place"),
    }
}

fn scalar_log2(x: &Scalar) -> i64 {
    arith::rational_log2_hint(x.rational_part()).max(arith::rational_log2_hint(x.irrational_part()))
}

/// `‖x‖_v`: the sup norm at finite places, the `ℓ²` norm at archimedean ones.
pub fn vector_norm(x: &VectorK, v: &Place) -> LocalMagnitude {
    if x.is_zero() {
        return LocalMagnitude::Zero;
    }
    if v.is_finite() {
        return x
            .entries()
            .iter()
            .map(|c| abs_value(c, v))
            .reduce(LocalMagnitude::max)
            .unwrap();
    }
    let shift = x.entries().iter().map(scalar_log2).max().unwrap();
    let sum: f64 = x
        .entries()
        .iter()
        .map(|c| {
            let (re, im) = embed(c, v, shift);
            re * re + im * im
        })
        .sum();
    LocalMagnitude::Arch {
        ln: 0.5 * sum.ln() + shift as f64 * std::f64::consts::LN_2,
        rel_err: ARCH_EPS * x.dim() as f64,
    }
}

/// `‖T‖_v = max |t_ij|_v` at a finite place.
pub fn operator_norm_finite(t: &MatrixK, v: &Place) -> LocalMagnitude {
    assert!(v.is_finite(), "operator_norm_finite needs a finite place");
    t.entries().iter().map(|c| abs_value(c, v)).reduce(LocalMagnitude::max).unwrap()
}

/// Minimum valuation over the entries of an integral matrix, `None` for zero.
pub fn int_matrix_min_valuation(m: &IntMatrix, v: &Place) -> Option<BigRational> {
    let n = m.dim();
    let mut best: Option<BigRational> = None;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = m.entry(i, j);
            if let Some(w) = integral_valuation(a, b, v) {
                if best.as_ref().map_or(true, |cur| w < *cur) {
                    best = Some(w);
                }
            }
        }
    }
    best
}

/// Largest singular value of an integral matrix at an archimedean place, as
/// `(ln σ, relative error)`. `None` for the zero matrix.
pub fn int_operator_norm_arch(m: &IntMatrix, v: &Place, tol: f64) -> Result<Option<(f64, f64)>> {
    if m.is_zero() {
        return Ok(None);
    }
    let n = m.dim();
    let rad = v.field.radicand();
    let rm = BigInt::from(rad);
    let complex = matches!(v.kind, PlaceKind::Complex);
    // Gram entries G_ij = sum_l conj?(M_li) M_lj, exactly in Z[sqrt m]; the
    // algebraic conjugate is complex conjugation at the complex place.
    let mut ga = vec![BigInt::zero(); n * n];
    let mut gb = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let mut sa = BigInt::zero();
            let mut sb = BigInt::zero();
            for l in 0..n {
                let (a1, b1) = m.entry(l, i);
                let (a2, b2) = m.entry(l, j);
                if b1.is_zero() && b2.is_zero() {
                    sa += a1 * a2;
                    continue;
                }
                let b1 = if complex { -b1 } else { b1.clone() };
                sa += a1 * a2 + &rm * &b1 * b2;
                sb += a1 * b2 + &b1 * a2;
            }
            ga[i * n + j] = sa.clone();
            gb[i * n + j] = sb.clone();
            if i != j {
                ga[j * n + i] = sa;
                gb[j * n + i] = if complex { -sb } else { sb };
            }
        }
    }
    let shift = ga.iter().chain(gb.iter()).map(|x| x.bits() as i64).max().unwrap_or(0);
    let (sym, dim) = match v.kind {
        PlaceKind::Real { conjugate } => {
            let sign = if conjugate { -1 } else { 1 };
            let g: Vec<f64> =
                ga.iter().zip(&gb).map(|(a, b)| embed_int_real_scaled(a, b, rad, sign, shift)).collect();
            (g, n)
        }
        PlaceKind::Complex => {
            // Hermitian H = R + iS as the real symmetric [[R, -S], [S, R]]
            let sq = ((-rad) as f64).sqrt();
            let mut g = vec![0.0; 4 * n * n];
            for i in 0..n {
                for j in 0..n {
                    let re = arith::int_to_f64_scaled(&ga[i * n + j], shift);
                    let im = arith::int_to_f64_scaled(&gb[i * n + j], shift) * sq;
                    g[i * 2 * n + j] = re;
                    g[(i + n) * 2 * n + j + n] = re;
                    g[i * 2 * n + j + n] = -im;
                    g[(i + n) * 2 * n + j] = im;
                }
            }
            (g, 2 * n)
        }
        PlaceKind::Finite { .. } => panic!("operator_norm_arch needs an archimedean place"),
    };
    let (lambda, err) = numeric::sym_max_eigen(&sym, dim)?;
    let rel = 0.5 * err + ARCH_EPS;
    if rel > tol {
        return Err(Error::Numeric { message: "largest singular value".into(), achieved: rel });
    }
    Ok(Some((0.5 * (lambda.ln() + shift as f64 * std::f64::consts::LN_2), rel)))
}

/// Largest singular value of the embedded matrix.
pub fn operator_norm_arch(t: &MatrixK, v: &Place, tol: f64) -> Result<LocalMagnitude> {
    let (m, d) = IntMatrix::from_matrix(t);
    Ok(match int_operator_norm_arch(&m, v, tol)? {
        None => LocalMagnitude::Zero,
        Some((ln, rel_err)) => LocalMagnitude::Arch { ln: ln - arith::ln_biguint(d.magnitude()), rel_err },
    })
}

/// `‖T‖_v` at any place.
pub fn operator_norm(t: &MatrixK, v: &Place, tol: f64) -> Result<LocalMagnitude> {
    if v.is_finite() {
        Ok(operator_norm_finite(t, v))
    } else {
        operator_norm_arch(t, v, tol)
    }
}

/// Lower convex hull of the points `(i, w(a_i))` of a polynomial at a finite
/// place. Zero roots are split off first and only counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<(usize, BigRational)>,
    pub hull: Vec<(usize, BigRational)>,
    /// `(slope, length)`, slopes strictly increasing.
    pub slopes: Vec<(BigRational, usize)>,
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Largest slope; `None` when every root is zero.
    pub fn max_slope(&self) -> Option<&BigRational> {
        self.slopes.last().map(|(s, _)| s)
    }

    /// Valuations `w(λ) = -slope` of the nonzero roots, with multiplicity.
    pub fn root_valuations(&self) -> Vec<BigRational> {
        self.slopes.iter().flat_map(|(s, len)| std::iter::repeat(-s.clone()).take(*len)).collect()
    }
}

fn cross(o: &(usize, BigRational), a: &(usize, BigRational), b: &(usize, BigRational)) -> BigRational {
    let ax = BigRational::from_integer(BigInt::from(a.0 as i64 - o.0 as i64));
    let bx = BigRational::from_integer(BigInt::from(b.0 as i64 - o.0 as i64));
    ax * (&b.1 - &o.1) - bx * (&a.1 - &o.1)
}

pub fn newton_polygon(f: &CharPoly, v: &Place) -> NewtonPolygon {
    let zero_roots = f.zero_root_multiplicity();
    let points: Vec<(usize, BigRational)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| finite_valuation(c, v).map(|w| (i, w)))
        .collect();
    let mut hull: Vec<(usize, BigRational)> = Vec::new();
    for pt in &points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], pt).is_positive() {
            hull.pop();
        }
        hull.push(pt.clone());
    }
    let slopes = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            ((&w[1].1 - &w[0].1) / BigRational::from_integer(BigInt::from(len)), len)
        })
        .collect();
    NewtonPolygon { points, hull, slopes, zero_roots }
}

/// `ρ_v` of a polynomial's roots at a finite place: `p^(max slope)`.
pub fn spectral_radius_finite_poly(f: &CharPoly, v: &Place) -> LocalMagnitude {
    let poly = newton_polygon(f, v);
    match poly.max_slope() {
        None => LocalMagnitude::Zero,
        Some(s) => LocalMagnitude::PrimePower { p: v.prime().unwrap().clone(), exponent: s.clone() },
    }
}

pub fn spectral_radius_finite(t: &MatrixK, v: &Place) -> LocalMagnitude {
    let f = t.char_poly();
    if f.is_monomial() {
        return LocalMagnitude::Zero;
    }
    spectral_radius_finite_poly(&f, v)
}

/// Largest root modulus of `f` at an archimedean place.
pub fn spectral_radius_arch_poly(f: &CharPoly, v: &Place, tol: f64) -> Result<LocalMagnitude> {
    if f.is_monomial() {
        return Ok(LocalMagnitude::Zero);
    }
    let z = f.zero_root_multiplicity();
    let stripped = CharPoly::from_coeffs(f.coeffs()[z..].to_vec());
    let g = stripped.squarefree_part();
    let n = g.len() - 1;
    if n == 0 {
        return Ok(LocalMagnitude::Zero);
    }
    // scale x = 2^e y so the root moduli are O(1)
    let e = (0..n)
        .filter(|&i| !g[i].is_zero())
        .map(|i| (scalar_log2(&g[i]) as f64 / (n - i) as f64).ceil() as i64)
        .max()
        .unwrap_or(0);
    let coeffs: Vec<Complex64> = g
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (re, im) = embed(c, v, e * (n - i) as i64);
            Complex64::new(re, im)
        })
        .collect();
    let roots = numeric::poly_roots(&coeffs)?;
    let rho = roots.iter().map(|(r, _)| r.norm()).fold(0.0f64, f64::max);
    if rho == 0.0 {
        return Ok(LocalMagnitude::Zero);
    }
    let radius = roots.iter().map(|(_, r)| *r).fold(0.0f64, f64::max);
    let rel = radius / rho + ARCH_EPS * n as f64;
    if rel > tol {
        return Err(Error::Numeric {
            message: format!("root finder bracket [{}, {}]", rho - radius, rho + radius),
            achieved: rel,
        });
    }
    let bound = numeric::fujiwara_bound(&coeffs);
    if rho > bound * (1.0 + tol) {
        return Err(Error::Numeric { message: "root modulus exceeds the Fujiwara bound".into(), achieved: rho / bound - 1.0 });
    }
    Ok(LocalMagnitude::Arch { ln: rho.ln() + e as f64 * std::f64::consts::LN_2, rel_err: rel })
}

/// `ρ_v(T)` at an archimedean place, cross-checked against the upper bounds
/// `‖T^k‖_v^(1/k)` for a few `k = 2^j`.
pub fn spectral_radius_arch(t: &MatrixK, v: &Place, tol: f64) -> Result<LocalMagnitude> {
    let rho = spectral_radius_arch_poly(&t.char_poly(), v, tol)?;
    let LocalMagnitude::Arch { ln, .. } = rho else {
        return Ok(rho);
    };
    let engine = PowerEngine::new(t, crate::linalg::bits_budget());
    for step in engine.squares(4) {
        let (k, m, c) = step?;
        let Some((ln_norm, err)) = int_operator_norm_arch(&m, v, tol)? else {
            break;
        };
        let ln_scale = arith::ln_abs_rational(&engine.ledger(&c, k));
        let bound = (ln_norm + ln_scale) / k as f64;
        if ln > bound + tol + err {
            return Err(Error::Numeric {
                message: format!("spectral radius exceeds ‖T^{k}‖^(1/{k})"),
                achieved: (ln - bound).exp_m1(),
            });
        }
    }
    Ok(rho)
}

pub fn spectral_radius(t: &MatrixK, v: &Place, tol: f64) -> Result<LocalMagnitude> {
    if v.is_finite() {
        Ok(spectral_radius_finite(t, v))
    } else {
        spectral_radius_arch(t, v, tol)
    }
}

/// `‖y‖_{X_v} = ‖P(X) ∧ y‖_v / ‖P(X)‖_v`, both sides from the same basis.
pub fn subspace_seminorm(y: &VectorK, x: &Subspace, v: &Place) -> Result<LocalMagnitude> {
    if x.contains(y) {
        return Err(Error::Degenerate("vector lies in the subspace".into()));
    }
    let px = plucker_raw(x.basis());
    let mut rows = x.basis().to_vec();
    rows.push(y.clone());
    let pxy = plucker_raw(&rows);
    Ok(vector_norm(&pxy, v).div(&vector_norm(&px, v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    VectorNorm,
    OperatorNorm,
    SpectralRadius,
    SubspaceSeminorm,
}

#[derive(Clone, Debug)]
pub struct LocalNormReport {
    pub place: Place,
    pub magnitude: LocalMagnitude,
    pub kind: ReportKind,
}

impl Serialize for LocalNormReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LocalNormReport", 5)?;
        st.serialize_field("place", &self.place.to_string())?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("magnitude", &self.magnitude.to_string())?;
        st.serialize_field("log", &self.magnitude.ln())?;
        let exact = matches!(self.magnitude, LocalMagnitude::PrimePower { .. } | LocalMagnitude::Zero);
        st.serialize_field("exactness", if exact { "exact-rational" } else { "float+relErr" })?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::place::places_above;
    use num_bigint::BigUint;

    fn place(field: Field, p: u32) -> Place {
        places_above(field, &BigUint::from(p)).unwrap().remove(0)
    }

    fn inf() -> Place {
        crate::place::archimedean_places(Field::Rational).remove(0)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pp(p: u32, e: BigRational) -> LocalMagnitude {
        LocalMagnitude::PrimePower { p: BigUint::from(p), exponent: e }
    }

    #[test]
    fn vector_norm_examples() {
        let x = VectorK::from_ints(&[3, 1]);
        assert!((vector_norm(&x, &inf()).value() - 10f64.sqrt()).abs() < 1e-14);
        let v5 = place(Field::Rational, 5);
        assert_eq!(vector_norm(&VectorK::from_ints(&[5, 25]), &v5), pp(5, q(-1, 1)));
        assert!(vector_norm(&VectorK::zero(2), &v5).is_zero());
    }

    #[test]
    fn operator_norm_examples() {
        let v3 = place(Field::Rational, 3);
        assert_eq!(operator_norm_finite(&MatrixK::identity(2), &v3), pp(3, q(0, 1)));
        let t = MatrixK::from_rows(vec![
            vec![Scalar::from_ratio(1, 3), Scalar::from_int(0)],
            vec![Scalar::from_int(0), Scalar::from_int(1)],
        ])
        .unwrap();
        assert_eq!(operator_norm_finite(&t, &v3), pp(3, q(1, 1)));
        let t1 = MatrixK::from_ints(&[&[1, 1], &[1, 1]]);
        assert!((operator_norm_arch(&t1, &inf(), 1e-9).unwrap().value() - 2.0).abs() < 1e-13);
        let d = MatrixK::from_ints(&[&[2, 0], &[0, 3]]);
        assert!((operator_norm_arch(&d, &inf(), 1e-9).unwrap().value() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn complex_place_singular_value() {
        // [[i, 1], [0, i]] has singular values (sqrt 5 ± 1) / 2
        let g = Field::Quadratic(-1);
        let i = g.parse_scalar("r").unwrap();
        let t = MatrixK::from_rows(vec![
            vec![i.clone(), Scalar::one()],
            vec![Scalar::zero(), i],
        ])
        .unwrap();
        let c = crate::place::archimedean_places(g).remove(0);
        let s = operator_norm_arch(&t, &c, 1e-9).unwrap().value();
        assert!((s - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn newton_polygon_examples() {
        let v2 = place(Field::Rational, 2);
        let f = CharPoly::from_roots(&[Scalar::from_int(2)]);
        let poly = newton_polygon(&f, &v2);
        assert_eq!(poly.slopes, vec![(q(-1, 1), 1)]);
        let x2m2 = MatrixK::from_ints(&[&[0, 2], &[1, 0]]).char_poly();
        assert_eq!(newton_polygon(&x2m2, &v2).slopes, vec![(q(-1, 2), 2)]);
        let nil = MatrixK::from_ints(&[&[0, 1], &[0, 0]]).char_poly();
        let poly = newton_polygon(&nil, &v2);
        assert_eq!(poly.zero_roots, 2);
        assert!(poly.slopes.is_empty());
    }

    #[test]
    fn spectral_radius_examples() {
        let v2 = place(Field::Rational, 2);
        let t = MatrixK::from_ints(&[&[0, 2], &[1, 0]]);
        assert_eq!(spectral_radius_finite(&t, &v2), pp(2, q(-1, 2)));
        assert_eq!(spectral_radius_finite(&MatrixK::from_ints(&[&[2, 0], &[0, 2]]), &v2), pp(2, q(-1, 1)));
        assert!(spectral_radius_finite(&MatrixK::from_ints(&[&[0, 5], &[0, 0]]), &v2).is_zero());
        let r = spectral_radius_arch(&t, &inf(), 1e-9).unwrap().value();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let d = MatrixK::from_ints(&[&[2, 0], &[0, 3]]);
        assert!((spectral_radius_arch(&d, &inf(), 1e-9).unwrap().value() - 3.0).abs() < 1e-13);
        let j = MatrixK::from_ints(&[&[1, 1], &[0, 1]]);
        assert!((spectral_radius_arch(&j, &inf(), 1e-9).unwrap().value() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn seminorm_examples() {
        let e1 = Subspace::new(2, vec![VectorK::unit(2, 0)]).unwrap();
        let s = subspace_seminorm(&VectorK::unit(2, 1), &e1, &inf()).unwrap();
        assert!((s.value() - 1.0).abs() < 1e-14);
        let s = subspace_seminorm(&VectorK::from_ints(&[7, 1]), &e1, &inf()).unwrap();
        assert!((s.value() - 1.0).abs() < 1e-14);
        let diag = Subspace::new(2, vec![VectorK::from_ints(&[1, 1])]).unwrap();
        let v2 = place(Field::Rational, 2);
        assert_eq!(subspace_seminorm(&VectorK::unit(2, 0), &diag, &v2).unwrap(), pp(2, q(0, 1)));
        assert!(subspace_seminorm(&VectorK::from_ints(&[2, 2]), &diag, &v2).is_err());
    }
}
