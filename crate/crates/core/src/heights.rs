//! Global heights assembled from local data.
//!
//! Every height is a product over places of a local quantity raised to the
//! weight `d_v`. Only finitely many finite places contribute; they are found
//! exactly from the primes dividing the data, never by truncating a search.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field, Scalar};
use crate::linalg::power::IntMatrix;
use crate::linalg::subspace::plucker_raw;
use crate::linalg::{MatrixK, Subspace, VectorK};
use crate::local::{
    int_matrix_min_valuation, int_operator_norm_arch, spectral_radius_arch, spectral_radius_finite_poly,
    subspace_seminorm, vector_norm, DEFAULT_TOL,
};
use crate::northcott;
use crate::place::{abs_value, archimedean_places, finite_places_over, root_support, scalar_support, LocalMagnitude, Place};
use crate::value::{FinitePart, HeightValue};

/// Stand-in for the unknown constant in the lower bound on `H^op` for
/// intermediate ranks. Not rigorous.
pub const DEFAULT_C_HAT: f64 = 1000.0;

fn check_field(field: Field, radicand: i64) -> Result<()> {
    if radicand != 0 && radicand != field.radicand() {
        return Err(Error::invalid(format!("input has entries in Q(sqrt{radicand}), not in {field}")));
    }
    Ok(())
}

fn support_of<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> BTreeSet<BigUint> {
    let mut primes = BTreeSet::new();
    for x in xs {
        scalar_support(x, &mut primes);
    }
    primes
}

/// A finite set of local twists `N_v(x) = ‖A_v x‖_v`, optionally after a
/// global change of basis applied at every place.
#[derive(Clone, Debug, Default)]
pub struct TwistSpec {
    pub global: Option<MatrixK>,
    pub local: BTreeMap<Place, MatrixK>,
}

impl TwistSpec {
    pub fn identity() -> Self {
        TwistSpec::default()
    }

    pub fn with_global(mut self, a: MatrixK) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Error::invalid("twist matrices must be invertible"));
        }
        self.global = Some(a);
        Ok(self)
    }

    pub fn with_local(mut self, v: Place, a: MatrixK) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Error::invalid("twist matrices must be invertible"));
        }
        self.local.insert(v, a);
        Ok(self)
    }

    pub fn is_identity(&self) -> bool {
        self.global.is_none() && self.local.is_empty()
    }
}

/// `H_F(x) = ∏_v N_v(x)^{d_v}` with `H_F(0) = 1`.
pub fn height_vector(field: Field, x: &VectorK, twist: Option<&TwistSpec>) -> Result<HeightValue> {
    check_field(field, x.radicand())?;
    if x.is_zero() {
        return Ok(HeightValue::one());
    }
    let y = match twist.and_then(|t| t.global.as_ref()) {
        Some(a) => a.mul_vec(x),
        None => x.clone(),
    };
    let local = twist.map(|t| &t.local);
    let twisted_at = |v: &Place| local.and_then(|l| l.get(v));
    let mut acc = HeightValue::one();

    let no_finite_twists = local.map_or(true, |l| l.keys().all(|v| !v.is_finite()));
    if field == Field::Rational && no_finite_twists {
        acc.finite = FinitePart::from_rational(y.rational_content().recip());
    } else {
        let mut primes = support_of(y.entries());
        if let Some(l) = local {
            for v in l.keys().filter(|v| v.is_finite()) {
                primes.insert(v.prime().unwrap().clone());
            }
        }
        for v in finite_places_over(field, &primes) {
            let norm = match twisted_at(&v) {
                Some(a) => vector_norm(&a.mul_vec(&y), &v),
                None => vector_norm(&y, &v),
            };
            acc = acc.mul(&norm.weighted(&v.weight()));
        }
    }
    for v in archimedean_places(field) {
        let norm = match twisted_at(&v) {
            Some(a) => vector_norm(&a.mul_vec(&y), &v),
            None => vector_norm(&y, &v),
        };
        acc = acc.mul(&norm.weighted(&v.weight()));
    }
    Ok(acc)
}

/// `H(T) = ∏_v ‖T‖_v^{d_v}` with `H(0) = 1`.
pub fn height_matrix(field: Field, t: &MatrixK) -> Result<HeightValue> {
    check_field(field, t.radicand())?;
    let (m, _) = IntMatrix::from_matrix(t);
    height_int_matrix(field, &m, None, DEFAULT_TOL)
}

/// `H(M)` for an integral matrix. `support`, when given, must contain every
/// prime at which some entry fails to be a unit; it saves factoring large
/// entries.
pub fn height_int_matrix(
    field: Field,
    m: &IntMatrix,
    support: Option<&BTreeSet<BigUint>>,
    tol: f64,
) -> Result<HeightValue> {
    if m.is_zero() {
        return Ok(HeightValue::one());
    }
    let mut acc = HeightValue::one();
    if field == Field::Rational {
        let c = match support {
            Some(s) => m.content_at(&s.iter().cloned().collect::<Vec<_>>()),
            None => m.content(),
        };
        acc.finite = FinitePart::from_rational(BigRational::new(BigInt::one(), c));
    } else {
        let primes = match support {
            Some(s) => s.clone(),
            None => {
                let mut primes = BTreeSet::new();
                let n = m.dim();
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = m.entry(i, j);
                        let norm = a * a - BigInt::from(field.radicand()) * b * b;
                        primes.extend(arith::prime_divisors(norm.magnitude()));
                    }
                }
                primes
            }
        };
        for v in finite_places_over(field, &primes) {
            let w = int_matrix_min_valuation(m, &v).expect("nonzero matrix");
            let mag = LocalMagnitude::PrimePower { p: v.prime().unwrap().clone(), exponent: -w };
            acc = acc.mul(&mag.weighted(&v.weight()));
        }
    }
    for v in archimedean_places(field) {
        let (ln, rel_err) = int_operator_norm_arch(m, &v, tol)?.expect("nonzero matrix");
        acc = acc.mul(&LocalMagnitude::Arch { ln, rel_err }.weighted(&v.weight()));
    }
    Ok(acc)
}

/// `H_s(T) = ∏_v ρ_v(T)^{d_v}`, and `1` for nilpotent `T`.
pub fn height_spectral(field: Field, t: &MatrixK) -> Result<HeightValue> {
    check_field(field, t.radicand())?;
    let f = t.char_poly();
    if f.is_monomial() {
        return Ok(HeightValue::one());
    }
    let primes = root_support(f.coeffs());
    let mut acc = HeightValue::one();
    for v in finite_places_over(field, &primes) {
        acc = acc.mul(&spectral_radius_finite_poly(&f, &v).weighted(&v.weight()));
    }
    for v in archimedean_places(field) {
        acc = acc.mul(&spectral_radius_arch(t, &v, DEFAULT_TOL)?.weighted(&v.weight()));
    }
    Ok(acc)
}

/// Best lower bound found by enumeration: `H(Ty)/H(y)` at `witness`.
#[derive(Clone, Debug)]
pub struct EmpiricalLower {
    pub value: HeightValue,
    pub witness: VectorK,
}

/// `H^op(T)`: exact for ranks `0`, `1` and `n`, bracketed otherwise.
#[derive(Clone, Debug)]
pub enum OperatorHeight {
    Exact(HeightValue),
    Bounded {
        /// `H(T)`, always an upper bound.
        upper: HeightValue,
        /// `H(T) / (Ĉ H(ker T))`; only as good as `Ĉ`.
        lower: HeightValue,
        c_hat: f64,
        empirical: Option<EmpiricalLower>,
    },
}

impl OperatorHeight {
    pub fn is_exact(&self) -> bool {
        matches!(self, OperatorHeight::Exact(_))
    }

    pub fn exact(&self) -> Option<&HeightValue> {
        match self {
            OperatorHeight::Exact(h) => Some(h),
            _ => None,
        }
    }
}

impl Serialize for OperatorHeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OperatorHeight::Exact(h) => {
                let mut st = s.serialize_struct("OperatorHeight", 2)?;
                st.serialize_field("kind", "exact")?;
                st.serialize_field("value", h)?;
                st.end()
            }
            OperatorHeight::Bounded { upper, lower, c_hat, empirical } => {
                let mut st = s.serialize_struct("OperatorHeight", 6)?;
                st.serialize_field("kind", "bounded")?;
                st.serialize_field("upper", upper)?;
                st.serialize_field("lower", lower)?;
                st.serialize_field("cHat", c_hat)?;
                st.serialize_field("lowerRigorous", &false)?;
                st.serialize_field(
                    "empiricalLower",
                    &empirical.as_ref().map(|e| {
                        serde_json::json!({ "value": e.value, "witness": e.witness.to_string() })
                    }),
                )?;
                st.end()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct OperatorOptions {
    /// Height bound for the enumeration behind the empirical lower bound
    /// (over `Q` only); `None` skips it.
    pub search_bound: Option<f64>,
    pub c_hat: f64,
    pub exec: Exec,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        OperatorOptions { search_bound: None, c_hat: DEFAULT_C_HAT, exec: Exec::default() }
    }
}

pub fn height_operator(field: Field, t: &MatrixK, opts: &OperatorOptions) -> Result<OperatorHeight> {
    check_field(field, t.radicand())?;
    let n = t.dim();
    let rank = t.rank();
    if rank == 0 {
        return Ok(OperatorHeight::Exact(HeightValue::one()));
    }
    if rank == n {
        return Ok(OperatorHeight::Exact(height_matrix(field, t)?));
    }
    if rank == 1 {
        let line = t.image().expect("rank one");
        return Ok(OperatorHeight::Exact(height_subspace(field, &line)?));
    }
    let upper = height_matrix(field, t)?;
    let ker = t.kernel().expect("singular");
    let mut lower = upper.div(&height_subspace(field, &ker)?);
    lower.arch_ln -= opts.c_hat.ln();
    let empirical = match (field, opts.search_bound) {
        (Field::Rational, Some(b)) => empirical_lower(t, b, opts.exec)?,
        _ => None,
    };
    Ok(OperatorHeight::Bounded { upper, lower, c_hat: opts.c_hat, empirical })
}

/// `max H(Ty)/H(y)` over projective points with `H(y) <= bound`.
pub fn empirical_lower(t: &MatrixK, bound: f64, exec: Exec) -> Result<Option<EmpiricalLower>> {
    let points = northcott::enum_projective_points(t.dim(), bound, exec);
    let ratios = exec.map(&points, |pt| -> Result<HeightValue> {
        let y = pt.vector();
        Ok(height_vector(Field::Rational, &t.mul_vec(&y), None)?.div(&pt.height()))
    });
    let mut best: Option<EmpiricalLower> = None;
    for (pt, r) in points.iter().zip(ratios) {
        let value = r?;
        if best.as_ref().map_or(true, |b| value.ln() > b.value.ln()) {
            best = Some(EmpiricalLower { value, witness: pt.vector() });
        }
    }
    Ok(best)
}

/// `H(X) = H(P(X))`.
pub fn height_subspace(field: Field, x: &Subspace) -> Result<HeightValue> {
    height_vector(field, &x.plucker(), None)
}

/// `d_X(y) = ∏_v ‖y‖_{X_v}^{d_v}`.
pub fn distance(field: Field, y: &VectorK, x: &Subspace) -> Result<HeightValue> {
    check_field(field, y.radicand())?;
    if x.contains(y) {
        return Err(Error::Degenerate("vector lies in the subspace".into()));
    }
    let px = plucker_raw(x.basis());
    let mut rows = x.basis().to_vec();
    rows.push(y.clone());
    let pxy = plucker_raw(&rows);
    let primes = support_of(px.entries().iter().chain(pxy.entries()));
    let mut acc = HeightValue::one();
    for v in finite_places_over(field, &primes).iter().chain(archimedean_places(field).iter()) {
        acc = acc.mul(&subspace_seminorm(y, x, v)?.weighted(&v.weight()));
    }
    Ok(acc)
}

/// `H(⟨X, y⟩) / H(X)`, which equals `d_X(y)`.
pub fn distance_via_span(field: Field, y: &VectorK, x: &Subspace) -> Result<HeightValue> {
    let span = x.extend(y)?;
    Ok(height_subspace(field, &span)?.div(&height_subspace(field, x)?))
}

/// The largest `H(Ty) / d_X(y)` with `X = ker T` over points of height at
/// most `bound`, and the point achieving it. Over `Q`.
pub fn prop31_sup(t: &MatrixK, bound: f64, exec: Exec) -> Result<(HeightValue, VectorK)> {
    if t.is_zero() {
        return Err(Error::Degenerate("T must be nonzero".into()));
    }
    check_field(Field::Rational, t.radicand())?;
    let ker = t.kernel();
    let points = northcott::enum_projective_points(t.dim(), bound, exec);
    let values = exec.map(&points, |pt| -> Result<Option<HeightValue>> {
        let y = pt.vector();
        let d = match &ker {
            Some(x) if x.contains(&y) => return Ok(None),
            Some(x) => distance(Field::Rational, &y, x)?,
            None => pt.height(),
        };
        Ok(Some(height_vector(Field::Rational, &t.mul_vec(&y), None)?.div(&d)))
    });
    let mut best: Option<(HeightValue, VectorK)> = None;
    for (pt, v) in points.iter().zip(values) {
        if let Some(h) = v? {
            if best.as_ref().map_or(true, |(b, _)| h.ln() > b.ln()) {
                best = Some((h, pt.vector()));
            }
        }
    }
    best.ok_or_else(|| Error::Degenerate("no enumerated point lies outside the kernel".into()))
}

/// `∏_v N_v(x1, x2)^{d_v}` for the non-adelic family with `N_∞` the max norm
/// and `N_p(x1, x2) = max(|x1|_p, |p x2|_p)` at every prime.
pub fn remark_pseudo_height(x1: &BigRational, x2: &BigRational) -> HeightValue {
    if x1.is_zero() && x2.is_zero() {
        return HeightValue::one();
    }
    let mut primes = BTreeSet::new();
    arith::extend_with_rational_primes(&mut primes, x1);
    arith::extend_with_rational_primes(&mut primes, x2);
    let mut acc = HeightValue::one();
    for v in finite_places_over(Field::Rational, &primes) {
        let p = BigRational::from_integer(BigInt::from(v.prime().unwrap().clone()));
        let a = abs_value(&Scalar::rational(x1.clone()), &v);
        let b = abs_value(&Scalar::rational(x2 * &p), &v);
        acc = acc.mul(&a.max(b).weighted(&v.weight()));
    }
    let arch = x1.abs().max(x2.abs());
    acc.arch_ln = arith::ln_abs_rational(&arch);
    acc.rel_err = f64::EPSILON;
    acc
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RemarkDemo {
    pub q: u64,
    pub pseudo_height: HeightValue,
    /// Every factor of the pseudo-height is rational here, so the product
    /// is available exactly.
    #[serde(serialize_with = "ser_ratio")]
    pub pseudo_height_exact: BigRational,
    pub standard_height: HeightValue,
    pub ratio: f64,
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Evaluates both heights at `(q, 1)`.
pub fn remark_demo(q: u64) -> Result<RemarkDemo> {
    if !arith::is_prime(&BigUint::from(q)) {
        return Err(Error::invalid(format!("{q} is not prime")));
    }
    let x1 = BigRational::from_integer(BigInt::from(q));
    let pseudo = remark_pseudo_height(&x1, &BigRational::one());
    let standard = height_vector(Field::Rational, &VectorK::from_ints(&[q as i64, 1]), None)?;
    let ratio = standard.div(&pseudo).value();
    let finite = pseudo.finite.as_rational().expect("integer exponents over Q").clone();
    let exact = finite * x1.max(BigRational::one());
    Ok(RemarkDemo { q, pseudo_height: pseudo, pseudo_height_exact: exact, standard_height: standard, ratio })
}

/// Sampled range `(min, max)` of `H_twisted(x) / H(x)` over random primitive
/// integer vectors with entries in `[-radius, radius]`.
pub fn comparison_constant(
    field: Field,
    n: usize,
    twist: &TwistSpec,
    samples: usize,
    seed: u64,
) -> Result<(HeightValue, HeightValue)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let radius = 20i64;
    let mut lo: Option<HeightValue> = None;
    let mut hi: Option<HeightValue> = None;
    let mut drawn = 0;
    while drawn < samples {
        let coords: Vec<i64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
        let x = VectorK::from_ints(&coords);
        if x.is_zero() {
            continue;
        }
        drawn += 1;
        let x = x.primitive();
        let r = height_vector(field, &x, Some(twist))?.div(&height_vector(field, &x, None)?);
        if lo.as_ref().map_or(true, |l| r.ln() < l.ln()) {
            lo = Some(r.clone());
        }
        if hi.as_ref().map_or(true, |h| r.ln() > h.ln()) {
            hi = Some(r);
        }
    }
    Ok((lo.unwrap_or_else(HeightValue::one), hi.unwrap_or_else(HeightValue::one)))
}

/// `min H(y - x) / (d_X(y) H(X))` over `x = Σ c_i b_i` with `c_i = a/q`,
/// `|a| <= radius q`, `1 <= q <= radius`. The infimum over all of `X` is
/// only known to be bounded; this reports what the search finds.
pub fn approximation_ratio(y: &VectorK, x: &Subspace, radius: i64) -> Result<f64> {
    let d = distance(Field::Rational, y, x)?;
    let hx = height_subspace(Field::Rational, x)?;
    let denom = d.mul(&hx).ln();
    let l = x.dim();
    let mut coeffs: Vec<Scalar> = Vec::new();
    for q in 1..=radius {
        for a in -radius * q..=radius * q {
            let c = Scalar::from_ratio(a, q);
            if !coeffs.contains(&c) {
                coeffs.push(c);
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; l];
    loop {
        let mut z = y.clone();
        for (i, &k) in idx.iter().enumerate() {
            z = z.sub(&x.basis()[i].scale(&coeffs[k]));
        }
        let h = height_vector(Field::Rational, &z, None)?.ln();
        best = best.min(h - denom);
        let mut pos = 0;
        loop {
            if pos == l {
                return Ok(best.exp());
            }
            idx[pos] += 1;
            if idx[pos] < coeffs.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn close(h: &HeightValue, x: f64) -> bool {
        (h.value() - x).abs() < 1e-12 * x.max(1.0)
    }

    #[test]
    fn vector_heights() {
        assert!(close(&height_vector(q(), &VectorK::from_ints(&[3, 1]), None).unwrap(), 10f64.sqrt()));
        assert_eq!(height_vector(q(), &VectorK::zero(2), None).unwrap(), HeightValue::one());
        let h = height_vector(q(), &VectorK::from_ints(&[6, 0]), None).unwrap();
        assert!(close(&h, 1.0));
        assert_eq!(h.finite, FinitePart::from_rational(BigRational::new(1.into(), 6.into())));
    }

    #[test]
    fn matrix_and_spectral_heights() {
        assert!(close(&height_matrix(q(), &MatrixK::identity(3)).unwrap(), 1.0));
        assert!(close(&height_matrix(q(), &MatrixK::from_ints(&[&[1, 1], &[1, 1]])).unwrap(), 2.0));
        assert!(close(&height_matrix(q(), &MatrixK::from_ints(&[&[2, 0], &[0, 3]])).unwrap(), 3.0));
        assert_eq!(height_spectral(q(), &MatrixK::from_ints(&[&[0, 7], &[0, 0]])).unwrap(), HeightValue::one());
        let h = height_spectral(q(), &MatrixK::from_ints(&[&[0, 2], &[1, 0]])).unwrap();
        assert!(close(&h, 1.0));
        assert!(close(&height_spectral(q(), &MatrixK::from_ints(&[&[2, 0], &[0, 3]])).unwrap(), 3.0));
    }

    #[test]
    fn operator_heights() {
        let opts = OperatorOptions::default();
        for n in [1, 2, 17, 1000] {
            let t = MatrixK::from_ints(&[&[1, n], &[1, n]]);
            let h = height_operator(q(), &t, &opts).unwrap();
            assert!(h.exact().unwrap().finite.is_one());
            assert!((h.exact().unwrap().value() - 2f64.sqrt()).abs() < 1e-12);
        }
        let d = MatrixK::from_ints(&[&[2, 0], &[0, 3]]);
        assert!(close(height_operator(q(), &d, &opts).unwrap().exact().unwrap(), 3.0));
        let mid = MatrixK::from_ints(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 0]]);
        let opts = OperatorOptions { search_bound: Some(4.0), ..OperatorOptions::default() };
        match height_operator(q(), &mid, &opts).unwrap() {
            OperatorHeight::Bounded { upper, lower, empirical, .. } => {
                assert!(close(&upper, 3.0));
                let e = empirical.unwrap();
                assert!(e.value.value() <= 3.0 + 1e-9);
                assert!(lower.value() <= e.value.value());
            }
            OperatorHeight::Exact(_) => panic!("rank 2 in dimension 3 is not exact"),
        }
    }

    #[test]
    fn subspace_heights_and_distances() {
        assert!(close(&height_subspace(q(), &Subspace::whole(3)).unwrap(), 1.0));
        let line = Subspace::new(2, vec![VectorK::from_ints(&[3, 4])]).unwrap();
        assert!(close(&height_subspace(q(), &line).unwrap(), 5.0));
        let diag = Subspace::new(2, vec![VectorK::from_ints(&[1, 1])]).unwrap();
        let d = distance(q(), &VectorK::from_ints(&[1, 0]), &diag).unwrap();
        assert!(d.finite.is_one());
        assert!(close(&d, 0.5f64.sqrt()));
        let via = distance_via_span(q(), &VectorK::from_ints(&[1, 0]), &diag).unwrap();
        assert!(d.approx_eq(&via, 1e-12));
        assert!(distance(q(), &VectorK::from_ints(&[2, 2]), &diag).is_err());
    }

    #[test]
    fn remark_values() {
        for (qq, r2) in [(2u64, 5.0f64), (3, 10.0), (101, 10202.0)] {
            let demo = remark_demo(qq).unwrap();
            assert!(demo.pseudo_height_exact.is_one());
            assert!((demo.pseudo_height.value() - 1.0).abs() < 1e-15);
            assert!((demo.ratio - r2.sqrt()).abs() < 1e-12 * r2.sqrt());
        }
    }

    #[test]
    fn twists() {
        let id = TwistSpec::identity();
        let (lo, hi) = comparison_constant(q(), 2, &id, 50, 1).unwrap();
        assert!(close(&lo, 1.0) && close(&hi, 1.0));
        let inf = archimedean_places(q()).remove(0);
        let t = TwistSpec::identity().with_local(inf, MatrixK::from_ints(&[&[2, 0], &[0, 1]])).unwrap();
        let (lo, hi) = comparison_constant(q(), 2, &t, 200, 2).unwrap();
        assert!(lo.value() >= 1.0 - 1e-12 && hi.value() <= 2.0 + 1e-12);
        let v2 = crate::place::places_above(q(), &BigUint::from(2u32)).unwrap().remove(0);
        let half = MatrixK::diagonal(&[Scalar::from_ratio(1, 2), Scalar::one()]);
        let t = TwistSpec::identity().with_local(v2, half).unwrap();
        let (lo, hi) = comparison_constant(q(), 2, &t, 200, 3).unwrap();
        assert!(lo.value() >= 1.0 - 1e-12 && hi.value() <= 2.0 + 1e-12);
    }

    #[test]
    fn prop31_sup_approaches_height() {
        let (v, _) = prop31_sup(&MatrixK::identity(2), 3.0, Exec::Sequential).unwrap();
        assert!(close(&v, 1.0));
        // heights are projective, so e_2 itself only gives 1; the sup is approached from below
        let t = MatrixK::diagonal(&[Scalar::from_int(2), Scalar::from_int(3)]);
        let (v5, _) = prop31_sup(&t, 5.0, Exec::Sequential).unwrap();
        let (v10, _) = prop31_sup(&t, 10.0, Exec::Sequential).unwrap();
        assert!(v5.value() <= v10.value() && v10.value() < 3.0 && v10.value() > 2.9);
        let (v, _) = prop31_sup(&MatrixK::from_ints(&[&[1, 1], &[1, 1]]), 10.0, Exec::Sequential).unwrap();
        assert!(v.ln() <= 2f64.ln() + 1e-12, "{v:?}");
    }
}
