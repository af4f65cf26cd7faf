//! Seeded invariant suite. Every case draws from its own generator, seeded
//! from `(seed, check, case)`, so results do not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Exec;
use crate::field::{Field, Scalar};
use crate::heights::{
    distance, height_matrix, height_operator, height_spectral, height_subspace, height_vector, OperatorOptions,
};
use crate::linalg::{MatrixK, Subspace, VectorK};
use crate::place::product_formula_check;
use crate::value::{FinitePart, HeightValue};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Archimedean tolerance in log units.
    pub arch_tol: f64,
    /// Tolerance for the field-extension check.
    pub extension_tol: f64,
    /// Entries are drawn from `[-entry_range, entry_range]`.
    pub entry_range: i64,
    pub max_dim: usize,
    /// Runs only the checks whose names contain one of these, when nonempty.
    pub only: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            samples: 100,
            arch_tol: 1e-9,
            extension_tol: 1e-12,
            entry_range: 9,
            max_dim: 4,
            only: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// The lowest-numbered failing case.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn to_table(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!("{:<w$}  {:>6}  {:>8}  status\n", "check", "cases", "failures");
        for c in &self.checks {
            let status = if c.failures == 0 { "ok" } else { "FAIL" };
            out += &format!("{:<w$}  {:>6}  {:>8}  {status}\n", c.name, c.cases, c.failures);
            if let Some(wit) = &c.witness {
                out += &format!("  witness: {wit}\n");
            }
        }
        out
    }
}

/// `Ok(None)` on success, `Ok(Some(witness))` on failure.
type Outcome = Result<Option<String>>;
type CheckFn = fn(&mut Gen<'_>) -> Outcome;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("product-formula", check_product_formula),
    ("homogeneity", check_homogeneity),
    ("lower-bound-one", check_at_least_one),
    ("submultiplicative", check_submultiplicative),
    ("spectral-powers", check_spectral_powers),
    ("conjugation", check_conjugation),
    ("triangular", check_triangular),
    ("commuting-diagonal", check_commuting_diagonal),
    ("op-le-height", check_op_le_height),
    ("op-invertible", check_op_invertible),
    ("op-rank-one", check_op_rank_one),
    ("vaaler", check_vaaler),
    ("hyperplane-distance", check_hyperplane),
    ("field-extension", check_field_extension),
];

const FIELDS: [Field; 4] = [Field::Rational, Field::Quadratic(-1), Field::Quadratic(2), Field::Quadratic(-5)];

pub struct Gen<'a> {
    pub rng: ChaCha8Rng,
    pub field: Field,
    pub cfg: &'a VerifyConfig,
}

fn case_seed(seed: u64, check: usize, case: usize) -> u64 {
    let mut z = seed ^ ((check as u64) << 40) ^ case as u64;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Gen<'_> {
    pub fn int(&mut self) -> i64 {
        let r = self.cfg.entry_range;
        self.rng.gen_range(-r..=r)
    }

    pub fn dim(&mut self, lo: usize) -> usize {
        self.rng.gen_range(lo..=self.cfg.max_dim.max(lo))
    }

    pub fn scalar(&mut self) -> Scalar {
        let a = self.int();
        match self.field {
            Field::Rational => Scalar::from_int(a),
            _ if self.rng.gen_bool(0.5) => Scalar::from_int(a),
            f => &Scalar::from_int(a) + &(&f.sqrt_generator().unwrap() * &Scalar::from_int(self.int())),
        }
    }

    pub fn nonzero_scalar(&mut self) -> Scalar {
        loop {
            let x = self.scalar();
            if !x.is_zero() {
                let d = self.rng.gen_range(1..=self.cfg.entry_range.max(1));
                return &x * &Scalar::from_ratio(1, d);
            }
        }
    }

    pub fn vector(&mut self, n: usize) -> VectorK {
        loop {
            let x = VectorK::new((0..n).map(|_| self.scalar()).collect());
            if !x.is_zero() {
                return x;
            }
        }
    }

    pub fn matrix(&mut self, n: usize) -> MatrixK {
        loop {
            let t = MatrixK::new(n, (0..n * n).map(|_| self.scalar()).collect()).expect("square");
            if !t.is_zero() {
                return t;
            }
        }
    }

    pub fn invertible(&mut self, n: usize) -> MatrixK {
        loop {
            let t = self.matrix(n);
            if t.is_invertible() {
                return t;
            }
        }
    }

    pub fn subspace(&mut self, n: usize, l: usize) -> Subspace {
        loop {
            let basis: Vec<VectorK> = (0..l).map(|_| self.vector(n)).collect();
            if let Ok(x) = Subspace::new(n, basis) {
                return x;
            }
        }
    }

    pub fn outside(&mut self, x: &Subspace) -> VectorK {
        loop {
            let y = self.vector(x.ambient());
            if !x.contains(&y) {
                return y;
            }
        }
    }

    fn close(&self, a: &HeightValue, b: &HeightValue) -> bool {
        a.approx_eq(b, self.cfg.arch_tol)
    }
}

fn mismatch(what: impl std::fmt::Display, a: &HeightValue, b: &HeightValue) -> Option<String> {
    Some(format!("{what}: {a} vs {b} (log {} vs {})", a.ln(), b.ln()))
}

/// Equal as numbers: the exact finite ratio times the archimedean ratio is
/// 1 within tolerance. Used where the split between the two factors depends
/// on the representative.
fn expect_close(g: &Gen<'_>, what: impl std::fmt::Display, a: &HeightValue, b: &HeightValue) -> Outcome {
    Ok(if a.value_close(b, g.cfg.arch_tol) { None } else { mismatch(what, a, b) })
}

/// Equal finite parts and archimedean factors within tolerance.
fn expect_eq(g: &Gen<'_>, what: impl std::fmt::Display, a: &HeightValue, b: &HeightValue) -> Outcome {
    Ok(if g.close(a, b) { None } else { mismatch(what, a, b) })
}

fn check_product_formula(g: &mut Gen<'_>) -> Outcome {
    let x = g.nonzero_scalar();
    let h = product_formula_check(g.field, &x)?;
    let norm = match g.field {
        Field::Rational => x.rational_part().clone(),
        _ => x.norm(),
    };
    let norm = num_traits::Signed::abs(&norm);
    let finite = FinitePart::from_rational(num_traits::Inv::inv(norm)).root(g.field.degree());
    let ok = h.finite == finite && h.ln().abs() <= g.cfg.arch_tol;
    Ok((!ok).then(|| format!("x = {x} over {}: {h}", g.field)))
}

fn check_homogeneity(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let lambda = g.nonzero_scalar();
    let x = g.vector(n);
    let f = g.field;
    let (a, b) = (height_vector(f, &x.scale(&lambda), None)?, height_vector(f, &x, None)?);
    if !a.value_close(&b, g.cfg.arch_tol) {
        return Ok(mismatch(format!("vector {x}, lambda {lambda}"), &a, &b));
    }
    let t = g.matrix(n);
    let (a, b) = (height_matrix(f, &t.scale(&lambda))?, height_matrix(f, &t)?);
    if !a.value_close(&b, g.cfg.arch_tol) {
        return Ok(mismatch(format!("matrix {t}, lambda {lambda}"), &a, &b));
    }
    let (a, b) = (height_spectral(f, &t.scale(&lambda))?, height_spectral(f, &t)?);
    expect_close(g, format!("spectral {t}, lambda {lambda}"), &a, &b)
}

fn check_at_least_one(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let t = g.matrix(n);
    for h in [height_matrix(g.field, &t)?, height_spectral(g.field, &t)?] {
        if h.ln() < -g.cfg.arch_tol {
            return Ok(Some(format!("{t}: {h} < 1")));
        }
    }
    Ok(None)
}

fn check_submultiplicative(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let (t, u) = (g.matrix(n), g.matrix(n));
    let tu = t.mul(&u);
    if tu.is_zero() {
        return Ok(None);
    }
    let lhs = height_matrix(g.field, &tu)?;
    let rhs = height_matrix(g.field, &t)?.mul(&height_matrix(g.field, &u)?);
    Ok((lhs.ln() > rhs.ln() + g.cfg.arch_tol).then(|| format!("T = {t}, T' = {u}: {lhs} > {rhs}")))
}

fn check_spectral_powers(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1).min(3);
    let t = g.matrix(n);
    let k = g.rng.gen_range(2..=8u32);
    let a = height_spectral(g.field, &t.pow(k))?;
    let b = height_spectral(g.field, &t)?.pow(k as i64);
    expect_eq(g, format!("T = {t}, k = {k}"), &a, &b)
}

fn check_conjugation(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1).min(3);
    let t = g.matrix(n);
    let s = g.invertible(n);
    let c = s.mul(&t).mul(&s.inverse().unwrap());
    let (a, b) = (height_spectral(g.field, &c)?, height_spectral(g.field, &t)?);
    expect_eq(g, format!("T = {t}, S = {s}"), &a, &b)
}

fn check_triangular(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let mut t = g.matrix(n);
    let entries: Vec<Scalar> = (0..n * n)
        .map(|idx| if idx % n < idx / n { Scalar::zero() } else { t.entries()[idx].clone() })
        .collect();
    t = MatrixK::new(n, entries)?;
    if t.is_zero() {
        return Ok(None);
    }
    let diag = MatrixK::diagonal(&(0..n).map(|i| t.get(i, i).clone()).collect::<Vec<_>>());
    let (a, b) = (height_spectral(g.field, &t)?, height_spectral(g.field, &diag)?);
    expect_eq(g, format!("T = {t}"), &a, &b)
}

fn check_commuting_diagonal(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let d1: Vec<Scalar> = (0..n).map(|_| g.nonzero_scalar()).collect();
    let d2: Vec<Scalar> = (0..n).map(|_| g.nonzero_scalar()).collect();
    let (t, u) = (MatrixK::diagonal(&d1), MatrixK::diagonal(&d2));
    let lhs = height_spectral(g.field, &t.mul(&u))?;
    let rhs = height_spectral(g.field, &t)?.mul(&height_spectral(g.field, &u)?);
    Ok((lhs.ln() > rhs.ln() + g.cfg.arch_tol).then(|| format!("T = {t}, T' = {u}: {lhs} > {rhs}")))
}

/// A random matrix of prescribed rank `r`, as a product `n×r · r×n`.
fn rank_r(g: &mut Gen<'_>, n: usize, r: usize) -> MatrixK {
    loop {
        let a: Vec<VectorK> = (0..r).map(|_| g.vector(n)).collect();
        let b: Vec<VectorK> = (0..r).map(|_| g.vector(n)).collect();
        let entries = (0..n * n)
            .map(|idx| {
                (0..r).fold(Scalar::zero(), |acc, l| {
                    &acc + &(&a[l].entries()[idx / n] * &b[l].entries()[idx % n])
                })
            })
            .collect();
        let t = MatrixK::new(n, entries).expect("square");
        if t.rank() == r {
            return t;
        }
    }
}

fn check_op_le_height(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(2);
    let r = g.rng.gen_range(1..=n);
    let t = rank_r(g, n, r);
    let h = height_matrix(g.field, &t)?;
    let opts = OperatorOptions {
        search_bound: (g.field == Field::Rational).then_some(2.0),
        exec: Exec::Sequential,
        ..Default::default()
    };
    let op = height_operator(g.field, &t, &opts)?;
    let mut values = Vec::new();
    match &op {
        crate::heights::OperatorHeight::Exact(v) => values.push(v.clone()),
        crate::heights::OperatorHeight::Bounded { upper, lower, empirical, .. } => {
            values.push(upper.clone());
            values.push(lower.clone());
            values.extend(empirical.as_ref().map(|e| e.value.clone()));
        }
    }
    Ok(values
        .iter()
        .find(|v| v.ln() > h.ln() + g.cfg.arch_tol)
        .map(|v| format!("T = {t}: operator value {v} > H(T) = {h}")))
}

fn check_op_invertible(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(1);
    let t = g.invertible(n);
    let op = height_operator(g.field, &t, &OperatorOptions::default())?;
    let Some(v) = op.exact() else {
        return Ok(Some(format!("T = {t}: not exact")));
    };
    expect_eq(g, format!("T = {t}"), v, &height_matrix(g.field, &t)?)
}

fn check_op_rank_one(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(2);
    let t = rank_r(g, n, 1);
    let op = height_operator(g.field, &t, &OperatorOptions::default())?;
    let Some(v) = op.exact() else {
        return Ok(Some(format!("T = {t}: not exact")));
    };
    let ker = t.kernel().expect("rank one is singular");
    let via_kernel = height_matrix(g.field, &t)?.div(&height_subspace(g.field, &ker)?);
    expect_close(g, format!("T = {t}"), v, &via_kernel)
}

fn check_vaaler(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(2);
    let l = g.rng.gen_range(1..n);
    let x = g.subspace(n, l);
    let y = g.outside(&x);
    let lhs = distance(g.field, &y, &x)?.mul(&height_subspace(g.field, &x)?);
    let rhs = height_subspace(g.field, &x.extend(&y)?)?;
    expect_close(g, format!("X = {:?}, y = {y}", x.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>()), &lhs, &rhs)
}

fn check_hyperplane(g: &mut Gen<'_>) -> Outcome {
    let n = g.dim(2);
    let x = g.subspace(n, n - 1);
    let want = HeightValue::one().div(&height_subspace(g.field, &x)?);
    for _ in 0..3 {
        let y = g.outside(&x);
        let d = distance(g.field, &y, &x)?;
        if !d.value_close(&want, g.cfg.arch_tol) {
            return Ok(mismatch(format!("hyperplane {}, y = {y}", x.plucker()), &d, &want));
        }
    }
    Ok(None)
}

fn check_field_extension(g: &mut Gen<'_>) -> Outcome {
    let base = Gen { rng: g.rng.clone(), field: Field::Rational, cfg: g.cfg };
    let mut base = base;
    let n = base.dim(1);
    let x = base.vector(n).scale(&base.nonzero_scalar());
    let t = base.matrix(n);
    let ext = Field::Quadratic(-1);
    let tol = g.cfg.extension_tol;
    let pairs = [
        ("vector", height_vector(Field::Rational, &x, None)?, height_vector(ext, &x, None)?),
        ("matrix", height_matrix(Field::Rational, &t)?, height_matrix(ext, &t)?),
        ("spectral", height_spectral(Field::Rational, &t)?, height_spectral(ext, &t)?),
    ];
    Ok(pairs
        .iter()
        .find(|(_, a, b)| !a.approx_eq(b, tol))
        .map(|(what, a, b)| format!("{what} x = {x}, T = {t}: Q gives {a}, Q(i) gives {b}")))
}

/// Runs one check on `cases` seeded cases.
pub fn run_check(index: usize, cfg: &VerifyConfig, exec: Exec) -> CheckResult {
    let (name, f) = CHECKS[index];
    let ids: Vec<usize> = (0..cfg.samples).collect();
    let outcomes = exec.map(&ids, |&i| {
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(case_seed(cfg.seed, index, i)),
            field: FIELDS[i % FIELDS.len()],
            cfg,
        };
        match f(&mut g) {
            Ok(w) => w.map(|w| format!("case {i} over {}: {w}", g.field)),
            Err(e) => Some(format!("case {i} over {}: error: {e}", g.field)),
        }
    });
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    CheckResult { name, cases: cfg.samples, failures, witness: outcomes.into_iter().flatten().next() }
}

pub fn run_suite(cfg: &VerifyConfig, exec: Exec) -> VerifyReport {
    let checks = (0..CHECKS.len())
        .filter(|&i| cfg.only.is_empty() || cfg.only.iter().any(|s| CHECKS[i].0.contains(s.as_str())))
        .map(|i| run_check(i, cfg, exec))
        .collect();
    VerifyReport { seed: cfg.seed, checks }
}
