//! Acceptance run: one PASS/FAIL line per criterion. Expected values come
//! from oracles written here, not from the library.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use heightlab::asymptotics::{gelfand_batch, local_gelfand_sequence};
use heightlab::exec::Exec;
use heightlab::heights::{height_matrix, height_operator, height_vector, remark_demo, OperatorOptions};
use heightlab::linalg::bits_budget;
use heightlab::local::{spectral_radius_finite, subspace_seminorm};
use heightlab::northcott::{enum_invertible_endos, enum_projective_points};
use heightlab::place::{archimedean_places, places_above};
use heightlab::verify::{run_suite, VerifyConfig};
use heightlab::{Field, FinitePart, LocalMagnitude, MatrixK, Place, Scalar, Subspace, VectorK};
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn place_at(p: u64) -> Place {
    places_above(Field::Rational, &BigUint::from(p)).unwrap().remove(0)
}

fn vp(mut n: i128, p: i128) -> i64 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn vp_big(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

fn prime_factors(mut n: i128) -> Vec<u64> {
    n = n.abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

fn int_matrix(rows: &[Vec<i64>]) -> MatrixK {
    let r: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    MatrixK::from_ints(&r)
}

/// `det(xI - T)` for `n <= 3`, coefficients `a_0..a_n`.
fn char_poly_int(t: &[Vec<i64>]) -> Vec<i128> {
    let a = |i: usize, j: usize| t[i][j] as i128;
    match t.len() {
        2 => vec![a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0), -(a(0, 0) + a(1, 1)), 1],
        3 => {
            let tr = a(0, 0) + a(1, 1) + a(2, 2);
            let m2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)
                + a(1, 1) * a(2, 2)
                - a(1, 2) * a(2, 1);
            let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
            vec![-det, m2, -tr, 1]
        }
        _ => unreachable!(),
    }
}

/// `ρ_p = p^e` for an integer monic polynomial: the steepest lower-hull
/// edge into `(n, 0)` has slope `e = max_i -v_p(a_i) / (n - i)`.
fn rho_p_exponent(f: &[i128], p: u64) -> BigRational {
    let n = f.len() - 1;
    (0..n)
        .filter(|&i| f[i] != 0)
        .map(|i| ratio(-vp(f[i], p as i128), (n - i) as i64))
        .max()
        .expect("not nilpotent")
}

fn rho_arch(t: &[Vec<i64>]) -> f64 {
    let n = t.len();
    let m = DMatrix::from_fn(n, n, |i, j| t[i][j] as f64);
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn support_primes(t: &[Vec<i64>], f: &[i128]) -> BTreeSet<u64> {
    let entries = t.iter().flatten().map(|&x| x as i128);
    let coeffs = f[..f.len() - 1].iter().copied();
    entries.chain(coeffs).filter(|&c| c != 0).flat_map(prime_factors).collect()
}

/// `log H_s(T)` over `Q` from the oracles above.
fn log_spectral_height(t: &[Vec<i64>]) -> f64 {
    let f = char_poly_int(t);
    let finite: f64 = support_primes(t, &f)
        .into_iter()
        .map(|p| rho_p_exponent(&f, p).to_f64().unwrap() * (p as f64).ln())
        .sum();
    finite + rho_arch(t).ln()
}

/// Random `n x n` integer matrix, `n ∈ {2, 3}`, entries in `[-9, 9]`, not nilpotent.
fn random_matrix(rng: &mut ChaCha8Rng, diagonal: bool) -> Vec<Vec<i64>> {
    loop {
        let n = rng.gen_range(2..=3);
        let t: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if diagonal && i != j { 0 } else { rng.gen_range(-9..=9) }).collect())
            .collect();
        let f = char_poly_int(&t);
        if f[..n].iter().any(|&c| c != 0) {
            return t;
        }
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ns: Vec<i64> = vec![1, 1_000_000];
    ns.extend((0..8).map(|_| rng.gen_range(2..1_000_000)));
    // image of T_n is spanned by (1, 1), whose height is |(1, 1)|_2
    let want = 0.5 * 2f64.ln();
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for &n in &ns {
        let t = MatrixK::from_ints(&[&[1, n], &[1, n]]);
        let h = height_operator(Field::Rational, &t, &OperatorOptions::default()).unwrap();
        match h.exact() {
            Some(v) => {
                exact &= v.finite.is_one();
                worst = worst.max((v.arch_ln - want).abs());
            }
            None => exact = false,
        }
    }
    outcome(exact && worst <= 1e-12, format!("10 values of n, finite exact={exact}, max arch err {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for q in [2u64, 3, 5, 101, 10007] {
        let d = remark_demo(q).unwrap();
        ok &= d.pseudo_height_exact == BigRational::from_integer(1.into());
        let want = ((q * q + 1) as f64).sqrt();
        worst = worst.max((d.ratio - want).abs() / want);
    }
    outcome(ok && worst <= 1e-12, format!("pseudo-height exactly 1: {ok}, max rel err of ratio {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let cases: Vec<(Vec<Vec<i64>>, bool)> = (0..200)
        .map(|i| {
            let diag = i % 10 == 0;
            (random_matrix(&mut rng, diag), diag)
        })
        .collect();
    let mats: Vec<MatrixK> = cases.iter().map(|(t, _)| int_matrix(t)).collect();
    let traces = gelfand_batch(Field::Rational, &mats, 12, bits_budget(), Exec::default());
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    let mut diag_bad = 0;
    for ((t, diag), tr) in cases.iter().zip(traces) {
        let tr = match tr {
            Ok(tr) if tr.truncated.is_none() => tr,
            _ => {
                bad += 1;
                continue;
            }
        };
        let want = log_spectral_height(t);
        let last = tr.last().unwrap();
        let r = (last.log_value - want).abs();
        worst = worst.max(r);
        if last.k != 4096 || r > 0.05 {
            bad += 1;
        }
        if *diag && !tr.entries.iter().all(|e| e.finite_matches && (e.log_value - want).abs() <= 1e-12) {
            diag_bad += 1;
        }
    }
    outcome(
        bad == 0 && diag_bad == 0,
        format!("200 matrices, {bad} over 0.05 at k=4096 (max residual {worst:.3e}), {diag_bad}/20 diagonal cases inexact"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut arch = (0, 0);
    let mut finite = (0, 0);
    let mut worst_arch: f64 = 0.0;
    let mut witness = None;
    for _ in 0..50 {
        let t = random_matrix(&mut rng, false);
        let f = char_poly_int(&t);
        let m = int_matrix(&t);
        for p in support_primes(&t, &f) {
            let tr = local_gelfand_sequence(Field::Rational, &m, &place_at(p), 12, bits_budget()).unwrap();
            let last = tr.last().unwrap();
            let want = FinitePart::prime_power(&BigUint::from(p), &rho_p_exponent(&f, p));
            finite.1 += 1;
            if last.k == 4096 && last.value.as_ref().is_some_and(|v| v.finite == want) {
                finite.0 += 1;
            } else if witness.is_none() {
                witness = Some(format!("{t:?} at p={p}"));
            }
        }
        let v = archimedean_places(Field::Rational).remove(0);
        let tr = local_gelfand_sequence(Field::Rational, &m, &v, 12, bits_budget()).unwrap();
        let last = tr.last().unwrap();
        let rel = (last.log_value - rho_arch(&t).ln()).exp_m1().abs();
        worst_arch = worst_arch.max(rel);
        arch.1 += 1;
        if last.k == 4096 && rel <= 1e-6 {
            arch.0 += 1;
        }
    }
    outcome(
        arch.0 == arch.1 && finite.0 == finite.1,
        format!(
            "arch {}/{} within 1e-6 (worst rel err {worst_arch:.2e}), finite {}/{} exact at k=4096{}",
            arch.0,
            arch.1,
            finite.0,
            finite.1,
            witness.map(|w| format!(", first finite miss {w}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let report = run_suite(&VerifyConfig { samples: 100, ..VerifyConfig::default() }, Exec::default());
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.failures > 0).map(|c| c.name).collect();
    let min_cases = report.checks.iter().map(|c| c.cases).min().unwrap_or(0);
    outcome(
        report.passed() && min_cases >= 100,
        format!("{} identities, >= {min_cases} cases each, failing: {failed:?}", report.checks.len()),
    )
}

const SMALL_PRIMES: [u64; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut bad = 0;
    for _ in 0..500 {
        let p = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
        let deg = rng.gen_range(1..=5);
        let roots: Vec<BigRational> = (0..deg)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    return BigRational::zero();
                }
                let e: i32 = rng.gen_range(-3..=3);
                let pe = BigInt::from(p).pow(e.unsigned_abs());
                let num = BigInt::from(rng.gen_range(1..=30i64) * if rng.gen() { 1 } else { -1 });
                let den = BigInt::from(rng.gen_range(1..=30i64));
                if e >= 0 {
                    BigRational::new(num * pe, den)
                } else {
                    BigRational::new(num, den * pe)
                }
            })
            .collect();
        let want = roots
            .iter()
            .filter(|a| !a.is_zero())
            .map(|a| ratio(vp_big(a.denom(), p) - vp_big(a.numer(), p), 1))
            .max();
        // upper triangular with the roots on the diagonal
        let n = roots.len();
        let entries: Vec<Scalar> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                match i.cmp(&j) {
                    std::cmp::Ordering::Equal => Scalar::rational(roots[i].clone()),
                    std::cmp::Ordering::Less => Scalar::from_int(rng.gen_range(-5..=5)),
                    std::cmp::Ordering::Greater => Scalar::zero(),
                }
            })
            .collect();
        let got = spectral_radius_finite(&MatrixK::new(n, entries).unwrap(), &place_at(p));
        let ok = match (&got, &want) {
            (LocalMagnitude::Zero, None) => true,
            (LocalMagnitude::PrimePower { exponent, .. }, Some(w)) => exponent == w,
            _ => false,
        };
        if !ok {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("500 split polynomials, {bad} mismatches"))
}

/// `max_{c ∈ G_N} min_i v_p(y_i - Σ c_j b_ji)` over `G_N = {a / p^N : 0 <= a < p^{2N}}`.
fn brute_distance_valuation(y: &[i64], basis: &[Vec<i64>], p: i128, level: u32) -> i64 {
    let pn = p.pow(level);
    let side = p.pow(2 * level);
    let l = basis.len();
    let mut best = i64::MIN;
    let mut a = vec![0i128; l];
    loop {
        let mut val = i64::MAX;
        for (i, &yi) in y.iter().enumerate() {
            let w = pn * yi as i128 - (0..l).map(|j| a[j] * basis[j][i] as i128).sum::<i128>();
            if w != 0 {
                val = val.min(vp(w, p) - level as i64);
            }
        }
        best = best.max(val);
        let mut j = 0;
        while j < l {
            a[j] += 1;
            if a[j] < side {
                break;
            }
            a[j] = 0;
            j += 1;
        }
        if j == l {
            return best;
        }
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let (mut bad, mut unresolved) = (0, 0);
    let mut done = 0;
    while done < 50 {
        let p: i128 = [2, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(2..=3);
        let l = rng.gen_range(1..n.min(3));
        let draw = |rng: &mut ChaCha8Rng| -> Vec<i64> {
            (0..n).map(|_| rng.gen_range(-6..=6) * if rng.gen_bool(0.3) { p as i64 } else { 1 }).collect()
        };
        let basis: Vec<Vec<i64>> = (0..l).map(|_| draw(&mut rng)).collect();
        let y = draw(&mut rng);
        let vecs: Vec<VectorK> = basis.iter().map(|b| VectorK::from_ints(b)).collect();
        let x = match Subspace::new(n, vecs) {
            Ok(x) if x.dim() == l => x,
            _ => continue,
        };
        let yk = VectorK::from_ints(&y);
        if x.contains(&yk) {
            continue;
        }
        done += 1;
        let got = subspace_seminorm(&yk, &x, &place_at(p as u64)).unwrap();
        // Level N fixes each coefficient mod p^N, so it can only certify
        // values below N + min v_p(b); equal values above that are chance.
        let vb = basis.iter().flatten().filter(|&&c| c != 0).map(|&c| vp(c as i128, p)).min().unwrap();
        let mut prev = None;
        let mut level = 1;
        let stable = loop {
            if (p as f64).powi((2 * level * l) as i32) > 3e7 {
                break None;
            }
            let v = brute_distance_valuation(&y, &basis, p, level as u32);
            if prev == Some(v) && v < level as i64 + vb {
                break Some(v);
            }
            prev = Some(v);
            level += 1;
        };
        match stable {
            None => unresolved += 1,
            Some(v) => {
                if got.exponent() != Some(&ratio(-v, 1)) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0 && unresolved == 0, format!("50 cases, {bad} mismatches, {unresolved} grids did not stabilize"))
}

fn sign_normalized(xs: &[i64]) -> bool {
    xs.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn primitive(xs: &[i64]) -> bool {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// `σ_max(T)^2 <= b2` for a 2x2 integer matrix, decided exactly from
/// `σ_max^2 = (F + sqrt(F^2 - 4 det^2)) / 2`, `F` the squared Frobenius norm.
fn sigma_max_sq_le(t: &[i64], b2: &BigRational) -> bool {
    let f: i64 = t.iter().map(|x| x * x).sum();
    let det = t[0] * t[3] - t[1] * t[2];
    let f = BigRational::from_integer(f.into());
    let s = BigRational::from_integer(2.into()) * b2 - &f;
    if s < BigRational::zero() {
        return false;
    }
    let disc = &f * &f - BigRational::from_integer((4 * det * det).into());
    disc <= &s * &s
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (b, b2) in [(1.0, ratio(1, 1)), (1.5, ratio(9, 4)), (2.0, ratio(4, 1)), (3.0, ratio(9, 1))] {
        let r: i64 = 3 + 2;
        let mut want = BTreeSet::new();
        for x in -r..=r {
            for y in -r..=r {
                let v = [x, y];
                if sign_normalized(&v) && primitive(&v) && ratio(x * x + y * y, 1) <= b2 {
                    want.insert(v.to_vec());
                }
            }
        }
        let got: BTreeSet<Vec<i64>> =
            enum_projective_points(2, b, Exec::default()).into_iter().map(|p| p.coords).collect();
        ok &= got == want;
        notes.push(format!("P1 B={b}: {}/{}", got.len(), want.len()));
    }
    for (b, b2) in [(1.0, ratio(1, 1)), (2.0, ratio(4, 1)), (3.0, ratio(9, 1))] {
        let r: i64 = 3 + 2;
        let mut want = BTreeSet::new();
        for code in 0..(2 * r + 1).pow(4) {
            let mut c = code;
            let t: Vec<i64> = (0..4)
                .map(|_| {
                    let x = c % (2 * r + 1) - r;
                    c /= 2 * r + 1;
                    x
                })
                .collect();
            if t[0] * t[3] - t[1] * t[2] != 0 && sign_normalized(&t) && primitive(&t) && sigma_max_sq_le(&t, &b2) {
                want.insert(t);
            }
        }
        let got: BTreeSet<Vec<i64>> =
            enum_invertible_endos(2, b, Exec::default()).unwrap().into_iter().map(|e| e.entries).collect();
        ok &= got == want;
        notes.push(format!("GL2 B={b}: {}/{}", got.len(), want.len()));
    }
    outcome(ok, notes.join(", "))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let gauss = Field::quadratic(-1).unwrap();
    let rat = |rng: &mut ChaCha8Rng| Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9));
    let (mut bad, mut worst) = (0, 0f64);
    for i in 0..100 {
        let n = rng.gen_range(2..=4);
        let (hq, hi) = if i % 2 == 0 {
            let x = VectorK::new((0..n).map(|_| rat(&mut rng)).collect());
            (height_vector(Field::Rational, &x, None), height_vector(gauss, &x, None))
        } else {
            let t = MatrixK::new(n, (0..n * n).map(|_| rat(&mut rng)).collect()).unwrap();
            (height_matrix(Field::Rational, &t), height_matrix(gauss, &t))
        };
        match (hq, hi) {
            (Ok(a), Ok(b)) => {
                worst = worst.max((a.arch_ln - b.arch_ln).abs());
                if !a.approx_eq(&b, 1e-12) {
                    bad += 1;
                }
            }
            _ => bad += 1,
        }
    }
    outcome(bad == 0, format!("50 vectors + 50 matrices, {bad} disagreements, max arch diff {worst:.2e}"))
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 9] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(1)),
        (criterion_3, Duration::from_secs(300)),
        (criterion_4, Duration::from_secs(120)),
        (criterion_5, Duration::from_secs(180)),
        (criterion_6, Duration::from_secs(30)),
        (criterion_7, Duration::from_secs(120)),
        (criterion_8, Duration::from_secs(120)),
        (criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && took <= *budget, o.detail),
            Err(_) => (false, "panicked".to_string()),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {} [{:.2}s, budget {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
