//! Floating-point kernels: the top eigenvalue of a symmetric matrix and the
//! complex roots of a polynomial. Inputs arrive pre-scaled from exact data.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;
const POLISH_STEPS: usize = 64;

/// Largest eigenvalue of a symmetric matrix (row-major) and a bound on its
/// relative error, taken from the eigen residual plus input rounding.
pub fn sym_max_eigen(g: &[f64], n: usize) -> Result<(f64, f64)> {
    let mat = DMatrix::from_row_slice(n, n, g);
    let eig = mat
        .clone()
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric { message: "symmetric eigen-solve did not converge".into(), achieved: f64::INFINITY })?;
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    if lambda <= 0.0 {
        return Ok((0.0, 0.0));
    }
    // The solver's vector can leave a residual far above rounding level on
    // ill-scaled inputs; polish it with power steps and keep the pair with
    // the smallest residual. For symmetric G, |θ - λ| <= ‖Gv - θv‖ for unit v.
    let mut v = eig.eigenvectors.column(idx).into_owned();
    let mut best = (lambda, f64::INFINITY);
    for _ in 0..POLISH_STEPS {
        let w = &mat * &v;
        let theta = v.dot(&w);
        let r = (&w - &v * theta).norm();
        if theta > 0.0 && r < best.1 {
            best = (theta, r);
        }
        if best.1 <= f64::EPSILON * theta {
            break;
        }
        let nw = w.norm();
        if nw == 0.0 {
            break;
        }
        v = w / nw;
    }
    let (lambda, r) = best;
    let rounding = n as f64 * f64::EPSILON * mat.norm() / lambda;
    Ok((lambda, r / lambda + rounding))
}

/// Fujiwara's bound `2 max |a_{n-i}/a_n|^{1/i}` (the constant term halved)
/// on the moduli of the roots of `a_0 + ... + a_n x^n`.
pub fn fujiwara_bound(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let mut best: f64 = 0.0;
    for i in 1..=n {
        let mut c = coeffs[n - i].norm() / lead;
        if i == n {
            c /= 2.0;
        }
        best = best.max(c.powf(1.0 / i as f64));
    }
    2.0 * best
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a polynomial with simple roots (Aberth iteration), each with
/// the radius `n |p(z) / p'(z)|` of a disc certain to contain a root.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<(Complex64, f64)>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return Ok(vec![(-monic[0], 0.0)]);
    }
    let radius = fujiwara_bound(&monic).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(radius * 1e-300));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    // Newton polish and inclusion radii
    let mut out = Vec::with_capacity(n);
    for mut zi in z {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, zi);
            if dp.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            zi -= p / dp;
        }
        let (p, dp) = horner(&monic, zi);
        let r = if p.norm() == 0.0 { 0.0 } else { n as f64 * (p / dp).norm() };
        out.push((zi, r));
    }
    if !converged {
        let worst = out.iter().map(|(z, r)| r / z.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
        if !(worst < 1e-6) {
            return Err(Error::Numeric { message: "root finder did not converge".into(), achieved: worst });
        }
    }
    Ok(out)
}
