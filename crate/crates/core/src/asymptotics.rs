//! Power sequences `H(T^k)^{1/k}` and `‖T^k‖_v^{1/k}` sampled at `k = 2^j`,
//! traced against the spectral height and the local spectral radii.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Field;
use crate::heights::{height_int_matrix, height_spectral};
use crate::linalg::power::power_support;
use crate::linalg::{MatrixK, PowerEngine};
use crate::local::{int_matrix_min_valuation, int_operator_norm_arch, spectral_radius, DEFAULT_TOL};
use crate::place::{LocalMagnitude, Place};
use crate::value::{FinitePart, HeightValue};

/// One sample of a trace. `value` is `None` when `T^k = 0` at a local place.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub k: u64,
    pub value: Option<HeightValue>,
    pub log_value: f64,
    pub residual: f64,
    /// The exact factor of `value` equals the exact factor of the target.
    pub finite_matches: bool,
    /// Global traces: `rank(T^k)` is 1 or `n`, so the entry is also
    /// `H^op(T^k)^{1/k}` exactly. Local traces: the entry is exact
    /// (finite place).
    pub exact_flag: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub entries: Vec<TraceEntry>,
    /// `None` when the target is zero (nilpotent, local trace).
    pub target: Option<HeightValue>,
    pub target_log: f64,
    /// Set when the sequence stopped early; the entries before it stand.
    pub truncated: Option<Error>,
}

impl ConvergenceTrace {
    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.last().map(|e| e.residual)
    }

    pub const CSV_HEADER: &'static str = "k,log_height_over_k,target,residual,exact_flag";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.k,
                fmt_f64(e.log_value),
                fmt_f64(self.target_log),
                fmt_f64(e.residual),
                e.exact_flag
            );
        }
        out
    }
}

impl Serialize for TraceEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceEntry", 6)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("logValue", &fmt_f64(self.log_value))?;
        st.serialize_field("residual", &fmt_f64(self.residual))?;
        st.serialize_field("finiteMatches", &self.finite_matches)?;
        st.serialize_field("exactFlag", &self.exact_flag)?;
        st.end()
    }
}

impl Serialize for ConvergenceTrace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConvergenceTrace", 4)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("targetLog", &fmt_f64(self.target_log))?;
        st.serialize_field("entries", &self.entries)?;
        st.serialize_field("truncated", &self.truncated.as_ref().map(|e| e.to_string()))?;
        st.end()
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

fn log_residual(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn check_nonzero(t: &MatrixK) -> Result<()> {
    if t.is_zero() {
        return Err(Error::Degenerate("power sequence of the zero matrix".into()));
    }
    Ok(())
}

/// `rank(T^j)` for `j = 1..=n`; the sequence is constant from `j = n` on.
fn power_ranks(t: &MatrixK) -> Vec<usize> {
    let n = t.dim();
    let mut ranks = Vec::with_capacity(n);
    let mut p = t.clone();
    for j in 1..=n {
        ranks.push(p.rank());
        if j < n {
            p = p.mul(t);
        }
    }
    ranks
}

/// Global trace of `H(T^k)^{1/k}` for `k = 1, 2, 4, ..., 2^jmax` against
/// `H_s(T)`. Heights are projective, so each entry is computed on the
/// stripped power and the target on the primitive integral multiple of `T`;
/// that keeps the exact factors of entries and target comparable.
pub fn gelfand_sequence(field: Field, t: &MatrixK, jmax: u32, budget: u64) -> Result<ConvergenceTrace> {
    check_nonzero(t)?;
    let n = t.dim();
    let engine = PowerEngine::new(t, budget);
    let target = height_spectral(field, &engine.primitive().to_matrix())?;
    let target_log = target.ln();
    let support = power_support(t);
    let ranks = power_ranks(t);
    let mut entries = Vec::new();
    let mut truncated = None;
    for item in engine.squares(jmax) {
        let step = item.and_then(|(k, m, _)| {
            let h = height_int_matrix(field, &m, Some(&support), DEFAULT_TOL)?;
            Ok((k, h))
        });
        let (k, h) = match step {
            Ok(x) => x,
            Err(e) => {
                truncated = Some(e);
                break;
            }
        };
        let value = h.root(u32::try_from(k).expect("k fits u32"));
        let log_value = value.ln();
        let rank = ranks[(k as usize).min(n) - 1];
        entries.push(TraceEntry {
            k,
            residual: log_residual(log_value, target_log),
            finite_matches: value.finite == target.finite,
            exact_flag: rank == 1 || rank == n,
            log_value,
            value: Some(value),
        });
    }
    Ok(ConvergenceTrace { entries, target: Some(target), target_log, truncated })
}

fn magnitude_to_value(m: &LocalMagnitude) -> Option<HeightValue> {
    match m {
        LocalMagnitude::Zero => None,
        LocalMagnitude::PrimePower { p, exponent } => {
            Some(HeightValue::new(FinitePart::prime_power(p, exponent), 0.0, 0.0))
        }
        LocalMagnitude::Arch { ln, rel_err } => Some(HeightValue::new(FinitePart::one(), *ln, *rel_err)),
    }
}

/// Local trace of `‖T^k‖_v^{1/k}` against `ρ_v(T)`. Finite-place entries are
/// exact powers of `p`.
pub fn local_gelfand_sequence(field: Field, t: &MatrixK, v: &Place, jmax: u32, budget: u64) -> Result<ConvergenceTrace> {
    check_nonzero(t)?;
    if v.field != field {
        return Err(Error::invalid(format!("place {v} does not belong to {field}")));
    }
    let target_mag = spectral_radius(t, v, DEFAULT_TOL)?;
    let target = magnitude_to_value(&target_mag);
    let target_log = target_mag.ln();
    let engine = PowerEngine::new(t, budget);
    let mut entries = Vec::new();
    let mut truncated = None;
    for item in engine.squares(jmax) {
        let step = item.and_then(|(k, m, c)| {
            let ledger = engine.ledger(&c, k);
            let mag = local_power_norm(&m, &ledger, v)?;
            Ok((k, mag))
        });
        let (k, mag) = match step {
            Ok(x) => x,
            Err(e) => {
                truncated = Some(e);
                break;
            }
        };
        let value = magnitude_to_value(&mag.root(k));
        let log_value = value.as_ref().map_or(f64::NEG_INFINITY, HeightValue::ln);
        let finite_matches = match (&value, &target) {
            (Some(a), Some(b)) => a.finite == b.finite,
            (None, None) => true,
            _ => false,
        };
        let residual = if value.is_none() && target.is_none() {
            0.0
        } else {
            log_residual(log_value, target_log)
        };
        entries.push(TraceEntry { k, value, log_value, residual, finite_matches, exact_flag: v.is_finite() });
    }
    Ok(ConvergenceTrace { entries, target, target_log, truncated })
}

/// `‖ledger · M‖_v` for an integral `M`.
fn local_power_norm(m: &crate::linalg::IntMatrix, ledger: &BigRational, v: &Place) -> Result<LocalMagnitude> {
    if m.is_zero() || ledger.is_zero() {
        return Ok(LocalMagnitude::Zero);
    }
    match v.prime() {
        Some(p) => {
            let w = int_matrix_min_valuation(m, v).expect("nonzero matrix");
            let wl = BigRational::from_integer(BigInt::from(arith::rational_valuation(ledger, p)));
            Ok(LocalMagnitude::PrimePower { p: p.clone(), exponent: -(w + wl) })
        }
        None => {
            let (ln, rel_err) = int_operator_norm_arch(m, v, DEFAULT_TOL)?.expect("nonzero matrix");
            Ok(LocalMagnitude::Arch { ln: ln + arith::ln_abs_rational(&ledger.abs()), rel_err })
        }
    }
}

/// Global traces for a batch of matrices, in input order.
pub fn gelfand_batch(
    field: Field,
    ts: &[MatrixK],
    jmax: u32,
    budget: u64,
    exec: Exec,
) -> Vec<Result<ConvergenceTrace>> {
    exec.map(ts, |t| gelfand_sequence(field, t, jmax, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bits_budget;

    fn q(rows: &[&[i64]]) -> MatrixK {
        MatrixK::from_ints(rows)
    }

    #[test]
    fn diagonal_trace_is_constant() {
        let tr = gelfand_sequence(Field::Rational, &q(&[&[2, 0], &[0, 3]]), 12, bits_budget()).unwrap();
        assert_eq!(tr.entries.len(), 13);
        for e in &tr.entries {
            assert!(e.finite_matches);
            assert!(e.residual < 1e-12, "k={} residual={}", e.k, e.residual);
            assert!(e.exact_flag);
        }
        assert!((tr.target_log - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unipotent_trace_converges() {
        let tr = gelfand_sequence(Field::Rational, &q(&[&[1, 1], &[0, 1]]), 12, bits_budget()).unwrap();
        assert_eq!(tr.target_log, 0.0);
        for e in &tr.entries {
            let k = e.k as f64;
            let want = ((k * k + 2.0 + k * (k * k + 4.0).sqrt()) / 2.0).ln() / (2.0 * k);
            assert!((e.log_value - want).abs() < 1e-12);
        }
        assert!(tr.final_residual().unwrap() < 0.01);
    }

    #[test]
    fn homothety_trace() {
        let tr = gelfand_sequence(Field::Rational, &q(&[&[2, 0], &[0, 2]]), 6, bits_budget()).unwrap();
        assert!(tr.entries.iter().all(|e| e.residual == 0.0 && e.finite_matches));
    }

    #[test]
    fn local_trace_at_two() {
        let t = q(&[&[0, 2], &[1, 0]]);
        let v = Place::parse(Field::Rational, "2").unwrap();
        let tr = local_gelfand_sequence(Field::Rational, &t, &v, 8, bits_budget()).unwrap();
        let half = FinitePart::prime_power(&2u32.into(), &BigRational::new((-1).into(), 2.into()));
        assert_eq!(tr.target.as_ref().unwrap().finite, half);
        for e in &tr.entries {
            if e.k % 2 == 0 {
                assert_eq!(e.value.as_ref().unwrap().finite, half);
                assert!(e.finite_matches);
            }
        }
    }

    #[test]
    fn local_identity_and_arch() {
        let id = MatrixK::identity(2);
        for s in ["3", "inf"] {
            let v = Place::parse(Field::Rational, s).unwrap();
            let tr = local_gelfand_sequence(Field::Rational, &id, &v, 4, bits_budget()).unwrap();
            assert!(tr.entries.iter().all(|e| e.residual == 0.0));
        }
        let v = Place::parse(Field::Rational, "inf").unwrap();
        let tr = local_gelfand_sequence(Field::Rational, &q(&[&[1, 1], &[0, 1]]), &v, 10, bits_budget()).unwrap();
        let logs: Vec<f64> = tr.entries.iter().map(|e| e.log_value).collect();
        assert!(logs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn nilpotent_and_truncation() {
        let t = q(&[&[0, 1], &[0, 0]]);
        let tr = gelfand_sequence(Field::Rational, &t, 4, bits_budget()).unwrap();
        assert!(tr.entries[1..].iter().all(|e| e.residual == 0.0));
        let v = Place::parse(Field::Rational, "inf").unwrap();
        let tr = local_gelfand_sequence(Field::Rational, &t, &v, 4, bits_budget()).unwrap();
        assert!(tr.entries[1..].iter().all(|e| e.value.is_none() && e.residual == 0.0));

        let tr = gelfand_sequence(Field::Rational, &q(&[&[3, 1], &[1, 2]]), 20, 2_000).unwrap();
        assert!(matches!(tr.truncated, Some(Error::Resource { .. })));
        assert!(!tr.entries.is_empty());
        assert!(tr.to_csv().starts_with(ConvergenceTrace::CSV_HEADER));
        assert!(gelfand_sequence(Field::Rational, &MatrixK::zero(2), 3, bits_budget()).is_err());
    }
}
