//! Sequences, Cesàro machinery and almost-periodic structure.

mod kvn;
mod sequence;
mod summation;
mod trace;
mod trig;

pub use kvn::{kvn_extract, Certification, DensityOneSet, KvnLevel};
pub use sequence::{Generator, WeightSequence};
pub use summation::{deterministic_sum, CompensatedSum, PrefixSums, SumMode, BLOCK};
pub use trace::{
    assess, cesaro_trace, cesaro_trace_with, dyadic_horizons, tail_spread, validate_horizons,
    AverageTrace, TraceOptions, Verdict, DEFAULT_TOL, MAX_HORIZON,
};
pub use trig::{trigpoly_eval, TrigPolynomial, TrigTerm, UNIMODULAR_TOL};

pub(crate) use trace::{cesaro_values, chosen_checkpoints};
pub(crate) use trig::unimodular_turn;

use num_complex::Complex64;
use std::ops::RangeInclusive;

use crate::error::{invalid, Result};

/// Result of a Cesàro-null test at one horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullCheck {
    /// (1/N) Σ_{n≤N} |cₙ|
    pub residual: f64,
    pub passed: bool,
}

pub fn cesaro_null_check(seq: &WeightSequence, horizon: u64, tol: f64) -> Result<NullCheck> {
    validate_horizons(&[horizon])?;
    let residual = cesaro_values(seq, &[horizon], SumMode::Modulus)[0].re;
    Ok(NullCheck {
        residual,
        passed: residual <= tol,
    })
}

/// (1/N) Σ_{n≤N} aₙ λ̄ⁿ.
pub fn bohr_coefficient(
    seq: &WeightSequence,
    lambda: Complex64,
    horizon: u64,
) -> Result<Complex64> {
    let theta = unimodular_turn(lambda, 1e-9)?;
    validate_horizons(&[horizon])?;
    let probe = WeightSequence::product(vec![seq.clone(), WeightSequence::character(-theta)]);
    Ok(cesaro_values(&probe, &[horizon], SumMode::Plain)[0])
}

/// max_{n ∈ window} |p(n) − aₙ|.
pub fn ap_distance(
    p: &TrigPolynomial,
    seq: &WeightSequence,
    window: RangeInclusive<u64>,
) -> Result<f64> {
    if window.is_empty() {
        return Err(invalid("empty window"));
    }
    Ok(window
        .map(|n| (p.eval(n) - seq.at(n)).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turn::Turn;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn null_check_examples() {
        let zero = cesaro_null_check(&WeightSequence::zero(), 100, 1e-6).unwrap();
        assert_eq!(
            zero,
            NullCheck {
                residual: 0.0,
                passed: true
            }
        );

        let tol: f64 = 1e-3;
        // at N = 9/tol exactly the bound is attained up to rounding
        let n = (9.0 / tol).ceil() as u64 + 1;
        let geo = cesaro_null_check(&WeightSequence::geometric(0.9), n, tol).unwrap();
        assert!(geo.residual <= 0.9 / (n as f64 * 0.1) + 1e-15);
        assert!(geo.passed);

        let one = cesaro_null_check(&WeightSequence::constant(c(1.0)), 1000, 0.99).unwrap();
        assert!((one.residual - 1.0).abs() < 1e-15);
        assert!(!one.passed);
    }

    #[test]
    fn bohr_recovers_own_frequency() {
        let theta = Turn::from_f64(0.123);
        let seq = WeightSequence::character(theta);
        for n in [1, 10, 1000, 4097] {
            let b = bohr_coefficient(&seq, theta.unit(), n).unwrap();
            assert!((b - c(1.0)).norm() < 1e-13, "N = {n}");
        }
    }

    #[test]
    fn bohr_off_frequency_decays() {
        let l0 = Turn::from_f64(0.2);
        let l = Turn::from_f64(0.45);
        let seq = WeightSequence::character(l0);
        let gap = (c(1.0) - (l0 - l).unit()).norm();
        for n in [7, 100, 10_000] {
            let b = bohr_coefficient(&seq, l.unit(), n).unwrap();
            assert!(b.norm() <= 2.0 / (n as f64 * gap) + 1e-15);
        }
    }

    #[test]
    fn bohr_two_term_error_bound() {
        let l0 = Turn::from_f64(0.1);
        let m0 = Turn::from_f64(0.3);
        let p = TrigPolynomial::from_turns([(c(2.0), l0), (c(1.0), m0)]).unwrap();
        let n = 100_000;
        let b = bohr_coefficient(&p.to_sequence(), l0.unit(), n).unwrap();
        // |1 − μ₀λ̄₀| = 2 sin(0.2π) ≈ 1.18 > 0.1
        let gap = (c(1.0) - (m0 - l0).unit()).norm();
        assert!(gap >= 0.1);
        assert!((b - c(2.0)).norm() <= 2.0 / (n as f64 * gap));
        assert!((b - c(2.0)).norm() <= 1e-4 * 200.0);
    }

    #[test]
    fn bohr_rejects_non_unimodular() {
        assert!(bohr_coefficient(&WeightSequence::zero(), c(0.5), 10).is_err());
    }

    #[test]
    fn ap_distance_examples() {
        let p =
            TrigPolynomial::from_turns([(c(1.0), Turn::GOLDEN), (c(0.5), Turn::from_f64(0.25))])
                .unwrap();
        assert_eq!(ap_distance(&p, &p.to_sequence(), 1..=500).unwrap(), 0.0);

        let lam = WeightSequence::character(Turn::GOLDEN);
        let d = ap_distance(&TrigPolynomial::default(), &lam, 1..=100).unwrap();
        assert!((d - 1.0).abs() < 1e-15);

        let missing = p.without(1);
        let d = ap_distance(&missing, &p.to_sequence(), 1..=200).unwrap();
        let brute = (1..=200u64)
            .map(|n| (missing.eval(n) - p.eval(n)).norm())
            .fold(0.0, f64::max);
        assert_eq!(d, brute);
        assert!((d - 0.5).abs() < 1e-12);
        assert!(ap_distance(&p, &lam, RangeInclusive::new(5, 4)).is_err());
    }
}
