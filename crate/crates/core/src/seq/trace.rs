//! Checkpointed Cesàro averages and the finite-horizon convergence verdict.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sequence::WeightSequence;
use super::summation::{PrefixSums, SumMode};
use crate::error::{invalid, Error, Result};

pub const MAX_HORIZON: u64 = 1 << 32;
pub const DEFAULT_TOL: f64 = 1e-3;

/// Outcome of the dyadic Cauchy rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every value from checkpoint `from` onward lies within `radius` of `limit`.
    Converged {
        limit: Complex64,
        radius: f64,
        from: u64,
    },
    /// Tail oscillation `gap` exceeds ten times the tolerance.
    Diverged {
        gap: f64,
    },
    Undecided {
        spread: f64,
    },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "converged",
            Verdict::Diverged { .. } => "diverged",
            Verdict::Undecided { .. } => "undecided",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }
}

/// Partial averages A_N recorded at ascending checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageTrace {
    pub checkpoints: Vec<u64>,
    pub values: Vec<Complex64>,
    pub verdict: Verdict,
    /// ‖F_N‖₂ for function-valued averages.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2norms: Option<Vec<f64>>,
    /// A per-checkpoint upper bound on |A_N| (or ‖F_N‖) when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<f64>>,
}

impl AverageTrace {
    pub fn new(checkpoints: Vec<u64>, values: Vec<Complex64>, tol: f64) -> Self {
        let verdict = assess(&checkpoints, &values, tol);
        AverageTrace {
            checkpoints,
            values,
            verdict,
            l2norms: None,
            bounds: None,
        }
    }

    pub fn last(&self) -> Complex64 {
        *self.values.last().expect("trace is never empty")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    pub tol: f64,
    pub mode: SumMode,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            tol: DEFAULT_TOL,
            mode: SumMode::Plain,
        }
    }
}

pub fn validate_horizons(horizons: &[u64]) -> Result<()> {
    let Some(&last) = horizons.last() else {
        return Err(invalid("horizon list is empty"));
    };
    if horizons[0] == 0 {
        return Err(invalid("horizons must be positive"));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("horizons must be strictly increasing"));
    }
    if last > MAX_HORIZON {
        return Err(Error::HorizonOverflow { horizon: last });
    }
    Ok(())
}

/// Dyadic horizons 2^lo, …, 2^hi.
pub fn dyadic_horizons(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|m| 1u64 << m).collect()
}

/// A_N = (1/N) Σ_{n=1..N} aₙ at each horizon.
pub fn cesaro_trace(seq: &WeightSequence, horizons: &[u64]) -> Result<AverageTrace> {
    cesaro_trace_with(seq, horizons, TraceOptions::default())
}

pub fn cesaro_trace_with(
    seq: &WeightSequence,
    horizons: &[u64],
    opts: TraceOptions,
) -> Result<AverageTrace> {
    validate_horizons(horizons)?;
    let values = cesaro_values(seq, horizons, opts.mode);
    Ok(AverageTrace::new(horizons.to_vec(), values, opts.tol))
}

/// Raw averages without a verdict. Horizons must already be validated.
pub(crate) fn cesaro_values(
    seq: &WeightSequence,
    horizons: &[u64],
    mode: SumMode,
) -> Vec<Complex64> {
    let prefix = PrefixSums::build(seq, *horizons.last().unwrap(), mode);
    horizons
        .iter()
        .map(|&n| prefix.sum_to(n).value() / n as f64)
        .collect()
}

fn is_power_of_two(n: u64) -> bool {
    n.is_power_of_two()
}

/// Indices of the checkpoints the verdict rule looks at: the dyadic ones when
/// there are at least three, otherwise all of them.
pub(crate) fn chosen_checkpoints(checkpoints: &[u64]) -> Vec<usize> {
    assert!(!checkpoints.is_empty());
    let dyadic: Vec<usize> = (0..checkpoints.len())
        .filter(|&i| is_power_of_two(checkpoints[i]))
        .collect();
    if dyadic.len() >= 3 {
        dyadic
    } else {
        (0..checkpoints.len()).collect()
    }
}

/// Dyadic Cauchy rule.
///
/// The last three dyadic checkpoints (or the last three checkpoints when
/// fewer than three are dyadic) decide convergence: if every recorded value
/// from the earliest of them on is within `tol` of the value at the final
/// one, the trace converged. Otherwise the running min/max of the real and
/// imaginary parts over the tail half of the same checkpoint list is
/// compared against `10·tol`.
pub fn assess(checkpoints: &[u64], values: &[Complex64], tol: f64) -> Verdict {
    assert_eq!(checkpoints.len(), values.len());
    let chosen = chosen_checkpoints(checkpoints);
    let anchor = *chosen.last().unwrap();
    let limit = values[anchor];
    let first = chosen[chosen.len().saturating_sub(3)];
    let radius = values[first..]
        .iter()
        .map(|v| (v - limit).norm())
        .fold(0.0, f64::max);
    if radius <= tol {
        return Verdict::Converged {
            limit,
            radius,
            from: checkpoints[first],
        };
    }
    let tail = &chosen[chosen.len() / 2..];
    let spread = tail_spread(tail.iter().map(|&i| values[i]));
    if spread > 10.0 * tol {
        Verdict::Diverged { gap: spread }
    } else {
        Verdict::Undecided { spread }
    }
}

/// max(max Re − min Re, max Im − min Im) over the given values.
pub fn tail_spread(values: impl Iterator<Item = Complex64>) -> f64 {
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for v in values {
        lo_re = lo_re.min(v.re);
        hi_re = hi_re.max(v.re);
        lo_im = lo_im.min(v.im);
        hi_im = hi_im.max(v.im);
    }
    (hi_re - lo_re).max(hi_im - lo_im).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turn::Turn;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_sequence_converges() {
        let trace = cesaro_trace(&WeightSequence::constant(c(1.0)), &[10, 100]).unwrap();
        assert_eq!(trace.values, vec![c(1.0), c(1.0)]);
        assert_eq!(
            trace.verdict,
            Verdict::Converged {
                limit: c(1.0),
                radius: 0.0,
                from: 10
            }
        );
    }

    #[test]
    fn alternating_sequence_converges_to_zero() {
        let seq = WeightSequence::from_fn("alt", 1.0, |n| c(if n % 2 == 0 { 1.0 } else { -1.0 }));
        let horizons = dyadic_horizons(1, 16);
        let trace = cesaro_trace(&seq, &horizons).unwrap();
        for (n, v) in trace.checkpoints.iter().zip(&trace.values) {
            assert!(v.norm() <= 1.0 / *n as f64);
        }
        match trace.verdict {
            Verdict::Converged { limit, radius, .. } => {
                assert_eq!(limit, c(0.0));
                assert!(radius <= DEFAULT_TOL);
            }
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn geometric_character_obeys_closed_form_bound() {
        let lambda = Turn::from_f64(0.3);
        let gap = (c(1.0) - lambda.unit()).norm();
        let horizons = [1, 2, 3, 7, 10, 100, 1000, 1023, 1024, 1025, 65_536, 100_000];
        let trace = cesaro_trace(&WeightSequence::character(lambda), &horizons).unwrap();
        for (n, v) in trace.checkpoints.iter().zip(&trace.values) {
            assert!(v.norm() <= 2.0 / (*n as f64 * gap) + 1e-15, "N = {n}");
        }
    }

    #[test]
    fn horizon_validation() {
        let seq = WeightSequence::zero();
        assert!(matches!(
            cesaro_trace(&seq, &[]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cesaro_trace(&seq, &[4, 4]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cesaro_trace(&seq, &[0, 4]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cesaro_trace(&seq, &[(1 << 32) + 1]),
            Err(Error::HorizonOverflow { .. })
        ));
    }

    #[test]
    fn oscillating_tail_is_diverged() {
        let checkpoints: Vec<u64> = dyadic_horizons(1, 10);
        let values: Vec<Complex64> = (0..10)
            .map(|k| c(if k % 2 == 0 { 0.3 } else { -0.3 }))
            .collect();
        assert!(
            matches!(assess(&checkpoints, &values, 1e-3), Verdict::Diverged { gap } if (gap - 0.6).abs() < 1e-12)
        );
        let small: Vec<Complex64> = values.iter().map(|v| v * 0.004).collect();
        assert!(matches!(
            assess(&checkpoints, &small, 1e-3),
            Verdict::Undecided { .. }
        ));
    }
}
