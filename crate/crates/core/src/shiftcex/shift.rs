use num_complex::Complex64;
use serde::Serialize;

use super::vector::{BoundedFunctional, L1Vector};
use crate::error::{invalid, Error, Result};
use crate::seq::{
    cesaro_values, validate_horizons, AverageTrace, CompensatedSum, Generator, SumMode,
    WeightSequence, DEFAULT_TOL,
};
use crate::turn::Turn;

/// aₙ = ⟨Tⁿx, x′⟩ = Σⱼ tⱼ s_{n+j} for the right shift T.
///
/// For piecewise-constant bases the pairing is evaluated run by run against
/// prefix sums of the modulated entries uⱼ = tⱼe^{2πijθ}.
struct ShiftPairing {
    x: L1Vector,
    xp: BoundedFunctional,
    /// prefix[j] = Σ_{i≤j} uᵢ
    prefix: Vec<Complex64>,
}

impl ShiftPairing {
    fn new(x: L1Vector, xp: BoundedFunctional) -> Self {
        let theta = xp.modulation();
        let mut acc = CompensatedSum::new();
        let mut prefix = Vec::with_capacity(x.support_len() + 1);
        prefix.push(Complex64::new(0.0, 0.0));
        for (i, t) in x.entries().iter().enumerate() {
            acc.add(t * theta.mul_int(i as i128 + 1).unit());
            prefix.push(acc.value());
        }
        ShiftPairing { x, xp, prefix }
    }
}

impl Generator for ShiftPairing {
    fn value(&self, n: u64) -> Complex64 {
        let len = self.x.support_len() as u64;
        if self.xp.run_end(n + 1).is_none() {
            return (1..=len)
                .map(|j| self.x.get(j as usize) * self.xp.at(n + j))
                .sum();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut j = 1u64;
        while j <= len {
            let end = self.xp.run_end(n + j).unwrap().min(n + len);
            let j_end = end - n;
            acc += self.xp.base_at(n + j)
                * (self.prefix[j_end as usize] - self.prefix[j as usize - 1]);
            j = j_end + 1;
        }
        let theta = self.xp.modulation();
        if theta == Turn::ZERO {
            acc
        } else {
            acc * theta.mul_wrapping(n as u128).unit()
        }
    }
}

pub fn shift_sequence(x: &L1Vector, xp: &BoundedFunctional) -> WeightSequence {
    WeightSequence::new(
        ShiftPairing::new(x.clone(), xp.clone()),
        x.one_norm() * xp.sup_norm(),
        "shift pairing",
    )
}

/// Both sides of the approximate-identity estimate at one horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub const BOUND_SLACK: f64 = 1e-10;

/// lhs = |(1/N)Σλⁿ⟨Tⁿx,x′⟩ − (1/N)Σλⁿsₙ·Σⱼλ̄ʲtⱼ| against
/// rhs = 2J‖x‖₁‖x′‖_∞/N + 2‖x′‖_∞ε at each horizon. `epsilon` is a declared
/// bound on the ℓ¹ tail beyond the support (zero for finite vectors).
pub fn cex_bound_checks(
    x: &L1Vector,
    xp: &BoundedFunctional,
    lambda: Turn,
    horizons: &[u64],
    epsilon: f64,
) -> Result<Vec<BoundCheck>> {
    validate_horizons(horizons)?;
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(invalid("tail bound must be non-negative"));
    }
    let rot = WeightSequence::character(lambda);
    let paired = WeightSequence::product(vec![rot.clone(), shift_sequence(x, xp)]);
    let own = WeightSequence::product(vec![rot, xp.to_sequence()]);
    let factor = x.modulated(-lambda).total();
    let left = cesaro_values(&paired, horizons, SumMode::Plain);
    let right = cesaro_values(&own, horizons, SumMode::Plain);
    let j = x.support_len() as f64;
    let sup = xp.sup_norm();
    Ok(horizons
        .iter()
        .zip(left.iter().zip(&right))
        .map(|(&n, (l, r))| {
            let lhs = (l - r * factor).norm();
            let rhs = 2.0 * j * x.one_norm() * sup / n as f64 + 2.0 * sup * epsilon;
            BoundCheck {
                n,
                lhs,
                rhs,
                holds: lhs <= rhs + BOUND_SLACK,
            }
        })
        .collect())
}

pub fn cex_bound_check(
    x: &L1Vector,
    xp: &BoundedFunctional,
    lambda: Turn,
    n: u64,
) -> Result<BoundCheck> {
    Ok(cex_bound_checks(x, xp, lambda, &[n], 0.0)?[0])
}

/// Oscillation of the Cesàro means of the shift pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceWitness {
    /// min and max of the tail means projected on the direction of Σⱼtⱼ
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub gap: f64,
    pub trace: AverageTrace,
}

pub const MIN_WITNESS_HORIZON: u64 = 1 << 16;

/// Cesàro means at the checkpoints 2, 4, …, horizon. The tail is every
/// checkpoint 2ᵏ with k ≥ log₂(horizon)/2.
pub fn divergence_witness(
    x: &L1Vector,
    xp: &BoundedFunctional,
    horizon: u64,
) -> Result<DivergenceWitness> {
    let total = x.total();
    if total.norm() <= 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "divergence needs Σⱼ tⱼ ≠ 0, got {total}"
        )));
    }
    if !horizon.is_power_of_two() || horizon < MIN_WITNESS_HORIZON {
        return Err(invalid(format!(
            "witness horizon must be a power of two ≥ {MIN_WITNESS_HORIZON}, got {horizon}"
        )));
    }
    let kmax = horizon.trailing_zeros();
    let horizons: Vec<u64> = (1..=kmax).map(|k| 1u64 << k).collect();
    validate_horizons(&horizons)?;
    let values = cesaro_values(&shift_sequence(x, xp), &horizons, SumMode::Plain);
    let dir = total / total.norm();
    let tail: Vec<f64> = values[(kmax as usize / 2).saturating_sub(1)..]
        .iter()
        .map(|v| (v * dir.conj()).re)
        .collect();
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trace = AverageTrace::new(horizons, values, DEFAULT_TOL);
    Ok(DivergenceWitness {
        liminf_est: lo,
        limsup_est: hi,
        gap: hi - lo,
        trace,
    })
}

/// One row of the counterexample trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CexRow {
    pub n: u64,
    pub cesaro: Complex64,
    pub running_min: f64,
    pub running_max: f64,
    pub bound_lhs: f64,
    pub bound_rhs: f64,
}

/// Cesàro means of the shift pairing with running extremes of their real
/// parts and the bound check at λ, one row per horizon.
pub fn cex_trace(
    x: &L1Vector,
    xp: &BoundedFunctional,
    lambda: Turn,
    horizons: &[u64],
) -> Result<Vec<CexRow>> {
    let checks = cex_bound_checks(x, xp, lambda, horizons, 0.0)?;
    let values = cesaro_values(&shift_sequence(x, xp), horizons, SumMode::Plain);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    Ok(values
        .into_iter()
        .zip(checks)
        .map(|(v, c)| {
            lo = lo.min(v.re);
            hi = hi.max(v.re);
            CexRow {
                n: c.n,
                cesaro: v,
                running_min: lo,
                running_max: hi,
                bound_lhs: c.lhs,
                bound_rhs: c.rhs,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{dyadic_horizons, tail_spread};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    /// Spread of the tail of a functional's own Cesàro means at 2, 4, …, horizon.
    fn own_tail_spread(xp: &BoundedFunctional, horizon: u64) -> f64 {
        let kmax = horizon.trailing_zeros();
        let horizons: Vec<u64> = (1..=kmax).map(|k| 1u64 << k).collect();
        let values = cesaro_values(&xp.to_sequence(), &horizons, SumMode::Plain);
        tail_spread(
            values[(kmax as usize / 2).saturating_sub(1)..]
                .iter()
                .copied(),
        )
    }

    fn naive(x: &L1Vector, xp: &BoundedFunctional, n: u64) -> Complex64 {
        (1..=x.support_len())
            .map(|j| x.get(j) * xp.at(n + j as u64))
            .sum()
    }

    #[test]
    fn shift_examples() {
        let s = BoundedFunctional::block_sign(1.0).unwrap();
        let a = shift_sequence(&L1Vector::basis(1).unwrap(), &s);
        assert!((0..200).all(|n| a.at(n) == s.at(n + 1)));
        let a = shift_sequence(
            &L1Vector::from_reals(&[1.0, 1.0]).unwrap(),
            &BoundedFunctional::constant(one()),
        );
        assert!((0..200).all(|n| a.at(n) == Complex64::new(2.0, 0.0)));
        let x = L1Vector::from_reals(&[1.0, -1.0]).unwrap();
        let a = shift_sequence(&x, &s);
        let mut buf = vec![Complex64::new(0.0, 0.0); 100_000];
        a.fill(1, &mut buf);
        assert!(buf
            .iter()
            .enumerate()
            .all(|(i, v)| (v - naive(&x, &s, i as u64 + 1)).norm() <= 1e-12));
        assert_eq!(a.sup_bound(), 2.0);
    }

    #[test]
    fn bound_examples() {
        let e1 = L1Vector::basis(1).unwrap();
        let s = BoundedFunctional::block_sign(1.0).unwrap();
        for n in [1u64, 7, 64, 1000, 4097] {
            let c = cex_bound_check(&e1, &s, Turn::ZERO, n).unwrap();
            let telescoped = (s.at(n + 1) - s.at(1)).norm() / n as f64;
            assert!((c.lhs - telescoped).abs() < 1e-12);
            assert_eq!(c.rhs, 2.0 / n as f64);
            assert!(c.holds);
        }
        let zero = BoundedFunctional::constant(Complex64::new(0.0, 0.0));
        let c = cex_bound_check(&e1, &zero, Turn::from_f64(0.4), 100).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.holds);
    }

    #[test]
    fn random_vector_all_horizons() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let x = L1Vector::new(
            (0..16)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let s = BoundedFunctional::block_sign(1.0).unwrap();
        let checks =
            cex_bound_checks(&x, &s, Turn::from_f64(0.3), &dyadic_horizons(8, 20), 0.0).unwrap();
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn witness_examples() {
        let e1 = L1Vector::basis(1).unwrap();
        let w =
            divergence_witness(&e1, &BoundedFunctional::block_sign(1.0).unwrap(), 1 << 20).unwrap();
        assert!(w.gap >= 0.5, "gap {}", w.gap);
        let small = divergence_witness(&e1, &BoundedFunctional::block_sign(1e-3).unwrap(), 1 << 20)
            .unwrap();
        assert!(small.gap >= 5e-4);
        assert!((small.gap - 1e-3 * w.gap).abs() <= 1e-15);
        let zero_sum = L1Vector::from_reals(&[1.0, -1.0]).unwrap();
        let err = divergence_witness(
            &zero_sum,
            &BoundedFunctional::block_sign(1.0).unwrap(),
            1 << 20,
        )
        .unwrap_err();
        assert!(err.is_hypothesis_violation());
        assert!(
            divergence_witness(&e1, &BoundedFunctional::block_sign(1.0).unwrap(), 1000).is_err()
        );
    }

    #[test]
    fn gap_scales_exactly_with_dyadic_amplitude() {
        let x = L1Vector::from_reals(&[0.5, 0.25, -0.125]).unwrap();
        let base =
            divergence_witness(&x, &BoundedFunctional::block_sign(1.0).unwrap(), 1 << 16).unwrap();
        let scaled = divergence_witness(
            &x,
            &BoundedFunctional::block_sign(2f64.powi(-10)).unwrap(),
            1 << 16,
        )
        .unwrap();
        assert_eq!(scaled.gap, base.gap * 2f64.powi(-10));
    }

    #[test]
    fn e1_divergence_matches_the_functional() {
        let e1 = L1Vector::basis(1).unwrap();
        let family = vec![
            BoundedFunctional::block_sign(1.0).unwrap(),
            BoundedFunctional::block_sign_with_growth(0.5, 3).unwrap(),
            BoundedFunctional::constant(Complex64::new(0.3, 0.1)),
            super::super::rotated_functional(
                &BoundedFunctional::block_sign(1.0).unwrap(),
                Turn::from_f64(0.25),
            ),
            BoundedFunctional::from_sequence(WeightSequence::geometric(0.5)).unwrap(),
        ];
        let h = 1u64 << 18;
        for s in family {
            let own = own_tail_spread(&s, h) > 10.0 * DEFAULT_TOL;
            let w = divergence_witness(&e1, &s, h).unwrap();
            let shifted =
                tail_spread(w.trace.values[(18 / 2 - 1)..].iter().copied()) > 10.0 * DEFAULT_TOL;
            assert_eq!(own, shifted, "{:?}", s.base());
        }
    }

    #[test]
    fn rotation_isometry_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = L1Vector::new(
                (0..8)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let lambda = Turn::from_f64(rng.gen::<f64>());
            let s = BoundedFunctional::block_sign(rng.gen_range(0.1..2.0)).unwrap();
            let n = rng.gen_range(1..5000u64);
            let a = cex_bound_check(
                &x,
                &super::super::rotated_functional(&s, lambda),
                Turn::ZERO,
                n,
            )
            .unwrap();
            let b = cex_bound_check(&x.modulated(lambda), &s, lambda, n).unwrap();
            assert!((a.lhs - b.lhs).abs() <= 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bound_holds(
            t in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..64),
            amp in 0.01f64..3.0,
            growth in 2u64..6,
            theta in 0.0f64..1.0,
            lambda in 0.0f64..1.0,
            n in 1u64..5000,
        ) {
            let x = L1Vector::new(t.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap();
            let s = super::super::rotated_functional(
                &BoundedFunctional::block_sign_with_growth(amp, growth).unwrap(),
                Turn::from_f64(theta),
            );
            prop_assert!(cex_bound_check(&x, &s, Turn::from_f64(lambda), n).unwrap().holds);
        }

        #[test]
        fn sliding_scheme_matches_double_loop(
            t in proptest::collection::vec(-1.0f64..1.0, 1..40),
            growth in 2u64..5,
            theta in 0.0f64..1.0,
            start in 0u64..10_000,
        ) {
            let x = L1Vector::from_reals(&t).unwrap();
            let s = super::super::rotated_functional(&BoundedFunctional::block_sign_with_growth(0.7, growth).unwrap(), Turn::from_f64(theta));
            let a = shift_sequence(&x, &s);
            let mut buf = vec![Complex64::new(0.0, 0.0); 64];
            a.fill(start, &mut buf);
            for (i, v) in buf.iter().enumerate() {
                prop_assert!((v - naive(&x, &s, start + i as u64)).norm() <= 1e-12);
            }
        }
    }
}
