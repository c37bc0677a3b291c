use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seq::{Generator, WeightSequence};
use crate::turn::Turn;

pub const MAX_INT_DEGREE: usize = 8;
pub const MAX_PHASE_DEGREE: usize = 4;

/// Integer polynomial Σ cᵢ nⁱ, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl TryFrom<Vec<i64>> for IntPolynomial {
    type Error = Error;
    fn try_from(coeffs: Vec<i64>) -> Result<Self> {
        IntPolynomial::new(coeffs)
    }
}

impl From<IntPolynomial> for Vec<i64> {
    fn from(p: IntPolynomial) -> Vec<i64> {
        p.coeffs
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        if coeffs.len() > MAX_INT_DEGREE + 1 {
            return Err(invalid(format!(
                "degree {} exceeds {MAX_INT_DEGREE}",
                coeffs.len() - 1
            )));
        }
        Ok(IntPolynomial { coeffs })
    }

    /// p(n) = n
    pub fn identity() -> Self {
        IntPolynomial { coeffs: vec![0, 1] }
    }

    pub fn monomial(degree: usize) -> Result<Self> {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = 1;
        IntPolynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact Horner evaluation in i128.
    pub fn eval(&self, n: i128) -> Result<i128> {
        let overflow = || Error::PolynomialOverflow { n };
        self.coeffs.iter().rev().try_fold(0i128, |acc, &c| {
            acc.checked_mul(n)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or_else(overflow)
        })
    }

    /// p(n) mod 2¹²⁸.
    pub fn eval_wrapping(&self, n: i128) -> u128 {
        let n = n as u128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| {
            acc.wrapping_mul(n).wrapping_add(c as i128 as u128)
        })
    }

    /// p(n) mod m, in [0, m).
    pub fn eval_mod(&self, n: i128, m: u64) -> u64 {
        let m = m as i128;
        let n = n.rem_euclid(m);
        self.coeffs.iter().rev().fold(0i128, |acc, &c| {
            (acc * n + (c as i128).rem_euclid(m)).rem_euclid(m)
        }) as u64
    }

    /// Upper bound for |p(n)| over |n| ≤ 2^bits.
    pub(crate) fn magnitude_bound(&self, bits: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (c as f64).abs() * 2f64.powi((bits as i32) * i as i32))
            .sum()
    }
}

pub fn poly_eval(p: &IntPolynomial, n: i128) -> Result<i128> {
    p.eval(n)
}

/// Σ cᵢ nⁱ mod 1 for Turn coefficients, by Horner.
pub(crate) fn phase_at(coeffs: &[Turn], n: u64) -> Turn {
    coeffs
        .iter()
        .rev()
        .fold(Turn::ZERO, |acc, &c| acc.mul_wrapping(n as u128) + c)
}

/// Σ_t c_t e^{2πi P_t(n)} with each phase polynomial P_t advanced by exact
/// finite differences.
pub(crate) struct PhaseSum {
    pub terms: Vec<(Complex64, Vec<Turn>)>,
}

fn difference_table(coeffs: &[Turn], start: u64) -> Vec<Turn> {
    let d = coeffs.len().saturating_sub(1);
    let mut table: Vec<Turn> = (0..=d as u64)
        .map(|i| phase_at(coeffs, start + i))
        .collect();
    // in-place forward differences: table[j] becomes Δʲp(start)
    for j in 1..=d {
        for i in (j..=d).rev() {
            table[i] = table[i] - table[i - 1];
        }
    }
    table
}

impl Generator for PhaseSum {
    fn value(&self, n: u64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, p)| c * phase_at(p, n).unit())
            .sum()
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for (c, coeffs) in &self.terms {
            let mut diffs = difference_table(coeffs, start);
            let d = diffs.len();
            for slot in out.iter_mut() {
                *slot += c * diffs[0].unit();
                for j in 0..d - 1 {
                    diffs[j] = diffs[j] + diffs[j + 1];
                }
            }
        }
    }
}

/// aₙ = e^{2πi p(n)} for a real polynomial p given by its coefficients mod 1.
pub fn polyphase_weight(coeffs: &[Turn]) -> Result<WeightSequence> {
    if coeffs.len() > MAX_PHASE_DEGREE + 1 {
        return Err(invalid(format!(
            "phase polynomial degree {} exceeds {MAX_PHASE_DEGREE}",
            coeffs.len() - 1
        )));
    }
    let coeffs = if coeffs.is_empty() {
        vec![Turn::ZERO]
    } else {
        coeffs.to_vec()
    };
    let label = format!("polyphase(deg {})", coeffs.len() - 1);
    Ok(WeightSequence::new(
        PhaseSum {
            terms: vec![(Complex64::new(1.0, 0.0), coeffs)],
        },
        1.0,
        label,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_eval_examples() {
        let sq = IntPolynomial::monomial(2).unwrap();
        assert_eq!(poly_eval(&sq, 3).unwrap(), 9);
        assert_eq!(
            poly_eval(&IntPolynomial::new(vec![]).unwrap(), 12345).unwrap(),
            0
        );
        let p = IntPolynomial::new(vec![0, -1, 0, 2]).unwrap();
        assert_eq!(poly_eval(&p, 10).unwrap(), 2 * 1000 - 10);
        assert_eq!(p.eval(10).unwrap(), 1990);
    }

    #[test]
    fn overflow_is_an_error() {
        let p = IntPolynomial::new(vec![0, 0, 0, 0, 0, 0, 0, 0, i64::MAX]).unwrap();
        assert!(matches!(
            p.eval(1 << 20),
            Err(Error::PolynomialOverflow { .. })
        ));
        assert!(IntPolynomial::new(vec![1; 10]).is_err());
    }

    #[test]
    fn wrapping_and_modular_agree_with_exact() {
        let p = IntPolynomial::new(vec![-7, 3, 0, -2, 5]).unwrap();
        for n in -40i128..40 {
            let exact = p.eval(n).unwrap();
            assert_eq!(p.eval_wrapping(n), exact as u128);
            assert_eq!(p.eval_mod(n, 13) as i128, exact.rem_euclid(13));
        }
    }

    #[test]
    fn linear_phase_is_a_character() {
        let beta = Turn::from_f64(0.37);
        let w = polyphase_weight(&[Turn::ZERO, beta]).unwrap();
        let chi = WeightSequence::character(beta);
        for n in [0, 1, 2, 99, 1 << 30] {
            assert_eq!(w.at(n), chi.at(n));
        }
        let flat = polyphase_weight(&[]).unwrap();
        assert!((1..100).all(|n| flat.at(n) == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn finite_differences_are_exact() {
        let coeffs = [
            Turn::from_f64(0.1),
            Turn::SQRT2_FRAC,
            Turn::GOLDEN,
            Turn::from_f64(0.3),
            Turn::GOLDEN,
        ];
        let w = polyphase_weight(&coeffs).unwrap();
        let mut buf = vec![Complex64::new(0.0, 0.0); 5000];
        w.fill(987_654_321, &mut buf);
        for (i, v) in buf.iter().enumerate() {
            assert_eq!(*v, phase_at(&coeffs, 987_654_321 + i as u64).unit());
        }
        assert!(polyphase_weight(&[Turn::ZERO; 6]).is_err());
    }
}
