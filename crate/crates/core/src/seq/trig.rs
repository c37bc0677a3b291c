use num_complex::Complex64;

use super::sequence::{Generator, WeightSequence};
use crate::error::{Error, Result};
use crate::turn::Turn;

pub const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub coef: Complex64,
    pub freq: Turn,
}

impl TrigTerm {
    pub fn frequency(&self) -> Complex64 {
        self.freq.unit()
    }
}

/// Finite sum Σ cₖ λₖⁿ with distinct unimodular λₖ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPolynomial {
    terms: Vec<TrigTerm>,
}

pub(crate) fn unimodular_turn(z: Complex64, tol: f64) -> Result<Turn> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > tol {
        return Err(Error::NotUnimodular { value: z, modulus });
    }
    Ok(Turn::from_arg(z))
}

impl TrigPolynomial {
    /// Build from (coefficient, frequency) pairs given as complex numbers.
    pub fn new(terms: impl IntoIterator<Item = (Complex64, Complex64)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(coef, lambda)| {
                Ok(TrigTerm {
                    coef,
                    freq: unimodular_turn(lambda, UNIMODULAR_TOL)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(terms)
    }

    pub fn from_turns(terms: impl IntoIterator<Item = (Complex64, Turn)>) -> Result<Self> {
        Self::from_terms(
            terms
                .into_iter()
                .map(|(coef, freq)| TrigTerm { coef, freq })
                .collect(),
        )
    }

    fn from_terms(terms: Vec<TrigTerm>) -> Result<Self> {
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i + 1..] {
                if (a.frequency() - b.frequency()).norm() <= UNIMODULAR_TOL {
                    return Err(Error::DuplicateFrequency {
                        first: a.frequency(),
                        second: b.frequency(),
                    });
                }
            }
        }
        Ok(TrigPolynomial { terms })
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Σ cₖ λₖⁿ, with λₖⁿ formed from the exact phase n·θₖ mod 1.
    pub fn eval(&self, n: u64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.freq.mul_wrapping(n as u128).unit())
            .sum()
    }

    /// Σ|cₖ|, an upper bound for the sup norm.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.norm()).sum()
    }

    /// Drop one term (used for diagnostics).
    pub fn without(&self, index: usize) -> TrigPolynomial {
        let mut terms = self.terms.clone();
        terms.remove(index);
        TrigPolynomial { terms }
    }

    pub fn to_sequence(&self) -> WeightSequence {
        let mass = self.coefficient_mass();
        WeightSequence::new(
            TrigGenerator(self.clone()),
            mass,
            format!("trig[{}]", self.terms.len()),
        )
    }
}

pub fn trigpoly_eval(p: &TrigPolynomial, n: u64) -> Complex64 {
    p.eval(n)
}

struct TrigGenerator(TrigPolynomial);

impl Generator for TrigGenerator {
    fn value(&self, n: u64) -> Complex64 {
        self.0.eval(n)
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for term in &self.0.terms {
            let mut phase = term.freq.mul_wrapping(start as u128);
            for slot in out.iter_mut() {
                *slot += term.coef * phase.unit();
                phase = phase + term.freq;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let one = TrigPolynomial::new([(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
        for n in [0, 1, 17, 1 << 40] {
            assert!((one.eval(n) - c(1.0, 0.0)).norm() < 1e-15);
        }
        let p = TrigPolynomial::new([(c(2.0, 0.0), c(0.0, 1.0))]).unwrap();
        assert!((trigpoly_eval(&p, 2) - c(-2.0, 0.0)).norm() < 1e-14);

        let w = Complex64::from_polar(1.0, TAU / 3.0);
        let q = TrigPolynomial::new([(c(1.0, 0.0), w), (c(1.0, 0.0), w.conj())]).unwrap();
        // direct complex arithmetic: w³ + w̄³
        let direct = w * w * w + w.conj() * w.conj() * w.conj();
        assert!((q.eval(3) - direct).norm() < 1e-12);
        assert!((q.eval(3) - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_frequencies() {
        assert!(matches!(
            TrigPolynomial::new([(c(1.0, 0.0), c(1.1, 0.0))]),
            Err(Error::NotUnimodular { .. })
        ));
        assert!(matches!(
            TrigPolynomial::new([(c(1.0, 0.0), c(0.0, 1.0)), (c(2.0, 0.0), c(0.0, 1.0))]),
            Err(Error::DuplicateFrequency { .. })
        ));
    }

    #[test]
    fn generator_fill_matches_eval() {
        let p = TrigPolynomial::from_turns([
            (c(0.5, 0.1), Turn::GOLDEN),
            (c(-1.0, 0.0), Turn::from_f64(0.3)),
        ])
        .unwrap();
        let seq = p.to_sequence();
        let mut buf = vec![c(0.0, 0.0); 2048];
        seq.fill(123_456, &mut buf);
        for (i, v) in buf.iter().enumerate() {
            assert!((v - p.eval(123_456 + i as u64)).norm() < 1e-14);
        }
    }
}
