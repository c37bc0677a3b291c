//! Multiple polynomial correlation sequences aₙ = ∫ S^{p₁(n)}g₁ ⋯ S^{p_k(n)}g_k dμ,
//! integrated exactly on Fourier data or by finite sums on ℤ/m.

use num_complex::Complex64;

use super::observable::{dot, FourierTerm, Observable, Representation};
use super::poly::{IntPolynomial, PhaseSum};
use super::system::{binomial2_wrapping, DynamicalSystem};
use crate::error::{invalid, Error, Result};
use crate::seq::{Generator, WeightSequence};
use crate::turn::Turn;

/// Maximum number of Fourier tuples (product of the k supports).
pub const FREQUENCY_CAP: usize = 100_000;

pub(crate) fn fourier_terms<'a>(g: &'a Observable, what: &str) -> Result<&'a [FourierTerm]> {
    match g.representation() {
        Representation::Fourier { terms, .. } => Ok(terms),
        Representation::Table(_) => Err(Error::NonIntegrable(format!(
            "{what} needs Fourier-form observables"
        ))),
    }
}

/// All index tuples (i₁, …, i_k) with iⱼ < sizes[j], in lexicographic order.
pub(crate) fn tuples(sizes: &[usize]) -> Result<Vec<Vec<usize>>> {
    let count = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    match count {
        Some(c) if c <= FREQUENCY_CAP => {}
        _ => {
            let requested = sizes.iter().fold(1usize, |acc, &s| acc.saturating_mul(s));
            return Err(Error::FrequencyCap {
                requested,
                cap: FREQUENCY_CAP,
            });
        }
    }
    let mut out = vec![Vec::with_capacity(sizes.len())];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

/// Σⱼ rateⱼ·pⱼ(n) as a single phase polynomial with Turn coefficients.
pub(crate) fn combined_phase(rates: &[Turn], polys: &[IntPolynomial]) -> Vec<Turn> {
    let degree = polys.iter().map(|p| p.degree()).max().unwrap_or(0);
    let mut coeffs = vec![Turn::ZERO; degree + 1];
    for (rate, p) in rates.iter().zip(polys) {
        for (i, &c) in p.coeffs().iter().enumerate() {
            coeffs[i] = coeffs[i] + rate.mul_int(c as i128);
        }
    }
    coeffs
}

fn check_inputs(system: &DynamicalSystem, gs: &[Observable], ps: &[IntPolynomial]) -> Result<()> {
    system.validate()?;
    if gs.is_empty() {
        return Err(invalid("at least one observable is required"));
    }
    if gs.len() != ps.len() {
        return Err(invalid(format!(
            "{} observables but {} polynomials",
            gs.len(),
            ps.len()
        )));
    }
    for g in gs {
        g.check_system(system)
            .map_err(|e| Error::NonIntegrable(e.to_string()))?;
    }
    Ok(())
}

struct SkewCorrelation {
    alpha: Turn,
    terms: Vec<Vec<FourierTerm>>,
    polys: Vec<IntPolynomial>,
    /// tuples whose second frequency components cancel
    tuples: Vec<Vec<usize>>,
}

impl Generator for SkewCorrelation {
    fn value(&self, n: u64) -> Complex64 {
        let m: Vec<i128> = self
            .polys
            .iter()
            .map(|p| p.eval(n as i128).expect("range checked at construction"))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.tuples {
            let mut first = 0i128;
            let mut phase = 0u128;
            let mut coef = Complex64::new(1.0, 0.0);
            for (j, &i) in t.iter().enumerate() {
                let term = &self.terms[j][i];
                let (k1, k2) = (term.k[0] as i128, term.k[1] as i128);
                first += k1 + m[j] * k2;
                phase = phase
                    .wrapping_add((k1.wrapping_mul(m[j])) as u128)
                    .wrapping_add((k2 as u128).wrapping_mul(binomial2_wrapping(m[j])));
                coef *= term.coef;
            }
            if first == 0 {
                acc += coef * self.alpha.mul_wrapping(phase).unit();
            }
        }
        acc
    }
}

struct CyclicCorrelation {
    tables: Vec<Vec<Complex64>>,
    polys: Vec<IntPolynomial>,
    modulus: u64,
}

impl Generator for CyclicCorrelation {
    fn value(&self, n: u64) -> Complex64 {
        let shifts: Vec<u64> = self
            .polys
            .iter()
            .map(|p| p.eval_mod(n as i128, self.modulus))
            .collect();
        let m = self.modulus;
        let total: Complex64 = (0..m)
            .map(|y| {
                self.tables
                    .iter()
                    .zip(&shifts)
                    .fold(Complex64::new(1.0, 0.0), |acc, (t, &s)| {
                        acc * t[((y + s) % m) as usize]
                    })
            })
            .sum();
        total / m as f64
    }
}

const SKEW_FREQ_LIMIT: i64 = 1 << 20;

pub fn correlation_sequence(
    system: &DynamicalSystem,
    gs: &[Observable],
    ps: &[IntPolynomial],
) -> Result<WeightSequence> {
    check_inputs(system, gs, ps)?;
    let sup_bound: f64 = gs.iter().map(|g| g.sup_bound()).product();
    let label = format!("correlation(k={}) on {}", gs.len(), system.name());

    if let Some(alpha) = system.rotation() {
        let terms: Vec<&[FourierTerm]> = gs
            .iter()
            .map(|g| fourier_terms(g, "correlation"))
            .collect::<Result<_>>()?;
        let sizes: Vec<usize> = terms.iter().map(|t| t.len()).collect();
        let dim = alpha.len();
        let mut phases = Vec::new();
        for t in tuples(&sizes)? {
            let mut total = vec![0i64; dim];
            let mut coef = Complex64::new(1.0, 0.0);
            let mut rates = Vec::with_capacity(t.len());
            for (j, &i) in t.iter().enumerate() {
                let term = &terms[j][i];
                for (acc, &kk) in total.iter_mut().zip(&term.k) {
                    *acc += kk;
                }
                coef *= term.coef;
                rates.push(dot(&term.k, &alpha));
            }
            if total.iter().all(|&x| x == 0) && coef != Complex64::new(0.0, 0.0) {
                phases.push((coef, combined_phase(&rates, ps)));
            }
        }
        return Ok(WeightSequence::new(
            PhaseSum { terms: phases },
            sup_bound,
            label,
        ));
    }

    match system {
        DynamicalSystem::SkewProduct { alpha } => {
            let terms: Vec<Vec<FourierTerm>> = gs
                .iter()
                .map(|g| fourier_terms(g, "correlation").map(|t| t.to_vec()))
                .collect::<Result<_>>()?;
            if terms
                .iter()
                .flatten()
                .flat_map(|t| &t.k)
                .any(|k| k.abs() > SKEW_FREQ_LIMIT)
            {
                return Err(invalid(format!(
                    "skew-product frequencies are limited to |k| ≤ {SKEW_FREQ_LIMIT}"
                )));
            }
            // keeps Σ (k₁ + m·k₂) inside i128 for every tuple
            if ps.iter().any(|p| p.magnitude_bound(32) >= 2f64.powi(100)) {
                return Err(invalid(
                    "polynomial too large for exact skew-product bookkeeping",
                ));
            }
            let sizes: Vec<usize> = terms.iter().map(|t| t.len()).collect();
            let tuples: Vec<Vec<usize>> = tuples(&sizes)?
                .into_iter()
                .filter(|t| {
                    t.iter()
                        .enumerate()
                        .map(|(j, &i)| terms[j][i].k[1])
                        .sum::<i64>()
                        == 0
                })
                .collect();
            Ok(WeightSequence::new(
                SkewCorrelation {
                    alpha: *alpha,
                    terms,
                    polys: ps.to_vec(),
                    tuples,
                },
                sup_bound,
                label,
            ))
        }
        DynamicalSystem::CyclicPermutation { modulus } => {
            let tables = gs
                .iter()
                .map(|g| match g.representation() {
                    Representation::Table(v) => Ok(v.clone()),
                    Representation::Fourier { .. } => {
                        Err(Error::NonIntegrable("cyclic systems need tables".into()))
                    }
                })
                .collect::<Result<_>>()?;
            Ok(WeightSequence::new(
                CyclicCorrelation {
                    tables,
                    polys: ps.to_vec(),
                    modulus: *modulus,
                },
                sup_bound,
                label,
            ))
        }
        _ => unreachable!("rotations handled above"),
    }
}
