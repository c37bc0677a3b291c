use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynsys::{
    binomial2_wrapping, combined_phase, dot, fourier_terms, tuples, DynamicalSystem, FourierTerm,
    IntPolynomial, Observable, PhaseSum, Representation, FREQUENCY_CAP,
};
use crate::error::{invalid, Error, Result};
use crate::seq::{
    cesaro_values, chosen_checkpoints, validate_horizons, AverageTrace, CompensatedSum, Generator,
    SumMode, Verdict, WeightSequence, BLOCK, DEFAULT_TOL,
};
use crate::turn::Turn;

#[derive(Clone, Debug)]
pub struct PolyAvgConfig {
    pub weights: WeightSequence,
    pub system: DynamicalSystem,
    pub pairs: Vec<(Observable, IntPolynomial)>,
    pub horizons: Vec<u64>,
    pub tol: f64,
}

impl PolyAvgConfig {
    pub fn new(
        weights: WeightSequence,
        system: DynamicalSystem,
        pairs: Vec<(Observable, IntPolynomial)>,
        horizons: Vec<u64>,
    ) -> Self {
        PolyAvgConfig {
            weights,
            system,
            pairs,
            horizons,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficient {
    pub k: Vec<i128>,
    pub coef: Complex64,
}

/// F_N at the last checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitFunction {
    /// nonzero coefficients sorted by frequency
    Fourier(Vec<FourierCoefficient>),
    /// values on ℤ/m
    Table(Vec<Complex64>),
}

/// Result of an L² average.
///
/// `trace.values` holds ∫F_N dμ, `trace.l2norms` holds ‖F_N‖₂ and `cauchy`
/// holds ‖F_N − F_{N_last}‖₂. The verdict is the Cauchy rule applied in L².
#[derive(Clone, Debug, PartialEq)]
pub struct L2Average {
    pub trace: AverageTrace,
    pub cauchy: Vec<f64>,
    pub limit: LimitFunction,
}

/// Coefficients of F_N at every checkpoint on a shared key set.
struct Snapshots {
    keys: Vec<Vec<i128>>,
    /// `values[c][i]` is the coefficient of `keys[i]` at checkpoint c
    values: Vec<Vec<Complex64>>,
    /// ‖F‖² = weight · Σ|vᵢ|²
    weight: f64,
    /// index of the key whose coefficient is ∫F dμ, if present
    mean_key: Option<usize>,
    table: bool,
}

impl Snapshots {
    fn distance(&self, a: usize, b: usize) -> f64 {
        let acc: CompensatedSum = self.values[a]
            .iter()
            .zip(&self.values[b])
            .map(|(x, y)| Complex64::new((x - y).norm_sqr(), 0.0))
            .collect();
        (self.weight * acc.value().re).sqrt()
    }

    fn norm(&self, c: usize) -> f64 {
        let acc: CompensatedSum = self.values[c]
            .iter()
            .map(|x| Complex64::new(x.norm_sqr(), 0.0))
            .collect();
        let sq = self.weight * acc.value().re;
        debug_assert!(sq >= 0.0);
        sq.sqrt()
    }

    fn mean(&self, c: usize) -> Complex64 {
        if self.table {
            let acc: CompensatedSum = self.values[c].iter().copied().collect();
            acc.value() * self.weight
        } else {
            self.mean_key
                .map_or(Complex64::new(0.0, 0.0), |i| self.values[c][i])
        }
    }

    fn limit(&self) -> LimitFunction {
        let last = self.values.last().unwrap();
        if self.table {
            LimitFunction::Table(last.clone())
        } else {
            LimitFunction::Fourier(
                self.keys
                    .iter()
                    .zip(last)
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(k, &coef)| FourierCoefficient { k: k.clone(), coef })
                    .collect(),
            )
        }
    }
}

/// F_N = (1/N) Σ_{n=1..N} aₙ ∏ⱼ gⱼ∘S^{pⱼ(n)}, tracked exactly on Fourier data
/// (or on ℤ/m tables) at each checkpoint.
pub fn weighted_poly_average_l2(cfg: &PolyAvgConfig) -> Result<L2Average> {
    if cfg.pairs.is_empty() {
        return Err(invalid(
            "at least one (observable, polynomial) pair is required",
        ));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(invalid("tolerance must be positive"));
    }
    validate_horizons(&cfg.horizons)?;
    cfg.system.validate()?;
    for (g, _) in &cfg.pairs {
        g.check_system(&cfg.system)
            .map_err(|e| Error::NonIntegrable(e.to_string()))?;
    }
    let gs: Vec<&Observable> = cfg.pairs.iter().map(|(g, _)| g).collect();
    let ps: Vec<IntPolynomial> = cfg.pairs.iter().map(|(_, p)| p.clone()).collect();
    let snaps = match &cfg.system {
        DynamicalSystem::CyclicPermutation { modulus } => cyclic(cfg, &gs, &ps, *modulus)?,
        DynamicalSystem::SkewProduct { alpha } => skew(cfg, &gs, &ps, *alpha)?,
        rotation => rotation_snapshots(cfg, &gs, &ps, &rotation.rotation().expect("rotation"))?,
    };

    let n = cfg.horizons.len();
    let last = n - 1;
    let values: Vec<Complex64> = (0..n).map(|c| snaps.mean(c)).collect();
    let l2norms: Vec<f64> = (0..n).map(|c| snaps.norm(c)).collect();
    let cauchy: Vec<f64> = (0..n).map(|c| snaps.distance(c, last)).collect();
    let verdict = l2_verdict(
        &cfg.horizons,
        &cauchy,
        |a, b| snaps.distance(a, b),
        values[last],
        cfg.tol,
    );
    let g_bound: f64 = gs.iter().map(|g| g.sup_bound()).product();
    let mass = cesaro_values(&cfg.weights, &cfg.horizons, SumMode::Modulus);
    let trace = AverageTrace {
        checkpoints: cfg.horizons.clone(),
        values,
        verdict,
        l2norms: Some(l2norms),
        bounds: Some(mass.iter().map(|m| g_bound * m.re).collect()),
    };
    Ok(L2Average {
        trace,
        cauchy,
        limit: snaps.limit(),
    })
}

/// The Cauchy rule with distances measured in L². The reported limit is ∫F dμ
/// at the last checkpoint; the full function is in [`L2Average::limit`].
fn l2_verdict(
    checkpoints: &[u64],
    to_last: &[f64],
    distance: impl Fn(usize, usize) -> f64,
    mean: Complex64,
    tol: f64,
) -> Verdict {
    let chosen = chosen_checkpoints(checkpoints);
    let first = chosen[chosen.len().saturating_sub(3)];
    let radius = to_last[first..].iter().copied().fold(0.0, f64::max);
    if radius <= tol {
        return Verdict::Converged {
            limit: mean,
            radius,
            from: checkpoints[first],
        };
    }
    let tail = &chosen[chosen.len() / 2..];
    let mut spread = 0.0f64;
    for (i, &a) in tail.iter().enumerate() {
        for &b in &tail[i + 1..] {
            spread = spread.max(distance(a, b));
        }
    }
    if spread > 10.0 * tol {
        Verdict::Diverged { gap: spread }
    } else {
        Verdict::Undecided { spread }
    }
}

fn rotation_snapshots(
    cfg: &PolyAvgConfig,
    gs: &[&Observable],
    ps: &[IntPolynomial],
    alpha: &[Turn],
) -> Result<Snapshots> {
    let terms: Vec<&[FourierTerm]> = gs
        .iter()
        .map(|g| fourier_terms(g, "L² averaging"))
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = terms.iter().map(|t| t.len()).collect();
    let mut groups: BTreeMap<Vec<i128>, Vec<(Complex64, Vec<Turn>)>> = BTreeMap::new();
    for t in tuples(&sizes)? {
        let mut total = vec![0i128; alpha.len()];
        let mut coef = Complex64::new(1.0, 0.0);
        let mut rates = Vec::with_capacity(t.len());
        for (j, &i) in t.iter().enumerate() {
            let term = &terms[j][i];
            for (acc, &kk) in total.iter_mut().zip(&term.k) {
                *acc += kk as i128;
            }
            coef *= term.coef;
            rates.push(dot(&term.k, alpha));
        }
        groups
            .entry(total)
            .or_default()
            .push((coef, combined_phase(&rates, ps)));
    }
    let zero = vec![0i128; alpha.len()];
    let mean_key = groups.keys().position(|k| *k == zero);
    let mut values = vec![Vec::with_capacity(groups.len()); cfg.horizons.len()];
    let mut keys = Vec::with_capacity(groups.len());
    for (k, phases) in groups {
        let seq = WeightSequence::product(vec![
            cfg.weights.clone(),
            WeightSequence::new(PhaseSum { terms: phases }, f64::INFINITY, "phases"),
        ]);
        for (c, v) in cesaro_values(&seq, &cfg.horizons, SumMode::Plain)
            .into_iter()
            .enumerate()
        {
            values[c].push(v);
        }
        keys.push(k);
    }
    Ok(Snapshots {
        keys,
        values,
        weight: 1.0,
        mean_key,
        table: false,
    })
}

struct CyclicReadout {
    tables: Vec<Vec<Complex64>>,
    polys: Vec<IntPolynomial>,
    modulus: u64,
    y: u64,
}

impl Generator for CyclicReadout {
    fn value(&self, n: u64) -> Complex64 {
        self.tables
            .iter()
            .zip(&self.polys)
            .fold(Complex64::new(1.0, 0.0), |acc, (t, p)| {
                acc * t[((self.y + p.eval_mod(n as i128, self.modulus)) % self.modulus) as usize]
            })
    }
}

fn cyclic(
    cfg: &PolyAvgConfig,
    gs: &[&Observable],
    ps: &[IntPolynomial],
    modulus: u64,
) -> Result<Snapshots> {
    if modulus as usize > FREQUENCY_CAP {
        return Err(Error::FrequencyCap {
            requested: modulus as usize,
            cap: FREQUENCY_CAP,
        });
    }
    let tables: Vec<Vec<Complex64>> = gs
        .iter()
        .map(|g| match g.representation() {
            Representation::Table(v) => Ok(v.clone()),
            Representation::Fourier { .. } => {
                Err(Error::NonIntegrable("cyclic systems need tables".into()))
            }
        })
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::with_capacity(modulus as usize); cfg.horizons.len()];
    for y in 0..modulus {
        let readout = WeightSequence::new(
            CyclicReadout {
                tables: tables.clone(),
                polys: ps.to_vec(),
                modulus,
                y,
            },
            f64::INFINITY,
            "table readout",
        );
        let seq = WeightSequence::product(vec![cfg.weights.clone(), readout]);
        for (c, v) in cesaro_values(&seq, &cfg.horizons, SumMode::Plain)
            .into_iter()
            .enumerate()
        {
            values[c].push(v);
        }
    }
    Ok(Snapshots {
        keys: (0..modulus as i128).map(|y| vec![y]).collect(),
        values,
        weight: 1.0 / modulus as f64,
        mean_key: None,
        table: true,
    })
}

const SKEW_FREQ_LIMIT: i64 = 1 << 20;

/// Skew product: S^m maps the frequency (k₁, k₂) to (k₁ + m·k₂, k₂), so the
/// support of F_N moves with n and is accumulated sparsely, one n at a time.
fn skew(
    cfg: &PolyAvgConfig,
    gs: &[&Observable],
    ps: &[IntPolynomial],
    alpha: Turn,
) -> Result<Snapshots> {
    let terms: Vec<&[FourierTerm]> = gs
        .iter()
        .map(|g| fourier_terms(g, "L² averaging"))
        .collect::<Result<_>>()?;
    if terms
        .iter()
        .flat_map(|t| t.iter())
        .flat_map(|t| &t.k)
        .any(|k| k.abs() > SKEW_FREQ_LIMIT)
    {
        return Err(invalid(format!(
            "skew-product frequencies are limited to |k| ≤ {SKEW_FREQ_LIMIT}"
        )));
    }
    // keeps every transformed frequency inside i128
    if ps.iter().any(|p| p.magnitude_bound(32) >= 2f64.powi(100)) {
        return Err(invalid(
            "polynomial too large for exact skew-product bookkeeping",
        ));
    }
    let sizes: Vec<usize> = terms.iter().map(|t| t.len()).collect();
    let all = tuples(&sizes)?;
    let horizon = *cfg.horizons.last().unwrap();
    let mut acc: BTreeMap<(i128, i128), CompensatedSum> = BTreeMap::new();
    let mut snapshots: Vec<BTreeMap<(i128, i128), Complex64>> =
        Vec::with_capacity(cfg.horizons.len());
    let mut next = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); BLOCK];
    let mut n = 1u64;
    while n <= horizon {
        let len = ((horizon - n + 1) as usize).min(BLOCK);
        cfg.weights.fill(n, &mut buf[..len]);
        for &a in &buf[..len] {
            let m: Vec<i128> = ps
                .iter()
                .map(|p| p.eval(n as i128))
                .collect::<Result<_>>()?;
            for t in &all {
                let (mut k1, mut k2, mut phase) = (0i128, 0i128, 0u128);
                let mut coef = a;
                for (j, &i) in t.iter().enumerate() {
                    let term = &terms[j][i];
                    let (a1, a2) = (term.k[0] as i128, term.k[1] as i128);
                    k1 += a1 + m[j] * a2;
                    k2 += a2;
                    phase = phase
                        .wrapping_add(a1.wrapping_mul(m[j]) as u128)
                        .wrapping_add((a2 as u128).wrapping_mul(binomial2_wrapping(m[j])));
                    coef *= term.coef;
                }
                acc.entry((k1, k2))
                    .or_default()
                    .add(coef * alpha.mul_wrapping(phase).unit());
            }
            if acc.len() > FREQUENCY_CAP {
                return Err(Error::FrequencyCap {
                    requested: acc.len(),
                    cap: FREQUENCY_CAP,
                });
            }
            if n == cfg.horizons[next] {
                let scale = 1.0 / n as f64;
                snapshots.push(acc.iter().map(|(k, s)| (*k, s.value() * scale)).collect());
                next += 1;
            }
            n += 1;
        }
    }
    let keys: Vec<(i128, i128)> = acc.keys().copied().collect();
    let values = snapshots
        .iter()
        .map(|snap| {
            keys.iter()
                .map(|k| snap.get(k).copied().unwrap_or_default())
                .collect()
        })
        .collect();
    let mean_key = keys.iter().position(|&k| k == (0, 0));
    Ok(Snapshots {
        keys: keys.into_iter().map(|(a, b)| vec![a, b]).collect(),
        values,
        weight: 1.0,
        mean_key,
        table: false,
    })
}
