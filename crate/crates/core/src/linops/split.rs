//! Linear sequences aₙ = ⟨Tⁿx, x′⟩ and their almost-periodic / Cesàro-null split.

use num_complex::Complex64;
use std::sync::Mutex;

use super::spectral::{pairing, CMatrix, CVector, PowerBound, SpectralOperator, VectorPair};
use crate::error::Result;
use crate::seq::{Generator, TrigPolynomial, WeightSequence, BLOCK};
use crate::turn::Turn;

/// Coefficients at or below this modulus are dropped from the trig part.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

/// Iterates of the stable block applied to a vector, cached every `BLOCK`
/// steps so that any window costs at most `BLOCK` extra matrix-vector products.
struct StableOrbit {
    stable: CMatrix,
    cache: Mutex<OrbitCache>,
}

struct OrbitCache {
    /// `states[i]` = S^{i·BLOCK} x_s
    states: Vec<CVector>,
    /// First cache index whose state underflowed to zero.
    vanished: Option<usize>,
}

impl StableOrbit {
    fn new(stable: CMatrix, start: CVector) -> Self {
        let states = vec![start];
        StableOrbit {
            stable,
            cache: Mutex::new(OrbitCache {
                states,
                vanished: None,
            }),
        }
    }

    /// Sⁿ x_s, or `None` once the orbit has underflowed.
    fn state(&self, n: u64) -> Option<CVector> {
        let idx = (n / BLOCK as u64) as usize;
        let base = {
            let mut cache = self.cache.lock().expect("orbit cache poisoned");
            while cache.states.len() <= idx && cache.vanished.is_none() {
                let mut v = cache.states.last().unwrap().clone();
                for _ in 0..BLOCK {
                    v = &self.stable * v;
                }
                if v.iter().all(|z| z.norm() < f64::MIN_POSITIVE) {
                    let at = cache.states.len();
                    cache.vanished = Some(at);
                } else {
                    cache.states.push(v);
                }
            }
            if cache.vanished.is_some_and(|at| idx >= at) {
                return None;
            }
            cache.states[idx].clone()
        };
        let mut v = base;
        for _ in 0..(n % BLOCK as u64) {
            v = &self.stable * v;
        }
        Some(v)
    }
}

struct ResidualGenerator {
    orbit: StableOrbit,
    xprime: CVector,
}

impl Generator for ResidualGenerator {
    fn value(&self, n: u64) -> Complex64 {
        self.orbit
            .state(n)
            .map_or(Complex64::new(0.0, 0.0), |v| pairing(&v, &self.xprime))
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        let Some(mut v) = self.orbit.state(start) else {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        };
        let len = out.len();
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = pairing(&v, &self.xprime);
            if i + 1 < len {
                v = &self.orbit.stable * v;
            }
        }
    }
}

/// aₙ = bₙ + cₙ with (bₙ) a trig polynomial and (cₙ) Cesàro-null.
#[derive(Clone, Debug)]
pub struct StructureSplit {
    pub almost_periodic: TrigPolynomial,
    pub residual: WeightSequence,
    /// Declared decay of the stable block.
    pub bound: PowerBound,
    pub x_norm: f64,
    pub xprime_norm: f64,
}

impl StructureSplit {
    /// C‖x‖‖x′‖ / (N(1 − r)), an upper bound for (1/N)Σ_{n≤N}|cₙ|.
    pub fn residual_mean_bound(&self, n: u64) -> f64 {
        self.bound.c * self.x_norm * self.xprime_norm / (n as f64 * (1.0 - self.bound.r))
    }

    /// sup_{n≥1} |cₙ| ≤ C·r·‖x‖‖x′‖
    pub fn residual_sup_bound(&self) -> f64 {
        self.bound.c * self.bound.r * self.x_norm * self.xprime_norm
    }
}

pub fn structure_split(op: &SpectralOperator, pair: &VectorPair) -> Result<StructureSplit> {
    pair.check_dim(op.dim())?;
    let mut terms: Vec<(Complex64, Turn)> = Vec::new();
    let mut x_s = pair.x.clone();
    for ep in op.eigenpairs() {
        let component = &ep.projection * &pair.x;
        x_s -= &component;
        let coef = pairing(&component, &pair.xprime);
        if coef.norm() > COEFFICIENT_FLOOR {
            terms.push((coef, ep.turn));
        }
    }
    let almost_periodic = TrigPolynomial::from_turns(terms)?;
    let x_norm = pair.x.norm();
    let xprime_norm = pair.xprime.norm();
    let bound = op.power_bound();

    let negligible = x_s.norm() <= COEFFICIENT_FLOOR * x_norm.max(1.0) || bound.c == 0.0;
    let residual = if negligible || xprime_norm == 0.0 {
        WeightSequence::zero().with_label("residual")
    } else {
        let generator = ResidualGenerator {
            orbit: StableOrbit::new(op.stable().clone(), x_s),
            xprime: pair.xprime.clone(),
        };
        WeightSequence::new(
            generator,
            bound.c * bound.r * x_norm * xprime_norm,
            "residual",
        )
    };

    Ok(StructureSplit {
        almost_periodic,
        residual,
        bound,
        x_norm,
        xprime_norm,
    })
}

/// aₙ = ⟨Tⁿx, x′⟩ = Σₖ λₖⁿ⟨Pₖx, x′⟩ + ⟨Sⁿx_s, x′⟩.
pub fn linear_sequence(op: &SpectralOperator, pair: &VectorPair) -> Result<WeightSequence> {
    let split = structure_split(op, pair)?;
    let bound = split.almost_periodic.coefficient_mass() + split.residual_sup_bound();
    Ok(split
        .almost_periodic
        .to_sequence()
        .add(&split.residual)
        .with_sup_bound(bound)
        .with_label("linear"))
}

/// ‖Tⁿx‖ at the requested indices.
pub fn orbit_norms(op: &SpectralOperator, x: &CVector, ns: &[u64]) -> Result<Vec<f64>> {
    VectorPair::new(x.clone(), x.clone()).check_dim(op.dim())?;
    let components: Vec<(Turn, CVector)> = op
        .eigenpairs()
        .iter()
        .map(|ep| (ep.turn, &ep.projection * x))
        .collect();
    let x_s = op.stable_projection() * x;
    let orbit = StableOrbit::new(op.stable().clone(), x_s);
    Ok(ns
        .iter()
        .map(|&n| {
            if n == 0 {
                return x.norm();
            }
            let mut v = orbit.state(n).unwrap_or_else(|| CVector::zeros(op.dim()));
            for (turn, comp) in &components {
                v += comp * turn.mul_wrapping(n as u128).unit();
            }
            v.norm()
        })
        .collect())
}
