//! Random operators in spectral normal form, for property tests and
//! sampled experiment families.

use num_complex::Complex64;
use rand::Rng;

use super::spectral::{
    estimate_power_bound, CMatrix, CVector, SpectralOperator, VectorPair, MAX_DIM,
};
use crate::error::{invalid, Result};
use crate::turn::Turn;

#[derive(Clone, Copy, Debug)]
pub struct RandomOperatorSpec {
    pub max_dim: usize,
    pub max_unimodular: usize,
    pub max_stable_radius: f64,
}

impl Default for RandomOperatorSpec {
    fn default() -> Self {
        RandomOperatorSpec {
            max_dim: 8,
            max_unimodular: 4,
            max_stable_radius: 0.9,
        }
    }
}

impl RandomOperatorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_dim == 0 || self.max_dim > MAX_DIM {
            return Err(invalid(format!("max_dim must be 1..={MAX_DIM}")));
        }
        if self.max_unimodular > self.max_dim {
            return Err(invalid("max_unimodular cannot exceed max_dim"));
        }
        if !(0.0..1.0).contains(&self.max_stable_radius) {
            return Err(invalid("max_stable_radius must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// A random operator together with the dense matrix it was built from.
#[derive(Clone, Debug)]
pub struct RandomOperator {
    pub op: SpectralOperator,
    pub dense: CMatrix,
    pub stable_radius: f64,
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| random_complex(rng, 1.0))
}

pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> VectorPair {
    VectorPair::new(random_vector(rng, dim), random_vector(rng, dim))
}

/// T = B·D·B⁻¹ with D = diag(unimodular eigenvalues) ⊕ (upper-triangular stable block).
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, spec: RandomOperatorSpec) -> RandomOperator {
    loop {
        let dim = rng.gen_range(1..=spec.max_dim);
        let distinct = rng.gen_range(0..=spec.max_unimodular.min(dim));
        let mut turns: Vec<Turn> = Vec::new();
        while turns.len() < distinct {
            let t = Turn::from_f64(rng.gen::<f64>());
            if turns.iter().all(|u| u.circle_distance(t) > 1e-3) {
                turns.push(t);
            }
        }
        // multiplicities: each distinct eigenvalue at least once
        let mut mult = vec![1usize; distinct];
        let mut used = distinct;
        while used < dim && distinct > 0 && rng.gen_bool(0.3) {
            let k = rng.gen_range(0..distinct);
            mult[k] += 1;
            used += 1;
        }
        let stable_dim = dim - used;

        let mut d = CMatrix::zeros(dim, dim);
        let mut slots: Vec<(usize, usize)> = Vec::new(); // (eigen index, coordinate)
        let mut coord = 0;
        for (k, &m) in mult.iter().enumerate() {
            for _ in 0..m {
                d[(coord, coord)] = turns[k].unit();
                slots.push((k, coord));
                coord += 1;
            }
        }
        let mut stable_radius: f64 = 0.0;
        for i in coord..dim {
            let radius = rng.gen_range(0.0..=spec.max_stable_radius);
            let angle = Turn::from_f64(rng.gen::<f64>());
            d[(i, i)] = angle.unit() * radius;
            stable_radius = stable_radius.max(radius);
            for j in (i + 1)..dim {
                d[(i, j)] = random_complex(rng, 0.2);
            }
        }

        let b = CMatrix::identity(dim, dim)
            + CMatrix::from_fn(dim, dim, |_, _| random_complex(rng, 0.3));
        let Some(b_inv) = b.clone().try_inverse() else {
            continue;
        };
        let dense = &b * &d * &b_inv;

        let mut eigenpairs = Vec::new();
        for (k, turn) in turns.iter().enumerate() {
            let mut e = CMatrix::zeros(dim, dim);
            for &(owner, c) in &slots {
                if owner == k {
                    e[(c, c)] = Complex64::new(1.0, 0.0);
                }
            }
            eigenpairs.push((turn.unit(), &b * e * &b_inv));
        }
        let mut d_stable = d.clone();
        for &(_, c) in &slots {
            d_stable[(c, c)] = Complex64::new(0.0, 0.0);
        }
        let stable = &b * d_stable * &b_inv;
        let bound = if stable_dim == 0 {
            crate::linops::PowerBound { c: 0.0, r: 0.0 }
        } else {
            estimate_power_bound(&stable, stable_radius)
        };
        let stable = if stable_dim == 0 {
            CMatrix::zeros(dim, dim)
        } else {
            stable
        };
        match SpectralOperator::new(eigenpairs, stable, bound) {
            Ok(op) => {
                return RandomOperator {
                    op,
                    dense,
                    stable_radius,
                }
            }
            Err(_) => continue,
        }
    }
}
