//! Ingesting dense matrices: certify power-boundedness with semisimple
//! unimodular spectrum and produce the spectral normal form.

use nalgebra::Schur;
use num_complex::Complex64;

use super::spectral::{
    estimate_power_bound, frobenius, power_norm, CMatrix, PowerBound, SpectralOperator, MAX_DIM,
};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are treated as one (possibly defective) cluster.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// ‖Tⁿ‖ above this value is reported as a growth witness.
pub const GROWTH_THRESHOLD: f64 = 100.0;

fn growth_witness(t: &CMatrix) -> (u64, f64) {
    let mut last = (1, power_norm(t, 1));
    for k in 1..=6 {
        let n = 10u64.pow(k);
        let norm = power_norm(t, n);
        last = (n, norm);
        if norm.is_nan() || norm > GROWTH_THRESHOLD {
            break;
        }
    }
    last
}

fn clusters(values: &[Complex64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; values.len()];
    for i in 0..values.len() {
        if assigned[i] {
            continue;
        }
        assigned[i] = true;
        let mut group = vec![i];
        let mut cursor = 0;
        while cursor < group.len() {
            let anchor = values[group[cursor]];
            for j in 0..values.len() {
                if !assigned[j] && (values[j] - anchor).norm() <= CLUSTER_RADIUS {
                    assigned[j] = true;
                    group.push(j);
                }
            }
            cursor += 1;
        }
        groups.push(group);
    }
    groups
}

/// Spectral projection onto ker(T − λI) along ran(T − λI), valid when λ is
/// semisimple. Returns `None` if the kernel is smaller than `multiplicity`.
fn semisimple_projection(
    t: &CMatrix,
    lambda: Complex64,
    multiplicity: usize,
    rank_tol: f64,
) -> Option<CMatrix> {
    let dim = t.nrows();
    let shifted = t - CMatrix::identity(dim, dim) * lambda;
    let svd = shifted.svd(true, true);
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let kernel_dim = order
        .iter()
        .filter(|&&i| svd.singular_values[i] <= rank_tol)
        .count();
    if kernel_dim < multiplicity {
        return None;
    }
    let picked = &order[..multiplicity];
    let right = CMatrix::from_fn(dim, multiplicity, |r, c| v_t[(picked[c], r)].conj());
    let left = CMatrix::from_fn(dim, multiplicity, |r, c| u[(r, picked[c])]);
    let gram = left.adjoint() * &right;
    let inv = gram.try_inverse()?;
    Some(right * inv * left.adjoint())
}

/// Validate a dense matrix as an operator with relatively weakly compact
/// orbits and return its spectral normal form.
pub fn validate_rwc(t: &CMatrix, tol: f64) -> Result<SpectralOperator> {
    let dim = t.nrows();
    if dim == 0 || t.ncols() != dim {
        return Err(invalid("operator must be a nonempty square matrix"));
    }
    if dim > MAX_DIM {
        return Err(invalid(format!(
            "dimension {dim} exceeds the cap of {MAX_DIM}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tolerance must be positive"));
    }
    if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("operator has non-finite entries"));
    }
    let eigenvalues: Vec<Complex64> = Schur::new(t.clone())
        .eigenvalues()
        .ok_or(Error::EigenSolver)?
        .iter()
        .copied()
        .collect();

    let rank_tol = 10.0 * tol * frobenius(t).max(1.0);
    let mut eigenpairs = Vec::new();
    let mut stable_radius: f64 = 0.0;
    for group in clusters(&eigenvalues) {
        let mean = group.iter().map(|&i| eigenvalues[i]).sum::<Complex64>() / group.len() as f64;
        let modulus = mean.norm();
        if (modulus - 1.0).abs() <= tol {
            let lambda = mean / modulus;
            match semisimple_projection(t, lambda, group.len(), rank_tol) {
                Some(p) => eigenpairs.push((lambda, p)),
                None => {
                    let (witness_n, witness_norm) = growth_witness(t);
                    return Err(Error::NotPowerBounded {
                        eigenvalue: lambda,
                        witness_n,
                        witness_norm,
                    });
                }
            }
            continue;
        }
        for &i in &group {
            let m = eigenvalues[i].norm();
            if m > 1.0 + tol {
                let (witness_n, witness_norm) = growth_witness(t);
                return Err(Error::SpectralRadius {
                    eigenvalue: eigenvalues[i],
                    modulus: m,
                    witness_n,
                    witness_norm,
                });
            }
            stable_radius = stable_radius.max(m);
        }
    }

    let mut q = CMatrix::identity(dim, dim);
    for (_, p) in &eigenpairs {
        q -= p;
    }
    let stable = t * q;
    let bound = if eigenpairs
        .iter()
        .map(|(_, p)| p.trace().re.round() as usize)
        .sum::<usize>()
        == dim
    {
        PowerBound { c: 0.0, r: 0.0 }
    } else {
        estimate_power_bound(&stable, stable_radius.min(1.0 - tol))
    };
    // the stable block of a fully unimodular operator is numerically tiny, not zero
    let stable = if bound.c == 0.0 {
        CMatrix::zeros(dim, dim)
    } else {
        stable
    };
    SpectralOperator::new(eigenpairs, stable, bound)
}
