use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turn::Turn;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const MAX_DIM: usize = 64;
/// Tolerance for the normal-form identities (idempotence, annihilation).
pub const NORMAL_FORM_TOL: f64 = 1e-10;

/// Declared decay ‖Sⁿ‖ ≤ C·rⁿ (n ≥ 1) of the stable block, in operator 2-norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBound {
    pub c: f64,
    pub r: f64,
}

impl PowerBound {
    pub fn at(&self, n: u64) -> f64 {
        self.c * self.r.powf(n as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub value: Complex64,
    pub turn: Turn,
    pub projection: CMatrix,
}

/// A finite-dimensional operator with relatively weakly compact orbits, kept in
/// spectral normal form T = Σₖ λₖPₖ + S with |λₖ| = 1 and S = T(I − ΣPₖ) stable.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    dim: usize,
    eigenpairs: Vec<Eigenpair>,
    stable: CMatrix,
    bound: PowerBound,
    basis_residual: f64,
}

/// The pairing ⟨u, x′⟩ = Σ uᵢ·conj(x′ᵢ).
pub fn pairing(u: &CVector, xprime: &CVector) -> Complex64 {
    xprime.dotc(u)
}

pub(crate) fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn matrix_power(m: &CMatrix, mut n: u64) -> CMatrix {
    let mut result = CMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

pub(crate) fn power_norm(m: &CMatrix, n: u64) -> f64 {
    op_norm(&matrix_power(m, n))
}

impl SpectralOperator {
    pub fn new(
        eigenpairs: Vec<(Complex64, CMatrix)>,
        stable: CMatrix,
        bound: PowerBound,
    ) -> Result<Self> {
        let dim = stable.nrows();
        let bad = |msg: String| Error::BadNormalForm(msg);
        if dim == 0 || dim > MAX_DIM || stable.ncols() != dim {
            return Err(bad(format!(
                "stable block must be square with 1 ≤ dim ≤ {MAX_DIM}"
            )));
        }
        if !(bound.c >= 0.0 && bound.r >= 0.0 && bound.r < 1.0) {
            return Err(bad(format!(
                "power bound needs C ≥ 0 and 0 ≤ r < 1, got {bound:?}"
            )));
        }
        let mut pairs = Vec::with_capacity(eigenpairs.len());
        for (value, projection) in eigenpairs {
            if projection.nrows() != dim || projection.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: projection.nrows(),
                });
            }
            let modulus = value.norm();
            if (modulus - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnimodular { value, modulus });
            }
            pairs.push(Eigenpair {
                value,
                turn: Turn::from_arg(value),
                projection,
            });
        }
        for (i, a) in pairs.iter().enumerate() {
            for b in &pairs[i + 1..] {
                if (a.value - b.value).norm() <= 1e-12 {
                    return Err(Error::DuplicateFrequency {
                        first: a.value,
                        second: b.value,
                    });
                }
            }
        }

        let id = CMatrix::identity(dim, dim);
        for (i, p) in pairs.iter().enumerate() {
            let scale = frobenius(&p.projection).powi(2).max(1.0);
            let idem = frobenius(&(&p.projection * &p.projection - &p.projection));
            if idem > NORMAL_FORM_TOL * scale {
                return Err(bad(format!(
                    "projection {i} is not idempotent (residual {idem:.3e})"
                )));
            }
            for (j, q) in pairs.iter().enumerate() {
                if i != j {
                    let cross = frobenius(&(&p.projection * &q.projection));
                    let scale = (frobenius(&p.projection) * frobenius(&q.projection)).max(1.0);
                    if cross > NORMAL_FORM_TOL * scale {
                        return Err(bad(format!(
                            "projections {i} and {j} do not annihilate (residual {cross:.3e})"
                        )));
                    }
                }
            }
        }

        let mut spectral_sum = CMatrix::zeros(dim, dim);
        for p in &pairs {
            spectral_sum += &p.projection;
        }
        let q = &id - &spectral_sum;
        let s_scale = (frobenius(&stable) * frobenius(&spectral_sum)).max(1.0);
        let basis_residual = [
            frobenius(&(&q * &q - &q)) / frobenius(&q).powi(2).max(1.0),
            frobenius(&(&stable * &spectral_sum)) / s_scale,
            frobenius(&(&spectral_sum * &stable)) / s_scale,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if basis_residual > NORMAL_FORM_TOL {
            return Err(bad(format!(
                "stable block does not live on the complement of the eigenprojections (residual {basis_residual:.3e})"
            )));
        }

        for n in [1u64, 8, 64] {
            let norm = power_norm(&stable, n);
            let allowed = bound.at(n) * (1.0 + 1e-9) + 1e-12;
            if norm > allowed {
                return Err(bad(format!(
                    "declared decay violated: ||S^{n}|| = {norm:.6e} > C r^{n} = {:.6e}",
                    bound.at(n)
                )));
            }
        }

        Ok(SpectralOperator {
            dim,
            eigenpairs: pairs,
            stable,
            bound,
            basis_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenpairs(&self) -> &[Eigenpair] {
        &self.eigenpairs
    }

    pub fn stable(&self) -> &CMatrix {
        &self.stable
    }

    pub fn power_bound(&self) -> PowerBound {
        self.bound
    }

    pub fn basis_residual(&self) -> f64 {
        self.basis_residual
    }

    /// I − Σ Pₖ
    pub fn stable_projection(&self) -> CMatrix {
        let mut q = CMatrix::identity(self.dim, self.dim);
        for p in &self.eigenpairs {
            q -= &p.projection;
        }
        q
    }

    /// Σ λₖPₖ + S
    pub fn dense(&self) -> CMatrix {
        let mut t = self.stable.clone();
        for p in &self.eigenpairs {
            t += &p.projection * p.value;
        }
        t
    }

    /// Upper bound for supₙ‖Tⁿ‖ (n ≥ 1).
    pub fn power_bound_total(&self) -> f64 {
        self.eigenpairs
            .iter()
            .map(|p| op_norm(&p.projection))
            .sum::<f64>()
            + self.bound.c * self.bound.r
    }
}

/// The vectors x ∈ X, x′ ∈ X′ defining a linear sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPair {
    pub x: CVector,
    pub xprime: CVector,
}

impl VectorPair {
    pub fn new(x: CVector, xprime: CVector) -> Self {
        VectorPair { x, xprime }
    }

    pub fn from_slices(x: &[Complex64], xprime: &[Complex64]) -> Self {
        VectorPair {
            x: CVector::from_column_slice(x),
            xprime: CVector::from_column_slice(xprime),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        for found in [self.x.len(), self.xprime.len()] {
            if found != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found,
                });
            }
        }
        Ok(())
    }
}

/// Estimate (C, r) with ‖Sⁿ‖ ≤ C·rⁿ for n ≥ 1, given the spectral radius ρ < 1 of S.
///
/// r is placed a tenth of the way from ρ to 1 and C is the largest observed
/// ‖Sⁿ‖_F / rⁿ, scanned until the ratio has decayed by three orders of
/// magnitude from its peak (at most 20 000 powers). The Frobenius norm
/// dominates the operator norm.
pub fn estimate_power_bound(stable: &CMatrix, rho: f64) -> PowerBound {
    assert!(rho < 1.0, "stable block must have spectral radius < 1");
    if frobenius(stable) == 0.0 {
        return PowerBound { c: 0.0, r: 0.0 };
    }
    let r = rho.max(0.0) + 0.1 * (1.0 - rho.max(0.0));
    let ln_r = r.ln();
    let mut power = stable.clone();
    let mut best = f64::NEG_INFINITY;
    for n in 1..=20_000u64 {
        let norm = frobenius(&power);
        if norm == 0.0 {
            break;
        }
        let ln_ratio = norm.ln() - n as f64 * ln_r;
        best = best.max(ln_ratio);
        if n >= 64 && ln_ratio < best - 3.0 * std::f64::consts::LN_10 {
            break;
        }
        power = &power * stable;
    }
    PowerBound {
        c: best.exp() * (1.0 + 1e-12),
        r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&e| c(e)),
        ))
    }

    #[test]
    fn diagonal_normal_form() {
        let p = diag(&[1.0, 0.0]);
        let s = diag(&[0.0, 0.5]);
        let op =
            SpectralOperator::new(vec![(c(1.0), p)], s, PowerBound { c: 1.0, r: 0.5 }).unwrap();
        assert_eq!(op.dense(), diag(&[1.0, 0.5]));
        assert_eq!(op.stable_projection(), diag(&[0.0, 1.0]));
        assert_eq!(op.basis_residual(), 0.0);
    }

    #[test]
    fn rejects_overlapping_projections() {
        let p = diag(&[1.0, 0.0]);
        let err = SpectralOperator::new(
            vec![(c(1.0), p.clone()), (c(-1.0), p)],
            CMatrix::zeros(2, 2),
            PowerBound { c: 0.0, r: 0.0 },
        );
        assert!(matches!(err, Err(Error::BadNormalForm(_))));
    }

    #[test]
    fn rejects_false_decay_claim() {
        let err = SpectralOperator::new(vec![], diag(&[0.9]), PowerBound { c: 1.0, r: 0.5 });
        assert!(matches!(err, Err(Error::BadNormalForm(_))));
    }

    #[test]
    fn power_bound_estimate_covers_jordan_stable_block() {
        let mut s = diag(&[0.5, 0.5]);
        s[(0, 1)] = c(3.0);
        let b = estimate_power_bound(&s, 0.5);
        for n in 1..400u64 {
            assert!(power_norm(&s, n) <= b.at(n) * (1.0 + 1e-9), "n = {n}");
        }
    }
}
