//! Finite-dimensional operators with relatively weakly compact orbits.
//!
//! In finite dimension this is power-boundedness with semisimple unimodular
//! spectrum. Operators are carried in spectral normal form; dense matrices
//! enter only through [`validate_rwc`].

pub mod random;
mod spectral;
mod split;
mod validate;

pub use spectral::{
    estimate_power_bound, pairing, CMatrix, CVector, Eigenpair, PowerBound, SpectralOperator,
    VectorPair, MAX_DIM, NORMAL_FORM_TOL,
};
pub use split::{linear_sequence, orbit_norms, structure_split, StructureSplit, COEFFICIENT_FLOOR};
pub use validate::{validate_rwc, CLUSTER_RADIUS, DEFAULT_TOL, GROWTH_THRESHOLD};
