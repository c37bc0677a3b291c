//! The right shift on ℓ¹: a power-bounded operator whose matrix coefficients
//! against suitable bounded functionals are Cesàro divergent.

mod hardy;
mod shift;
mod vector;

pub use hardy::{hardy_grid_scan, radial_eval, GridPoint, HardyScan, GRID_BITS};
pub use shift::{
    cex_bound_check, cex_bound_checks, cex_trace, divergence_witness, shift_sequence, BoundCheck,
    CexRow, DivergenceWitness, BOUND_SLACK, MIN_WITNESS_HORIZON,
};
pub use vector::{rotated_functional, BoundedFunctional, FunctionalBase, L1Vector, MAX_SUPPORT};
