//! Numerical laboratory for weighted ergodic averages whose weights are
//! linear sequences ⟨Tⁿx, x′⟩.
//!
//! * [`seq`]: weight sequences, Cesàro traces, trig polynomials, KvN sets
//! * [`linops`]: finite-dimensional power-bounded operators and the split
//!   of a linear sequence into almost-periodic and Cesàro-null parts
//! * [`dynsys`]: rotations, skew products, cyclic permutations, observables,
//!   polynomial phases and polynomial correlation sequences
//! * [`averages`]: weighted, multiple return-time and L² polynomial averages
//! * [`shiftcex`]: the right shift on ℓ¹ and its Cesàro-divergent weights

pub mod averages;
pub mod dynsys;
pub mod error;
pub mod formats;
pub mod linops;
pub mod seq;
pub mod shiftcex;
pub mod turn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use seq::{AverageTrace, TrigPolynomial, Verdict, WeightSequence};
pub use turn::Turn;
