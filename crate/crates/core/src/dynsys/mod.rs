//! Concrete invertible measure-preserving systems on tori and cyclic groups,
//! observables, integer polynomials, polynomial phases and correlation
//! sequences.

mod correlation;
mod observable;
mod poly;
mod system;

pub use correlation::{correlation_sequence, FREQUENCY_CAP};
pub use observable::{
    observe_orbit, orbit_sequence, quadrature, FourierTerm, Observable, Representation,
};
pub use poly::{poly_eval, polyphase_weight, IntPolynomial, MAX_INT_DEGREE, MAX_PHASE_DEGREE};
pub use system::{iterate, DynamicalSystem, Point, MAX_TORUS_DIM};

pub(crate) use correlation::{combined_phase, fourier_terms, tuples};
pub(crate) use observable::dot;
pub(crate) use poly::PhaseSum;
pub(crate) use system::binomial2_wrapping;
