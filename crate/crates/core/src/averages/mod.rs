//! Weighted ergodic averages: single and multiple return-time averages along
//! sampled orbits, and L² averages of polynomial correlation products.

mod l2;
mod pointwise;
mod universal;

pub use l2::{
    weighted_poly_average_l2, FourierCoefficient, L2Average, LimitFunction, PolyAvgConfig,
};
pub use pointwise::{
    multiple_rtt_average, multiple_rtt_average_scheduled, weighted_average, RttConfig, Tower,
    MAX_TOWERS,
};
pub use universal::{universal_family_report, FamilyReport, MAX_SAMPLED_TOWERS};
