use num_complex::Complex64;
use serde::Serialize;

use super::vector::L1Vector;
use crate::error::{invalid, Result};
use crate::seq::CompensatedSum;
use crate::turn::Turn;

/// f(rλ̄) = Σⱼ tⱼ (rλ̄)ʲ for f(z) = Σⱼ tⱼ zʲ. r = 1 gives the boundary value
/// of the finite sum.
pub fn radial_eval(x: &L1Vector, r: f64, lambda: Turn) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(invalid(format!("radius must lie in [0, 1], got {r}")));
    }
    let mut acc = CompensatedSum::new();
    let mut rj = 1.0;
    for (i, t) in x.entries().iter().enumerate() {
        rj *= r;
        acc.add(t * rj * lambda.mul_int(-(i as i128 + 1)).unit());
    }
    Ok(acc.value())
}

pub const GRID_BITS: u32 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    /// λ = e^{2πi·index/2^bits}
    pub index: u64,
    pub value: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyScan {
    pub radius: f64,
    pub threshold: f64,
    pub points: Vec<GridPoint>,
    /// indices whose |f(rλ̄)| ≥ threshold
    pub good: Vec<u64>,
}

/// f(rλ̄) on the 2^bits-th roots of unity at r = 1 − 2^−bits.
pub fn hardy_grid_scan(x: &L1Vector, bits: u32, threshold: f64) -> Result<HardyScan> {
    if bits == 0 || bits > 20 {
        return Err(invalid("grid size must be 2^1 ..= 2^20"));
    }
    let size = 1u64 << bits;
    let radius = 1.0 - 1.0 / size as f64;
    let points = (0..size)
        .map(|index| {
            let lambda = Turn::from_ratio(index, size);
            radial_eval(x, radius, lambda).map(|value| GridPoint { index, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let good = points
        .iter()
        .filter(|p| p.value.norm() >= threshold)
        .map(|p| p.index)
        .collect();
    Ok(HardyScan {
        radius,
        threshold,
        points,
        good,
    })
}
