use rayon::prelude::*;
use serde::Serialize;

use super::pointwise::{multiple_rtt_average, RttConfig, Tower};
use crate::error::{invalid, Result};
use crate::seq::{AverageTrace, Verdict, WeightSequence};

pub const MAX_SAMPLED_TOWERS: usize = 10;

/// Verdicts of every (tower, weight) cell on a fixed sample of towers.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub weight_labels: Vec<String>,
    /// `verdicts[t][w]` for tower set t and weight w
    pub verdicts: Vec<Vec<Verdict>>,
    #[serde(skip)]
    pub traces: Vec<Vec<AverageTrace>>,
    /// tower sets whose verdict kind differs across the family
    pub flipped: Vec<usize>,
    pub flip_count: usize,
}

/// Runs every weight of the family against every sampled tower set.
///
/// Only the sampled points are assessed; nothing here certifies that a
/// point lies in a universal full-measure set.
pub fn universal_family_report(
    weights: &[WeightSequence],
    towers: &[Vec<Tower>],
    horizons: &[u64],
    tol: f64,
) -> Result<FamilyReport> {
    if weights.len() < 2 {
        return Err(invalid("a weight family needs at least two sequences"));
    }
    if towers.len() < 2 || towers.len() > MAX_SAMPLED_TOWERS {
        return Err(invalid(format!(
            "sample 2..={MAX_SAMPLED_TOWERS} towers, got {}",
            towers.len()
        )));
    }
    let cells: Vec<(usize, usize)> = (0..towers.len())
        .flat_map(|t| (0..weights.len()).map(move |w| (t, w)))
        .collect();
    let results: Vec<AverageTrace> = cells
        .par_iter()
        .map(|&(t, w)| {
            let cfg = RttConfig {
                weights: weights[w].clone(),
                towers: towers[t].clone(),
                horizons: horizons.to_vec(),
                tol,
            };
            multiple_rtt_average(&cfg)
        })
        .collect::<Result<_>>()?;
    let mut traces: Vec<Vec<AverageTrace>> = vec![Vec::with_capacity(weights.len()); towers.len()];
    for ((t, _), tr) in cells.into_iter().zip(results) {
        traces[t].push(tr);
    }
    let verdicts: Vec<Vec<Verdict>> = traces
        .iter()
        .map(|row| row.iter().map(|tr| tr.verdict).collect())
        .collect();
    let flipped: Vec<usize> = verdicts
        .iter()
        .enumerate()
        .filter(|(_, row)| row.iter().any(|v| v.kind() != row[0].kind()))
        .map(|(t, _)| t)
        .collect();
    Ok(FamilyReport {
        weight_labels: weights.iter().map(|w| w.label().to_string()).collect(),
        verdicts,
        traces,
        flip_count: flipped.len(),
        flipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{DynamicalSystem, Observable, Point};
    use crate::seq::dyadic_horizons;
    use crate::turn::Turn;
    use num_complex::Complex64;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn constant_tower(alpha: f64) -> Vec<Tower> {
        vec![Tower::new(
            DynamicalSystem::circle(Turn::from_f64(alpha)),
            Observable::constant(1, one()),
            Point::torus(&[0.0]),
        )]
    }

    #[test]
    fn trivial_family_converges_everywhere() {
        let w = vec![
            WeightSequence::constant(one()),
            WeightSequence::constant(Complex64::new(0.0, 1.0)),
        ];
        let r = universal_family_report(
            &w,
            &[constant_tower(0.1), constant_tower(0.3)],
            &dyadic_horizons(4, 10),
            1e-3,
        )
        .unwrap();
        assert!(r.verdicts.iter().flatten().all(|v| v.is_converged()));
        assert_eq!(r.flip_count, 0);
    }

    #[test]
    fn oscillating_weight_flips_the_constant_tower() {
        // ±1 on dyadic blocks [2^k, 2^{k+1})
        let blocks = WeightSequence::from_fn("blocks", 1.0, |n| {
            let k = 63 - n.max(1).leading_zeros();
            Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        });
        let w = vec![WeightSequence::constant(one()), blocks];
        let rotating = vec![Tower::new(
            DynamicalSystem::golden_rotation(),
            Observable::character(vec![1]),
            Point::torus(&[0.0]),
        )];
        let r = universal_family_report(
            &w,
            &[constant_tower(0.0), rotating],
            &dyadic_horizons(4, 16),
            1e-3,
        )
        .unwrap();
        assert_eq!(r.flipped, vec![0]);
        assert_eq!(r.verdicts[0][1].kind(), "diverged");
    }

    #[test]
    fn size_limits() {
        let w = vec![WeightSequence::constant(one())];
        assert!(universal_family_report(
            &w,
            &[constant_tower(0.1), constant_tower(0.2)],
            &[4],
            1e-3
        )
        .is_err());
        let w = vec![WeightSequence::constant(one()); 2];
        assert!(universal_family_report(&w, &[constant_tower(0.1)], &[4], 1e-3).is_err());
        let many: Vec<_> = (0..11).map(|i| constant_tower(i as f64 / 11.0)).collect();
        assert!(universal_family_report(&w, &many, &[4], 1e-3).is_err());
    }
}
