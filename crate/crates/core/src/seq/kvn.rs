//! Koopman–von Neumann extraction of a density-one index set along which a
//! Cesàro-null sequence tends to zero.

use num_complex::Complex64;
use serde::Serialize;

use super::sequence::WeightSequence;
use super::summation::{CompensatedSum, BLOCK};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KvnLevel {
    pub epsilon: f64,
    /// First index N with (1/N)Σ_{n≤N}|cₙ| ≤ ε².
    pub start: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    /// Every requested level was reached below the horizon.
    Complete,
    /// Only the first `certified` levels were reached.
    Partial { certified: usize },
}

/// Finite-horizon index set J ⊂ {1..horizon}.
#[derive(Clone, Debug)]
pub struct DensityOneSet {
    members: Vec<bool>,
    pub levels: Vec<KvnLevel>,
    pub certification: Certification,
}

impl DensityOneSet {
    pub fn horizon(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && n <= self.horizon() && self.members[(n - 1) as usize]
    }

    /// #{n ≤ N : n ∈ J} / N.
    pub fn observed_density(&self, n: u64) -> f64 {
        assert!(n >= 1 && n <= self.horizon());
        let count = self.members[..n as usize].iter().filter(|&&m| m).count();
        count as f64 / n as f64
    }

    /// The level governing index n, if n lies beyond the first level start.
    pub fn level_for(&self, n: u64) -> Option<&KvnLevel> {
        self.levels.iter().rev().find(|l| n > l.start)
    }
}

pub fn kvn_extract(seq: &WeightSequence, horizon: u64, levels: &[f64]) -> Result<DensityOneSet> {
    if horizon == 0 {
        return Err(invalid("horizon must be positive"));
    }
    if levels.is_empty() {
        return Err(invalid("at least one threshold level is required"));
    }
    if levels.iter().any(|&e| !e.is_finite() || e <= 0.0) {
        return Err(invalid("thresholds must be positive"));
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("thresholds must be strictly decreasing"));
    }

    let mut moduli = Vec::with_capacity(horizon as usize);
    let mut buf = vec![Complex64::new(0.0, 0.0); BLOCK];
    let mut start = 1u64;
    while start <= horizon {
        let len = BLOCK.min((horizon - start + 1) as usize);
        seq.fill(start, &mut buf[..len]);
        moduli.extend(buf[..len].iter().map(|v| v.norm()));
        start += len as u64;
    }

    let mut found = Vec::new();
    let mut next = 0usize;
    let mut running = CompensatedSum::new();
    for (i, &m) in moduli.iter().enumerate() {
        running.add(Complex64::new(m, 0.0));
        let n = (i + 1) as u64;
        let mean = running.value().re / n as f64;
        while next < levels.len() && mean <= levels[next] * levels[next] {
            found.push(KvnLevel {
                epsilon: levels[next],
                start: n,
            });
            next += 1;
        }
        if next == levels.len() {
            break;
        }
    }

    let certification = if found.len() == levels.len() {
        Certification::Complete
    } else {
        Certification::Partial {
            certified: found.len(),
        }
    };

    let mut members = vec![true; horizon as usize];
    for (k, level) in found.iter().enumerate() {
        let end = found.get(k + 1).map_or(horizon, |l| l.start);
        for n in (level.start + 1)..=end {
            let idx = (n - 1) as usize;
            members[idx] = moduli[idx] <= level.epsilon;
        }
    }

    Ok(DensityOneSet {
        members,
        levels: found,
        certification,
    })
}
