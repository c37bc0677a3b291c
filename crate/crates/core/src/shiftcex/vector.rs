use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::seq::{CompensatedSum, WeightSequence};
use crate::turn::Turn;

pub const MAX_SUPPORT: usize = 1 << 16;

/// A finitely supported x = (t₁, …, t_J) in ℓ¹. `entries[0]` is t₁.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Vector {
    entries: Vec<Complex64>,
    one_norm: f64,
}

impl L1Vector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_SUPPORT {
            return Err(invalid(format!(
                "support length must be 1..={MAX_SUPPORT}, got {}",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|t| !t.re.is_finite() || !t.im.is_finite())
        {
            return Err(invalid("entries must be finite"));
        }
        let one_norm = entries
            .iter()
            .map(|t| Complex64::new(t.norm(), 0.0))
            .collect::<CompensatedSum>()
            .value()
            .re;
        Ok(L1Vector { entries, one_norm })
    }

    pub fn from_reals(entries: &[f64]) -> Result<Self> {
        L1Vector::new(entries.iter().map(|&t| Complex64::new(t, 0.0)).collect())
    }

    /// The unit vector e_j, j ≥ 1.
    pub fn basis(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(invalid("basis vectors are indexed from 1"));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); j];
        entries[j - 1] = Complex64::new(1.0, 0.0);
        L1Vector::new(entries)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// t_j for j ≥ 1 (zero past the support).
    pub fn get(&self, j: usize) -> Complex64 {
        if j == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.entries.get(j - 1).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn one_norm(&self) -> f64 {
        self.one_norm
    }

    /// Σⱼ tⱼ
    pub fn total(&self) -> Complex64 {
        self.entries
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    /// (λʲ tⱼ)ⱼ
    pub fn modulated(&self, lambda: Turn) -> L1Vector {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, t)| t * lambda.mul_int(i as i128 + 1).unit())
            .collect();
        L1Vector::new(entries).expect("modulation keeps the support")
    }
}

/// The unmodulated part of a functional.
#[derive(Clone, Debug)]
pub enum FunctionalBase {
    Constant(Complex64),
    /// sⱼ = (−1)ᵏ·amplitude on the block growthᵏ ≤ j < growthᵏ⁺¹
    BlockSign {
        amplitude: f64,
        growth: u64,
    },
    Sequence(WeightSequence),
}

/// x′ = (sⱼ)ⱼ in ℓ^∞ with sⱼ = e^{2πijθ}·bⱼ for a base sequence (bⱼ).
#[derive(Clone, Debug)]
pub struct BoundedFunctional {
    base: FunctionalBase,
    modulation: Turn,
    sup_norm: f64,
}

/// Block index k with growthᵏ ≤ j < growthᵏ⁺¹ and the last j of that block.
fn block_of(j: u64, growth: u64) -> (u32, u64) {
    let j = j.max(1);
    if growth == 2 {
        let k = 63 - j.leading_zeros();
        let end = if k >= 63 {
            u64::MAX
        } else {
            (1u64 << (k + 1)) - 1
        };
        return (k, end);
    }
    let (mut k, mut start) = (0u32, 1u64);
    loop {
        match start.checked_mul(growth) {
            Some(next) if next <= j => {
                start = next;
                k += 1;
            }
            Some(next) => return (k, next - 1),
            None => return (k, u64::MAX),
        }
    }
}

impl BoundedFunctional {
    pub fn constant(c: Complex64) -> Self {
        BoundedFunctional {
            base: FunctionalBase::Constant(c),
            modulation: Turn::ZERO,
            sup_norm: c.norm(),
        }
    }

    /// Blocks of length 2ᵏ with alternating signs and sup norm δ.
    pub fn block_sign(amplitude: f64) -> Result<Self> {
        BoundedFunctional::block_sign_with_growth(amplitude, 2)
    }

    pub fn block_sign_with_growth(amplitude: f64, growth: u64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(invalid("block amplitude must be positive and finite"));
        }
        if growth < 2 {
            return Err(invalid("block growth factor must be at least 2"));
        }
        Ok(BoundedFunctional {
            base: FunctionalBase::BlockSign { amplitude, growth },
            modulation: Turn::ZERO,
            sup_norm: amplitude,
        })
    }

    /// sⱼ = seq(j); the sup norm is the sequence's declared bound.
    pub fn from_sequence(seq: WeightSequence) -> Result<Self> {
        let sup_norm = seq.sup_bound();
        if !sup_norm.is_finite() {
            return Err(invalid("functional must have a finite sup bound"));
        }
        Ok(BoundedFunctional {
            base: FunctionalBase::Sequence(seq),
            modulation: Turn::ZERO,
            sup_norm,
        })
    }

    pub fn base(&self) -> &FunctionalBase {
        &self.base
    }

    pub fn modulation(&self) -> Turn {
        self.modulation
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub(crate) fn base_at(&self, j: u64) -> Complex64 {
        match &self.base {
            FunctionalBase::Constant(c) => *c,
            FunctionalBase::BlockSign { amplitude, growth } => {
                let (k, _) = block_of(j, *growth);
                Complex64::new(if k % 2 == 0 { *amplitude } else { -amplitude }, 0.0)
            }
            FunctionalBase::Sequence(seq) => seq.at(j),
        }
    }

    /// Last index of the run of constant base values containing j, when the
    /// base is piecewise constant.
    pub(crate) fn run_end(&self, j: u64) -> Option<u64> {
        match &self.base {
            FunctionalBase::Constant(_) => Some(u64::MAX),
            FunctionalBase::BlockSign { growth, .. } => Some(block_of(j, *growth).1),
            FunctionalBase::Sequence(_) => None,
        }
    }

    /// sⱼ
    pub fn at(&self, j: u64) -> Complex64 {
        let b = self.base_at(j);
        if self.modulation == Turn::ZERO {
            b
        } else {
            b * self.modulation.mul_wrapping(j as u128).unit()
        }
    }

    /// j ↦ sⱼ as a weight sequence.
    pub fn to_sequence(&self) -> WeightSequence {
        let me = self.clone();
        WeightSequence::from_fn("functional", self.sup_norm, move |j| me.at(j))
    }
}

/// j ↦ λʲsⱼ. The sup norm is unchanged.
pub fn rotated_functional(xp: &BoundedFunctional, lambda: Turn) -> BoundedFunctional {
    BoundedFunctional {
        base: xp.base.clone(),
        modulation: xp.modulation + lambda,
        sup_norm: xp.sup_norm,
    }
}
