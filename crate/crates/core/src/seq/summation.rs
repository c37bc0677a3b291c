//! Deterministic compensated summation.
//!
//! Indices `1..=N` are cut into fixed blocks of [`BLOCK`] terms. Each block is
//! summed sequentially with Neumaier compensation; block partials are then
//! combined by a fixed binary tree. The block layout never depends on the
//! thread count, so results are bit-identical for any rayon pool size.

use num_complex::Complex64;
use rayon::prelude::*;

use super::sequence::WeightSequence;

pub const BLOCK: usize = 1 << 10;

/// Double-double style accumulator for complex values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    hi: Complex64,
    lo: Complex64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        let (re, e_re) = two_sum(self.hi.re, v.re);
        let (im, e_im) = two_sum(self.hi.im, v.im);
        self.hi = Complex64::new(re, im);
        self.lo += Complex64::new(e_re, e_im);
    }

    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        let (re, e_re) = two_sum(self.hi.re, other.hi.re);
        let (im, e_im) = two_sum(self.hi.im, other.hi.im);
        self.hi = Complex64::new(re, im);
        self.lo += other.lo + Complex64::new(e_re, e_im);
    }

    pub fn value(&self) -> Complex64 {
        self.hi + self.lo
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// What is being summed: the terms or their moduli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SumMode {
    #[default]
    Plain,
    Modulus,
}

fn sum_block(seq: &WeightSequence, start: u64, len: usize, mode: SumMode) -> CompensatedSum {
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    seq.fill(start, &mut buf);
    match mode {
        SumMode::Plain => buf.into_iter().collect(),
        SumMode::Modulus => buf
            .into_iter()
            .map(|v| Complex64::new(v.norm(), 0.0))
            .collect(),
    }
}

/// Prefix sums Σ_{n=1..N} of a sequence, answerable for any N ≤ `n_max`.
pub struct PrefixSums {
    seq: WeightSequence,
    mode: SumMode,
    n_max: u64,
    /// `levels[k][i]` is the sum of blocks `i·2^k .. (i+1)·2^k`.
    levels: Vec<Vec<CompensatedSum>>,
}

impl PrefixSums {
    pub fn build(seq: &WeightSequence, n_max: u64, mode: SumMode) -> Self {
        let full_blocks = (n_max / BLOCK as u64) as usize;
        let base: Vec<CompensatedSum> = (0..full_blocks)
            .into_par_iter()
            .map(|b| sum_block(seq, 1 + (b * BLOCK) as u64, BLOCK, mode))
            .collect();
        let mut levels = vec![base];
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next: Vec<CompensatedSum> = prev
                .chunks_exact(2)
                .map(|pair| {
                    let mut acc = pair[0];
                    acc.merge(&pair[1]);
                    acc
                })
                .collect();
            levels.push(next);
        }
        PrefixSums {
            seq: seq.clone(),
            mode,
            n_max,
            levels,
        }
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Σ_{n=1..N}.
    pub fn sum_to(&self, n: u64) -> CompensatedSum {
        assert!(
            n <= self.n_max,
            "prefix {n} beyond built range {}",
            self.n_max
        );
        let blocks = (n / BLOCK as u64) as usize;
        let mut acc = CompensatedSum::new();
        let mut offset = 0usize;
        for k in (0..self.levels.len()).rev() {
            let width = 1usize << k;
            if blocks - offset >= width {
                acc.merge(&self.levels[k][offset >> k]);
                offset += width;
            }
        }
        debug_assert_eq!(offset, blocks);
        let rem = (n % BLOCK as u64) as usize;
        if rem > 0 {
            let tail = sum_block(&self.seq, 1 + (blocks * BLOCK) as u64, rem, self.mode);
            acc.merge(&tail);
        }
        acc
    }
}

/// Σ_{n=1..N} aₙ through the block/tree pipeline.
pub fn deterministic_sum(seq: &WeightSequence, n: u64, mode: SumMode) -> Complex64 {
    PrefixSums::build(seq, n, mode).sum_to(n).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turn::Turn;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(Complex64::new(1e16, 0.0));
        for _ in 0..1000 {
            acc.add(Complex64::new(1.0, 0.0));
        }
        acc.add(Complex64::new(-1e16, 0.0));
        assert_eq!(acc.value().re, 1000.0);
    }

    #[test]
    fn prefix_queries_match_serial() {
        let seq = WeightSequence::character(Turn::from_f64(0.3));
        let prefix = PrefixSums::build(&seq, 10_000, SumMode::Plain);
        for n in [1u64, 2, 1023, 1024, 1025, 4096, 5000, 9999, 10_000] {
            let serial: CompensatedSum = (1..=n).map(|k| seq.at(k)).collect();
            assert!(
                (prefix.sum_to(n).value() - serial.value()).norm() < 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let seq = WeightSequence::character(Turn::GOLDEN);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| deterministic_sum(&seq, 300_000, SumMode::Plain))
        };
        let one = run(1);
        let many = run(8);
        assert_eq!(one.re.to_bits(), many.re.to_bits());
        assert_eq!(one.im.to_bits(), many.im.to_bits());
    }
}
