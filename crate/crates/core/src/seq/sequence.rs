use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::turn::Turn;

/// Pure, random-access generator of a complex sequence indexed by `n ≥ 0`.
///
/// `fill` is the hot path; implementors that can produce runs cheaply
/// (phase accumulation, incremental operator iteration) should override it.
/// The output of `fill` must depend only on `start` and `out.len()`.
pub trait Generator: Send + Sync {
    fn value(&self, n: u64) -> Complex64;

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.value(start + i as u64);
        }
    }
}

/// A bounded weight sequence (aₙ) with a declared sup-norm bound.
#[derive(Clone)]
pub struct WeightSequence {
    generator: Arc<dyn Generator>,
    sup_bound: f64,
    label: String,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl WeightSequence {
    pub fn new(
        generator: impl Generator + 'static,
        sup_bound: f64,
        label: impl Into<String>,
    ) -> Self {
        WeightSequence {
            generator: Arc::new(generator),
            sup_bound,
            label: label.into(),
        }
    }

    pub fn from_fn<F>(label: impl Into<String>, sup_bound: f64, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        WeightSequence::new(FnGenerator(f), sup_bound, label)
    }

    pub fn constant(c: Complex64) -> Self {
        WeightSequence::new(Constant(c), c.norm(), format!("constant({c})"))
    }

    pub fn zero() -> Self {
        WeightSequence::constant(Complex64::new(0.0, 0.0))
    }

    /// λⁿ with λ = e^{2πiθ}.
    pub fn character(theta: Turn) -> Self {
        WeightSequence::new(
            Character(theta),
            1.0,
            format!("character({})", theta.to_f64()),
        )
    }

    /// rⁿ for a real ratio; the bound is over n ≥ 1.
    pub fn geometric(ratio: f64) -> Self {
        let bound = if ratio.abs() <= 1.0 {
            ratio.abs()
        } else {
            f64::INFINITY
        };
        WeightSequence::new(Geometric(ratio), bound, format!("geometric({ratio})"))
    }

    pub fn at(&self, n: u64) -> Complex64 {
        self.generator.value(n)
    }

    pub fn fill(&self, start: u64, out: &mut [Complex64]) {
        self.generator.fill(start, out)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = bound;
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        WeightSequence {
            generator: Arc::new(Scaled {
                inner: self.clone(),
                c,
            }),
            sup_bound: self.sup_bound * c.norm(),
            label: format!("{c}*{}", self.label),
        }
    }

    pub fn add(&self, other: &WeightSequence) -> Self {
        WeightSequence {
            generator: Arc::new(Sum(self.clone(), other.clone())),
            sup_bound: self.sup_bound + other.sup_bound,
            label: format!("{}+{}", self.label, other.label),
        }
    }

    /// Pointwise product, multiplied left to right in the given order.
    pub fn product(factors: Vec<WeightSequence>) -> Self {
        assert!(!factors.is_empty(), "empty product");
        if factors.len() == 1 {
            return factors.into_iter().next().unwrap();
        }
        let sup_bound = factors.iter().map(|f| f.sup_bound).product();
        let label = factors
            .iter()
            .map(|f| f.label.as_str())
            .collect::<Vec<_>>()
            .join("*");
        WeightSequence {
            generator: Arc::new(Product {
                factors,
                fill_order: None,
            }),
            sup_bound,
            label,
        }
    }

    /// Like [`WeightSequence::product`], but the factor buffers are filled in
    /// `fill_order`. Multiplication still happens in the canonical order.
    pub fn product_with_fill_order(factors: Vec<WeightSequence>, fill_order: Vec<usize>) -> Self {
        assert_eq!(factors.len(), fill_order.len());
        let mut seen = fill_order.clone();
        seen.sort_unstable();
        assert!(
            seen.iter().enumerate().all(|(i, &j)| i == j),
            "fill order must be a permutation"
        );
        let sup_bound = factors.iter().map(|f| f.sup_bound).product();
        let label = factors
            .iter()
            .map(|f| f.label.as_str())
            .collect::<Vec<_>>()
            .join("*");
        WeightSequence {
            generator: Arc::new(Product {
                factors,
                fill_order: Some(fill_order),
            }),
            sup_bound,
            label,
        }
    }

    /// n ↦ |aₙ|.
    pub fn modulus(&self) -> Self {
        WeightSequence {
            generator: Arc::new(Modulus(self.clone())),
            sup_bound: self.sup_bound,
            label: format!("|{}|", self.label),
        }
    }

    /// Sequence shifted by `offset`: n ↦ a_{n+offset}.
    pub fn shifted(&self, offset: u64) -> Self {
        WeightSequence {
            generator: Arc::new(Shifted {
                inner: self.clone(),
                offset,
            }),
            sup_bound: self.sup_bound,
            label: format!("{}[+{offset}]", self.label),
        }
    }
}

struct FnGenerator<F>(F);

impl<F> Generator for FnGenerator<F>
where
    F: Fn(u64) -> Complex64 + Send + Sync,
{
    fn value(&self, n: u64) -> Complex64 {
        (self.0)(n)
    }
}

struct Constant(Complex64);

impl Generator for Constant {
    fn value(&self, _n: u64) -> Complex64 {
        self.0
    }

    fn fill(&self, _start: u64, out: &mut [Complex64]) {
        out.fill(self.0);
    }
}

struct Character(Turn);

impl Generator for Character {
    fn value(&self, n: u64) -> Complex64 {
        self.0.mul_wrapping(n as u128).unit()
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        let mut phase = self.0.mul_wrapping(start as u128);
        for slot in out.iter_mut() {
            *slot = phase.unit();
            phase = phase + self.0;
        }
    }
}

struct Geometric(f64);

impl Generator for Geometric {
    fn value(&self, n: u64) -> Complex64 {
        Complex64::new(self.0.powf(n as f64), 0.0)
    }
}

struct Scaled {
    inner: WeightSequence,
    c: Complex64,
}

impl Generator for Scaled {
    fn value(&self, n: u64) -> Complex64 {
        self.c * self.inner.at(n)
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        self.inner.fill(start, out);
        for v in out.iter_mut() {
            *v *= self.c;
        }
    }
}

struct Sum(WeightSequence, WeightSequence);

impl Generator for Sum {
    fn value(&self, n: u64) -> Complex64 {
        self.0.at(n) + self.1.at(n)
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        self.0.fill(start, out);
        let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
        self.1.fill(start, &mut tmp);
        for (o, t) in out.iter_mut().zip(tmp) {
            *o += t;
        }
    }
}

struct Product {
    factors: Vec<WeightSequence>,
    fill_order: Option<Vec<usize>>,
}

impl Generator for Product {
    fn value(&self, n: u64) -> Complex64 {
        self.factors
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.at(n))
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        let len = out.len();
        let mut buffers = vec![Vec::new(); self.factors.len()];
        let order: Vec<usize> = match &self.fill_order {
            Some(o) => o.clone(),
            None => (0..self.factors.len()).collect(),
        };
        for idx in order {
            let mut buf = vec![Complex64::new(0.0, 0.0); len];
            self.factors[idx].fill(start, &mut buf);
            buffers[idx] = buf;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(1.0, 0.0);
            for buf in &buffers {
                acc *= buf[i];
            }
            *slot = acc;
        }
    }
}

struct Modulus(WeightSequence);

impl Generator for Modulus {
    fn value(&self, n: u64) -> Complex64 {
        Complex64::new(self.0.at(n).norm(), 0.0)
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        self.0.fill(start, out);
        for v in out.iter_mut() {
            *v = Complex64::new(v.norm(), 0.0);
        }
    }
}

struct Shifted {
    inner: WeightSequence,
    offset: u64,
}

impl Generator for Shifted {
    fn value(&self, n: u64) -> Complex64 {
        self.inner.at(n + self.offset)
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        self.inner.fill(start + self.offset, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_fill_matches_value() {
        let seq = WeightSequence::character(Turn::GOLDEN);
        let mut buf = vec![Complex64::new(0.0, 0.0); 300];
        seq.fill(1_000_000, &mut buf);
        for (i, v) in buf.iter().enumerate() {
            assert_eq!(*v, seq.at(1_000_000 + i as u64));
        }
    }

    #[test]
    fn product_fill_order_does_not_change_values() {
        let a = WeightSequence::character(Turn::from_f64(0.1));
        let b = WeightSequence::character(Turn::GOLDEN);
        let c = WeightSequence::geometric(0.5);
        let p = WeightSequence::product(vec![a.clone(), b.clone(), c.clone()]);
        let q = WeightSequence::product_with_fill_order(vec![a, b, c], vec![2, 0, 1]);
        let mut x = vec![Complex64::new(0.0, 0.0); 64];
        let mut y = x.clone();
        p.fill(5, &mut x);
        q.fill(5, &mut y);
        assert_eq!(x, y);
    }

    #[test]
    fn geometric_bound() {
        assert_eq!(WeightSequence::geometric(0.9).sup_bound(), 0.9);
        assert_eq!(WeightSequence::geometric(-0.5).sup_bound(), 0.5);
    }
}
