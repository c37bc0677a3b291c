use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::turn::Turn;

pub const MAX_TORUS_DIM: usize = 3;

/// Invertible measure-preserving transformations on 𝕋^d or ℤ/m.
#[derive(Clone, Debug, PartialEq)]
pub enum DynamicalSystem {
    CircleRotation {
        alpha: Turn,
    },
    TorusRotation {
        alpha: Vec<Turn>,
    },
    /// (x, y) ↦ (x + α, y + x)
    SkewProduct {
        alpha: Turn,
    },
    CyclicPermutation {
        modulus: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Point {
    Torus(Vec<Turn>),
    Cyclic(u64),
}

impl Point {
    pub fn torus(coords: &[f64]) -> Point {
        Point::Torus(coords.iter().map(|&c| Turn::from_f64(c)).collect())
    }

    pub fn origin(system: &DynamicalSystem) -> Point {
        match system {
            DynamicalSystem::CyclicPermutation { .. } => Point::Cyclic(0),
            other => Point::Torus(vec![Turn::ZERO; other.torus_dim()]),
        }
    }
}

/// n(n−1)/2 mod 2¹²⁸, exact for every i128 n.
pub(crate) fn binomial2_wrapping(n: i128) -> u128 {
    let (a, b) = if n % 2 == 0 {
        (n / 2, n - 1)
    } else {
        (n, (n - 1) / 2)
    };
    a.wrapping_mul(b) as u128
}

impl DynamicalSystem {
    pub fn circle(alpha: Turn) -> Self {
        DynamicalSystem::CircleRotation { alpha }
    }

    pub fn golden_rotation() -> Self {
        DynamicalSystem::CircleRotation {
            alpha: Turn::GOLDEN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DynamicalSystem::TorusRotation { alpha }
                if alpha.is_empty() || alpha.len() > MAX_TORUS_DIM =>
            {
                Err(invalid(format!(
                    "torus dimension must be 1..={MAX_TORUS_DIM}"
                )))
            }
            DynamicalSystem::CyclicPermutation { modulus: 0 } => {
                Err(invalid("cyclic modulus must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Dimension of the torus (0 for cyclic systems).
    pub fn torus_dim(&self) -> usize {
        match self {
            DynamicalSystem::CircleRotation { .. } => 1,
            DynamicalSystem::TorusRotation { alpha } => alpha.len(),
            DynamicalSystem::SkewProduct { .. } => 2,
            DynamicalSystem::CyclicPermutation { .. } => 0,
        }
    }

    /// Rotation vector for translations of 𝕋^d.
    pub fn rotation(&self) -> Option<Vec<Turn>> {
        match self {
            DynamicalSystem::CircleRotation { alpha } => Some(vec![*alpha]),
            DynamicalSystem::TorusRotation { alpha } => Some(alpha.clone()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DynamicalSystem::CircleRotation { .. } => "circle_rotation",
            DynamicalSystem::TorusRotation { .. } => "torus_rotation",
            DynamicalSystem::SkewProduct { .. } => "skew_product",
            DynamicalSystem::CyclicPermutation { .. } => "cyclic_permutation",
        }
    }

    pub fn check_point(&self, y: &Point) -> Result<()> {
        match (self, y) {
            (DynamicalSystem::CyclicPermutation { modulus }, Point::Cyclic(v)) => {
                if v < modulus {
                    Ok(())
                } else {
                    Err(invalid(format!("point {v} outside ℤ/{modulus}")))
                }
            }
            (DynamicalSystem::CyclicPermutation { .. }, Point::Torus(_)) => {
                Err(invalid("cyclic system needs a cyclic point"))
            }
            (_, Point::Torus(c)) if c.len() == self.torus_dim() => Ok(()),
            (_, Point::Torus(c)) => Err(invalid(format!(
                "point has {} coordinates, system is {}-dimensional",
                c.len(),
                self.torus_dim()
            ))),
            (_, Point::Cyclic(_)) => Err(invalid("torus system needs a torus point")),
        }
    }

    /// Sⁿy for any integer n, in closed form.
    pub fn iterate(&self, y: &Point, n: i128) -> Result<Point> {
        self.check_point(y)?;
        Ok(self.iterate_unchecked(y, n))
    }

    pub(crate) fn iterate_unchecked(&self, y: &Point, n: i128) -> Point {
        match (self, y) {
            (DynamicalSystem::CircleRotation { alpha }, Point::Torus(c)) => {
                Point::Torus(vec![c[0] + alpha.mul_int(n)])
            }
            (DynamicalSystem::TorusRotation { alpha }, Point::Torus(c)) => Point::Torus(
                c.iter()
                    .zip(alpha)
                    .map(|(&ci, a)| ci + a.mul_int(n))
                    .collect(),
            ),
            (DynamicalSystem::SkewProduct { alpha }, Point::Torus(c)) => {
                let x = c[0];
                let y = c[1];
                Point::Torus(vec![
                    x + alpha.mul_int(n),
                    y + x.mul_int(n) + alpha.mul_wrapping(binomial2_wrapping(n)),
                ])
            }
            (DynamicalSystem::CyclicPermutation { modulus }, Point::Cyclic(v)) => {
                let m = *modulus as i128;
                Point::Cyclic(((*v as i128 + n.rem_euclid(m)).rem_euclid(m)) as u64)
            }
            _ => unreachable!("point validated against system"),
        }
    }
}

pub fn iterate(system: &DynamicalSystem, y: &Point, n: i128) -> Result<Point> {
    system.iterate(y, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iterate_is_identity() {
        let s = DynamicalSystem::golden_rotation();
        let y = Point::torus(&[0.3]);
        assert_eq!(s.iterate(&y, 0).unwrap(), y);
    }

    #[test]
    fn skew_two_steps() {
        let alpha = Turn::from_f64(0.1);
        let s = DynamicalSystem::SkewProduct { alpha };
        let origin = Point::torus(&[0.0, 0.0]);
        let closed = s.iterate(&origin, 2).unwrap();
        let one = s.iterate(&origin, 1).unwrap();
        let two = s.iterate(&one, 1).unwrap();
        assert_eq!(closed, two);
        assert_eq!(closed, Point::Torus(vec![alpha.mul_int(2), alpha]));
    }

    #[test]
    fn binomial_matches_direct() {
        for n in -50i128..50 {
            assert_eq!(binomial2_wrapping(n), (n * (n - 1) / 2) as u128);
        }
    }

    #[test]
    fn cyclic_wraps_both_ways() {
        let s = DynamicalSystem::CyclicPermutation { modulus: 4 };
        assert_eq!(s.iterate(&Point::Cyclic(3), 1).unwrap(), Point::Cyclic(0));
        assert_eq!(s.iterate(&Point::Cyclic(0), -1).unwrap(), Point::Cyclic(3));
        assert_eq!(s.iterate(&Point::Cyclic(1), -9).unwrap(), Point::Cyclic(0));
        assert!(s.iterate(&Point::Cyclic(4), 1).is_err());
    }

    #[test]
    fn validation() {
        assert!(DynamicalSystem::TorusRotation {
            alpha: vec![Turn::GOLDEN; 4]
        }
        .validate()
        .is_err());
        assert!(DynamicalSystem::CyclicPermutation { modulus: 0 }
            .validate()
            .is_err());
        assert!(DynamicalSystem::golden_rotation()
            .check_point(&Point::torus(&[0.0, 0.0]))
            .is_err());
    }
}
