use num_complex::Complex64;

use super::system::{DynamicalSystem, Point};
use crate::error::{invalid, Result};
use crate::seq::{Generator, WeightSequence};
use crate::turn::Turn;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    pub k: Vec<i64>,
    pub coef: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// Σ ĉ_k e^{2πi k·y} on 𝕋^dim
    Fourier { dim: usize, terms: Vec<FourierTerm> },
    /// values on ℤ/m
    Table(Vec<Complex64>),
}

/// A bounded observable g with a declared sup bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    repr: Representation,
    sup_bound: f64,
}

/// k·y mod 1
#[inline]
pub(crate) fn dot(k: &[i64], y: &[Turn]) -> Turn {
    k.iter()
        .zip(y)
        .fold(Turn::ZERO, |acc, (&ki, &yi)| acc + yi.mul_int(ki as i128))
}

impl Observable {
    pub fn fourier(dim: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("Fourier observable needs dimension ≥ 1"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.k.len() != dim {
                return Err(invalid(format!(
                    "frequency {:?} does not have {dim} components",
                    t.k
                )));
            }
            if terms[..i].iter().any(|s| s.k == t.k) {
                return Err(invalid(format!("frequency {:?} listed twice", t.k)));
            }
        }
        let sup_bound = terms.iter().map(|t| t.coef.norm()).sum();
        Ok(Observable {
            repr: Representation::Fourier { dim, terms },
            sup_bound,
        })
    }

    /// e^{2πi k·y}
    pub fn character(k: Vec<i64>) -> Self {
        let dim = k.len();
        Observable::fourier(
            dim,
            vec![FourierTerm {
                k,
                coef: Complex64::new(1.0, 0.0),
            }],
        )
        .expect("single term")
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Observable::fourier(
            dim,
            vec![FourierTerm {
                k: vec![0; dim],
                coef: c,
            }],
        )
        .expect("single term")
    }

    pub fn table(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("table observable is empty"));
        }
        let sup_bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Observable {
            repr: Representation::Table(values),
            sup_bound,
        })
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn conj(&self) -> Observable {
        let repr = match &self.repr {
            Representation::Fourier { dim, terms } => Representation::Fourier {
                dim: *dim,
                terms: terms
                    .iter()
                    .map(|t| FourierTerm {
                        k: t.k.iter().map(|&x| -x).collect(),
                        coef: t.coef.conj(),
                    })
                    .collect(),
            },
            Representation::Table(v) => Representation::Table(v.iter().map(|z| z.conj()).collect()),
        };
        Observable {
            repr,
            sup_bound: self.sup_bound,
        }
    }

    /// Whether this observable can be read on the system's state space.
    pub fn check_system(&self, system: &DynamicalSystem) -> Result<()> {
        match (&self.repr, system) {
            (Representation::Table(v), DynamicalSystem::CyclicPermutation { modulus }) => {
                if v.len() as u64 == *modulus {
                    Ok(())
                } else {
                    Err(invalid(format!(
                        "table has {} entries, system is ℤ/{modulus}",
                        v.len()
                    )))
                }
            }
            (Representation::Fourier { dim, .. }, s) if s.torus_dim() == *dim && *dim > 0 => Ok(()),
            (Representation::Fourier { dim, .. }, s) => Err(invalid(format!(
                "{dim}-dimensional Fourier observable on {} system",
                s.name()
            ))),
            (Representation::Table(_), s) => {
                Err(invalid(format!("table observable on {} system", s.name())))
            }
        }
    }

    pub fn eval(&self, y: &Point) -> Result<Complex64> {
        match (&self.repr, y) {
            (Representation::Fourier { dim, terms }, Point::Torus(c)) if c.len() == *dim => {
                Ok(terms.iter().map(|t| t.coef * dot(&t.k, c).unit()).sum())
            }
            (Representation::Table(v), Point::Cyclic(i)) if (*i as usize) < v.len() => {
                Ok(v[*i as usize])
            }
            _ => Err(invalid("point does not match observable representation")),
        }
    }
}

/// n ↦ g(Sⁿy)
struct OrbitReadout {
    system: DynamicalSystem,
    observable: Observable,
    point: Point,
    /// For rotations: (coefficient, k·y, k·α) per Fourier term.
    phases: Option<Vec<(Complex64, Turn, Turn)>>,
}

impl Generator for OrbitReadout {
    fn value(&self, n: u64) -> Complex64 {
        if let Some(phases) = &self.phases {
            return phases
                .iter()
                .map(|(c, base, rate)| c * (*base + rate.mul_wrapping(n as u128)).unit())
                .sum();
        }
        let p = self.system.iterate_unchecked(&self.point, n as i128);
        self.observable.eval(&p).expect("validated readout")
    }

    fn fill(&self, start: u64, out: &mut [Complex64]) {
        match &self.phases {
            Some(phases) => {
                out.fill(Complex64::new(0.0, 0.0));
                for (c, base, rate) in phases {
                    let mut phase = *base + rate.mul_wrapping(start as u128);
                    for slot in out.iter_mut() {
                        *slot += c * phase.unit();
                        phase = phase + *rate;
                    }
                }
            }
            None => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = self.value(start + i as u64);
                }
            }
        }
    }
}

/// The sequence (g(Sⁿy))ₙ as a weight sequence.
pub fn orbit_sequence(
    system: &DynamicalSystem,
    g: &Observable,
    y: &Point,
) -> Result<WeightSequence> {
    system.validate()?;
    system.check_point(y)?;
    g.check_system(system)?;
    let phases = match (system.rotation(), g.representation(), y) {
        (Some(alpha), Representation::Fourier { terms, .. }, Point::Torus(c)) => Some(
            terms
                .iter()
                .map(|t| (t.coef, dot(&t.k, c), dot(&t.k, &alpha)))
                .collect(),
        ),
        _ => None,
    };
    let label = format!("g(S^n y) on {}", system.name());
    Ok(WeightSequence::new(
        OrbitReadout {
            system: system.clone(),
            observable: g.clone(),
            point: y.clone(),
            phases,
        },
        g.sup_bound(),
        label,
    ))
}

/// g(Sⁿy) for each requested n (negative n allowed).
pub fn observe_orbit(
    system: &DynamicalSystem,
    g: &Observable,
    y: &Point,
    indices: &[i64],
) -> Result<Vec<Complex64>> {
    system.validate()?;
    system.check_point(y)?;
    g.check_system(system)?;
    indices
        .iter()
        .map(|&n| g.eval(&system.iterate_unchecked(y, n as i128)))
        .collect()
}

/// Average of f over a uniform grid with `resolution` points per torus axis
/// (exact for trig polynomials with |kᵢ| < resolution), or over all of ℤ/m.
pub fn quadrature<F>(system: &DynamicalSystem, resolution: u64, f: F) -> Complex64
where
    F: Fn(&Point) -> Complex64,
{
    match system {
        DynamicalSystem::CyclicPermutation { modulus } => {
            (0..*modulus)
                .map(|i| f(&Point::Cyclic(i)))
                .sum::<Complex64>()
                / *modulus as f64
        }
        other => {
            let d = other.torus_dim();
            let total = resolution.pow(d as u32);
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in 0..total {
                let mut rest = idx;
                let coords = (0..d)
                    .map(|_| {
                        let c = rest % resolution;
                        rest /= resolution;
                        Turn::from_ratio(c, resolution)
                    })
                    .collect();
                acc += f(&Point::Torus(coords));
            }
            acc / total as f64
        }
    }
}
