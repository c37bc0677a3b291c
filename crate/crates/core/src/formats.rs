//! JSON exchange formats for operators, systems, observables and points.
//!
//! Complex numbers are written as `{"re": …, "im": …}`. Rotation angles are
//! given in turns, either as a number or as one of the names `"golden"`
//! ((√5 − 1)/2) and `"sqrt2"` (√2 − 1), which map to 128-bit constants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynsys::{DynamicalSystem, FourierTerm, Observable, Point};
use crate::error::{invalid, Result};
use crate::linops::{validate_rwc, CMatrix, PowerBound, SpectralOperator};
use crate::turn::Turn;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(z: JsonComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A complex entry that may also be written as a bare real number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex(JsonComplex),
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex(z) => z.into(),
        }
    }
}

pub type JsonMatrix = Vec<Vec<JsonComplex>>;

fn matrix_from_json(rows: &JsonMatrix, what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("{what} must be a non-empty square matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenpairJson {
    pub re: f64,
    pub im: f64,
    pub projection: JsonMatrix,
}

/// An operator in spectral normal form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub eigenpairs: Vec<EigenpairJson>,
    pub stable: JsonMatrix,
    #[serde(rename = "C")]
    pub c: f64,
    pub r: f64,
}

impl OperatorJson {
    pub fn from_operator(op: &SpectralOperator) -> Self {
        let bound = op.power_bound();
        OperatorJson {
            dim: op.dim(),
            eigenpairs: op
                .eigenpairs()
                .iter()
                .map(|e| EigenpairJson {
                    re: e.value.re,
                    im: e.value.im,
                    projection: matrix_to_json(&e.projection),
                })
                .collect(),
            stable: matrix_to_json(op.stable()),
            c: bound.c,
            r: bound.r,
        }
    }

    pub fn to_operator(&self) -> Result<SpectralOperator> {
        let stable = matrix_from_json(&self.stable, "stable block")?;
        if stable.nrows() != self.dim {
            return Err(invalid(format!(
                "dim is {} but the stable block is {}×{}",
                self.dim,
                stable.nrows(),
                stable.nrows()
            )));
        }
        let pairs = self
            .eigenpairs
            .iter()
            .map(|e| {
                Ok((
                    Complex64::new(e.re, e.im),
                    matrix_from_json(&e.projection, "projection")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SpectralOperator::new(
            pairs,
            stable,
            PowerBound {
                c: self.c,
                r: self.r,
            },
        )
    }
}

/// Either a normal form or a dense matrix to be validated and decomposed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    NormalForm(OperatorJson),
    Dense {
        dense: JsonMatrix,
        #[serde(default)]
        tol: Option<f64>,
    },
}

impl OperatorSpec {
    pub fn to_operator(&self) -> Result<SpectralOperator> {
        match self {
            OperatorSpec::NormalForm(j) => j.to_operator(),
            OperatorSpec::Dense { dense, tol } => validate_rwc(
                &matrix_from_json(dense, "dense operator")?,
                tol.unwrap_or(crate::linops::DEFAULT_TOL),
            ),
        }
    }
}

/// A rotation angle in turns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Turns(f64),
    Named(String),
}

impl Angle {
    pub fn to_turn(&self) -> Result<Turn> {
        match self {
            Angle::Turns(x) if x.is_finite() => Ok(Turn::from_f64(*x)),
            Angle::Turns(x) => Err(invalid(format!("angle {x} is not finite"))),
            Angle::Named(name) => match name.as_str() {
                "golden" => Ok(Turn::GOLDEN),
                "sqrt2" => Ok(Turn::SQRT2_FRAC),
                other => Err(invalid(format!(
                    "unknown named angle {other:?}; use \"golden\" or \"sqrt2\""
                ))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum SystemSpec {
    CircleRotation { alpha: Angle },
    TorusRotation { alpha: Vec<Angle> },
    SkewProduct { alpha: Angle },
    CyclicPermutation { modulus: u64 },
}

impl SystemSpec {
    pub fn to_system(&self) -> Result<DynamicalSystem> {
        let system = match self {
            SystemSpec::CircleRotation { alpha } => DynamicalSystem::CircleRotation {
                alpha: alpha.to_turn()?,
            },
            SystemSpec::TorusRotation { alpha } => DynamicalSystem::TorusRotation {
                alpha: alpha.iter().map(Angle::to_turn).collect::<Result<_>>()?,
            },
            SystemSpec::SkewProduct { alpha } => DynamicalSystem::SkewProduct {
                alpha: alpha.to_turn()?,
            },
            SystemSpec::CyclicPermutation { modulus } => {
                DynamicalSystem::CyclicPermutation { modulus: *modulus }
            }
        };
        system.validate()?;
        Ok(system)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierJson {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Fourier(Vec<FourierJson>),
    Table(Vec<Scalar>),
}

impl ObservableSpec {
    /// The observable on `system` (whose dimension fixes an empty Fourier list).
    pub fn to_observable(&self, system: &DynamicalSystem) -> Result<Observable> {
        let g = match self {
            ObservableSpec::Fourier(terms) => {
                let dim = terms
                    .first()
                    .map_or(system.torus_dim().max(1), |t| t.k.len());
                Observable::fourier(
                    dim,
                    terms
                        .iter()
                        .map(|t| FourierTerm {
                            k: t.k.clone(),
                            coef: Complex64::new(t.re, t.im),
                        })
                        .collect(),
                )?
            }
            ObservableSpec::Table(values) => {
                Observable::table(values.iter().map(|&v| v.into()).collect())?
            }
        };
        g.check_system(system)?;
        Ok(g)
    }
}

/// A torus point in turns or a residue mod m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Torus(Vec<f64>),
    Cyclic(u64),
}

impl PointSpec {
    pub fn to_point(&self, system: &DynamicalSystem) -> Result<Point> {
        let p = match self {
            PointSpec::Torus(c) => Point::torus(c),
            PointSpec::Cyclic(i) => Point::Cyclic(*i),
        };
        system.check_point(&p)?;
        Ok(p)
    }
}

/// The `{system, observable}` document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemObservableJson {
    pub system: SystemSpec,
    pub observable: ObservableSpec,
}

impl SystemObservableJson {
    pub fn resolve(&self) -> Result<(DynamicalSystem, Observable)> {
        let s = self.system.to_system()?;
        let g = self.observable.to_observable(&s)?;
        Ok((s, g))
    }
}
