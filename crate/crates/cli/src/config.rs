//! Experiment configuration schema. Parsing rejects unknown fields; semantic
//! checks happen when the payload is resolved into library types.

use std::path::Path;

use goodweights::averages::Tower;
use goodweights::dynsys::{correlation_sequence, orbit_sequence, polyphase_weight, IntPolynomial};
use goodweights::formats::{Angle, ObservableSpec, OperatorSpec, PointSpec, Scalar, SystemSpec};
use goodweights::linops::random::{random_operator, random_pair, RandomOperatorSpec};
use goodweights::linops::{linear_sequence, structure_split, SpectralOperator, VectorPair};
use goodweights::shiftcex::{rotated_functional, shift_sequence, BoundedFunctional, L1Vector};
use goodweights::{Complex64, Error, Result, WeightSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::RunError;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Decompose(DecomposeConfig),
    Average(AverageConfig),
    Rtt(RttJson),
    Poly(PolyJson),
    Cex(CexConfig),
    Kvn(KvnConfig),
    UniversalReport(UniversalConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Decompose(_) => "decompose",
            ExperimentConfig::Average(_) => "average",
            ExperimentConfig::Rtt(_) => "rtt",
            ExperimentConfig::Poly(_) => "poly",
            ExperimentConfig::Cex(_) => "cex",
            ExperimentConfig::Kvn(_) => "kvn",
            ExperimentConfig::UniversalReport(_) => "universal-report",
        }
    }

    pub fn seed(&self) -> u64 {
        let seed = match self {
            ExperimentConfig::Decompose(c) => c.seed,
            ExperimentConfig::Average(c) => c.seed,
            ExperimentConfig::Rtt(c) => c.seed,
            ExperimentConfig::Poly(c) => c.seed,
            ExperimentConfig::Cex(c) => c.seed,
            ExperimentConfig::Kvn(c) => c.seed,
            ExperimentConfig::UniversalReport(c) => c.seed,
        };
        seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> std::result::Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Checkpoints, either listed or as the dyadic range 2^lo ..= 2^hi.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Horizons {
    List(Vec<u64>),
    Dyadic { dyadic: [u32; 2] },
}

impl Horizons {
    pub fn resolve(&self, cap: Option<u64>) -> Result<Vec<u64>> {
        let mut h = match self {
            Horizons::List(v) => v.clone(),
            Horizons::Dyadic { dyadic: [lo, hi] } => {
                if lo > hi || *hi > 32 {
                    return Err(Error::InvalidInput(format!(
                        "dyadic range [{lo}, {hi}] must satisfy lo ≤ hi ≤ 32"
                    )));
                }
                goodweights::seq::dyadic_horizons(*lo, *hi)
            }
        };
        if let Some(n) = cap {
            h.retain(|&m| m < n);
            h.push(n);
        }
        goodweights::seq::validate_horizons(&h)?;
        Ok(h)
    }
}

/// 2⁴ ..= 2²⁰
fn pointwise_horizons() -> Horizons {
    Horizons::Dyadic { dyadic: [4, 20] }
}

/// 2⁴ ..= 2¹⁶
fn l2_horizons() -> Horizons {
    Horizons::Dyadic { dyadic: [4, 16] }
}

fn complexes(v: &[Scalar]) -> Vec<Complex64> {
    v.iter().map(|&s| s.into()).collect()
}

/// Operator input: a normal form, a dense matrix, or a seeded random draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorInput {
    Random { random: RandomOperatorJson },
    Given(OperatorSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomOperatorJson {
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_max_unimodular")]
    pub max_unimodular: usize,
    #[serde(default = "default_stable_radius")]
    pub max_stable_radius: f64,
}

fn default_max_dim() -> usize {
    8
}
fn default_max_unimodular() -> usize {
    4
}
fn default_stable_radius() -> f64 {
    0.9
}

/// A linear sequence ⟨Tⁿx, x′⟩; x and x′ are drawn from the seed when absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearJson {
    pub operator: OperatorInput,
    #[serde(default)]
    pub x: Option<Vec<Scalar>>,
    #[serde(default)]
    pub xprime: Option<Vec<Scalar>>,
}

impl LinearJson {
    pub fn resolve(&self, rng: &mut ChaCha8Rng) -> Result<(SpectralOperator, VectorPair)> {
        let op = match &self.operator {
            OperatorInput::Random { random } => {
                let spec = RandomOperatorSpec {
                    max_dim: random.max_dim,
                    max_unimodular: random.max_unimodular,
                    max_stable_radius: random.max_stable_radius,
                };
                spec.validate()?;
                random_operator(rng, spec).op
            }
            OperatorInput::Given(spec) => spec.to_operator()?,
        };
        let drawn = random_pair(rng, op.dim());
        let x = self
            .x
            .as_deref()
            .map(complexes)
            .unwrap_or_else(|| drawn.x.iter().copied().collect());
        let xp = self
            .xprime
            .as_deref()
            .map(complexes)
            .unwrap_or_else(|| drawn.xprime.iter().copied().collect());
        let pair = VectorPair::from_slices(&x, &xp);
        pair.check_dim(op.dim())?;
        Ok((op, pair))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalSpec {
    Constant {
        value: Scalar,
        #[serde(default)]
        rotate: Option<Angle>,
    },
    BlockSign {
        amplitude: f64,
        #[serde(default = "default_growth")]
        growth: u64,
        #[serde(default)]
        rotate: Option<Angle>,
    },
    Weight {
        weight: Box<WeightSpec>,
        #[serde(default)]
        rotate: Option<Angle>,
    },
}

fn default_growth() -> u64 {
    2
}

impl FunctionalSpec {
    pub fn resolve(&self, rng: &mut ChaCha8Rng) -> Result<BoundedFunctional> {
        let (base, rotate) = match self {
            FunctionalSpec::Constant { value, rotate } => {
                (BoundedFunctional::constant((*value).into()), rotate)
            }
            FunctionalSpec::BlockSign {
                amplitude,
                growth,
                rotate,
            } => (
                BoundedFunctional::block_sign_with_growth(*amplitude, *growth)?,
                rotate,
            ),
            FunctionalSpec::Weight { weight, rotate } => (
                BoundedFunctional::from_sequence(weight.resolve(rng)?)?,
                rotate,
            ),
        };
        Ok(match rotate {
            Some(a) => rotated_functional(&base, a.to_turn()?),
            None => base,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationPair {
    pub observable: ObservableSpec,
    pub poly: Vec<i64>,
}

/// Weight sequence families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        value: Scalar,
    },
    /// e^{2πinβ}
    Character {
        beta: Angle,
    },
    /// rⁿ
    Geometric {
        ratio: f64,
    },
    /// e^{2πi p(n)} with p given by coefficients in turns
    Polyphase {
        coeffs: Vec<Angle>,
    },
    /// ⟨Tⁿx, x′⟩
    Linear(LinearJson),
    /// the almost-periodic part of ⟨Tⁿx, x′⟩
    AlmostPeriodic(LinearJson),
    /// the Cesàro-null part of ⟨Tⁿx, x′⟩
    Residual(LinearJson),
    /// g(Sⁿy)
    Orbit {
        system: SystemSpec,
        observable: ObservableSpec,
        point: PointSpec,
    },
    /// ∫ Π S^{pⱼ(n)}gⱼ dμ
    Correlation {
        system: SystemSpec,
        pairs: Vec<CorrelationPair>,
    },
    /// Σⱼ tⱼ s_{n+j} for the right shift on ℓ¹
    ShiftPairing {
        x: Vec<Scalar>,
        functional: FunctionalSpec,
    },
    /// j ↦ sⱼ itself
    Functional {
        functional: FunctionalSpec,
    },
    /// 1 on perfect squares, 0 elsewhere
    SquareIndicator,
    Product {
        factors: Vec<WeightSpec>,
    },
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s.checked_mul(s) == Some(n))
}

impl WeightSpec {
    pub fn resolve(&self, rng: &mut ChaCha8Rng) -> Result<WeightSequence> {
        Ok(match self {
            WeightSpec::Constant { value } => WeightSequence::constant((*value).into()),
            WeightSpec::Character { beta } => WeightSequence::character(beta.to_turn()?),
            WeightSpec::Geometric { ratio } => {
                if !ratio.is_finite() || ratio.abs() > 1.0 {
                    return Err(Error::InvalidInput(format!(
                        "geometric ratio {ratio} must satisfy |r| ≤ 1"
                    )));
                }
                WeightSequence::geometric(*ratio)
            }
            WeightSpec::Polyphase { coeffs } => polyphase_weight(
                &coeffs
                    .iter()
                    .map(Angle::to_turn)
                    .collect::<Result<Vec<_>>>()?,
            )?,
            WeightSpec::Linear(l) => {
                let (op, pair) = l.resolve(rng)?;
                linear_sequence(&op, &pair)?
            }
            WeightSpec::AlmostPeriodic(l) => {
                let (op, pair) = l.resolve(rng)?;
                structure_split(&op, &pair)?.almost_periodic.to_sequence()
            }
            WeightSpec::Residual(l) => {
                let (op, pair) = l.resolve(rng)?;
                structure_split(&op, &pair)?.residual
            }
            WeightSpec::Orbit {
                system,
                observable,
                point,
            } => {
                let s = system.to_system()?;
                let g = observable.to_observable(&s)?;
                orbit_sequence(&s, &g, &point.to_point(&s)?)?
            }
            WeightSpec::Correlation { system, pairs } => {
                let s = system.to_system()?;
                let gs = pairs
                    .iter()
                    .map(|p| p.observable.to_observable(&s))
                    .collect::<Result<Vec<_>>>()?;
                let ps = pairs
                    .iter()
                    .map(|p| IntPolynomial::new(p.poly.clone()))
                    .collect::<Result<Vec<_>>>()?;
                correlation_sequence(&s, &gs, &ps)?
            }
            WeightSpec::ShiftPairing { x, functional } => {
                shift_sequence(&L1Vector::new(complexes(x))?, &functional.resolve(rng)?)
            }
            WeightSpec::Functional { functional } => functional.resolve(rng)?.to_sequence(),
            WeightSpec::SquareIndicator => WeightSequence::from_fn("square indicator", 1.0, |n| {
                Complex64::new(if n > 0 && is_square(n) { 1.0 } else { 0.0 }, 0.0)
            }),
            WeightSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidInput(
                        "product needs at least one factor".into(),
                    ));
                }
                WeightSequence::product(
                    factors
                        .iter()
                        .map(|f| f.resolve(rng))
                        .collect::<Result<_>>()?,
                )
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerJson {
    pub system: SystemSpec,
    pub observable: ObservableSpec,
    pub point: PointSpec,
}

impl TowerJson {
    pub fn resolve(&self) -> Result<Tower> {
        let s = self.system.to_system()?;
        let g = self.observable.to_observable(&s)?;
        let p = self.point.to_point(&s)?;
        Ok(Tower::new(s, g, p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    #[serde(flatten)]
    pub linear: LinearJson,
    /// rows n = 1..=n_max in the CSV
    #[serde(default = "default_rows")]
    pub n_max: u64,
    /// checkpoints for the residual Cesàro bound
    #[serde(default)]
    pub horizons: Option<Horizons>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_rows() -> u64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageConfig {
    pub weights: WeightSpec,
    pub system: SystemSpec,
    pub observable: ObservableSpec,
    pub point: PointSpec,
    #[serde(default = "pointwise_horizons")]
    pub horizons: Horizons,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RttJson {
    pub weights: WeightSpec,
    pub towers: Vec<TowerJson>,
    #[serde(default = "pointwise_horizons")]
    pub horizons: Horizons,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub weights: WeightSpec,
    pub system: SystemSpec,
    pub pairs: Vec<CorrelationPair>,
    #[serde(default = "l2_horizons")]
    pub horizons: Horizons,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomChecksJson {
    pub count: usize,
    #[serde(default = "default_support")]
    pub max_support: usize,
    #[serde(default = "default_check_n")]
    pub max_n: u64,
}

fn default_support() -> usize {
    32
}
fn default_check_n() -> u64 {
    4096
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyJson {
    #[serde(default = "default_grid_bits")]
    pub bits: u32,
    pub threshold: f64,
}

fn default_grid_bits() -> u32 {
    goodweights::shiftcex::GRID_BITS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CexConfig {
    pub x: Vec<Scalar>,
    pub functional: FunctionalSpec,
    #[serde(default = "default_lambda")]
    pub lambda: Angle,
    #[serde(default = "pointwise_horizons")]
    pub horizons: Horizons,
    #[serde(default)]
    pub witness: Option<WitnessJson>,
    #[serde(default)]
    pub random_checks: Option<RandomChecksJson>,
    #[serde(default)]
    pub hardy: Option<HardyJson>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_lambda() -> Angle {
    Angle::Turns(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KvnConfig {
    pub weights: WeightSpec,
    pub horizon: u64,
    pub levels: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniversalConfig {
    pub weights: Vec<WeightSpec>,
    /// each entry is one sampled tower set (Sⱼ, gⱼ, yⱼ)ⱼ
    pub towers: Vec<Vec<TowerJson>>,
    #[serde(default = "pointwise_horizons")]
    pub horizons: Horizons,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
