use crate::dynsys::{orbit_sequence, DynamicalSystem, Observable, Point};
use crate::error::{invalid, Result};
use crate::seq::{
    cesaro_values, validate_horizons, AverageTrace, SumMode, WeightSequence, DEFAULT_TOL,
};

pub const MAX_TOWERS: usize = 6;

/// One factor (Sⱼ, gⱼ, yⱼ) of a return-time average.
#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    pub system: DynamicalSystem,
    pub observable: Observable,
    pub point: Point,
}

impl Tower {
    pub fn new(system: DynamicalSystem, observable: Observable, point: Point) -> Self {
        Tower {
            system,
            observable,
            point,
        }
    }

    fn readout(&self) -> Result<WeightSequence> {
        orbit_sequence(&self.system, &self.observable, &self.point)
    }
}

#[derive(Clone, Debug)]
pub struct RttConfig {
    pub weights: WeightSequence,
    pub towers: Vec<Tower>,
    pub horizons: Vec<u64>,
    pub tol: f64,
}

impl RttConfig {
    pub fn new(weights: WeightSequence, towers: Vec<Tower>, horizons: Vec<u64>) -> Self {
        RttConfig {
            weights,
            towers,
            horizons,
            tol: DEFAULT_TOL,
        }
    }
}

/// Trace of (1/N)Σ aₙ·bₙ with the bound column ∏‖gⱼ‖_∞·(1/N)Σ|aₙ|.
fn bounded_trace(
    weights: &WeightSequence,
    product: &WeightSequence,
    g_bound: f64,
    horizons: &[u64],
    tol: f64,
) -> AverageTrace {
    let values = cesaro_values(product, horizons, SumMode::Plain);
    let mass = cesaro_values(weights, horizons, SumMode::Modulus);
    let mut trace = AverageTrace::new(horizons.to_vec(), values, tol);
    trace.bounds = Some(mass.iter().map(|m| g_bound * m.re).collect());
    trace
}

/// A_N = (1/N) Σ_{n=1..N} aₙ g(Sⁿy).
pub fn weighted_average(
    weights: &WeightSequence,
    system: &DynamicalSystem,
    g: &Observable,
    y: &Point,
    horizons: &[u64],
) -> Result<AverageTrace> {
    validate_horizons(horizons)?;
    let readout = orbit_sequence(system, g, y)?;
    let product = WeightSequence::product(vec![weights.clone(), readout]);
    Ok(bounded_trace(
        weights,
        &product,
        g.sup_bound(),
        horizons,
        DEFAULT_TOL,
    ))
}

/// A_N = (1/N) Σ aₙ ∏ⱼ gⱼ(Sⱼⁿyⱼ).
pub fn multiple_rtt_average(cfg: &RttConfig) -> Result<AverageTrace> {
    let order = (0..=cfg.towers.len()).collect();
    multiple_rtt_average_scheduled(cfg, order)
}

/// [`multiple_rtt_average`] with the factor streams (weights first, then the
/// towers) advanced in `schedule` order. The result does not depend on it.
pub fn multiple_rtt_average_scheduled(
    cfg: &RttConfig,
    schedule: Vec<usize>,
) -> Result<AverageTrace> {
    let k = cfg.towers.len();
    if k == 0 || k > MAX_TOWERS {
        return Err(invalid(format!(
            "number of towers must be in 1..={MAX_TOWERS}, got {k}"
        )));
    }
    if schedule.len() != k + 1 || {
        let mut s = schedule.clone();
        s.sort_unstable();
        s != (0..=k).collect::<Vec<_>>()
    } {
        return Err(invalid(
            "schedule must be a permutation of the factor streams",
        ));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(invalid("tolerance must be positive"));
    }
    validate_horizons(&cfg.horizons)?;
    let mut factors = vec![cfg.weights.clone()];
    for t in &cfg.towers {
        factors.push(t.readout()?);
    }
    let g_bound = cfg
        .towers
        .iter()
        .map(|t| t.observable.sup_bound())
        .product();
    let product = WeightSequence::product_with_fill_order(factors, schedule);
    Ok(bounded_trace(
        &cfg.weights,
        &product,
        g_bound,
        &cfg.horizons,
        cfg.tol,
    ))
}
