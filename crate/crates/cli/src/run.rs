//! Dispatch of an experiment config to the library and emission of artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use goodweights::averages::{
    multiple_rtt_average, universal_family_report, weighted_average, weighted_poly_average_l2,
    PolyAvgConfig, RttConfig,
};
use goodweights::dynsys::IntPolynomial;
use goodweights::linops::{pairing, structure_split, SpectralOperator, VectorPair};
use goodweights::seq::{
    cesaro_trace_with, kvn_extract, Certification, SumMode, TraceOptions, DEFAULT_TOL,
};
use goodweights::shiftcex::{
    cex_bound_check, cex_trace, divergence_witness, hardy_grid_scan, rotated_functional,
    BoundedFunctional, L1Vector,
};
use goodweights::{AverageTrace, Complex64, Turn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::*;
use crate::output::{complex_cells, write_csv, write_json, Cell};
use crate::RunError;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// replaces the largest horizon of the experiment
    pub horizon_override: Option<u64>,
}

/// What a successful run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
}

struct Ctx<'a> {
    out: &'a Path,
    files: Vec<String>,
}

impl Ctx<'_> {
    fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<Cell>>,
    ) -> Result<(), RunError> {
        write_csv(&self.out.join(name), header, rows)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Reads, validates and runs the config at `path`, writing into `out`.
///
/// On failure a `summary.json` with the error is still written when `out`
/// can be created.
pub fn run_path(path: &Path, out: &Path, opts: &RunOptions) -> Result<RunReport, RunError> {
    let result = ExperimentConfig::load(path).and_then(|cfg| run_config(&cfg, out, opts));
    if let Err(e) = &result {
        if fs::create_dir_all(out).is_ok() {
            let echo = ExperimentConfig::load(path).ok();
            let _ = write_json(
                &out.join("summary.json"),
                &json!({
                    "status": "error",
                    "exit_code": e.exit_code(),
                    "error": e.to_string(),
                    "config": echo,
                }),
            );
        }
    }
    result
}

pub fn run_config(
    cfg: &ExperimentConfig,
    out: &Path,
    opts: &RunOptions,
) -> Result<RunReport, RunError> {
    fs::create_dir_all(out)?;
    let mut ctx = Ctx {
        out,
        files: Vec::new(),
    };
    let mut rng = rng_for(cfg.seed());
    let cap = opts.horizon_override;
    let results = match cfg {
        ExperimentConfig::Decompose(c) => decompose(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::Average(c) => average(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::Rtt(c) => rtt(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::Poly(c) => poly(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::Cex(c) => cex(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::Kvn(c) => kvn(c, cap, &mut rng, &mut ctx)?,
        ExperimentConfig::UniversalReport(c) => universal(c, cap, &mut rng, &mut ctx)?,
    };
    let summary = json!({
        "status": "ok",
        "kind": cfg.kind(),
        "seed": cfg.seed(),
        "horizon_override": cap,
        "outputs": ctx.files,
        "results": results,
        "config": cfg,
    });
    write_json(&out.join("summary.json"), &summary)?;
    let mut outputs: Vec<PathBuf> = ctx.files.iter().map(|f| out.join(f)).collect();
    outputs.push(out.join("summary.json"));
    Ok(RunReport { outputs, summary })
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn trace_rows(tr: &AverageTrace) -> Vec<Vec<Cell>> {
    (0..tr.checkpoints.len())
        .map(|i| {
            let mut row = vec![Cell::Int(tr.checkpoints[i])];
            row.extend(complex_cells(tr.values[i]));
            if let Some(l2) = &tr.l2norms {
                row.push(Cell::Float(l2[i]));
            }
            if let Some(b) = &tr.bounds {
                row.push(Cell::Float(b[i]));
            }
            row
        })
        .collect()
}

fn trace_header(tr: &AverageTrace) -> Vec<&'static str> {
    let mut h = vec!["n", "re", "im"];
    if tr.l2norms.is_some() {
        h.push("l2norm");
    }
    if tr.bounds.is_some() {
        h.push("bound");
    }
    h
}

/// Number of checkpoints where |A_N| (or ‖F_N‖₂) exceeds the bound column.
fn bound_violations(tr: &AverageTrace) -> usize {
    let Some(b) = &tr.bounds else { return 0 };
    let sizes: Vec<f64> = match &tr.l2norms {
        Some(l2) => l2.clone(),
        None => tr.values.iter().map(|v| v.norm()).collect(),
    };
    sizes
        .iter()
        .zip(b)
        .filter(|(s, b)| **s > **b * (1.0 + 1e-12) + 1e-15)
        .count()
}

fn trace_summary(tr: &AverageTrace) -> Value {
    json!({
        "verdict": tr.verdict,
        "final": {"n": tr.checkpoints.last(), "value": complex_json(tr.last())},
        "bound_violations": bound_violations(tr),
    })
}

fn decompose(
    c: &DecomposeConfig,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let (op, pair) = c.linear.resolve(rng)?;
    let split = structure_split(&op, &pair)?;
    let n_max = cap.unwrap_or(c.n_max);
    if n_max == 0 || n_max > 1 << 24 {
        return Err(RunError::Validation(format!(
            "n_max must be 1..=2^24, got {n_max}"
        )));
    }
    let direct = direct_orbit(&op, &pair, n_max);
    let mut max_err: f64 = 0.0;
    let mut rows = Vec::with_capacity(n_max as usize);
    for (i, a) in direct.iter().enumerate() {
        let n = i as u64 + 1;
        let b = split.almost_periodic.eval(n);
        let r = split.residual.at(n);
        max_err = max_err.max((a - b - r).norm());
        let mut row = vec![Cell::Int(n)];
        row.extend(complex_cells(*a));
        row.extend(complex_cells(b));
        row.extend(complex_cells(r));
        rows.push(row);
    }
    ctx.csv(
        "decompose.csv",
        &["n", "a_re", "a_im", "b_re", "b_im", "c_re", "c_im"],
        rows,
    )?;

    let horizons = match &c.horizons {
        Some(h) => h.resolve(cap)?,
        None => vec![n_max],
    };
    let opts = TraceOptions {
        tol: DEFAULT_TOL,
        mode: SumMode::Modulus,
    };
    let means = cesaro_trace_with(&split.residual, &horizons, opts)?.values;
    let residual: Vec<Value> = horizons
        .iter()
        .zip(&means)
        .map(|(&n, m)| {
            let bound = split.residual_mean_bound(n);
            json!({"n": n, "mean_abs": m.re, "bound": bound, "holds": m.re <= bound})
        })
        .collect();
    Ok(json!({
        "dim": op.dim(),
        "eigenvalues": op.eigenpairs().iter().map(|e| complex_json(e.value)).collect::<Vec<_>>(),
        "power_bound": {"C": op.power_bound().c, "r": op.power_bound().r},
        "basis_residual": op.basis_residual(),
        "almost_periodic": split.almost_periodic.terms().iter()
            .map(|t| json!({"coef": complex_json(t.coef), "turn": t.freq.to_f64()}))
            .collect::<Vec<_>>(),
        "reconstruction_max_error": max_err,
        "residual_cesaro": residual,
    }))
}

/// ⟨Tⁿx, x′⟩ for n = 1..=n_max by repeated multiplication with the dense matrix.
fn direct_orbit(op: &SpectralOperator, pair: &VectorPair, n_max: u64) -> Vec<Complex64> {
    let t = op.dense();
    let mut v = pair.x.clone();
    (0..n_max)
        .map(|_| {
            v = &t * &v;
            pairing(&v, &pair.xprime)
        })
        .collect()
}

fn average(
    c: &AverageConfig,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let weights = c.weights.resolve(rng)?;
    let s = c.system.to_system()?;
    let g = c.observable.to_observable(&s)?;
    let y = c.point.to_point(&s)?;
    let tr = weighted_average(&weights, &s, &g, &y, &c.horizons.resolve(cap)?)?;
    ctx.csv("average.csv", &trace_header(&tr), trace_rows(&tr))?;
    Ok(trace_summary(&tr))
}

fn rtt(
    c: &RttJson,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let cfg = RttConfig {
        weights: c.weights.resolve(rng)?,
        towers: c
            .towers
            .iter()
            .map(TowerJson::resolve)
            .collect::<Result<_, _>>()?,
        horizons: c.horizons.resolve(cap)?,
        tol: c.tol.unwrap_or(DEFAULT_TOL),
    };
    let tr = multiple_rtt_average(&cfg)?;
    ctx.csv("rtt.csv", &trace_header(&tr), trace_rows(&tr))?;
    Ok(trace_summary(&tr))
}

fn poly(
    c: &PolyJson,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let system = c.system.to_system()?;
    let pairs = c
        .pairs
        .iter()
        .map(|p| {
            Ok((
                p.observable.to_observable(&system)?,
                IntPolynomial::new(p.poly.clone())?,
            ))
        })
        .collect::<Result<Vec<_>, goodweights::Error>>()?;
    let cfg = PolyAvgConfig {
        weights: c.weights.resolve(rng)?,
        system,
        pairs,
        horizons: c.horizons.resolve(cap)?,
        tol: c.tol.unwrap_or(DEFAULT_TOL),
    };
    let out = weighted_poly_average_l2(&cfg)?;
    ctx.csv(
        "poly.csv",
        &trace_header(&out.trace),
        trace_rows(&out.trace),
    )?;
    let mut summary = trace_summary(&out.trace);
    summary["l2norm_final"] = json!(out.trace.l2norms.as_ref().and_then(|v| v.last()));
    summary["cauchy_to_final"] = json!(out.cauchy);
    summary["limit"] =
        serde_json::to_value(&out.limit).map_err(|e| RunError::Internal(e.to_string()))?;
    Ok(summary)
}

fn random_functional(rng: &mut ChaCha8Rng) -> Result<BoundedFunctional, RunError> {
    let base =
        BoundedFunctional::block_sign_with_growth(rng.gen_range(0.01..2.0), rng.gen_range(2..=4))?;
    Ok(rotated_functional(&base, Turn::from_f64(rng.gen::<f64>())))
}

fn cex(
    c: &CexConfig,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let x = L1Vector::new(c.x.iter().map(|&s| s.into()).collect())?;
    let xp = c.functional.resolve(rng)?;
    let lambda = c.lambda.to_turn()?;
    let horizons = c.horizons.resolve(cap)?;
    let rows = cex_trace(&x, &xp, lambda, &horizons)?;
    let all_hold = rows
        .iter()
        .all(|r| r.bound_lhs <= r.bound_rhs + goodweights::shiftcex::BOUND_SLACK);
    ctx.csv(
        "cex.csv",
        &[
            "n",
            "cesaro_re",
            "cesaro_im",
            "running_min",
            "running_max",
            "bound_lhs",
            "bound_rhs",
        ],
        rows.iter().map(|r| {
            let mut row = vec![Cell::Int(r.n)];
            row.extend(complex_cells(r.cesaro));
            row.extend([r.running_min, r.running_max, r.bound_lhs, r.bound_rhs].map(Cell::Float));
            row
        }),
    )?;
    let mut summary = json!({
        "support": x.support_len(),
        "one_norm": x.one_norm(),
        "sup_norm": xp.sup_norm(),
        "bound_holds_at_all_horizons": all_hold,
    });
    if let Some(w) = &c.witness {
        let horizon = cap.unwrap_or(w.horizon);
        let wit = divergence_witness(&x, &xp, horizon)?;
        ctx.csv(
            "witness.csv",
            &["n", "re", "im"],
            wit.trace
                .checkpoints
                .iter()
                .zip(&wit.trace.values)
                .map(|(&n, &v)| vec![Cell::Int(n), Cell::Float(v.re), Cell::Float(v.im)]),
        )?;
        summary["witness"] = json!({
            "horizon": horizon,
            "liminf_est": wit.liminf_est,
            "limsup_est": wit.limsup_est,
            "gap": wit.gap,
            "verdict": wit.trace.verdict,
        });
    }
    if let Some(rc) = &c.random_checks {
        if rc.max_support == 0 || rc.max_n == 0 {
            return Err(RunError::Validation(
                "random checks need max_support ≥ 1 and max_n ≥ 1".into(),
            ));
        }
        let mut failures = 0usize;
        let mut worst: f64 = 0.0;
        for _ in 0..rc.count {
            let len = rng.gen_range(1..=rc.max_support);
            let rx = L1Vector::new(
                (0..len)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )?;
            let rxp = random_functional(rng)?;
            let rl = Turn::from_f64(rng.gen::<f64>());
            let n = rng.gen_range(1..=rc.max_n);
            let check = cex_bound_check(&rx, &rxp, rl, n)?;
            failures += usize::from(!check.holds);
            worst = worst.max(check.lhs / check.rhs);
        }
        summary["random_checks"] =
            json!({"count": rc.count, "failures": failures, "max_lhs_over_rhs": worst});
    }
    if let Some(h) = &c.hardy {
        let scan = hardy_grid_scan(&x, h.bits, h.threshold)?;
        ctx.csv(
            "hardy.csv",
            &["index", "re", "im"],
            scan.points.iter().map(|p| {
                vec![
                    Cell::Int(p.index),
                    Cell::Float(p.value.re),
                    Cell::Float(p.value.im),
                ]
            }),
        )?;
        summary["hardy"] = json!({
            "grid": 1u64 << h.bits,
            "radius": scan.radius,
            "threshold": scan.threshold,
            "good_count": scan.good.len(),
        });
    }
    Ok(summary)
}

fn kvn(
    c: &KvnConfig,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let seq = c.weights.resolve(rng)?;
    let horizon = cap.unwrap_or(c.horizon);
    goodweights::seq::validate_horizons(&[horizon])?;
    let set = kvn_extract(&seq, horizon, &c.levels)?;
    let mut checkpoints: Vec<u64> = (0..64)
        .map(|k| 1u64 << k)
        .take_while(|&n| n < horizon)
        .collect();
    checkpoints.push(horizon);
    ctx.csv(
        "kvn.csv",
        &["n", "density", "epsilon"],
        checkpoints.iter().map(|&n| {
            vec![
                Cell::Int(n),
                Cell::Float(set.observed_density(n)),
                set.level_for(n)
                    .map_or(Cell::Empty, |l| Cell::Float(l.epsilon)),
            ]
        }),
    )?;
    let certified = match set.certification {
        Certification::Complete => set.levels.len(),
        Certification::Partial { certified } => certified,
    };
    let mut violations = 0u64;
    for n in 1..=horizon {
        if let Some(level) = set.level_for(n) {
            if set.contains(n) && seq.at(n).norm() > level.epsilon {
                violations += 1;
            }
        }
    }
    Ok(json!({
        "horizon": horizon,
        "final_density": set.observed_density(horizon),
        "levels": set.levels,
        "certification": set.certification,
        "certified_levels": certified,
        "violations": violations,
    }))
}

fn universal(
    c: &UniversalConfig,
    cap: Option<u64>,
    rng: &mut ChaCha8Rng,
    ctx: &mut Ctx,
) -> Result<Value, RunError> {
    let weights = c
        .weights
        .iter()
        .map(|w| w.resolve(rng))
        .collect::<Result<Vec<_>, _>>()?;
    let towers = c
        .towers
        .iter()
        .map(|set| {
            set.iter()
                .map(TowerJson::resolve)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = universal_family_report(
        &weights,
        &towers,
        &c.horizons.resolve(cap)?,
        c.tol.unwrap_or(DEFAULT_TOL),
    )?;
    for (t, row) in report.traces.iter().enumerate() {
        for (w, tr) in row.iter().enumerate() {
            ctx.csv(
                &format!("universal_t{t}_w{w}.csv"),
                &trace_header(tr),
                trace_rows(tr),
            )?;
        }
    }
    let kinds: Vec<Vec<&str>> = report
        .verdicts
        .iter()
        .map(|row| row.iter().map(|v| v.kind()).collect())
        .collect();
    Ok(json!({
        "weight_labels": report.weight_labels,
        "verdict_kinds": kinds,
        "verdicts": report.verdicts,
        "flipped_towers": report.flipped,
        "flip_count": report.flip_count,
    }))
}
