//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use goodweights::averages::{
    multiple_rtt_average, universal_family_report, weighted_average, weighted_poly_average_l2,
    PolyAvgConfig, RttConfig, Tower,
};
use goodweights::dynsys::{DynamicalSystem, FourierTerm, IntPolynomial, Observable, Point};
use goodweights::linops::random::{random_operator, random_pair, RandomOperatorSpec};
use goodweights::linops::{pairing, structure_split};
use goodweights::seq::{
    cesaro_trace_with, dyadic_horizons, kvn_extract, SumMode, TraceOptions, DEFAULT_TOL,
};
use goodweights::shiftcex::{
    cex_bound_check, divergence_witness, rotated_functional, BoundedFunctional, L1Vector,
};
use goodweights::{Complex64, Turn, WeightSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.2}s]", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {:.0}s", o.detail, limit.as_secs_f64());
        }
    }
    o
}

fn random_spec() -> RandomOperatorSpec {
    RandomOperatorSpec {
        max_dim: 8,
        max_unimodular: 4,
        max_stable_radius: 0.9,
    }
}

fn structure_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_err: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let opts = TraceOptions {
        tol: DEFAULT_TOL,
        mode: SumMode::Modulus,
    };
    for _ in 0..200 {
        let drawn = random_operator(&mut rng, random_spec());
        let pair = random_pair(&mut rng, drawn.op.dim());
        let split = match structure_split(&drawn.op, &pair) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("split failed: {e}")),
        };
        let mut v = pair.x.clone();
        for n in 1..=1000u64 {
            v = &drawn.dense * &v;
            let a = pairing(&v, &pair.xprime);
            let err = (a - split.almost_periodic.eval(n) - split.residual.at(n)).norm();
            worst_err = worst_err.max(err);
        }
        let mean = cesaro_trace_with(&split.residual, &[10_000], opts)
            .unwrap()
            .values[0]
            .re;
        worst_ratio = worst_ratio.max(mean / split.residual_mean_bound(10_000));
    }
    outcome(
        worst_err <= 1e-9 && worst_ratio <= 1.0,
        format!("max |a-b-c| = {worst_err:.3e}, max mean/bound = {worst_ratio:.3e}"),
    )
}

fn random_rotation_tower(rng: &mut ChaCha8Rng) -> Tower {
    let dim = rng.gen_range(1..=2usize);
    let alpha: Vec<Turn> = (0..dim).map(|_| Turn(rng.gen())).collect();
    let mut coefs = std::collections::BTreeMap::new();
    for _ in 0..rng.gen_range(1..=3) {
        let k: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        coefs.insert(
            k,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    let terms = coefs
        .into_iter()
        .map(|(k, coef)| FourierTerm { k, coef })
        .collect();
    let point = Point::Torus((0..dim).map(|_| Turn(rng.gen())).collect());
    let system = if dim == 1 {
        DynamicalSystem::CircleRotation { alpha: alpha[0] }
    } else {
        DynamicalSystem::TorusRotation { alpha }
    };
    Tower::new(system, Observable::fourier(dim, terms).unwrap(), point)
}

fn good_weight_estimate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut checked = 0;
    for cfg_index in 0..50 {
        let drawn = random_operator(&mut rng, random_spec());
        let pair = random_pair(&mut rng, drawn.op.dim());
        let weights = structure_split(&drawn.op, &pair).unwrap().residual;
        let k = 1 + cfg_index % 3;
        let towers = (0..k).map(|_| random_rotation_tower(&mut rng)).collect();
        let tr =
            multiple_rtt_average(&RttConfig::new(weights, towers, dyadic_horizons(2, 14))).unwrap();
        let bounds = tr.bounds.as_ref().unwrap();
        for (v, b) in tr.values.iter().zip(bounds) {
            checked += 1;
            if v.norm() > b * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {checked} checkpoints"),
    )
}

fn resonance() -> Outcome {
    let system = DynamicalSystem::CircleRotation {
        alpha: Turn::GOLDEN,
    };
    let weights = WeightSequence::character(Turn::ZERO - Turn::GOLDEN);
    let y = 0.3125;
    let point = Point::Torus(vec![Turn::from_f64(y)]);
    let tr = weighted_average(
        &weights,
        &system,
        &Observable::character(vec![1]),
        &point,
        &[1 << 20],
    )
    .unwrap();
    let expected = Complex64::from_polar(1.0, std::f64::consts::TAU * y);
    let err = (tr.values[0] - expected).norm();
    outcome(
        err <= 1e-10,
        format!("|A_N - e(y)| = {err:.3e} at N = 2^20"),
    )
}

/// |(1/N)Σ e(n²α)| through a 64-bit fixed-point phase, independent of the library.
fn weyl_oracle(n_max: u64) -> f64 {
    const ALPHA64: u64 = 0x9e37_79b9_7f4a_7c15;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for n in 1..=n_max {
        let phase = (n.wrapping_mul(n)).wrapping_mul(ALPHA64);
        let t = phase as f64 / 2f64.powi(64) * std::f64::consts::TAU;
        re += t.cos();
        im += t.sin();
    }
    (re * re + im * im).sqrt() / n_max as f64
}

fn weyl_l2() -> Outcome {
    let system = DynamicalSystem::CircleRotation {
        alpha: Turn::GOLDEN,
    };
    let one = WeightSequence::constant(Complex64::new(1.0, 0.0));
    let g = Observable::character(vec![1]);
    let n = 1_000_000;
    let sq = PolyAvgConfig::new(
        one.clone(),
        system.clone(),
        vec![(g.clone(), IntPolynomial::new(vec![0, 0, 1]).unwrap())],
        vec![n],
    );
    let weyl = weighted_poly_average_l2(&sq)
        .unwrap()
        .trace
        .l2norms
        .unwrap()[0];
    let oracle = weyl_oracle(n);
    let lin_n = 1 << 16;
    let lin = PolyAvgConfig::new(
        one,
        system,
        vec![(g, IntPolynomial::new(vec![0, 1]).unwrap())],
        vec![lin_n],
    );
    let mean = weighted_poly_average_l2(&lin)
        .unwrap()
        .trace
        .l2norms
        .unwrap()[0];
    let gap = (Complex64::new(1.0, 0.0)
        - Complex64::from_polar(1.0, std::f64::consts::TAU * Turn::GOLDEN.to_f64()))
    .norm();
    let mean_bound = 2.0 / (lin_n as f64 * gap);
    outcome(
        weyl <= 0.01 && (weyl - oracle).abs() <= 1e-6 && mean <= mean_bound,
        format!(
            "‖F_N‖ = {weyl:.3e} (oracle {oracle:.3e}) at N = 1e6; mean ergodic {mean:.3e} ≤ {mean_bound:.3e}"
        ),
    )
}

fn random_functional(rng: &mut ChaCha8Rng) -> BoundedFunctional {
    let base = match rng.gen_range(0..3) {
        0 => BoundedFunctional::constant(Complex64::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )),
        1 => BoundedFunctional::block_sign(rng.gen_range(0.01..2.0)).unwrap(),
        _ => {
            BoundedFunctional::block_sign_with_growth(rng.gen_range(0.01..2.0), rng.gen_range(2..5))
                .unwrap()
        }
    };
    if rng.gen_bool(0.5) {
        rotated_functional(&base, Turn(rng.gen()))
    } else {
        base
    }
}

fn counterexample() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=32);
        let x = L1Vector::new(
            (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let xp = random_functional(&mut rng);
        let check = cex_bound_check(&x, &xp, Turn(rng.gen()), rng.gen_range(1..=4096)).unwrap();
        if !check.holds {
            failures += 1;
        }
    }
    let e1 = L1Vector::basis(1).unwrap();
    let big = divergence_witness(&e1, &BoundedFunctional::block_sign(1.0).unwrap(), 1 << 20)
        .unwrap()
        .gap;
    let small = divergence_witness(&e1, &BoundedFunctional::block_sign(1e-3).unwrap(), 1 << 20)
        .unwrap()
        .gap;

    let resonant = vec![Tower::new(
        DynamicalSystem::CircleRotation {
            alpha: Turn::GOLDEN,
        },
        Observable::constant(1, Complex64::new(1.0, 0.0)),
        Point::Torus(vec![Turn::ZERO]),
    )];
    let generic = vec![Tower::new(
        DynamicalSystem::CircleRotation {
            alpha: Turn::SQRT2_FRAC,
        },
        Observable::character(vec![1]),
        Point::Torus(vec![Turn::HALF]),
    )];
    let towers = vec![resonant, generic];
    let drawn = random_operator(&mut rng, random_spec());
    let pair = random_pair(&mut rng, drawn.op.dim());
    let split = structure_split(&drawn.op, &pair).unwrap();
    let structured = vec![
        WeightSequence::constant(Complex64::new(1.0, 0.0)),
        split.almost_periodic.to_sequence(),
        split.residual,
    ];
    let horizons = dyadic_horizons(4, 18);
    let without = universal_family_report(&structured, &towers, &horizons, DEFAULT_TOL).unwrap();
    let mut with = structured;
    with.push(BoundedFunctional::block_sign(1.0).unwrap().to_sequence());
    let with = universal_family_report(&with, &towers, &horizons, DEFAULT_TOL).unwrap();
    let flips_ok = without.flip_count == 0 && with.flipped.contains(&0);
    outcome(
        failures == 0 && big >= 0.5 && small >= 5e-4 && flips_ok,
        format!(
            "(a) {failures}/1000 bound failures; (b) gap {big:.4} at δ=1, {small:.3e} at δ=1e-3; \
             (c) flips without/with block sign: {:?}/{:?}",
            without.flipped, with.flipped
        ),
    )
}

fn kvn() -> Outcome {
    let squares = WeightSequence::from_fn("square indicator", 1.0, |n| {
        let r = (n as f64).sqrt().round() as u64;
        Complex64::new(if r * r == n { 1.0 } else { 0.0 }, 0.0)
    });
    let horizon = 1_000_000;
    let set = kvn_extract(&squares, horizon, &[0.5, 0.2, 0.1, 0.05]).unwrap();
    let density = set.observed_density(horizon);
    let mut violations = 0;
    for n in 1..=horizon {
        if let Some(level) = set.level_for(n) {
            if set.contains(n) && squares.at(n).norm() > level.epsilon {
                violations += 1;
            }
        }
    }
    outcome(
        density >= 0.998 && violations == 0,
        format!(
            "density {density:.6}, {violations} violations, {} levels",
            set.levels.len()
        ),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run_cli(config: &Path, out: &Path, threads: usize) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_goodweights"))
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .ok()
        .and_then(|o| o.status.code())
}

fn files_of(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut configs: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    let mut mismatched = Vec::new();
    for cfg in &configs {
        let name = cfg.file_stem().unwrap().to_string_lossy().into_owned();
        let one = tmp.path().join(format!("{name}_1"));
        let eight = tmp.path().join(format!("{name}_8"));
        let c1 = run_cli(cfg, &one, 1);
        let c8 = run_cli(cfg, &eight, 8);
        if c1 != c8 || files_of(&one) != files_of(&eight) {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} configs compared, mismatches: {:?}",
            configs.len(),
            mismatched
        ),
    )
}

struct Criterion {
    name: &'static str,
    limit_secs: Option<u64>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            name: "1 structure split",
            limit_secs: Some(30),
            run: structure_suite,
        },
        Criterion {
            name: "2 good-weight estimate",
            limit_secs: None,
            run: good_weight_estimate,
        },
        Criterion {
            name: "3 resonance exactness",
            limit_secs: None,
            run: resonance,
        },
        Criterion {
            name: "4 Weyl and L2",
            limit_secs: Some(60),
            run: weyl_l2,
        },
        Criterion {
            name: "5 shift counterexample",
            limit_secs: None,
            run: counterexample,
        },
        Criterion {
            name: "6 KvN squares",
            limit_secs: None,
            run: kvn,
        },
        Criterion {
            name: "7 thread determinism",
            limit_secs: None,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in criteria {
        let o = timed(c.limit_secs.map(Duration::from_secs), c.run);
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            c.name,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
