//! The catalog printed by `goodweights list`.

use std::fmt;

/// Example configs shipped in `configs/`, embedded so `list` works anywhere.
pub const EXAMPLE_CONFIGS: &[(&str, &str)] = &[
    (
        "decompose_diag.json",
        include_str!("../configs/decompose_diag.json"),
    ),
    (
        "decompose_jordan.json",
        include_str!("../configs/decompose_jordan.json"),
    ),
    (
        "decompose_random.json",
        include_str!("../configs/decompose_random.json"),
    ),
    (
        "average_resonant.json",
        include_str!("../configs/average_resonant.json"),
    ),
    (
        "rtt_two_rotations.json",
        include_str!("../configs/rtt_two_rotations.json"),
    ),
    (
        "rtt_null_weights.json",
        include_str!("../configs/rtt_null_weights.json"),
    ),
    ("poly_weyl.json", include_str!("../configs/poly_weyl.json")),
    (
        "poly_mean_ergodic.json",
        include_str!("../configs/poly_mean_ergodic.json"),
    ),
    ("poly_skew.json", include_str!("../configs/poly_skew.json")),
    (
        "cex_block_sign.json",
        include_str!("../configs/cex_block_sign.json"),
    ),
    (
        "kvn_squares.json",
        include_str!("../configs/kvn_squares.json"),
    ),
    (
        "universal_family.json",
        include_str!("../configs/universal_family.json"),
    ),
];

pub const SYSTEMS: &[(&str, &str)] = &[
    ("circle_rotation", "y ↦ y + α on 𝕋"),
    ("torus_rotation", "y ↦ y + α on 𝕋^d, d ≤ 3"),
    ("skew_product", "(x, y) ↦ (x + α, y + x) on 𝕋²"),
    ("cyclic_permutation", "i ↦ i + 1 on ℤ/m"),
];

pub const WEIGHTS: &[(&str, &str)] = &[
    ("constant", "aₙ = c"),
    ("character", "aₙ = e^{2πinβ}"),
    ("geometric", "aₙ = rⁿ"),
    ("polyphase", "aₙ = e^{2πi p(n)}, deg p ≤ 4"),
    ("linear", "aₙ = ⟨Tⁿx, x′⟩"),
    ("almost_periodic", "almost-periodic part of ⟨Tⁿx, x′⟩"),
    ("residual", "Cesàro-null part of ⟨Tⁿx, x′⟩"),
    ("orbit", "aₙ = g(Sⁿy)"),
    ("correlation", "aₙ = ∫ Π S^{pⱼ(n)}gⱼ dμ"),
    ("shift_pairing", "aₙ = Σⱼ tⱼ s_{n+j}"),
    ("functional", "aₙ = sₙ"),
    ("square_indicator", "aₙ = 1 on perfect squares"),
    ("product", "pointwise product of weights"),
];

pub const FUNCTIONALS: &[(&str, &str)] = &[
    ("constant", "sⱼ = c"),
    ("block_sign", "sⱼ = ±δ on blocks [gᵏ, gᵏ⁺¹)"),
    ("weight", "sⱼ given by any weight"),
];

pub const EXPERIMENTS: &[&str] = &[
    "decompose",
    "average",
    "rtt",
    "poly",
    "cex",
    "kvn",
    "universal-report",
];

/// Every catalog entry as (section, name, description).
pub fn list_builtins() -> Vec<(&'static str, &'static str, &'static str)> {
    let mut out = Vec::new();
    out.extend(EXPERIMENTS.iter().map(|&k| ("experiment", k, "")));
    out.extend(SYSTEMS.iter().map(|&(n, d)| ("system", n, d)));
    out.extend(WEIGHTS.iter().map(|&(n, d)| ("weight", n, d)));
    out.extend(FUNCTIONALS.iter().map(|&(n, d)| ("functional", n, d)));
    out.extend(EXAMPLE_CONFIGS.iter().map(|&(n, _)| ("config", n, "")));
    out
}

pub struct Catalog;

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut section = "";
        for (s, name, desc) in list_builtins() {
            if s != section {
                if !section.is_empty() {
                    writeln!(f)?;
                }
                writeln!(f, "{s}s:")?;
                section = s;
            }
            if desc.is_empty() {
                writeln!(f, "  {name}")?;
            } else {
                writeln!(f, "  {name:<20} {desc}")?;
            }
        }
        Ok(())
    }
}
