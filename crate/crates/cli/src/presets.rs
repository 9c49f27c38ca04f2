//! Scenario configs bundled into the binary.

use crate::config::{ConfigError, ScenarioConfig};

/// `(name, json)` in alphabetical order.
const PRESETS: &[(&str, &str)] = &[
    (
        "balayage_sphere_newtonian",
        include_str!("../presets/balayage_sphere_newtonian.json"),
    ),
    (
        "capacity_ball",
        include_str!("../presets/capacity_ball.json"),
    ),
    (
        "example_dirac_sphere",
        include_str!("../presets/example_dirac_sphere.json"),
    ),
    (
        "example_normalized_field",
        include_str!("../presets/example_normalized_field.json"),
    ),
    (
        "gauss_zero_field",
        include_str!("../presets/gauss_zero_field.json"),
    ),
    (
        "kelvin_capacitary",
        include_str!("../presets/kelvin_capacitary.json"),
    ),
    (
        "sweep_normalized_field",
        include_str!("../presets/sweep_normalized_field.json"),
    ),
    (
        "sweep_strict_largemass",
        include_str!("../presets/sweep_strict_largemass.json"),
    ),
    (
        "sweep_unsolvable_smallmass",
        include_str!("../presets/sweep_unsolvable_smallmass.json"),
    ),
    (
        "thinness_exterior_ball",
        include_str!("../presets/thinness_exterior_ball.json"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Option<Result<ScenarioConfig, ConfigError>> {
    source(name).map(ScenarioConfig::from_json)
}

/// `name  description` lines for `list-presets`.
pub fn listing() -> Vec<String> {
    let width = names().map(str::len).max().unwrap_or(0);
    PRESETS
        .iter()
        .map(|(name, text)| {
            let desc = ScenarioConfig::from_json(text)
                .ok()
                .and_then(|c| c.description)
                .unwrap_or_default();
            format!("{name:width$}  {desc}")
        })
        .collect()
}
