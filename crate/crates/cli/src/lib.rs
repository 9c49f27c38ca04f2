//! Scenario configs, bundled presets and the runner behind the `riesz` binary.

pub mod config;
pub mod presets;
pub mod run;
