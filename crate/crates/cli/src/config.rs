//! Scenario configuration: JSON model, overrides and validation.
//!
//! Validation errors carry the dotted path of the offending key, e.g.
//! `kernel.alpha` or `field.atoms[2].at`.

use std::fmt;
use std::path::PathBuf;

use riesz_core::{SolverConfig, StepRule};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        path: path.into(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    PseudoBalayage,
    GaussVariational,
    Capacitary,
    Sweep,
    Thinness,
    KelvinCheck,
    BalayageCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    Sphere {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
        nodes: usize,
    },
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
        nodes: usize,
    },
    /// Graded shells `inner ≤ |x| ≤ outer` about the origin.
    Annulus {
        inner: f64,
        outer: f64,
        per_shell: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ratio: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shells: Option<usize>,
    },
    /// Node CSV `x1,...,xd,spacing`, relative to the config file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub at: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    /// Divide the field by the mass of its pseudo-balayage onto the set.
    PseudoBalayageMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldAtoms {
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<Normalize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoField {
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Field {
    None(NoField),
    Atoms(FieldAtoms),
}

impl Default for Field {
    fn default() -> Self {
        Field::None(NoField::None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBlock {
    pub alpha: f64,
    pub dim: usize,
    #[serde(default = "default_reg_factor")]
    pub reg_factor: f64,
}

fn default_reg_factor() -> f64 {
    riesz_core::kernel::DEFAULT_REG_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_kkt_tol")]
    pub kkt_tol: f64,
    #[serde(default = "default_step_rule")]
    pub step_rule: StepRule,
}

fn default_max_iters() -> usize {
    SolverConfig::default().max_iters
}

fn default_kkt_tol() -> f64 {
    SolverConfig::default().kkt_tol
}

fn default_step_rule() -> StepRule {
    SolverConfig::default().step_rule
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            max_iters: default_max_iters(),
            kkt_tol: default_kkt_tol(),
            step_rule: default_step_rule(),
        }
    }
}

impl SolverBlock {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            kkt_tol: self.kkt_tol,
            step_rule: self.step_rule,
            start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: None,
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    /// Outer radii of the truncations, replacing the annulus outer radius.
    pub outer_radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinnessBlock {
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KelvinBlock {
    pub center: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalayageBlock {
    #[serde(default = "default_balayage_tol")]
    pub tolerance: f64,
}

fn default_balayage_tol() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub kind: Kind,
    pub geometry: Geometry,
    #[serde(default)]
    pub field: Field,
    pub kernel: KernelBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thinness: Option<ThinnessBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kelvin: Option<KelvinBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balayage: Option<BalayageBlock>,
    /// Wall-clock budget in seconds on a laptop-class machine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
}

/// Command-line overrides applied before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    /// Node count of the generator: `nodes` for sphere and ball,
    /// `per_shell` for annuli.
    pub nodes: Option<usize>,
    pub reg_factor: Option<f64>,
}

impl ScenarioConfig {
    /// Parses JSON, reporting the key path of any type or schema mismatch.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError {
                path: if path == "." { String::new() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(a) = o.alpha {
            self.kernel.alpha = a;
        }
        if let Some(d) = o.dim {
            self.kernel.dim = d;
        }
        if let Some(r) = o.reg_factor {
            self.kernel.reg_factor = r;
        }
        if let Some(n) = o.nodes {
            match &mut self.geometry {
                Geometry::Sphere { nodes, .. } | Geometry::Ball { nodes, .. } => *nodes = n,
                Geometry::Annulus { per_shell, .. } => *per_shell = n,
                Geometry::File { .. } => {
                    return invalid(
                        "geometry.generator",
                        "--nodes does not apply to file geometry",
                    )
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let k = &self.kernel;
        if k.dim < 2 {
            return invalid("kernel.dim", format!("must be at least 2, got {}", k.dim));
        }
        let n = k.dim as f64;
        if !(k.alpha.is_finite() && k.alpha > 0.0 && k.alpha < n) {
            return invalid(
                "kernel.alpha",
                format!("must satisfy 0 < alpha < dim = {}, got {}", k.dim, k.alpha),
            );
        }
        if !(k.reg_factor.is_finite() && k.reg_factor > 0.0) {
            return invalid(
                "kernel.reg_factor",
                format!("must be positive, got {}", k.reg_factor),
            );
        }
        self.validate_geometry()?;
        self.validate_field()?;
        if self.solver.max_iters < 1 {
            return invalid("solver.max_iters", "must be at least 1");
        }
        if !(self.solver.kkt_tol.is_finite() && self.solver.kkt_tol > 0.0) {
            return invalid(
                "solver.kkt_tol",
                format!("must be positive, got {}", self.solver.kkt_tol),
            );
        }
        if let Some(b) = self.budget_seconds {
            if !(b.is_finite() && b > 0.0) {
                return invalid("budget_seconds", "must be positive");
            }
        }
        self.validate_kind()
    }

    fn validate_geometry(&self) -> Result<(), ConfigError> {
        let dim = self.kernel.dim;
        let generated = matches!(
            self.geometry,
            Geometry::Sphere { .. } | Geometry::Ball { .. } | Geometry::Annulus { .. }
        );
        if generated && dim != 2 && dim != 3 {
            return invalid(
                "kernel.dim",
                format!("generators support dim 2 and 3, got {dim}"),
            );
        }
        match &self.geometry {
            Geometry::Sphere {
                center,
                radius,
                nodes,
            }
            | Geometry::Ball {
                center,
                radius,
                nodes,
            } => {
                if let Some(c) = center {
                    check_point("geometry.center", c, dim)?;
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return invalid("geometry.radius", format!("must be positive, got {radius}"));
                }
                if *nodes < 2 {
                    return invalid("geometry.nodes", format!("must be at least 2, got {nodes}"));
                }
            }
            Geometry::Annulus {
                inner,
                outer,
                per_shell,
                ratio,
                shells,
            } => {
                if !(inner.is_finite() && *inner > 0.0) {
                    return invalid("geometry.inner", format!("must be positive, got {inner}"));
                }
                if !(outer.is_finite() && outer > inner) {
                    return invalid(
                        "geometry.outer",
                        format!("must exceed inner = {inner}, got {outer}"),
                    );
                }
                if *per_shell < 2 {
                    return invalid("geometry.per_shell", "must be at least 2");
                }
                if ratio.is_some() && shells.is_some() {
                    return invalid("geometry.shells", "give either ratio or shells, not both");
                }
                if let Some(r) = ratio {
                    if !(r.is_finite() && *r > 1.0) {
                        return invalid("geometry.ratio", format!("must exceed 1, got {r}"));
                    }
                }
                if *shells == Some(0) {
                    return invalid("geometry.shells", "must be at least 1");
                }
            }
            Geometry::File { path } => {
                if path.as_os_str().is_empty() {
                    return invalid("geometry.path", "must not be empty");
                }
            }
        }
        Ok(())
    }

    fn validate_field(&self) -> Result<(), ConfigError> {
        if let Field::Atoms(f) = &self.field {
            for (i, a) in f.atoms.iter().enumerate() {
                check_point(&format!("field.atoms[{i}].at"), &a.at, self.kernel.dim)?;
                if !a.mass.is_finite() {
                    return invalid(format!("field.atoms[{i}].mass"), "must be finite");
                }
            }
        }
        Ok(())
    }

    fn validate_kind(&self) -> Result<(), ConfigError> {
        let dim = self.kernel.dim;
        match self.kind {
            Kind::Sweep => {
                let Some(s) = &self.sweep else {
                    return invalid("sweep", "kind sweep needs a sweep block");
                };
                let Geometry::Annulus { inner, .. } = self.geometry else {
                    return invalid("geometry.generator", "sweeps truncate an annulus");
                };
                if s.outer_radii.len() < 3 {
                    return invalid("sweep.outer_radii", "needs at least 3 radii");
                }
                let mut prev = inner;
                for (i, r) in s.outer_radii.iter().enumerate() {
                    if !(r.is_finite() && *r > prev) {
                        return invalid(
                            format!("sweep.outer_radii[{i}]"),
                            "radii must increase strictly and exceed the inner radius",
                        );
                    }
                    prev = *r;
                }
            }
            Kind::Thinness => {
                let Some(t) = &self.thinness else {
                    return invalid("thinness", "kind thinness needs a thinness block");
                };
                if !(t.q.is_finite() && t.q > 1.0) {
                    return invalid("thinness.q", format!("must exceed 1, got {}", t.q));
                }
            }
            Kind::KelvinCheck => {
                let Some(kv) = &self.kelvin else {
                    return invalid("kelvin", "kind kelvin_check needs a kelvin block");
                };
                check_point("kelvin.center", &kv.center, dim)?;
                if kv.samples < 1 {
                    return invalid("kelvin.samples", "must be at least 1");
                }
            }
            Kind::BalayageCheck => {
                if self.kernel.alpha > 2.0 {
                    return invalid(
                        "kernel.alpha",
                        format!("balayage_check needs alpha <= 2, got {}", self.kernel.alpha),
                    );
                }
                match &self.field {
                    Field::Atoms(f) => {
                        if let Some(i) = f.atoms.iter().position(|a| a.mass < 0.0) {
                            return invalid(
                                format!("field.atoms[{i}].mass"),
                                "balayage_check needs a positive field",
                            );
                        }
                    }
                    Field::None(_) => return invalid("field", "balayage_check needs field atoms"),
                }
                if let Some(b) = &self.balayage {
                    if !(b.tolerance.is_finite() && b.tolerance > 0.0) {
                        return invalid("balayage.tolerance", "must be positive");
                    }
                }
            }
            Kind::PseudoBalayage | Kind::GaussVariational | Kind::Capacitary => {}
        }
        Ok(())
    }
}

fn check_point(path: &str, x: &[f64], dim: usize) -> Result<(), ConfigError> {
    if x.len() != dim {
        return invalid(
            path,
            format!("has {} coordinates, kernel.dim is {dim}", x.len()),
        );
    }
    if x.iter().any(|c| !c.is_finite()) {
        return invalid(path, "coordinates must be finite");
    }
    Ok(())
}
