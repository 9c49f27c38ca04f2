//! Executes a validated scenario and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use riesz_core::analysis::{
    check_balayage_specialization, check_pseudo_balayage, check_weighted_equilibrium,
    normalize_by_pseudo_balayage_mass, shell_capacities, thinness_series, truncation_sweep,
};
use riesz_core::kernel::exact_potential_at;
use riesz_core::{
    io, kelvin_transform, make_ball, make_sphere, off_diagonal_energy, AnnulusLattice,
    DiscreteMeasure, Discretization, KernelContext, NodeSet, Point, RieszError, SignedMeasure,
    SolveReport,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Field, Format, Geometry, Kind, Normalize, ScenarioConfig};

pub const OUT_ENV: &str = "RIESZ_OUT";
pub const DEFAULT_OUT: &str = "riesz-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] RieszError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// What a run produced. `converged` is false if any solve hit `max_iters`.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub summaries: Vec<String>,
    pub converged: bool,
}

/// Output directory: the flag, then the config, then `RIESZ_OUT`, then
/// `riesz-out/<scenario name>`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ScenarioConfig, env: Option<PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.output.directory {
        return p.clone();
    }
    let name = cfg
        .name
        .clone()
        .unwrap_or_else(|| scenario_label(cfg.kind).to_string());
    env.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)).join(name)
}

fn scenario_label(kind: Kind) -> &'static str {
    match kind {
        Kind::PseudoBalayage => "pseudo_balayage",
        Kind::GaussVariational => "gauss_variational",
        Kind::Capacitary => "capacitary",
        Kind::Sweep => "sweep",
        Kind::Thinness => "thinness",
        Kind::KelvinCheck => "kelvin_check",
        Kind::BalayageCheck => "balayage_check",
    }
}

struct Artifacts {
    dir: PathBuf,
    csv: bool,
    json: bool,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            csv: formats.contains(&Format::Csv),
            json: formats.contains(&Format::Json),
            written: Vec::new(),
        })
    }

    fn write<F>(&mut self, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut std::io::BufWriter<fs::File>) -> riesz_core::Result<()>,
    {
        let path = self.dir.join(name);
        io::to_file(&path, f)?;
        self.written.push(path);
        Ok(())
    }

    fn csv<F>(&mut self, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut std::io::BufWriter<fs::File>) -> riesz_core::Result<()>,
    {
        if self.csv {
            self.write(name, f)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if self.json {
            self.write(name, |w| io::write_json(w, value))?;
        }
        Ok(())
    }

    fn report(&mut self, name: &str, report: &SolveReport) -> Result<(), CliError> {
        if self.json {
            self.write(name, |w| io::write_report(w, report))?;
        }
        Ok(())
    }
}

fn origin_or(center: &Option<Vec<f64>>, dim: usize) -> riesz_core::Result<Point> {
    match center {
        Some(c) => Point::new(c.clone()),
        None => Point::origin(dim),
    }
}

fn annulus(g: &Geometry, outer_override: Option<f64>, dim: usize) -> riesz_core::Result<NodeSet> {
    let Geometry::Annulus {
        inner,
        outer,
        per_shell,
        ratio,
        shells,
    } = g
    else {
        unreachable!("validated as annulus")
    };
    let mut lattice =
        AnnulusLattice::new(*inner, outer_override.unwrap_or(*outer), dim).per_shell(*per_shell);
    if let Some(r) = ratio {
        lattice = lattice.ratio(*r);
    }
    if let Some(s) = shells {
        lattice = lattice.shells(*s);
    }
    lattice.build(0)
}

pub fn build_nodes(g: &Geometry, dim: usize, base: &Path) -> Result<NodeSet, CliError> {
    Ok(match g {
        Geometry::Sphere {
            center,
            radius,
            nodes,
        } => make_sphere(&origin_or(center, dim)?, *radius, *nodes, dim)?,
        Geometry::Ball {
            center,
            radius,
            nodes,
        } => make_ball(&origin_or(center, dim)?, *radius, *nodes, dim)?,
        Geometry::Annulus { .. } => annulus(g, None, dim)?,
        Geometry::File { path } => {
            let full = base.join(path);
            let file =
                fs::File::open(&full).map_err(|source| CliError::Io { path: full, source })?;
            let nodes = io::read_nodes(std::io::BufReader::new(file))?;
            if nodes.dim() != dim {
                return Err(ConfigError {
                    path: "geometry.path".into(),
                    message: format!("nodes have dimension {}, kernel.dim is {dim}", nodes.dim()),
                }
                .into());
            }
            nodes
        }
    })
}

/// Field atoms split by sign; `fallback` supplies the node set of a zero field.
fn build_field(
    field: &Field,
    dim: usize,
    fallback: &Arc<NodeSet>,
) -> riesz_core::Result<SignedMeasure> {
    let Field::Atoms(f) = field else {
        return Ok(SignedMeasure::zero(fallback.clone()));
    };
    let mut plus = (Vec::new(), Vec::new());
    let mut minus = (Vec::new(), Vec::new());
    for a in &f.atoms {
        let side = if a.mass >= 0.0 { &mut plus } else { &mut minus };
        side.0.push(Point::new(a.at.clone())?);
        side.1.push(a.mass.abs());
    }
    SignedMeasure::new(
        DiscreteMeasure::from_atoms(dim, plus.0, plus.1)?,
        DiscreteMeasure::from_atoms(dim, minus.0, minus.1)?,
    )
}

fn normalization(field: &Field) -> Option<Normalize> {
    match field {
        Field::Atoms(f) => f.normalize,
        Field::None(_) => None,
    }
}

#[derive(Serialize)]
struct Normalization {
    normalize: Normalize,
    pseudo_balayage_mass: f64,
}

fn solve_line(label: &str, r: &SolveReport) -> String {
    let mut s = format!(
        "{label}: mass {:.6} objective {:.6e} iterations {} {}",
        r.total_mass,
        r.objective_paper_convention,
        r.iterations,
        if r.converged {
            "converged"
        } else {
            "NOT CONVERGED"
        }
    );
    if let Some(c) = r.equilibrium_constant {
        s.push_str(&format!(" c={c:.6e}"));
    }
    s
}

/// Runs `cfg` (already validated) writing into `out_dir`. `base` resolves
/// relative paths in the config.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let dim = cfg.kernel.dim;
    let ctx = KernelContext::with_reg_factor(cfg.kernel.alpha, dim, cfg.kernel.reg_factor)?;
    let solver = cfg.solver.to_config();
    let mut art = Artifacts::new(out_dir, &cfg.output.formats)?;
    art.json("scenario.json", cfg)?;
    let mut summaries = Vec::new();
    let mut converged = true;

    if cfg.kind == Kind::Sweep {
        let radii = &cfg.sweep.as_ref().expect("validated").outer_radii;
        let family = radii
            .iter()
            .map(|r| annulus(&cfg.geometry, Some(*r), dim).map(Arc::new))
            .collect::<riesz_core::Result<Vec<_>>>()?;
        let largest = family.last().expect("at least 3 radii").clone();
        let mut omega = build_field(&cfg.field, dim, &largest)?;
        if let Some(n) = normalization(&cfg.field) {
            let (scaled, q) = normalize_by_pseudo_balayage_mass(&omega, largest, &ctx, &solver)?;
            omega = scaled;
            art.json(
                "normalization.json",
                &Normalization {
                    normalize: n,
                    pseudo_balayage_mass: q,
                },
            )?;
            summaries.push(format!(
                "normalized field by pseudo-balayage mass q = {q:.6}"
            ));
        }
        art.csv("field.csv", |w| io::write_signed_measure(w, &omega))?;
        let out = truncation_sweep(&omega, &family, &ctx, &solver)?;
        for r in &out.records {
            converged &= r.converged;
            summaries.push(format!(
                "sweep R={:.4}: cone mass {:.6} w_hat {:.6e} w {:.6e} c {:.6e} support {:.4}{}",
                r.truncation_radius,
                r.cone_mass,
                r.cone_objective,
                r.slice_objective,
                r.equilibrium_constant,
                r.support_radius,
                if r.converged { "" } else { " NOT CONVERGED" }
            ));
        }
        summaries.push(format!(
            "classification: {} (m_infinity {:.6}, margin {}); objectives monotone: cone {} slice {}",
            serde_json::to_value(out.classification.verdict)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            out.classification.m_infinity,
            out.classification.margin,
            out.cone_monotone,
            out.slice_monotone
        ));
        art.csv("sweep.csv", |w| io::write_sweep(w, &out.records))?;
        art.json("classification.json", &out.classification)?;
        return Ok(RunOutcome {
            out_dir: out_dir.to_path_buf(),
            artifacts: art.written,
            summaries,
            converged,
        });
    }

    let nodes = Arc::new(build_nodes(&cfg.geometry, dim, base)?);
    art.csv("nodes.csv", |w| io::write_nodes(w, &nodes))?;
    let mut omega = build_field(&cfg.field, dim, &nodes)?;
    if let Some(n) = normalization(&cfg.field) {
        let (scaled, q) = normalize_by_pseudo_balayage_mass(&omega, nodes.clone(), &ctx, &solver)?;
        omega = scaled;
        art.json(
            "normalization.json",
            &Normalization {
                normalize: n,
                pseudo_balayage_mass: q,
            },
        )?;
        summaries.push(format!(
            "normalized field by pseudo-balayage mass q = {q:.6}"
        ));
    }
    if matches!(cfg.field, Field::Atoms(_)) {
        art.csv("field.csv", |w| io::write_signed_measure(w, &omega))?;
    }
    let check_tol = 10.0 * solver.kkt_tol;

    match cfg.kind {
        Kind::PseudoBalayage | Kind::GaussVariational => {
            let disc = Discretization::new(nodes.clone(), &ctx)?;
            let (sol, check) = if cfg.kind == Kind::PseudoBalayage {
                let sol = disc.pseudo_balayage(&omega, &solver)?;
                let check = check_pseudo_balayage(&sol, check_tol);
                (sol, check)
            } else {
                let sol = disc.gauss_variational(&omega, &solver)?;
                let check = check_weighted_equilibrium(&sol, check_tol);
                (sol, check)
            };
            converged &= sol.report.converged;
            summaries.push(solve_line(scenario_label(cfg.kind), &sol.report));
            summaries.push(format!(
                "characterization: {} (min excess {:.3e}, complementarity {:.3e})",
                if check.pass { "pass" } else { "FAIL" },
                check.min_excess,
                check.complementarity
            ));
            art.csv("measure.csv", |w| io::write_measure(w, &sol.measure))?;
            art.report("report.json", &sol.report)?;
            art.json("characterization.json", &check)?;
        }
        Kind::Capacitary => {
            let cap = Discretization::new(nodes.clone(), &ctx)?.capacitary(&solver)?;
            converged &= cap.report.converged;
            summaries.push(solve_line("capacitary", &cap.report));
            summaries.push(format!("capacity {:.6}", cap.capacity));
            art.csv("measure.csv", |w| io::write_measure(w, &cap.gamma))?;
            art.report("report.json", &cap.report)?;
            art.json(
                "capacity.json",
                &serde_json::json!({ "capacity": cap.capacity }),
            )?;
        }
        Kind::BalayageCheck => {
            let tolerance = cfg.balayage.as_ref().map_or(0.02, |b| b.tolerance);
            let r = check_balayage_specialization(
                omega.plus(),
                nodes.clone(),
                &ctx,
                &solver,
                tolerance,
            )?;
            converged &= r.solution.report.converged;
            summaries.push(solve_line("balayage_check", &r.solution.report));
            summaries.push(format!(
                "potential equality on all nodes: {} (max relative residual {:.3e}, tolerance {tolerance})",
                if r.pass { "pass" } else { "FAIL" },
                r.max_relative_residual
            ));
            art.csv("measure.csv", |w| io::write_measure(w, &r.solution.measure))?;
            art.report("report.json", &r.solution.report)?;
            art.json(
                "balayage.json",
                &serde_json::json!({
                    "max_relative_residual": r.max_relative_residual,
                    "total_mass": r.total_mass,
                    "tolerance": tolerance,
                    "pass": r.pass,
                }),
            )?;
        }
        Kind::Thinness => {
            let q = cfg.thinness.as_ref().expect("validated").q;
            let caps = shell_capacities(&nodes, q, &ctx, &solver)?;
            converged &= caps.converged;
            let series = thinness_series(&caps.capacities, q, ctx.alpha(), dim)?;
            summaries.push(format!(
                "thinness: {} shells, partial sum {:.6}, tail ratio {:.4}, verdict {}",
                series.terms.len(),
                series.partial_sums.last().copied().unwrap_or(0.0),
                series.tail_ratio,
                serde_json::to_value(series.verdict)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default()
            ));
            art.csv("thinness.csv", |w| {
                io::write_thinness(w, &caps.capacities, &series)
            })?;
            art.json(
                "thinness.json",
                &serde_json::json!({
                    "q": q,
                    "tail_ratio": series.tail_ratio,
                    "verdict": series.verdict,
                }),
            )?;
        }
        Kind::KelvinCheck => {
            let kv = cfg.kelvin.as_ref().expect("validated");
            let center = Point::new(kv.center.clone())?;
            let cap = Discretization::new(nodes.clone(), &ctx)?.capacitary(&solver)?;
            converged &= cap.report.converged;
            let checks = kelvin_checks(&cap.gamma, &center, kv.samples, &ctx)?;
            summaries.push(solve_line("capacitary", &cap.report));
            summaries.push(format!(
                "kelvin: mass identity {:.2e}, off-diagonal energy {:.2e}, potential identity {:.2e}",
                checks.mass_identity_error, checks.energy_error, checks.potential_error
            ));
            art.csv("measure.csv", |w| io::write_measure(w, &cap.gamma))?;
            art.csv("kelvin_measure.csv", |w| {
                io::write_measure(w, &checks.image)
            })?;
            art.report("report.json", &cap.report)?;
            art.json("kelvin.json", &checks)?;
        }
        Kind::Sweep => unreachable!("handled above"),
    }
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        artifacts: art.written,
        summaries,
        converged,
    })
}

#[derive(Serialize)]
struct KelvinChecks {
    atoms: usize,
    mass_identity_error: f64,
    energy_error: f64,
    potential_error: f64,
    samples: usize,
    #[serde(skip)]
    image: DiscreteMeasure,
}

/// Relative errors of the mass, energy and potential identities of the
/// inversion about `center`. Potentials are compared on a sphere about the
/// center inside the nearest atom.
fn kelvin_checks(
    gamma: &DiscreteMeasure,
    center: &Point,
    samples: usize,
    ctx: &KernelContext,
) -> riesz_core::Result<KelvinChecks> {
    let image = kelvin_transform(gamma, center, ctx)?;
    let u0 = exact_potential_at(gamma, center.coords(), ctx)?;
    let mass_identity_error = (image.total_mass() - u0).abs() / u0;
    let e = off_diagonal_energy(gamma, ctx)?;
    let energy_error =
        (off_diagonal_energy(&image, ctx)? - e).abs() / e.abs().max(f64::MIN_POSITIVE);

    let nearest = gamma
        .nodes()
        .points()
        .map(|y| riesz_core::geometry::distance(y, center.coords()))
        .fold(f64::INFINITY, f64::min);
    let probe = make_sphere(center, 0.5 * nearest, samples.max(2), ctx.dim())?;
    let mut potential_error: f64 = 0.0;
    for x in probe.points().take(samples) {
        let r2: f64 = x
            .iter()
            .zip(center.coords())
            .map(|(a, c)| (a - c).powi(2))
            .sum();
        let xs: Vec<f64> = x
            .iter()
            .zip(center.coords())
            .map(|(a, c)| c + (a - c) / r2)
            .collect();
        let lhs = exact_potential_at(&image, x, ctx)?;
        let rhs = r2.sqrt().powf(ctx.exponent()) * exact_potential_at(gamma, &xs, ctx)?;
        potential_error = potential_error.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    Ok(KelvinChecks {
        atoms: gamma.len(),
        mass_identity_error,
        energy_error,
        potential_error,
        samples,
        image,
    })
}
