//! Minimization of the Gauss functional over the nonnegative cone
//! (pseudo-balayage, capacitary measure) and over the unit-mass simplex
//! (weighted equilibrium).
//!
//! Both problems are the convex quadratic program
//!
//! ```text
//!     minimize  ½ wᵀ K w − bᵀ w     subject to  w ≥ 0  [and Σ w = 1]
//! ```
//!
//! with `K` the regularized kernel matrix on the nodes of `A` and `b` the
//! potential of the field measure there. The solver is projected gradient
//! with Barzilai–Borwein steps. Each trial step is followed by an exact line
//! search on the segment to the projected point, so the objective never
//! increases. Termination is decided by the KKT conditions themselves:
//!
//! * cone: `g = Kw − b ≥ 0` everywhere and `Σ wᵢ gᵢ = 0`;
//! * simplex: `g ≥ c` everywhere and `g = c` where `w > 0`, with `c = wᵀg`.
//!
//! Residuals are measured relative to `max(1, max |bᵢ|)`.
//!
//! Reported objectives come in two conventions: `objective` is the internal
//! `½ wᵀKw − bᵀw`, while `objective_paper_convention` is the Gauss functional
//! `I_f(μ) = wᵀKw − 2 bᵀw`, i.e. twice the internal value.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::geometry::NodeSet;
use crate::kernel::{kernel_matrix, potential, KernelContext, KernelMatrix};
use crate::linalg::{dot, max_abs, project_simplex, DenseMatrix};
use crate::measures::{DiscreteMeasure, SignedMeasure};

/// How the projected-gradient step length is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `1/L`, with `L` a 30-step power-iteration estimate of `‖K‖₂`.
    FixedInverseLipschitz,
    /// Adaptive Barzilai–Borwein (alternating long/short step), safeguarded by
    /// the monotone segment search.
    AdaptiveBbWithMonotoneFallback,
}

/// Deterministic starting point, projected onto the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPoint {
    Zero,
    Uniform,
    Vertex(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub kkt_tol: f64,
    pub step_rule: StepRule,
    /// `None` picks zero on the cone and the uniform measure on the simplex.
    pub start: Option<StartPoint>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            kkt_tol: 1e-8,
            step_rule: StepRule::AdaptiveBbWithMonotoneFallback,
            start: None,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, kkt_tol: f64) -> Self {
        self.kkt_tol = kkt_tol;
        self
    }

    pub fn with_start(mut self, start: StartPoint) -> Self {
        self.start = Some(start);
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return argument("max_iters must be at least 1");
        }
        if !(self.kkt_tol.is_finite() && self.kkt_tol > 0.0) {
            return argument(format!("kkt_tol must be positive, got {}", self.kkt_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// `½ wᵀKw − bᵀw`.
    pub objective: f64,
    /// `wᵀKw − 2 bᵀw`, the Gauss functional value.
    pub objective_paper_convention: f64,
    /// Largest violation of the sign condition, relative to the scale.
    pub kkt_stationarity: f64,
    /// Complementarity residual, relative to the scale.
    pub kkt_complementarity: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `c = wᵀ(Kw − b)` for unit-mass problems.
    pub equilibrium_constant: Option<f64>,
    pub total_mass: f64,
    /// Internal objective after every accepted step.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

/// A minimizer together with the field and its own potential on the nodes.
#[derive(Debug, Clone)]
pub struct Solution {
    pub measure: DiscreteMeasure,
    pub report: SolveReport,
    /// `U^ω` at the nodes.
    pub field_values: Vec<f64>,
    /// `U^μ` at the nodes, `μ` the minimizer.
    pub potential_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Feasible {
    Cone,
    Simplex,
}

fn check_problem(k: &DenseMatrix, b: &[f64]) -> Result<()> {
    if !k.is_square() {
        return argument(format!(
            "kernel matrix is {}x{}, not square",
            k.rows(),
            k.cols()
        ));
    }
    if k.rows() == 0 {
        return argument("empty problem: no nodes");
    }
    if b.len() != k.rows() {
        return argument(format!("{} field values for {} nodes", b.len(), k.rows()));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return argument("field values must be finite");
    }
    if !k.is_symmetric(1e-12) {
        return argument("kernel matrix is not symmetric");
    }
    Ok(())
}

/// `(stationarity, complementarity, constant)` in absolute units.
fn kkt_residuals(set: Feasible, w: &[f64], g: &[f64]) -> (f64, f64, f64) {
    match set {
        Feasible::Cone => {
            let stat = g.iter().fold(0.0f64, |m, &gi| m.max(-gi));
            (stat, dot(w, g).abs(), 0.0)
        }
        Feasible::Simplex => {
            let c = dot(w, g);
            let stat = g.iter().fold(0.0f64, |m, &gi| m.max(c - gi));
            let comp = w.iter().zip(g).map(|(wi, gi)| wi * (gi - c).abs()).sum();
            (stat, comp, c)
        }
    }
}

fn project(set: Feasible, v: &[f64]) -> Vec<f64> {
    match set {
        Feasible::Cone => v.iter().map(|x| x.max(0.0)).collect(),
        Feasible::Simplex => project_simplex(v),
    }
}

fn initial_point(set: Feasible, n: usize, start: Option<StartPoint>) -> Result<Vec<f64>> {
    let start = start.unwrap_or(match set {
        Feasible::Cone => StartPoint::Zero,
        Feasible::Simplex => StartPoint::Uniform,
    });
    let raw = match start {
        StartPoint::Zero => vec![0.0; n],
        StartPoint::Uniform => vec![1.0 / n as f64; n],
        StartPoint::Vertex(i) if i < n => {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        }
        StartPoint::Vertex(i) => return argument(format!("start vertex {i} out of range")),
    };
    Ok(project(set, &raw))
}

/// Exact gradient refresh interval; the incremental update drifts slowly.
const REFRESH_EVERY: usize = 64;

fn projected_gradient(
    k: &DenseMatrix,
    b: &[f64],
    set: Feasible,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    check_problem(k, b)?;
    let n = b.len();
    let scale = max_abs(b).max(1.0);
    let tol = cfg.kkt_tol * scale;

    let mut w = initial_point(set, n, cfg.start)?;
    let mut kw = k.matvec(&w);
    let mut g: Vec<f64> = kw.iter().zip(b).map(|(a, bi)| a - bi).collect();
    let objective = |w: &[f64], kw: &[f64]| 0.5 * dot(w, kw) - dot(b, w);
    let mut f = objective(&w, &kw);

    let lipschitz = match cfg.step_rule {
        StepRule::FixedInverseLipschitz => k.power_norm(30),
        // max absolute row sum bounds the spectral norm from above
        StepRule::AdaptiveBbWithMonotoneFallback => (0..n)
            .map(|i| k.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max),
    };
    let base_step = if lipschitz > 0.0 {
        1.0 / lipschitz
    } else {
        1.0
    };
    let mut step = base_step;
    let mut trace = Vec::new();
    let mut kd = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let (stat, comp, _) = kkt_residuals(set, &w, &g);
        if stat <= tol && comp <= tol {
            // confirm against an exact gradient before stopping
            k.matvec_into(&w, &mut kw);
            for ((gi, a), bi) in g.iter_mut().zip(&kw).zip(b) {
                *gi = a - bi;
            }
            f = objective(&w, &kw);
            let (stat, comp, _) = kkt_residuals(set, &w, &g);
            if stat <= tol && comp <= tol {
                converged = true;
                break;
            }
        }
        iterations += 1;

        // the simplex projection ignores constant shifts of the gradient;
        // removing c keeps the trial point near the simplex for long steps
        let shift = match set {
            Feasible::Cone => 0.0,
            Feasible::Simplex => dot(&w, &g),
        };
        let trial: Vec<f64> = w
            .iter()
            .zip(&g)
            .map(|(wi, gi)| wi - step * (gi - shift))
            .collect();
        let projected = project(set, &trial);
        let d: Vec<f64> = projected.iter().zip(&w).map(|(p, wi)| p - wi).collect();
        k.matvec_into(&d, &mut kd);
        let curvature = dot(&d, &kd);
        let slope = dot(&g, &d);
        if !(slope < 0.0 && curvature > 0.0) {
            // no numerical descent along this projection arc; lengthen it
            step = (step * 4.0).min(base_step * 1e12);
            continue;
        }
        // the full projected step whenever it lowers the objective, otherwise
        // the exact minimizer along the segment
        let t_exact = -slope / curvature;
        let t = if t_exact >= 0.5 { 1.0 } else { t_exact };
        if t == 1.0 {
            // take the projected point itself so that exact zeros stay exact
            w = projected;
        } else {
            for (wi, di) in w.iter_mut().zip(&d) {
                *wi = (*wi + t * di).max(0.0);
            }
        }
        for (gi, kdi) in g.iter_mut().zip(&kd) {
            *gi += t * kdi;
        }
        f += t * slope + 0.5 * t * t * curvature;

        if iterations % REFRESH_EVERY == 0 {
            k.matvec_into(&w, &mut kw);
            for ((gi, a), bi) in g.iter_mut().zip(&kw).zip(b) {
                *gi = a - bi;
            }
            f = objective(&w, &kw);
        }
        trace.push(f);

        step = match cfg.step_rule {
            StepRule::FixedInverseLipschitz => base_step,
            StepRule::AdaptiveBbWithMonotoneFallback => {
                let long = dot(&d, &d) / curvature;
                let short = curvature / dot(&kd, &kd);
                if short < 0.5 * long {
                    short
                } else {
                    long
                }
            }
        };
    }

    if !converged {
        k.matvec_into(&w, &mut kw);
        for ((gi, a), bi) in g.iter_mut().zip(&kw).zip(b) {
            *gi = a - bi;
        }
        f = objective(&w, &kw);
    }
    let (stat, comp, c) = kkt_residuals(set, &w, &g);
    let report = SolveReport {
        objective: f,
        objective_paper_convention: 2.0 * f,
        kkt_stationarity: stat / scale,
        kkt_complementarity: comp / scale,
        iterations,
        converged,
        equilibrium_constant: (set == Feasible::Simplex).then_some(c),
        total_mass: w.iter().sum(),
        objective_trace: trace,
    };
    Ok((w, report))
}

/// Minimizes `½ wᵀKw − bᵀw` over `w ≥ 0`.
///
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn minimize_on_cone(
    k: &DenseMatrix,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    projected_gradient(k, b, Feasible::Cone, cfg)
}

/// Minimizes `½ wᵀKw − bᵀw` over the probability simplex.
pub fn minimize_on_simplex(
    k: &DenseMatrix,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    projected_gradient(k, b, Feasible::Simplex, cfg)
}

/// A node set together with its assembled kernel matrix, so that several
/// problems on the same set share one assembly.
#[derive(Debug, Clone)]
pub struct Discretization {
    nodes: Arc<NodeSet>,
    kernel: KernelMatrix,
}

impl Discretization {
    pub fn new(nodes: Arc<NodeSet>, ctx: &KernelContext) -> Result<Self> {
        if nodes.is_empty() {
            return argument("the set A has no nodes");
        }
        let kernel = kernel_matrix(&nodes, &nodes, ctx)?;
        Ok(Self { nodes, kernel })
    }

    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn context(&self) -> &KernelContext {
        self.kernel.context()
    }

    /// `U^ω = U^{ω⁺} − U^{ω⁻}` at the nodes.
    pub fn field(&self, omega: &SignedMeasure) -> Result<Vec<f64>> {
        let ctx = self.context();
        let plus = potential(omega.plus(), &self.nodes, ctx)?;
        let minus = potential(omega.minus(), &self.nodes, ctx)?;
        Ok(plus.iter().zip(&minus).map(|(p, m)| p - m).collect())
    }

    fn finish(&self, w: Vec<f64>, report: SolveReport, field_values: Vec<f64>) -> Result<Solution> {
        let potential_values = self.kernel.matrix().matvec(&w);
        Ok(Solution {
            measure: DiscreteMeasure::new(self.nodes.clone(), w)?,
            report,
            field_values,
            potential_values,
        })
    }

    pub fn pseudo_balayage(&self, omega: &SignedMeasure, cfg: &SolverConfig) -> Result<Solution> {
        self.pseudo_balayage_of_field(self.field(omega)?, cfg)
    }

    /// Cone problem for precomputed field values `U^ω` on the nodes.
    pub fn pseudo_balayage_of_field(&self, b: Vec<f64>, cfg: &SolverConfig) -> Result<Solution> {
        let (w, report) = minimize_on_cone(self.kernel.matrix(), &b, cfg)?;
        self.finish(w, report, b)
    }

    pub fn gauss_variational(&self, omega: &SignedMeasure, cfg: &SolverConfig) -> Result<Solution> {
        self.gauss_variational_of_field(self.field(omega)?, cfg)
    }

    pub fn gauss_variational_of_field(&self, b: Vec<f64>, cfg: &SolverConfig) -> Result<Solution> {
        let (w, report) = minimize_on_simplex(self.kernel.matrix(), &b, cfg)?;
        self.finish(w, report, b)
    }

    pub fn capacitary(&self, cfg: &SolverConfig) -> Result<Capacitary> {
        let ones = vec![1.0; self.nodes.len()];
        let (w, report) = minimize_on_cone(self.kernel.matrix(), &ones, cfg)?;
        let gamma = DiscreteMeasure::new(self.nodes.clone(), w)?;
        Ok(Capacitary {
            capacity: gamma.total_mass(),
            gamma,
            report,
        })
    }
}

/// Capacitary measure `γ_K` and capacity `c(K) = γ_K(ℝⁿ)`.
#[derive(Debug, Clone)]
pub struct Capacitary {
    pub gamma: DiscreteMeasure,
    pub capacity: f64,
    pub report: SolveReport,
}

/// Pseudo-balayage of `omega` onto the nodes `a`.
pub fn solve_pseudo_balayage(
    omega: &SignedMeasure,
    a: Arc<NodeSet>,
    ctx: &KernelContext,
    cfg: &SolverConfig,
) -> Result<Solution> {
    Discretization::new(a, ctx)?.pseudo_balayage(omega, cfg)
}

/// Capacitary measure of the nodes `k`: minimizer of `‖μ‖² − 2 μ(K)`.
pub fn solve_capacitary(
    k: Arc<NodeSet>,
    ctx: &KernelContext,
    cfg: &SolverConfig,
) -> Result<Capacitary> {
    Discretization::new(k, ctx)?.capacitary(cfg)
}

/// Weighted equilibrium measure: the Gauss functional minimized over unit
/// measures on the nodes `a`.
pub fn solve_gauss_variational(
    omega: &SignedMeasure,
    a: Arc<NodeSet>,
    ctx: &KernelContext,
    cfg: &SolverConfig,
) -> Result<Solution> {
    Discretization::new(a, ctx)?.gauss_variational(omega, cfg)
}
