//! Discrete inner pseudo-balayage and weighted equilibrium problems for
//! Riesz kernels `|x − y|^{α−n}`.
//!
//! Measures are finite sums of point masses on node sets; the energy
//! minimizations become small convex quadratic programs over the
//! nonnegative cone or the unit-mass simplex.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod measures;
pub mod solvers;

pub use error::{Result, RieszError};
pub use geometry::{
    invert, make_ball, make_sphere, make_truncated_complement, AnnulusLattice, NodeSet, Point,
};
pub use kernel::{
    energy, gauss_functional, kernel_matrix, mutual_energy, off_diagonal_energy, potential,
    riesz_kernel, KernelContext, KernelMatrix,
};
pub use linalg::DenseMatrix;
pub use measures::{kelvin_transform, DiscreteMeasure, SignedMeasure};
pub use solvers::{
    minimize_on_cone, minimize_on_simplex, solve_capacitary, solve_gauss_variational,
    solve_pseudo_balayage, Capacitary, Discretization, Solution, SolveReport, SolverConfig,
    StartPoint, StepRule,
};
