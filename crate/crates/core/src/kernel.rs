//! Riesz kernel `|x − y|^{α−n}`, regularized kernel matrices, potentials,
//! energies and the Gauss functional.
//!
//! Two nodes that coincide exactly interact through the regularized value
//! `(reg_factor · spacing_i)^{α−n}`, where `i` indexes the row (evaluation)
//! node. Every other pair uses the exact kernel.

use rayon::prelude::*;

use crate::error::{argument, Result, RieszError};
use crate::geometry::{squared_distance, NodeSet};
use crate::linalg::{dot, DenseMatrix};
use crate::measures::{DiscreteMeasure, SignedMeasure};

pub const DEFAULT_REG_FACTOR: f64 = 0.5;

/// Riesz parameters `(α, n)` plus the self-interaction policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext {
    alpha: f64,
    dim: usize,
    reg_factor: f64,
}

impl KernelContext {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        Self::with_reg_factor(alpha, dim, DEFAULT_REG_FACTOR)
    }

    pub fn with_reg_factor(alpha: f64, dim: usize, reg_factor: f64) -> Result<Self> {
        if dim < 2 {
            return Err(RieszError::Dimension(format!("dimension {dim} < 2")));
        }
        if !(alpha > 0.0 && alpha < dim as f64) {
            return argument(format!("alpha must lie in (0, {dim}), got {alpha}"));
        }
        if !(reg_factor.is_finite() && reg_factor > 0.0) {
            return argument(format!("reg_factor must be positive, got {reg_factor}"));
        }
        Ok(Self {
            alpha,
            dim,
            reg_factor,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reg_factor(&self) -> f64 {
        self.reg_factor
    }

    /// `α − n`, always negative.
    pub fn exponent(&self) -> f64 {
        self.alpha - self.dim as f64
    }

    /// Constant in the total-mass bound: 1 for α ≤ 2, `2^{n−α}` otherwise.
    pub fn mass_bound_constant(&self) -> f64 {
        if self.alpha <= 2.0 {
            1.0
        } else {
            2f64.powf(-self.exponent())
        }
    }

    /// Regularized self-interaction of a node with the given spacing.
    pub fn self_interaction(&self, spacing: f64) -> f64 {
        (self.reg_factor * spacing).powf(self.exponent())
    }

    #[inline]
    fn entry(&self, x: &[f64], y: &[f64], row_spacing: f64) -> f64 {
        let d2 = squared_distance(x, y);
        if d2 == 0.0 {
            self.self_interaction(row_spacing)
        } else {
            d2.sqrt().powf(self.exponent())
        }
    }

    fn check_nodes(&self, nodes: &NodeSet) -> Result<()> {
        if nodes.dim() != self.dim {
            return Err(RieszError::Dimension(format!(
                "nodes live in dimension {}, kernel in {}",
                nodes.dim(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// Exact kernel value `|x − y|^{α−n}`.
pub fn riesz_kernel(x: &[f64], y: &[f64], ctx: &KernelContext) -> Result<f64> {
    if x.len() != ctx.dim || y.len() != ctx.dim {
        return Err(RieszError::Dimension(format!(
            "points of length {} and {} for a {}-dimensional kernel",
            x.len(),
            y.len(),
            ctx.dim
        )));
    }
    let d2 = squared_distance(x, y);
    if d2 == 0.0 {
        return Err(RieszError::Singularity {
            index: 0,
            detail: "kernel evaluated at coincident points".into(),
        });
    }
    Ok(d2.sqrt().powf(ctx.exponent()))
}

/// Dense kernel matrix between two node sets.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    matrix: DenseMatrix,
    ctx: KernelContext,
}

impl KernelMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

pub fn kernel_matrix(rows: &NodeSet, cols: &NodeSet, ctx: &KernelContext) -> Result<KernelMatrix> {
    ctx.check_nodes(rows)?;
    ctx.check_nodes(cols)?;
    let spacing = rows.spacing();
    let matrix = DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        ctx.entry(rows.point(i), cols.point(j), spacing[i])
    });
    Ok(KernelMatrix { matrix, ctx: *ctx })
}

/// Potential `U^μ` at every node of `at`.
pub fn potential(mu: &DiscreteMeasure, at: &NodeSet, ctx: &KernelContext) -> Result<Vec<f64>> {
    ctx.check_nodes(at)?;
    ctx.check_nodes(mu.nodes())?;
    let src = mu.nodes();
    let w = mu.weights();
    let spacing = at.spacing();
    Ok((0..at.len())
        .into_par_iter()
        .map(|i| {
            let x = at.point(i);
            let mut acc = 0.0;
            for (j, y) in src.points().enumerate() {
                acc += ctx.entry(x, y, spacing[i]) * w[j];
            }
            acc
        })
        .collect())
}

/// Unregularized potential at a single point that is not an atom of `mu`.
pub fn exact_potential_at(mu: &DiscreteMeasure, x: &[f64], ctx: &KernelContext) -> Result<f64> {
    let mut acc = 0.0;
    for (j, (y, w)) in mu.nodes().points().zip(mu.weights()).enumerate() {
        acc += w * riesz_kernel(x, y, ctx).map_err(|_| RieszError::Singularity {
            index: j,
            detail: "evaluation point coincides with an atom".into(),
        })?;
    }
    Ok(acc)
}

/// `I(μ, ν) = wᵀ K(μ, ν) v`.
pub fn mutual_energy(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    ctx: &KernelContext,
) -> Result<f64> {
    Ok(dot(mu.weights(), &potential(nu, mu.nodes(), ctx)?))
}

/// `I(μ) = wᵀ K w`.
pub fn energy(mu: &DiscreteMeasure, ctx: &KernelContext) -> Result<f64> {
    mutual_energy(mu, mu, ctx)
}

/// `Σ_{i≠j} wᵢ wⱼ |yᵢ − yⱼ|^{α−n}`: the energy without the regularized
/// self-interaction terms, which are not invariant under inversion.
pub fn off_diagonal_energy(mu: &DiscreteMeasure, ctx: &KernelContext) -> Result<f64> {
    ctx.check_nodes(mu.nodes())?;
    let nodes = mu.nodes();
    let w = mu.weights();
    let rows: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let x = nodes.point(i);
            let mut acc = 0.0;
            for (j, y) in nodes.points().enumerate() {
                if j != i {
                    acc += w[j] * squared_distance(x, y).sqrt().powf(ctx.exponent());
                }
            }
            w[i] * acc
        })
        .collect();
    Ok(rows.iter().sum())
}

/// `I_f(μ) = ‖μ‖² − 2 ∫ U^ω dμ`, the Gauss functional for the field `f = −U^ω`.
pub fn gauss_functional(
    mu: &DiscreteMeasure,
    omega: &SignedMeasure,
    ctx: &KernelContext,
) -> Result<f64> {
    let field = mutual_energy(mu, omega.plus(), ctx)? - mutual_energy(mu, omega.minus(), ctx)?;
    Ok(energy(mu, ctx)? - 2.0 * field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_sphere, Point};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(alpha: f64, dim: usize) -> KernelContext {
        KernelContext::new(alpha, dim).unwrap()
    }

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> NodeSet {
        let pts = (0..n)
            .map(|_| {
                p(&(0..dim)
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect::<Vec<_>>())
            })
            .collect();
        NodeSet::from_points(dim, pts).unwrap()
    }

    fn random_measure(rng: &mut ChaCha8Rng, nodes: NodeSet) -> DiscreteMeasure {
        let w = (0..nodes.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        DiscreteMeasure::new(Arc::new(nodes), w).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(KernelContext::new(3.0, 3).is_err());
        assert!(KernelContext::new(0.0, 3).is_err());
        assert!(KernelContext::with_reg_factor(1.0, 3, 0.0).is_err());
        assert_eq!(ctx(2.5, 3).mass_bound_constant(), 2f64.sqrt());
        assert_eq!(ctx(2.0, 3).mass_bound_constant(), 1.0);
    }

    #[test]
    fn kernel_values() {
        let o = [0.0, 0.0, 0.0];
        for (alpha, dim) in [(1.0, 3), (2.0, 3), (0.5, 2), (2.5, 3)] {
            let c = ctx(alpha, dim);
            let x = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            y[0] = 1.0;
            assert_eq!(riesz_kernel(&x, &y, &c).unwrap(), 1.0);
        }
        assert_eq!(
            riesz_kernel(&o, &[2.0, 0.0, 0.0], &ctx(1.0, 3)).unwrap(),
            0.25
        );
        assert_relative_eq!(
            riesz_kernel(&o, &[0.5, 0.0, 0.0], &ctx(2.0, 3)).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        assert!(matches!(
            riesz_kernel(&o, &o, &ctx(2.0, 3)),
            Err(RieszError::Singularity { .. })
        ));
    }

    #[test]
    fn two_node_matrix() {
        let nodes = NodeSet::with_spacing(
            3,
            vec![p(&[0.0, 0.0, 0.0]), p(&[1.0, 0.0, 0.0])],
            vec![0.1, 0.1],
        )
        .unwrap();
        let k = kernel_matrix(&nodes, &nodes, &ctx(2.0, 3)).unwrap();
        assert_eq!(k.get(0, 1), 1.0);
        assert_relative_eq!(k.get(0, 0), 20.0, max_relative = 1e-14);
        assert_relative_eq!(k.get(1, 1), 20.0, max_relative = 1e-14);
    }

    #[test]
    fn matrix_matches_double_loop_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (alpha, dim, n) in [(1.5, 3, 20), (2.5, 3, 50), (1.0, 2, 35)] {
            let c = ctx(alpha, dim);
            let nodes = random_cloud(&mut rng, n, dim);
            let k = kernel_matrix(&nodes, &nodes, &c).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j {
                        (0.5 * nodes.spacing()[i]).powf(alpha - dim as f64)
                    } else {
                        let d: f64 = (0..dim)
                            .map(|k| (nodes.point(i)[k] - nodes.point(j)[k]).powi(2))
                            .sum();
                        d.sqrt().powf(alpha - dim as f64)
                    };
                    assert_eq!(k.get(i, j), expected);
                }
            }
            assert!(k.matrix().is_symmetric(0.0));
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let nodes = make_sphere(&Point::origin(2).unwrap(), 1.0, 5, 2).unwrap();
        assert!(matches!(
            kernel_matrix(&nodes, &nodes, &ctx(1.0, 3)),
            Err(RieszError::Dimension(_))
        ));
    }

    #[test]
    fn potential_of_unit_atom_and_zero() {
        let c = ctx(2.0, 3);
        let atom = DiscreteMeasure::dirac(&Point::origin(3).unwrap(), 1.0).unwrap();
        let sphere = make_sphere(&Point::origin(3).unwrap(), 1.0, 30, 3).unwrap();
        let u = potential(&atom, &sphere, &c).unwrap();
        assert!(u.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let zero = DiscreteMeasure::zero(Arc::new(sphere.clone()));
        assert!(potential(&zero, &sphere, &c)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn potential_is_additive() {
        let c = ctx(1.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let at = random_cloud(&mut rng, 12, 3);
        let a = DiscreteMeasure::dirac(&p(&[3.0, 0.0, 0.0]), 0.7).unwrap();
        let b = DiscreteMeasure::dirac(&p(&[0.0, -2.0, 1.0]), 1.3).unwrap();
        let both = a.add(&b).unwrap();
        let ua = potential(&a, &at, &c).unwrap();
        let ub = potential(&b, &at, &c).unwrap();
        let uab = potential(&both, &at, &c).unwrap();
        for i in 0..at.len() {
            assert_relative_eq!(uab[i], ua[i] + ub[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn single_atom_energy_is_diagonal() {
        let nodes = NodeSet::with_spacing(3, vec![p(&[0.0, 0.0, 0.0])], vec![0.1]).unwrap();
        let mu = DiscreteMeasure::new(Arc::new(nodes), vec![1.0]).unwrap();
        assert_relative_eq!(
            energy(&mu, &ctx(2.0, 3)).unwrap(),
            20.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn energy_is_bilinear_and_symmetric() {
        let c = ctx(2.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cloud = random_cloud(&mut rng, 15, 3);
        let mu = random_measure(&mut rng, cloud);
        let cloud = random_cloud(&mut rng, 9, 3);
        let nu = random_measure(&mut rng, cloud);
        let mn = mutual_energy(&mu, &nu, &c).unwrap();
        assert_relative_eq!(
            mn,
            mutual_energy(&nu, &mu, &c).unwrap(),
            max_relative = 1e-13
        );
        let sum = mu.add(&nu).unwrap();
        let lhs = energy(&sum, &c).unwrap();
        let rhs = energy(&mu, &c).unwrap() + 2.0 * mn + energy(&nu, &c).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn gauss_functional_basics() {
        let c = ctx(2.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nodes = Arc::new(random_cloud(&mut rng, 10, 3));
        let omega = SignedMeasure::from_signed_weights(
            nodes.clone(),
            (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let zero = DiscreteMeasure::zero(nodes.clone());
        assert_eq!(gauss_functional(&zero, &omega, &c).unwrap(), 0.0);
        let cloud = random_cloud(&mut rng, 8, 3);
        let mu = random_measure(&mut rng, cloud);
        let no_field = SignedMeasure::zero(nodes);
        let e = energy(&mu, &c).unwrap();
        assert!(e > 0.0);
        assert_eq!(gauss_functional(&mu, &no_field, &c).unwrap(), e);
    }

    #[test]
    fn gauss_functional_matches_expanded_double_loop() {
        let c = ctx(1.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cloud = random_cloud(&mut rng, 7, 3);
        let mu = random_measure(&mut rng, cloud);
        let field_nodes = Arc::new(random_cloud(&mut rng, 6, 3));
        let signed: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let omega =
            SignedMeasure::from_signed_weights(field_nodes.clone(), signed.clone()).unwrap();

        let e = c.exponent();
        let mut expected = 0.0;
        for i in 0..mu.len() {
            for j in 0..mu.len() {
                let k = if i == j {
                    (0.5 * mu.nodes().spacing()[i]).powf(e)
                } else {
                    crate::geometry::distance(mu.nodes().point(i), mu.nodes().point(j)).powf(e)
                };
                expected += mu.weights()[i] * mu.weights()[j] * k;
            }
            for (j, s) in signed.iter().enumerate() {
                let k =
                    crate::geometry::distance(mu.nodes().point(i), field_nodes.point(j)).powf(e);
                expected -= 2.0 * mu.weights()[i] * s * k;
            }
        }
        assert_relative_eq!(
            gauss_functional(&mu, &omega, &c).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gauss_functional_is_quadratic() {
        let c = ctx(2.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cloud = random_cloud(&mut rng, 10, 3);
        let mu = random_measure(&mut rng, cloud);
        let omega = SignedMeasure::new(
            DiscreteMeasure::dirac(&p(&[0.0, 0.0, 3.0]), 2.0).unwrap(),
            DiscreteMeasure::dirac(&p(&[0.0, 3.0, 0.0]), 0.5).unwrap(),
        )
        .unwrap();
        let f = |t: f64| gauss_functional(&mu.scale(t).unwrap(), &omega, &c).unwrap();
        // I_f(tμ) = a t² + b t, so f(3) − 3 f(2) + 3 f(1) − f(0) = 0 and f(0) = 0
        let (f1, f2, f3) = (f(1.0), f(2.0), f(3.0));
        let a = (f2 - 2.0 * f1) / 2.0;
        let b = f1 - a;
        assert_relative_eq!(f3, 9.0 * a + 3.0 * b, max_relative = 1e-12);
        assert_eq!(f(0.0), 0.0);
    }

    #[test]
    fn energy_positive_on_generated_clouds() {
        let c = ctx(2.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sphere = Arc::new(make_sphere(&Point::origin(3).unwrap(), 1.0, 200, 3).unwrap());
        for _ in 0..10 {
            let w = (0..sphere.len())
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        rng.gen_range(0.0..1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let mu = DiscreteMeasure::new(sphere.clone(), w).unwrap();
            if mu.total_mass() > 0.0 {
                assert!(energy(&mu, &c).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn off_diagonal_energy_drops_self_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cloud = random_cloud(&mut rng, 12, 3);
        let mu = random_measure(&mut rng, cloud);
        let ctx = KernelContext::new(1.7, 3).unwrap();
        let diag: f64 = mu
            .weights()
            .iter()
            .zip(mu.nodes().spacing())
            .map(|(w, h)| w * w * ctx.self_interaction(*h))
            .sum();
        let full = energy(&mu, &ctx).unwrap();
        assert_relative_eq!(
            off_diagonal_energy(&mu, &ctx).unwrap(),
            full - diag,
            max_relative = 1e-12
        );
    }
}
