//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use riesz_core::{
    make_sphere, DiscreteMeasure, Discretization, KernelContext, NodeSet, Point, SignedMeasure,
};

/// Unit sphere in R^3 with `n` nodes.
pub fn sphere(n: usize) -> Arc<NodeSet> {
    let origin = Point::origin(3).expect("dimension 3");
    Arc::new(make_sphere(&origin, 1.0, n, 3).expect("valid sphere"))
}

/// Discretized sphere and the field of a central unit Dirac.
pub fn dirac_sphere(n: usize, alpha: f64) -> (Discretization, Vec<f64>) {
    let ctx = KernelContext::new(alpha, 3).expect("valid kernel");
    let disc = Discretization::new(sphere(n), &ctx).expect("non-empty");
    let atom = DiscreteMeasure::dirac(&Point::origin(3).unwrap(), 1.0).expect("dirac");
    let omega = SignedMeasure::positive(atom);
    let b = disc.field(&omega).expect("field");
    (disc, b)
}

/// Deterministic vector with mixed signs, for the projection bench.
pub fn wavy(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (i as f64 * 0.7).sin() + 0.3 * (i as f64 * 0.13).cos())
        .collect()
}
