mod common;

use std::sync::Arc;

use common::{point, random_instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riesz_core::kernel::exact_potential_at;
use riesz_core::{kelvin_transform, DiscreteMeasure, KernelContext, NodeSet};

/// `Σ_{i≠j} wᵢ wⱼ |yᵢ − yⱼ|^{α−n}`, the energy without diagonal terms.
fn off_diagonal_energy(mu: &DiscreteMeasure, ctx: &KernelContext) -> f64 {
    let w = mu.weights();
    let mut e = 0.0;
    for (i, x) in mu.nodes().points().enumerate() {
        for (j, y) in mu.nodes().points().enumerate() {
            if i != j {
                e += w[i] * w[j] * riesz_core::riesz_kernel(x, y, ctx).unwrap();
            }
        }
    }
    e
}

fn random_measure(seed: u64, n: usize) -> (DiscreteMeasure, KernelContext) {
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n);
    let weights = (0..n).map(|i| 0.1 + (i % 7) as f64 * 0.13).collect();
    (DiscreteMeasure::new(inst.nodes, weights).unwrap(), inst.ctx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn off_diagonal_energy_is_preserved(seed in any::<u64>(), n in 2usize..25) {
        let (mu, ctx) = random_measure(seed, n);
        let center = point(&[3.0, -0.5, 0.25]);
        let star = kelvin_transform(&mu, &center, &ctx).unwrap();
        let (e, e_star) = (off_diagonal_energy(&mu, &ctx), off_diagonal_energy(&star, &ctx));
        prop_assert!((e - e_star).abs() <= 1e-10 * e);
    }

    #[test]
    fn potentials_transform_covariantly(seed in any::<u64>(), n in 1usize..25, t in 0.1f64..5.0) {
        let (mu, ctx) = random_measure(seed, n);
        let center = point(&[0.0, 2.5, 0.0]);
        let star = kelvin_transform(&mu, &center, &ctx).unwrap();
        let x = [t, -0.3 * t, 1.0];
        let r2: f64 = x.iter().zip(center.coords()).map(|(a, c)| (a - c).powi(2)).sum();
        let x_star: Vec<f64> = x.iter().zip(center.coords()).map(|(a, c)| c + (a - c) / r2).collect();
        let lhs = exact_potential_at(&star, &x, &ctx).unwrap();
        let rhs = r2.sqrt().powf(ctx.exponent()) * exact_potential_at(&mu, &x_star, &ctx).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
}

#[test]
fn transform_of_empty_support_is_empty() {
    let ctx = KernelContext::new(2.0, 3).unwrap();
    let nodes = Arc::new(NodeSet::from_points(3, vec![point(&[1.0, 1.0, 1.0])]).unwrap());
    let mu = DiscreteMeasure::zero(nodes);
    let star = kelvin_transform(&mu, &point(&[0.0; 3]), &ctx).unwrap();
    assert_eq!(star.total_mass(), 0.0);
}
