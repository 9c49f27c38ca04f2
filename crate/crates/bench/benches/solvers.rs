use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use riesz_bench::{dirac_sphere, sphere, wavy};
use riesz_core::linalg::project_simplex;
use riesz_core::{
    kernel_matrix, minimize_on_cone, minimize_on_simplex, KernelContext, SolverConfig,
};

fn assembly(c: &mut Criterion) {
    let ctx = KernelContext::new(2.5, 3).unwrap();
    let mut g = c.benchmark_group("kernel_matrix");
    for n in [250, 1000] {
        let nodes = sphere(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &nodes, |bch, nodes| {
            bch.iter(|| kernel_matrix(nodes, nodes, &ctx).unwrap())
        });
    }
    g.finish();
}

fn solves(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut g = c.benchmark_group("solve");
    g.sample_size(20);
    for n in [250, 1000] {
        let (disc, b) = dirac_sphere(n, 2.5);
        let k = disc.kernel().matrix();
        g.bench_with_input(BenchmarkId::new("cone", n), &b, |bch, b| {
            bch.iter(|| minimize_on_cone(k, b, &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("simplex", n), &b, |bch, b| {
            bch.iter(|| minimize_on_simplex(k, b, &cfg).unwrap())
        });
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("project_simplex");
    for n in [1000, 10000] {
        let v = wavy(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &v, |bch, v| {
            bch.iter(|| project_simplex(black_box(v)))
        });
    }
    g.finish();
}

criterion_group!(benches, assembly, solves, projection);
criterion_main!(benches);
