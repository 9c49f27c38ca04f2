#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use riesz_core::{DenseMatrix, DiscreteMeasure, KernelContext, NodeSet, Point, SignedMeasure};

pub fn point(x: &[f64]) -> Point {
    Point::new(x.to_vec()).unwrap()
}

pub fn dirac(x: &[f64], mass: f64) -> DiscreteMeasure {
    DiscreteMeasure::dirac(&point(x), mass).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<Point> {
    (0..n)
        .map(|_| point(&[0; 3].map(|_| rng.gen_range(-half_width..half_width))))
        .collect()
}

/// Random nodes in a cube, a random Riesz exponent and a mixed-sign field
/// from atoms scattered around them.
pub struct Instance {
    pub nodes: Arc<NodeSet>,
    pub ctx: KernelContext,
    pub omega: SignedMeasure,
}

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let alpha = [1.5, 2.0, 2.5][rng.gen_range(0..3)];
    let ctx = KernelContext::new(alpha, 3).unwrap();
    let nodes = Arc::new(NodeSet::from_points(3, random_points(rng, n, 1.0)).unwrap());
    let plus_pts = random_points(rng, 3, 2.0);
    let minus_pts = random_points(rng, 2, 2.0);
    let plus_m = (0..3).map(|_| rng.gen_range(0.1..2.0)).collect();
    let minus_m = (0..2).map(|_| rng.gen_range(0.1..2.0)).collect();
    let omega = SignedMeasure::new(
        DiscreteMeasure::from_atoms(3, plus_pts, plus_m).unwrap(),
        DiscreteMeasure::from_atoms(3, minus_pts, minus_m).unwrap(),
    )
    .unwrap();
    Instance { nodes, ctx, omega }
}

fn to_na(k: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(k.rows(), k.cols(), k.as_slice())
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Minimizer of `½wᵀKw − bᵀw` over `w ≥ 0` by trying every active set and
/// keeping the one that satisfies the KKT conditions.
pub fn cone_oracle(k: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    assert!(n <= 16, "exhaustive oracle is exponential");
    let kk = to_na(k);
    let bb = DVector::from_column_slice(b);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in subsets(n) {
        let mut w = DVector::zeros(n);
        if !s.is_empty() {
            let ks = kk.select_rows(&s).select_columns(&s);
            let bs = DVector::from_iterator(s.len(), s.iter().map(|&i| b[i]));
            let ws = ks.lu().solve(&bs).unwrap();
            if ws.iter().any(|&v| v < 0.0) {
                continue;
            }
            for (j, &i) in s.iter().enumerate() {
                w[i] = ws[j];
            }
        }
        let g = &kk * &w - &bb;
        let scale = bb.amax().max(1.0);
        if (0..n).all(|i| s.contains(&i) || g[i] >= -1e-11 * scale) {
            let f = 0.5 * w.dot(&(&kk * &w)) - bb.dot(&w);
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, w.iter().copied().collect()));
            }
        }
    }
    best.expect("some active set satisfies KKT").1
}

/// Minimizer over the unit simplex: every support pattern, each solving the
/// equality-constrained system `K_SS w − c·1 = b_S, Σw = 1`.
pub fn simplex_oracle(k: &DenseMatrix, b: &[f64]) -> (Vec<f64>, f64) {
    let n = b.len();
    assert!(n <= 16, "exhaustive oracle is exponential");
    let kk = to_na(k);
    let bb = DVector::from_column_slice(b);
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for s in subsets(n).filter(|s| !s.is_empty()) {
        let m = s.len();
        let mut sys = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (a, &i) in s.iter().enumerate() {
            for (c, &j) in s.iter().enumerate() {
                sys[(a, c)] = kk[(i, j)];
            }
            sys[(a, m)] = -1.0;
            sys[(m, a)] = 1.0;
            rhs[a] = b[i];
        }
        rhs[m] = 1.0;
        let Some(x) = sys.lu().solve(&rhs) else {
            continue;
        };
        if x.iter().take(m).any(|&v| v < 0.0) {
            continue;
        }
        let c = x[m];
        let mut w = DVector::zeros(n);
        for (a, &i) in s.iter().enumerate() {
            w[i] = x[a];
        }
        let g = &kk * &w - &bb;
        let scale = bb.amax().max(1.0);
        if (0..n).all(|i| s.contains(&i) || g[i] >= c - 1e-11 * scale) {
            let f = 0.5 * w.dot(&(&kk * &w)) - bb.dot(&w);
            if best.as_ref().map_or(true, |(bf, _, _)| f < *bf) {
                best = Some((f, w.iter().copied().collect(), c));
            }
        }
    }
    let (_, w, c) = best.expect("some support pattern satisfies KKT");
    (w, c)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
