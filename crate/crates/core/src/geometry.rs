//! Point clouds standing in for spheres, balls, truncated exteriors of balls
//! and their inversions.
//!
//! Every generator is a pure function of its arguments: identical inputs
//! produce bit-identical node sets. Each node carries a positive `spacing`,
//! which the kernel module turns into a self-interaction distance.

use std::collections::HashSet;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{argument, Result, RieszError};

/// Golden angle in radians, `π (3 − √5)`.
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Radial ratio between consecutive shells of a graded annulus.
pub const DEFAULT_SHELL_RATIO: f64 = 1.15;

/// Spacing assigned to a lone node, which has no nearest neighbour.
pub const LONE_NODE_SPACING: f64 = 1.0;

/// A point of ℝⁿ with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(RieszError::Dimension(format!(
                "points need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return argument(format!("coordinate {k} is not finite"));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Bit pattern of a coordinate vector, for exact-coincidence lookups.
pub(crate) fn coord_key(x: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 are the same location
    x.iter().map(|c| (c + 0.0).to_bits()).collect()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    squared_distance(x, y).sqrt()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A finite set of distinct nodes with a positive per-node spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dim: usize,
    coords: Vec<f64>,
    spacing: Vec<f64>,
}

impl NodeSet {
    /// Builds a node set whose spacing is the exact nearest-neighbour distance.
    ///
    /// A single node gets [`LONE_NODE_SPACING`].
    pub fn from_points(dim: usize, points: Vec<Point>) -> Result<Self> {
        let coords = flatten(dim, points)?;
        Self::from_flat(dim, coords)
    }

    /// Builds a node set with caller-supplied spacing (e.g. a grid pitch).
    pub fn with_spacing(dim: usize, points: Vec<Point>, spacing: Vec<f64>) -> Result<Self> {
        let coords = flatten(dim, points)?;
        Self::from_flat_with_spacing(dim, coords, spacing)
    }

    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let spacing = nearest_neighbor_distances(dim, &coords);
        if let Some(i) = spacing.iter().position(|&s| s <= 0.0) {
            return argument(format!("node {i} duplicates another node"));
        }
        Ok(Self {
            dim,
            coords,
            spacing,
        })
    }

    pub(crate) fn from_flat_with_spacing(
        dim: usize,
        coords: Vec<f64>,
        spacing: Vec<f64>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let n = coords.len() / dim;
        if spacing.len() != n {
            return argument(format!("{} spacing values for {n} nodes", spacing.len()));
        }
        if let Some(i) = spacing.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return argument(format!("spacing of node {i} must be positive and finite"));
        }
        if let Some(i) = first_duplicate(dim, &coords) {
            return argument(format!("node {i} duplicates another node"));
        }
        Ok(Self {
            dim,
            coords,
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.spacing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacing.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Euclidean norm of every node.
    pub fn norms(&self) -> Vec<f64> {
        self.points().map(norm).collect()
    }

    /// Index of a node whose coordinates equal `x` exactly.
    pub fn find(&self, x: &[f64]) -> Option<usize> {
        self.points().position(|p| p == x)
    }

    /// Subset of the nodes in the given order, keeping their spacing.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        let mut spacing = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return argument(format!("index {i} out of range for {} nodes", self.len()));
            }
            coords.extend_from_slice(self.point(i));
            spacing.push(self.spacing[i]);
        }
        Self::from_flat_with_spacing(self.dim, coords, spacing)
    }

    /// Union of two node sets. Nodes of `other` that coincide with a node of
    /// `self` are dropped; every kept node retains its own spacing.
    pub fn union(&self, other: &NodeSet) -> Result<Self> {
        if other.dim != self.dim {
            return Err(RieszError::Dimension(format!(
                "cannot join {}-dimensional and {}-dimensional node sets",
                self.dim, other.dim
            )));
        }
        let mut coords = self.coords.clone();
        let mut spacing = self.spacing.clone();
        let mut seen: HashSet<Vec<u64>> = self.points().map(coord_key).collect();
        for (j, y) in other.points().enumerate() {
            if seen.insert(coord_key(y)) {
                coords.extend_from_slice(y);
                spacing.push(other.spacing[j]);
            }
        }
        Self::from_flat_with_spacing(self.dim, coords, spacing)
    }

    /// Dilation `x ↦ factor · x` about the origin; spacing scales along.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return argument("scale factor must be positive and finite");
        }
        Ok(Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
            spacing: self.spacing.iter().map(|s| s * factor).collect(),
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(RieszError::Dimension(format!(
            "ambient dimension {dim} < 2"
        )));
    }
    Ok(())
}

fn flatten(dim: usize, points: Vec<Point>) -> Result<Vec<f64>> {
    let mut coords = Vec::with_capacity(points.len() * dim);
    for (i, p) in points.into_iter().enumerate() {
        if p.dim() != dim {
            return Err(RieszError::Dimension(format!(
                "point {i} has {} coordinates, expected {dim}",
                p.dim()
            )));
        }
        coords.extend(p.coords);
    }
    Ok(coords)
}

fn first_duplicate(dim: usize, coords: &[f64]) -> Option<usize> {
    let n = coords.len() / dim;
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| &coords[i * dim..(i + 1) * dim];
    order.sort_by(|&a, &b| {
        key(a)
            .iter()
            .zip(key(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
        .windows(2)
        .find(|w| key(w[0]) == key(w[1]))
        .map(|w| w[0].max(w[1]))
}

/// Exact nearest-neighbour distance of every node (brute force, O(N²)).
fn nearest_neighbor_distances(dim: usize, coords: &[f64]) -> Vec<f64> {
    let n = coords.len() / dim;
    if n == 1 {
        return vec![LONE_NODE_SPACING];
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = &coords[i * dim..(i + 1) * dim];
            let mut best = f64::INFINITY;
            for (j, y) in coords.chunks_exact(dim).enumerate() {
                if j != i {
                    best = best.min(squared_distance(x, y));
                }
            }
            best.sqrt()
        })
        .collect()
}

fn check_generator(center: &Point, radius: f64, count: usize, dim: usize) -> Result<()> {
    if dim != 2 && dim != 3 {
        return Err(RieszError::Dimension(format!(
            "generators support dim 2 and 3, got {dim}"
        )));
    }
    if center.dim() != dim {
        return Err(RieszError::Dimension(format!(
            "center has {} coordinates, expected {dim}",
            center.dim()
        )));
    }
    if count < 2 {
        return argument(format!("count must be at least 2, got {count}"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return argument(format!("radius must be positive, got {radius}"));
    }
    Ok(())
}

/// Unit directions: equal angles in 2-D, golden-angle spiral in 3-D.
/// `twist` rotates the whole pattern about the last axis.
fn unit_directions(count: usize, dim: usize, twist: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count * dim);
    match dim {
        2 => {
            for k in 0..count {
                let t = 2.0 * PI * k as f64 / count as f64 + twist;
                out.extend([t.cos(), t.sin()]);
            }
        }
        _ => {
            let nf = count as f64;
            for i in 0..count {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / nf;
                let r = (1.0 - z * z).sqrt();
                let t = GOLDEN_ANGLE * i as f64 + twist;
                out.extend([r * t.cos(), r * t.sin(), z]);
            }
        }
    }
    out
}

/// `count` nodes on the sphere `|x − center| = radius`.
pub fn make_sphere(center: &Point, radius: f64, count: usize, dim: usize) -> Result<NodeSet> {
    check_generator(center, radius, count, dim)?;
    let mut coords = unit_directions(count, dim, 0.0);
    place(&mut coords, center.coords(), radius);
    NodeSet::from_flat(dim, coords)
}

fn place(unit: &mut [f64], center: &[f64], radius: f64) {
    for p in unit.chunks_exact_mut(center.len()) {
        for (c, o) in p.iter_mut().zip(center) {
            *c = o + radius * *c;
        }
    }
}

/// Grid pitch giving roughly `count` nodes in a ball of the given radius.
pub fn ball_pitch(radius: f64, count: usize, dim: usize) -> f64 {
    let unit_volume = if dim == 2 { PI } else { 4.0 * PI / 3.0 };
    radius * (unit_volume / count as f64).powf(1.0 / dim as f64)
}

/// Closed ball filled with a cell-centred cubic grid; spacing equals the pitch.
///
/// Grid nodes sit at `center + (k + ½)·pitch`, so the center itself is never
/// a node. The node count approximates `count`.
pub fn make_ball(center: &Point, radius: f64, count: usize, dim: usize) -> Result<NodeSet> {
    check_generator(center, radius, count, dim)?;
    let pitch = ball_pitch(radius, count, dim);
    let m = (radius / pitch).ceil() as i64 + 1;
    let r2 = radius * radius;
    let mut coords = Vec::new();
    let mut offset = vec![0.0; dim];
    let side = (2 * m) as usize;
    let total = side.pow(dim as u32);
    for flat in 0..total {
        let mut rest = flat;
        for o in offset.iter_mut() {
            let k = (rest % side) as i64 - m;
            rest /= side;
            *o = (k as f64 + 0.5) * pitch;
        }
        if offset.iter().map(|o| o * o).sum::<f64>() <= r2 {
            coords.extend(offset.iter().zip(center.coords()).map(|(o, c)| c + o));
        }
    }
    let n = coords.len() / dim;
    if n < 2 {
        return argument(format!(
            "ball lattice for count {count} holds fewer than 2 nodes"
        ));
    }
    NodeSet::from_flat_with_spacing(dim, coords, vec![pitch; n])
}

/// How an annulus lattice distributes nodes over its shells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShellLayout {
    /// Shell radii `inner · ratio^k` up to the outer radius.
    Ratio(f64),
    /// Exactly this many shells, geometrically spaced from inner to outer radius.
    Shells(usize),
}

/// Builder for radially graded annuli `inner ≤ |x| ≤ outer` about the origin.
///
/// Each shell is a sphere (or circle) with the same node count, so angular
/// resolution scales with radius like the radial gaps do. Consecutive shells
/// are twisted by the golden angle to avoid radial alignment.
#[derive(Debug, Clone)]
pub struct AnnulusLattice {
    inner: f64,
    outer: f64,
    dim: usize,
    layout: ShellLayout,
    per_shell: Option<usize>,
}

impl AnnulusLattice {
    pub fn new(inner: f64, outer: f64, dim: usize) -> Self {
        Self {
            inner,
            outer,
            dim,
            layout: ShellLayout::Ratio(DEFAULT_SHELL_RATIO),
            per_shell: None,
        }
    }

    pub fn ratio(mut self, ratio: f64) -> Self {
        self.layout = ShellLayout::Ratio(ratio);
        self
    }

    pub fn shells(mut self, shells: usize) -> Self {
        self.layout = ShellLayout::Shells(shells);
        self
    }

    pub fn per_shell(mut self, count: usize) -> Self {
        self.per_shell = Some(count);
        self
    }

    /// Shell radii, innermost first.
    pub fn radii(&self) -> Result<Vec<f64>> {
        if !(self.inner.is_finite() && self.inner > 0.0 && self.outer.is_finite()) {
            return argument("annulus radii must be positive and finite");
        }
        if self.inner >= self.outer {
            return argument(format!(
                "inner radius {} must be below outer radius {}",
                self.inner, self.outer
            ));
        }
        match self.layout {
            ShellLayout::Ratio(ratio) => {
                if !(ratio.is_finite() && ratio > 1.0) {
                    return argument(format!("shell ratio must exceed 1, got {ratio}"));
                }
                let limit = self.outer * (1.0 + 1e-12);
                let mut radii = Vec::new();
                for k in 0.. {
                    let r = self.inner * ratio.powi(k);
                    if r > limit {
                        break;
                    }
                    radii.push(r);
                }
                Ok(radii)
            }
            ShellLayout::Shells(1) => Ok(vec![self.inner]),
            ShellLayout::Shells(0) => argument("an annulus needs at least one shell"),
            ShellLayout::Shells(s) => {
                let ratio = (self.outer / self.inner).powf(1.0 / (s - 1) as f64);
                let mut radii: Vec<f64> =
                    (0..s).map(|k| self.inner * ratio.powi(k as i32)).collect();
                radii[s - 1] = self.outer;
                Ok(radii)
            }
        }
    }

    /// Builds the lattice holding about `count` nodes in total, unless a
    /// per-shell count was set.
    pub fn build(&self, count: usize) -> Result<NodeSet> {
        if self.dim != 2 && self.dim != 3 {
            return Err(RieszError::Dimension(format!(
                "generators support dim 2 and 3, got {}",
                self.dim
            )));
        }
        let radii = self.radii()?;
        let per_shell = self
            .per_shell
            .unwrap_or_else(|| count.div_ceil(radii.len()));
        if per_shell < 2 {
            return argument(format!("need at least 2 nodes per shell, got {per_shell}"));
        }
        let origin = vec![0.0; self.dim];
        let mut coords = Vec::with_capacity(radii.len() * per_shell * self.dim);
        for (k, &r) in radii.iter().enumerate() {
            let mut shell = unit_directions(per_shell, self.dim, GOLDEN_ANGLE * k as f64);
            place(&mut shell, &origin, r);
            coords.extend(shell);
        }
        NodeSet::from_flat(self.dim, coords)
    }
}

/// Truncation `inner ≤ |x| ≤ outer` of the exterior of a ball, graded with
/// [`DEFAULT_SHELL_RATIO`].
pub fn make_truncated_complement(
    inner_radius: f64,
    outer_radius: f64,
    count: usize,
    dim: usize,
) -> Result<NodeSet> {
    AnnulusLattice::new(inner_radius, outer_radius, dim).build(count)
}

/// Inversion `x ↦ center + (x − center)/|x − center|²` in the unit sphere
/// about `center`. Spacing is recomputed on the image.
pub fn invert(nodes: &NodeSet, center: &Point) -> Result<NodeSet> {
    if center.dim() != nodes.dim() {
        return Err(RieszError::Dimension(format!(
            "center has {} coordinates, nodes have {}",
            center.dim(),
            nodes.dim()
        )));
    }
    let c = center.coords();
    let mut coords = Vec::with_capacity(nodes.coords.len());
    for (i, x) in nodes.points().enumerate() {
        let r2 = squared_distance(x, c);
        if r2 == 0.0 {
            return Err(RieszError::Singularity {
                index: i,
                detail: "node coincides with the inversion center".into(),
            });
        }
        coords.extend(x.iter().zip(c).map(|(xi, ci)| ci + (xi - ci) / r2));
    }
    NodeSet::from_flat(nodes.dim(), coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn origin(dim: usize) -> Point {
        Point::origin(dim).unwrap()
    }

    fn brute_spacing(nodes: &NodeSet) -> Vec<f64> {
        (0..nodes.len())
            .map(|i| {
                (0..nodes.len())
                    .filter(|&j| j != i)
                    .map(|j| distance(nodes.point(i), nodes.point(j)))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn circle_of_four_hits_quarter_angles() {
        let s = make_sphere(&origin(2), 1.0, 4, 2).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in s.points().zip(expected) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
        for &sp in s.spacing() {
            assert_relative_eq!(sp, 2f64.sqrt(), max_relative = 1e-15);
        }
    }

    #[test]
    fn sphere_nodes_lie_on_sphere() {
        let c = Point::new(vec![0.3, -1.0, 2.0]).unwrap();
        let s = make_sphere(&c, 2.5, 500, 3).unwrap();
        let worst = s
            .points()
            .map(|p| (distance(p, c.coords()) - 2.5).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-14, "{worst}");
    }

    #[test]
    fn spiral_spacing_ratio_is_bounded() {
        let s = make_sphere(&origin(3), 1.0, 100, 3).unwrap();
        let max = s.spacing().iter().cloned().fold(0.0, f64::max);
        let min = s.spacing().iter().cloned().fold(f64::INFINITY, f64::min);
        // measured 1.33 on this lattice
        assert!(max / min <= 2.0, "{}", max / min);
    }

    #[test]
    fn spacing_is_exact_nearest_neighbor() {
        let s = make_sphere(&origin(3), 1.0, 300, 3).unwrap();
        assert_eq!(s.spacing(), brute_spacing(&s).as_slice());
        let a = make_truncated_complement(1.0, 3.0, 400, 3).unwrap();
        assert_eq!(a.spacing(), brute_spacing(&a).as_slice());
    }

    #[test]
    fn unsupported_dim_and_small_count() {
        assert!(matches!(
            make_sphere(&origin(4), 1.0, 10, 4),
            Err(RieszError::Dimension(_))
        ));
        assert!(matches!(
            make_sphere(&origin(3), 1.0, 1, 3),
            Err(RieszError::Argument(_))
        ));
        assert!(matches!(
            make_ball(&origin(2), 1.0, 0, 2),
            Err(RieszError::Argument(_))
        ));
    }

    #[test]
    fn ball_nodes_inside_and_scale_invariant() {
        let b = make_ball(&origin(2), 1.0, 300, 2).unwrap();
        assert!(b.points().all(|p| norm(p) <= 1.0));
        let small = make_ball(&origin(3), 1.0, 800, 3).unwrap();
        let large = make_ball(&origin(3), 2.0, 800, 3).unwrap();
        assert_eq!(small.len(), large.len());
        // pitch-to-radius ratio is identical, so the lattices are exact dilations
        assert_eq!(small.scaled(2.0).unwrap(), large);
    }

    #[test]
    fn ball_interior_spacing_is_pitch() {
        let b = make_ball(&origin(3), 1.0, 1000, 3).unwrap();
        let pitch = ball_pitch(1.0, 1000, 3);
        assert!((b.len() as f64 - 1000.0).abs() < 150.0, "{}", b.len());
        let nn = brute_spacing(&b);
        for (i, p) in b.points().enumerate() {
            if norm(p) < 1.0 - 2.0 * pitch {
                assert_relative_eq!(nn[i], pitch, max_relative = 1e-12);
            }
            assert_eq!(b.spacing()[i], pitch);
        }
    }

    #[test]
    fn degenerate_annulus_is_one_sphere() {
        let a = make_truncated_complement(1.0, 1.0 + 1e-3, 50, 3).unwrap();
        assert_eq!(a.len(), 50);
        assert!(a.norms().iter().all(|r| (r - 1.0).abs() < 1e-14));
    }

    #[test]
    fn annulus_stays_within_radii() {
        for dim in [2, 3] {
            let a = make_truncated_complement(1.5, 7.0, 600, dim).unwrap();
            assert!(a
                .norms()
                .iter()
                .all(|&r| r >= 1.5 * (1.0 - 1e-14) && r <= 7.0 * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn annulus_gaps_are_geometric() {
        for outer in [4.0, 8.0] {
            let lattice = AnnulusLattice::new(1.0, outer, 3).shells(6);
            let radii = lattice.radii().unwrap();
            let gaps: Vec<f64> = radii.windows(2).map(|w| w[1] - w[0]).collect();
            let ratios: Vec<f64> = gaps.windows(2).map(|g| g[1] / g[0]).collect();
            for r in &ratios {
                assert_relative_eq!(*r, ratios[0], max_relative = 1e-9);
            }
            let nodes = lattice.per_shell(40).build(0).unwrap();
            let mut measured: Vec<f64> = nodes.norms();
            measured.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            assert_eq!(measured.len(), 6);
        }
    }

    #[test]
    fn truncations_are_nested() {
        let lattice = |outer| {
            AnnulusLattice::new(1.0, outer, 3)
                .per_shell(30)
                .build(0)
                .unwrap()
        };
        let small = lattice(4.0);
        let large = lattice(8.0);
        for i in 0..small.len() {
            assert_eq!(small.point(i), large.point(i));
        }
    }

    #[test]
    fn inverted_radii() {
        assert!(make_truncated_complement(2.0, 1.0, 10, 3).is_err());
    }

    #[test]
    fn inversion_fixes_unit_sphere_and_maps_radius() {
        let c = origin(3);
        let s = make_sphere(&c, 1.0, 50, 3).unwrap();
        let inv = invert(&s, &c).unwrap();
        for (p, q) in s.points().zip(inv.points()) {
            for (a, b) in p.iter().zip(q) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let far = NodeSet::from_points(3, vec![Point::new(vec![2.0, 0.0, 0.0]).unwrap()]).unwrap();
        let near = invert(&far, &c).unwrap();
        assert_eq!(near.point(0), &[0.5, 0.0, 0.0]);
    }

    #[test]
    fn inversion_rejects_center_node() {
        let pts = vec![
            Point::new(vec![1.0, 0.0]).unwrap(),
            Point::new(vec![0.0, 0.0]).unwrap(),
        ];
        let nodes = NodeSet::from_points(2, pts).unwrap();
        match invert(&nodes, &origin(2)) {
            Err(RieszError::Singularity { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn duplicates_rejected() {
        let p = Point::new(vec![1.0, 2.0]).unwrap();
        assert!(NodeSet::from_points(2, vec![p.clone(), p.clone()]).is_err());
        assert!(NodeSet::with_spacing(2, vec![p.clone(), p], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = make_sphere(&origin(3), 1.3, 257, 3).unwrap();
        let b = make_sphere(&origin(3), 1.3, 257, 3).unwrap();
        assert_eq!(a, b);
        let a = make_truncated_complement(1.0, 5.0, 700, 3).unwrap();
        let b = make_truncated_complement(1.0, 5.0, 700, 3).unwrap();
        assert_eq!(a, b);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn inversion_is_an_involution(
                cx in -2.0f64..2.0, cy in -2.0f64..2.0, cz in -2.0f64..2.0,
                radius in 0.2f64..5.0, count in 4usize..80,
            ) {
                let center = Point::new(vec![cx, cy, cz]).unwrap();
                let nodes = make_sphere(&Point::origin(3).unwrap(), radius, count, 3).unwrap();
                prop_assume!(nodes.points().all(|p| distance(p, center.coords()) > 1e-3));
                let back = invert(&invert(&nodes, &center).unwrap(), &center).unwrap();
                for (p, q) in nodes.points().zip(back.points()) {
                    let scale = norm(p).max(1.0);
                    for (a, b) in p.iter().zip(q) {
                        prop_assert!((a - b).abs() <= 1e-12 * scale);
                    }
                }
            }
        }
    }
}
