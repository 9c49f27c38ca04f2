//! Atomic positive and signed measures, and the Kelvin transform.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{argument, Result, RieszError};
use crate::geometry::{coord_key, invert, squared_distance, NodeSet, Point};
use crate::kernel::KernelContext;

/// Nonnegative weights attached to a node set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Arc<NodeSet>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Arc<NodeSet>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != nodes.len() {
            return argument(format!(
                "{} weights for {} nodes",
                weights.len(),
                nodes.len()
            ));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return argument(format!(
                "weight {i} is {} (must be finite and ≥ 0)",
                weights[i]
            ));
        }
        Ok(Self { nodes, weights })
    }

    pub fn zero(nodes: Arc<NodeSet>) -> Self {
        let weights = vec![0.0; nodes.len()];
        Self { nodes, weights }
    }

    /// Unit-spacing single atom of the given mass.
    pub fn dirac(at: &Point, mass: f64) -> Result<Self> {
        let nodes = NodeSet::from_points(at.dim(), vec![at.clone()])?;
        Self::new(Arc::new(nodes), vec![mass])
    }

    /// Atoms at `points` (spacing from nearest neighbours) with the given masses.
    pub fn from_atoms(dim: usize, points: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        Self::new(Arc::new(NodeSet::from_points(dim, points)?), masses)
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn shared_nodes(&self) -> Arc<NodeSet> {
        self.nodes.clone()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return argument(format!("positive measures scale by c ≥ 0 only, got {c}"));
        }
        Ok(Self {
            nodes: self.nodes.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        })
    }

    /// Sum of two measures. Atoms at the same location merge.
    pub fn add(&self, other: &DiscreteMeasure) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(RieszError::Dimension(format!(
                "cannot add measures in dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        if Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes == other.nodes {
            let weights = self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a + b)
                .collect();
            return Ok(Self {
                nodes: self.nodes.clone(),
                weights,
            });
        }
        let nodes = self.nodes.union(&other.nodes)?;
        let index: HashMap<Vec<u64>, usize> = nodes
            .points()
            .enumerate()
            .map(|(i, p)| (coord_key(p), i))
            .collect();
        let mut weights = vec![0.0; nodes.len()];
        for (x, w) in self.nodes.points().zip(&self.weights) {
            weights[index[&coord_key(x)]] += w;
        }
        for (x, w) in other.nodes.points().zip(&other.weights) {
            weights[index[&coord_key(x)]] += w;
        }
        Self::new(Arc::new(nodes), weights)
    }

    /// `μ|_K`: weights of nodes failing the predicate become zero.
    pub fn restrict<F: Fn(&[f64]) -> bool>(&self, keep: F) -> Self {
        let weights = self
            .nodes
            .points()
            .zip(&self.weights)
            .map(|(x, &w)| if keep(x) { w } else { 0.0 })
            .collect();
        Self {
            nodes: self.nodes.clone(),
            weights,
        }
    }

    /// Largest `|x|` over atoms whose weight exceeds `threshold`.
    pub fn support_radius(&self, threshold: f64) -> f64 {
        self.nodes
            .points()
            .zip(&self.weights)
            .filter(|(_, &w)| w > threshold)
            .map(|(x, _)| crate::geometry::norm(x))
            .fold(0.0, f64::max)
    }
}

/// A signed measure stored as its positive and negative parts.
///
/// The parts never share an atom location: overlapping masses cancel at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    plus: DiscreteMeasure,
    minus: DiscreteMeasure,
}

impl SignedMeasure {
    pub fn new(plus: DiscreteMeasure, mut minus: DiscreteMeasure) -> Result<Self> {
        if plus.dim() != minus.dim() {
            return Err(RieszError::Dimension(format!(
                "positive part in dimension {}, negative part in {}",
                plus.dim(),
                minus.dim()
            )));
        }
        let mut plus = plus;
        let index: HashMap<Vec<u64>, usize> = plus
            .nodes
            .points()
            .enumerate()
            .map(|(i, p)| (coord_key(p), i))
            .collect();
        for (j, y) in minus.nodes.clone().points().enumerate() {
            if let Some(&i) = index.get(&coord_key(y)) {
                let common = plus.weights[i].min(minus.weights[j]);
                plus.weights[i] -= common;
                minus.weights[j] -= common;
            }
        }
        Ok(Self { plus, minus })
    }

    pub fn positive(plus: DiscreteMeasure) -> Self {
        let minus = DiscreteMeasure::zero(plus.shared_nodes());
        Self { plus, minus }
    }

    pub fn zero(nodes: Arc<NodeSet>) -> Self {
        Self::positive(DiscreteMeasure::zero(nodes))
    }

    /// Splits signed weights on a common node set by sign.
    pub fn from_signed_weights(nodes: Arc<NodeSet>, signed: Vec<f64>) -> Result<Self> {
        if let Some(i) = signed.iter().position(|w| !w.is_finite()) {
            return argument(format!("signed weight {i} is not finite"));
        }
        let plus = signed.iter().map(|w| w.max(0.0)).collect();
        let minus = signed.iter().map(|w| (-w).max(0.0)).collect();
        Ok(Self {
            plus: DiscreteMeasure::new(nodes.clone(), plus)?,
            minus: DiscreteMeasure::new(nodes, minus)?,
        })
    }

    pub fn plus(&self) -> &DiscreteMeasure {
        &self.plus
    }

    pub fn minus(&self) -> &DiscreteMeasure {
        &self.minus
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    /// `c · ω` for any real `c`; negative factors swap the parts.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return argument("scale factor must be finite");
        }
        let a = c.abs();
        let (p, m) = (self.plus.scale(a)?, self.minus.scale(a)?);
        Ok(if c >= 0.0 {
            Self { plus: p, minus: m }
        } else {
            Self { plus: m, minus: p }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.plus.total_mass() == 0.0 && self.minus.total_mass() == 0.0
    }
}

/// Kelvin transform with respect to the unit sphere about `center`: an atom
/// of mass `m` at `y` moves to `y*` with mass `m · |y − center|^{α−n}`.
pub fn kelvin_transform(
    mu: &DiscreteMeasure,
    center: &Point,
    ctx: &KernelContext,
) -> Result<DiscreteMeasure> {
    if mu.dim() != ctx.dim() {
        return Err(RieszError::Dimension(format!(
            "measure in dimension {}, kernel in {}",
            mu.dim(),
            ctx.dim()
        )));
    }
    let nodes = invert(mu.nodes(), center)?;
    let weights = mu
        .nodes()
        .points()
        .zip(mu.weights())
        .map(|(y, m)| {
            m * squared_distance(y, center.coords())
                .sqrt()
                .powf(ctx.exponent())
        })
        .collect();
    DiscreteMeasure::new(Arc::new(nodes), weights)
}
