//! Discrete networks: node positions, edges, edge pairs and the mapping from
//! nodes to degrees of freedom.

mod attributes;
mod boundary;
mod generate;
mod io;

use std::collections::{HashMap, HashSet};

pub use attributes::{EdgeAttributes, PairAttributes};
pub use boundary::BoundaryConditions;
pub use generate::{generate_regular, perturb_random};
pub use io::{load, load_from_str, save, save_to_string, NetworkFile};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Point<T> = [T; 2];

/// Which edge pairs populate the pair set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairPolicy {
    /// Every unordered pair of distinct edges sharing a node.
    #[default]
    All,
    /// No pairs: only edge (extension) contributions.
    None,
}

impl std::str::FromStr for PairPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "all-pairs" => Ok(Self::All),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown pair policy `{other}` (expected `all` or `none`)"
            ))),
        }
    }
}

/// Edge pair `(i, j, l)` with central node `j`, stored with `i < l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePair {
    pub outer_a: usize,
    pub center: usize,
    pub outer_b: usize,
}

impl EdgePair {
    /// Canonical form: the outer nodes are ordered so `(i,j,l) = (l,j,i)`.
    pub fn new(i: usize, j: usize, l: usize) -> Self {
        Self {
            outer_a: i.min(l),
            center: j,
            outer_b: i.max(l),
        }
    }
}

/// Network of nodes in the plane joined by straight edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    nodes: Vec<Point<T>>,
    edges: Vec<(usize, usize)>,
    pairs: Vec<EdgePair>,
    dofs_per_node: usize,
    thickness: T,
}

impl<T: Scalar> Network<T> {
    /// Builds a network without pairs. Edges are canonicalized to `i < j`.
    pub fn new(
        nodes: Vec<Point<T>>,
        edges: Vec<(usize, usize)>,
        dofs_per_node: usize,
        thickness: T,
    ) -> Result<Self> {
        if !(dofs_per_node == 1 || dofs_per_node == 2) {
            return Err(Error::InvalidNetwork(format!(
                "dofs per node must be 1 or 2, got {dofs_per_node}"
            )));
        }
        if !(thickness > T::zero()) {
            return Err(Error::InvalidNetwork("thickness must be positive".into()));
        }
        let n = nodes.len();
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    bound: n,
                    context: "edge endpoint",
                });
            }
            if a == b {
                return Err(Error::InvalidNetwork(format!("self-loop at node {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
            let [xa, ya] = nodes[e.0];
            let [xb, yb] = nodes[e.1];
            let len = ((xb - xa).powi(2) + (yb - ya).powi(2)).sqrt();
            if !(len > T::zero()) {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({}, {}) has zero length",
                    e.0, e.1
                )));
            }
            canonical.push(e);
        }
        Ok(Self {
            nodes,
            edges: canonical,
            pairs: Vec::new(),
            dofs_per_node,
            thickness,
        })
    }

    /// Replaces the pair set, validating every pair against the edges.
    pub fn with_pairs(mut self, pairs: Vec<EdgePair>) -> Result<Self> {
        let edges: HashSet<(usize, usize)> = self.edges.iter().copied().collect();
        let has = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
        let mut seen = HashSet::with_capacity(pairs.len());
        let mut out = Vec::with_capacity(pairs.len());
        for p in pairs {
            let p = EdgePair::new(p.outer_a, p.center, p.outer_b);
            if p.outer_a == p.outer_b {
                return Err(Error::InvalidNetwork(format!(
                    "pair ({}, {}, {}) repeats its outer node",
                    p.outer_a, p.center, p.outer_b
                )));
            }
            if !has(p.outer_a, p.center) || !has(p.center, p.outer_b) {
                return Err(Error::InvalidNetwork(format!(
                    "pair ({}, {}, {}) references a missing edge",
                    p.outer_a, p.center, p.outer_b
                )));
            }
            if seen.insert(p) {
                out.push(p);
            }
        }
        self.pairs = out;
        Ok(self)
    }

    /// Populates the pair set from the edges according to `policy`.
    ///
    /// Pairs are listed by central node, then by outer nodes, so the result
    /// does not depend on the order in which edges were given.
    pub fn derive_pairs(mut self, policy: PairPolicy) -> Self {
        self.pairs.clear();
        if policy == PairPolicy::None {
            return self;
        }
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            incident[a].push(b);
            incident[b].push(a);
        }
        for (j, nb) in incident.iter_mut().enumerate() {
            nb.sort_unstable();
            for (k, &i) in nb.iter().enumerate() {
                for &l in &nb[k + 1..] {
                    self.pairs.push(EdgePair::new(i, j, l));
                }
            }
        }
        self
    }

    pub fn nodes(&self) -> &[Point<T>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn pairs(&self) -> &[EdgePair] {
        &self.pairs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dofs_per_node
    }

    /// `n = d · N`.
    pub fn dof_count(&self) -> usize {
        self.dofs_per_node * self.nodes.len()
    }

    pub fn thickness(&self) -> T {
        self.thickness
    }

    /// Interleaved dof numbering: `d · node + component`.
    pub fn dof_index(&self, node: usize, component: usize) -> usize {
        debug_assert!(node < self.nodes.len() && component < self.dofs_per_node);
        self.dofs_per_node * node + component
    }

    /// Inverse of [`Network::dof_index`].
    pub fn dof_node(&self, dof: usize) -> (usize, usize) {
        (dof / self.dofs_per_node, dof % self.dofs_per_node)
    }

    /// Position of the node carrying `dof`.
    pub fn dof_position(&self, dof: usize) -> Point<T> {
        self.nodes[dof / self.dofs_per_node]
    }

    pub fn edge_length(&self, edge: usize) -> T {
        let (a, b) = self.edges[edge];
        distance(self.nodes[a], self.nodes[b])
    }

    pub fn edge_midpoint(&self, edge: usize) -> Point<T> {
        let (a, b) = self.edges[edge];
        let half = T::of(0.5);
        [
            (self.nodes[a][0] + self.nodes[b][0]) * half,
            (self.nodes[a][1] + self.nodes[b][1]) * half,
        ]
    }

    /// Copy with the same topology and new positions.
    pub fn with_positions(&self, nodes: Vec<Point<T>>) -> Result<Self> {
        if nodes.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                found: nodes.len(),
                context: "replacement node positions",
            });
        }
        let net = Network::new(
            nodes,
            self.edges.clone(),
            self.dofs_per_node,
            self.thickness,
        )?;
        net.with_pairs(self.pairs.clone())
    }

    /// Copy with a different number of dofs per node.
    pub fn with_dofs_per_node(&self, d: usize) -> Result<Self> {
        let net = Network::new(self.nodes.clone(), self.edges.clone(), d, self.thickness)?;
        net.with_pairs(self.pairs.clone())
    }
}

/// Lookup from an unordered node pair to its edge index.
#[derive(Debug, Clone)]
pub struct EdgeIndex(HashMap<(usize, usize), usize>);

impl EdgeIndex {
    pub fn new<T: Scalar>(net: &Network<T>) -> Self {
        Self(
            net.edges()
                .iter()
                .enumerate()
                .map(|(e, &k)| (k, e))
                .collect(),
        )
    }

    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.0.get(&(a.min(b), a.max(b))).copied()
    }
}

pub(crate) fn distance<T: Scalar>(a: Point<T>, b: Point<T>) -> T {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Network<f64> {
        // node 0 in the middle with four spokes, plus a dangling edge 4-5
        let nodes = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [-1.0, 0.0],
            [0.0, -1.0],
            [0.0, -2.0],
        ];
        let edges = vec![(0, 1), (2, 0), (0, 3), (0, 4), (5, 4)];
        Network::new(nodes, edges, 2, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_topology() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0]];
        assert!(Network::new(nodes.clone(), vec![(0, 0)], 2, 1.0).is_err());
        assert!(Network::new(nodes.clone(), vec![(0, 1), (1, 0)], 2, 1.0).is_err());
        assert!(Network::new(nodes.clone(), vec![(0, 2)], 2, 1.0).is_err());
        assert!(Network::new(vec![[0.0, 0.0], [0.0, 0.0]], vec![(0, 1)], 2, 1.0).is_err());
        assert!(Network::new(nodes, vec![(0, 1)], 3, 1.0).is_err());
    }

    #[test]
    fn pair_counts_per_center() {
        let net = star().derive_pairs(PairPolicy::All);
        let at = |j: usize| net.pairs().iter().filter(|p| p.center == j).count();
        assert_eq!(at(0), 6);
        assert_eq!(at(4), 1);
        assert_eq!(at(5), 0);
        assert!(star().derive_pairs(PairPolicy::None).pairs().is_empty());
    }

    #[test]
    fn derive_pairs_is_idempotent_and_order_independent() {
        let a = star().derive_pairs(PairPolicy::All);
        let b = a.clone().derive_pairs(PairPolicy::All);
        assert_eq!(a.pairs(), b.pairs());

        let shuffled = Network::new(
            star().nodes().to_vec(),
            vec![(4, 5), (4, 0), (3, 0), (1, 0), (0, 2)],
            2,
            1.0,
        )
        .unwrap()
        .derive_pairs(PairPolicy::All);
        assert_eq!(a.pairs(), shuffled.pairs());
    }

    #[test]
    fn explicit_pairs_are_validated() {
        let net = star();
        assert!(net.clone().with_pairs(vec![EdgePair::new(1, 0, 2)]).is_ok());
        assert!(net
            .clone()
            .with_pairs(vec![EdgePair::new(1, 0, 1)])
            .is_err());
        assert!(net.with_pairs(vec![EdgePair::new(1, 0, 5)]).is_err());
    }

    #[test]
    fn dof_numbering() {
        let net = star();
        assert_eq!(net.dof_index(0, 0), 0);
        assert_eq!(net.dof_index(2, 1), 5);
        assert_eq!(net.dof_node(5), (2, 1));
        let scalar = net.with_dofs_per_node(1).unwrap();
        assert_eq!(scalar.dof_index(5, 0), 5);
        assert_eq!(scalar.dof_count(), 6);
    }
}
