//! Coarse quadrilateral grid on the unit square, interpolated bilinear basis
//! vectors and patches.

mod operators;
mod patches;

pub use operators::{interpolate_basis, interpolate_pi_h, CoarseOperators};
pub use patches::{build_patches, Patch, PatchIndex, PatchRadius};

use crate::error::{Error, Result};
use crate::network::{BoundaryConditions, Network, Point};
use crate::scalar::Scalar;
use crate::sparse::IndexSet;

/// Uniform `R × R` grid of square elements of size `H = 1/R`.
///
/// Coarse node `(a, b)` sits at `(a H, b H)` with index `b (R+1) + a`;
/// element `(ex, ey)` has index `ey R + ex`. Coarse dofs are interleaved like
/// network dofs: `d · node + component`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseGrid<T> {
    elements_per_side: usize,
    dofs_per_node: usize,
    h: T,
    fixed: IndexSet,
    free: IndexSet,
}

impl<T: Scalar> CoarseGrid<T> {
    /// Builds the grid for `net`, checking that every element holds a
    /// network node, and derives the fixed coarse dofs from `bc`: coarse dof
    /// `i` is fixed when some fixed network dof of the same component sits
    /// where `Λ_i` is nonzero.
    pub fn new(
        elements_per_side: usize,
        net: &Network<T>,
        bc: &BoundaryConditions<T>,
    ) -> Result<Self> {
        if elements_per_side < 2 {
            return Err(Error::InvalidParameter(format!(
                "coarse grid needs R >= 2, got {elements_per_side}"
            )));
        }
        bc.validate(net.dof_count())?;
        let d = net.dofs_per_node();
        let mut grid = Self {
            elements_per_side,
            dofs_per_node: d,
            h: T::one() / T::from_usize_lossy(elements_per_side),
            fixed: IndexSet::empty(),
            free: IndexSet::empty(),
        };
        // equality is the limit where the grid resolves the network exactly
        if grid.node_count() > net.node_count() {
            return Err(Error::InvalidParameter(format!(
                "coarse grid with {} nodes is finer than a network with {}",
                grid.node_count(),
                net.node_count()
            )));
        }

        let mut occupied = vec![false; grid.element_count()];
        for &p in net.nodes() {
            for e in grid.elements_touching(p) {
                occupied[e] = true;
            }
        }
        if let Some(element) = occupied.iter().position(|&o| !o) {
            return Err(Error::EmptyCoarseElement { element });
        }

        let mut fixed = Vec::new();
        for q in bc.fixed().iter() {
            let (node, comp) = net.dof_node(q);
            for (cn, value) in grid.supporting_nodes(net.nodes()[node]) {
                if value != T::zero() {
                    fixed.push(d * cn + comp);
                }
            }
        }
        grid.fixed = IndexSet::from_unsorted(fixed, grid.dof_count())?;
        grid.free = grid.fixed.complement(grid.dof_count());
        Ok(grid)
    }

    /// `R`.
    pub fn elements_per_side(&self) -> usize {
        self.elements_per_side
    }

    /// `H = 1/R`.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dofs_per_node
    }

    /// `M = (R+1)²`.
    pub fn node_count(&self) -> usize {
        (self.elements_per_side + 1).pow(2)
    }

    /// `m = d · M`.
    pub fn dof_count(&self) -> usize {
        self.dofs_per_node * self.node_count()
    }

    pub fn element_count(&self) -> usize {
        self.elements_per_side.pow(2)
    }

    /// Fixed coarse dofs `ℳ_D`.
    pub fn fixed(&self) -> &IndexSet {
        &self.fixed
    }

    /// Free coarse dofs `ℳ`.
    pub fn free(&self) -> &IndexSet {
        &self.free
    }

    pub fn node_position(&self, node: usize) -> Point<T> {
        let side = self.elements_per_side + 1;
        [
            T::from_usize_lossy(node % side) * self.h,
            T::from_usize_lossy(node / side) * self.h,
        ]
    }

    /// Corner nodes counter-clockwise from the lower left.
    pub fn element_corners(&self, element: usize) -> [usize; 4] {
        let r = self.elements_per_side;
        let (ex, ey) = (element % r, element / r);
        let n = |a: usize, b: usize| b * (r + 1) + a;
        [n(ex, ey), n(ex + 1, ey), n(ex + 1, ey + 1), n(ex, ey + 1)]
    }

    pub fn element_center(&self, element: usize) -> Point<T> {
        let corners = self.element_corners(element).map(|c| self.node_position(c));
        let quarter = T::of(0.25);
        [
            corners.iter().map(|p| p[0]).sum::<T>() * quarter,
            corners.iter().map(|p| p[1]).sum::<T>() * quarter,
        ]
    }

    /// Grid coordinate `ξ = x R`.
    fn scaled(&self, x: T) -> T {
        x * T::from_usize_lossy(self.elements_per_side)
    }

    /// Element index along one axis; a coordinate on an interior grid line
    /// belongs to the element below it.
    fn cell(&self, x: T) -> usize {
        let xi = self.scaled(x);
        let r = self.elements_per_side;
        let f = xi.floor();
        let k = if f == xi && f > T::zero() {
            f - T::one()
        } else {
            f
        };
        k.max(T::zero()).to_usize().unwrap_or(0).min(r - 1)
    }

    /// The single element owning point `p`; ties on shared element
    /// boundaries go to the smaller element index.
    pub fn element_of(&self, p: Point<T>) -> usize {
        self.cell(p[1]) * self.elements_per_side + self.cell(p[0])
    }

    /// Every element whose closed square contains `p`.
    fn elements_touching(&self, p: Point<T>) -> Vec<usize> {
        let r = self.elements_per_side;
        let axis = |x: T| -> Vec<usize> {
            let xi = self.scaled(x);
            let f = xi.floor();
            let mut out = Vec::with_capacity(2);
            if f == xi && f > T::zero() {
                out.push(f.to_usize().unwrap_or(0) - 1);
            }
            if f >= T::zero() {
                if let Some(k) = f.to_usize() {
                    if k < r {
                        out.push(k);
                    }
                }
            }
            out
        };
        let (xs, ys) = (axis(p[0]), axis(p[1]));
        ys.iter()
            .flat_map(|&ey| xs.iter().map(move |&ex| ey * r + ex))
            .collect()
    }

    /// Hat value of coarse node `node` at `p`.
    pub fn hat(&self, node: usize, p: Point<T>) -> T {
        let side = self.elements_per_side + 1;
        let a = T::from_usize_lossy(node % side);
        let b = T::from_usize_lossy(node / side);
        let one = T::one();
        let fx = (one - (self.scaled(p[0]) - a).abs()).max(T::zero());
        let fy = (one - (self.scaled(p[1]) - b).abs()).max(T::zero());
        fx * fy
    }

    /// The four corners of the element owning `p` with their hat values at
    /// `p`. Every other coarse node's hat vanishes at `p`.
    pub fn supporting_nodes(&self, p: Point<T>) -> [(usize, T); 4] {
        self.element_corners(self.element_of(p))
            .map(|c| (c, self.hat(c, p)))
    }
}

/// Value of the bilinear basis function of coarse dof `dof` at `p`,
/// ignoring the component (every component shares the scalar hat).
pub fn eval_bilinear<T: Scalar>(grid: &CoarseGrid<T>, dof: usize, p: Point<T>) -> T {
    grid.hat(dof / grid.dofs_per_node(), p)
}
