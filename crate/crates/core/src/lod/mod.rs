//! The multiscale method: element-wise splitting of `K`, localized corrector
//! problems, the modified coarse basis, reference and multiscale solves,
//! non-zero boundary values, and error norms.

mod correctors;
mod io;
mod norms;
mod solve;
mod split;

pub use correctors::{
    compute_correctors, global_correctors, solve_corrector, CorrectorSet, Correctors,
};
pub use io::{load_correctors, read_correctors, save_correctors, write_correctors};
pub use norms::{compare, energy_norm, l2_norm, ErrorReport};
pub use solve::{
    build_basis, nodal_coefficients, solve_displaced, solve_full, solve_multiscale,
    MultiscaleBasis, Solution,
};
pub use split::{element_location, split_elements, ElementBlock, ElementSplit};

use crate::coarse::{
    build_patches, interpolate_basis, CoarseGrid, CoarseOperators, PatchIndex, PatchRadius,
};
use crate::error::Result;
use crate::models::{ElementMatrix, ElementSource};
use crate::network::{BoundaryConditions, Network};
use crate::scalar::Scalar;
use crate::sparse::{IndexSet, SparseMatrix};

/// Everything fixed by the network, the boundary conditions and `R`.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub net: Network<T>,
    pub k: SparseMatrix<T>,
    pub bc: BoundaryConditions<T>,
    /// Free network dofs `𝒩`.
    pub free: IndexSet,
    pub grid: CoarseGrid<T>,
    pub ops: CoarseOperators<T>,
    pub split: ElementSplit<T>,
}

impl<T: Scalar> Discretization<T> {
    /// Assembles `K` from `elements` and builds the coarse side for an
    /// `R × R` grid.
    pub fn new(
        net: Network<T>,
        elements: &[(ElementSource, ElementMatrix<T>)],
        bc: BoundaryConditions<T>,
        elements_per_side: usize,
    ) -> Result<Self> {
        let split_grid = CoarseGrid::new(elements_per_side, &net, &bc)?;
        let split = split_elements(&net, &split_grid, elements)?;
        let n = net.dof_count();
        let mut triplets = Vec::new();
        for (_, el) in elements {
            el.push_triplets(&mut triplets);
        }
        let k = SparseMatrix::from_triplets(n, n, &triplets)?;
        Self::with_matrix(net, k, split, split_grid, bc)
    }

    fn with_matrix(
        net: Network<T>,
        k: SparseMatrix<T>,
        split: ElementSplit<T>,
        grid: CoarseGrid<T>,
        bc: BoundaryConditions<T>,
    ) -> Result<Self> {
        let ops = interpolate_basis(&grid, &net)?;
        let free = bc.free(net.dof_count());
        Ok(Self {
            net,
            k,
            bc,
            free,
            grid,
            ops,
            split,
        })
    }

    pub fn patches(&self, radius: PatchRadius) -> Result<PatchIndex> {
        build_patches(&self.grid, &self.net, &self.ops, &self.free, radius)
    }

    /// Correctors for radius `ρ`. Without localization every element
    /// problem is posed on all free dofs, and by linearity their sum is the
    /// global corrector, which is computed directly.
    pub fn correctors(&self, radius: PatchRadius, set: &CorrectorSet) -> Result<Correctors<T>> {
        match radius {
            PatchRadius::Full => global_correctors(&self.k, &self.ops, &self.free, set),
            PatchRadius::Ratio(_) => {
                let patches = self.patches(radius)?;
                compute_correctors(&self.k, &self.split, &patches, &self.ops, set)
            }
        }
    }

    /// Relative energy error `|||φ_i − φ̃_i||| / |||φ_i|||` of the corrector
    /// of coarse dof `i` for each radius.
    pub fn corrector_decay_error(&self, i: usize, radii: &[PatchRadius]) -> Result<Vec<f64>> {
        let set = CorrectorSet::Only(vec![i]);
        let exact = global_correctors(&self.k, &self.ops, &self.free, &set)?.vector(i);
        let norm = energy_norm(&self.k, &exact)?.as_f64();
        radii
            .iter()
            .map(|&radius| {
                let local = match radius {
                    PatchRadius::Full => {
                        let patches = self.patches(radius)?;
                        compute_correctors(&self.k, &self.split, &patches, &self.ops, &set)?
                    }
                    _ => self.correctors(radius, &set)?,
                };
                let diff: Vec<T> = exact
                    .iter()
                    .zip(local.vector(i))
                    .map(|(&a, b)| a - b)
                    .collect();
                let err = energy_norm(&self.k, &diff)?.as_f64();
                Ok(if norm > 0.0 { err / norm } else { err })
            })
            .collect()
    }
}
