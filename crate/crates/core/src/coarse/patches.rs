use rayon::prelude::*;

use crate::coarse::{CoarseGrid, CoarseOperators};
use crate::error::{Error, Result};
use crate::network::{distance, Network};
use crate::scalar::Scalar;
use crate::sparse::IndexSet;

/// Patch radius in units of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchRadius {
    /// Closed ball of radius `ρ H` around the element center.
    Ratio(f64),
    /// The whole network; no localization.
    Full,
}

impl PatchRadius {
    /// `∞` maps to [`PatchRadius::Full`].
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_infinite() && rho > 0.0 {
            Ok(Self::Full)
        } else if rho > 0.0 {
            Ok(Self::Ratio(rho))
        } else {
            Err(Error::InvalidParameter(format!(
                "patch radius must be positive, got {rho}"
            )))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Self::Ratio(r) => r,
            Self::Full => f64::INFINITY,
        }
    }
}

/// Index sets of one element's patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    /// `𝒩_E`: free network dofs in the patch.
    pub dofs: IndexSet,
    /// `ℳ_E`, as positions in `ℳ` (rows of `C_H`): the free coarse dofs
    /// whose `λ` is nonzero somewhere on `𝒩_E`. These are exactly the
    /// constraints `C_H w = 0` that act on vectors supported in the patch.
    pub coarse: IndexSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchIndex {
    pub radius: PatchRadius,
    pub patches: Vec<Patch>,
}

/// Patches for every element of `grid`. `free` is the free network dof set
/// `𝒩`.
pub fn build_patches<T: Scalar>(
    grid: &CoarseGrid<T>,
    net: &Network<T>,
    ops: &CoarseOperators<T>,
    free: &IndexSet,
    radius: PatchRadius,
) -> Result<PatchIndex> {
    let d = net.dofs_per_node();
    let n = net.dof_count();
    let m_h = ops.coarse_dim();
    let b_h = ops.b_h();
    let patches = (0..grid.element_count())
        .into_par_iter()
        .map(|e| {
            let dofs = match radius {
                PatchRadius::Full => free.clone(),
                PatchRadius::Ratio(rho) => {
                    let center = grid.element_center(e);
                    let reach = T::of(rho) * grid.h();
                    let inside: Vec<usize> = free
                        .iter()
                        .filter(|&q| distance(net.nodes()[q / d], center) <= reach)
                        .collect();
                    IndexSet::new(inside, n)?
                }
            };
            if dofs.is_empty() {
                return Err(Error::EmptyPatch { element: e });
            }
            let mut touched = vec![false; m_h];
            for q in dofs.iter() {
                let (cols, vals) = b_h.row(q);
                for (&c, &v) in cols.iter().zip(vals) {
                    if v != T::zero() {
                        touched[c] = true;
                    }
                }
            }
            Ok(Patch {
                dofs,
                coarse: IndexSet::from_mask(&touched),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatchIndex { radius, patches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::interpolate_basis;
    use crate::network::{generate_regular, BoundaryConditions};

    fn setup(
        r: usize,
        big_r: usize,
    ) -> (
        Network<f64>,
        BoundaryConditions<f64>,
        CoarseGrid<f64>,
        CoarseOperators<f64>,
    ) {
        let net = generate_regular::<f64>(r).unwrap();
        let bc = BoundaryConditions::from_rule(&net, |p, _| {
            (p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0).then_some(0.0)
        });
        let grid = CoarseGrid::new(big_r, &net, &bc).unwrap();
        let ops = interpolate_basis(&grid, &net).unwrap();
        (net, bc, grid, ops)
    }

    #[test]
    fn full_coverage_and_free_only() {
        let (net, bc, grid, ops) = setup(8, 4);
        let free = bc.free(net.dof_count());
        for radius in [PatchRadius::Full, PatchRadius::Ratio(4.0 * 2f64.sqrt())] {
            let idx = build_patches(&grid, &net, &ops, &free, radius).unwrap();
            for p in &idx.patches {
                assert_eq!(p.dofs, free);
                assert_eq!(p.coarse.len(), ops.coarse_dim());
            }
        }
        let idx = build_patches(&grid, &net, &ops, &free, PatchRadius::Ratio(1.0)).unwrap();
        for p in &idx.patches {
            assert!(p.dofs.is_subset(&free));
        }
    }

    #[test]
    fn membership_by_distance() {
        // H = 0.25, element 5 centered at (0.375, 0.375), ρ = 1.5
        let (net, bc, grid, ops) = setup(20, 4);
        let free = bc.free(net.dof_count());
        let idx = build_patches(&grid, &net, &ops, &free, PatchRadius::Ratio(1.5)).unwrap();
        // network node (14, 7) is at (0.7, 0.35): distance 0.326 <= 0.375
        let node = 7 * 21 + 14;
        assert!(idx.patches[5].dofs.contains(2 * node));
        // (0.8, 0.35) is 0.426 away
        assert!(!idx.patches[5].dofs.contains(2 * (7 * 21 + 16)));
    }

    #[test]
    fn monotone_in_radius() {
        let (net, bc, grid, ops) = setup(16, 4);
        let free = bc.free(net.dof_count());
        let radii = [0.5, 1.0, 1.5, 2.5, 4.0];
        let sets: Vec<PatchIndex> = radii
            .iter()
            .map(|&r| build_patches(&grid, &net, &ops, &free, PatchRadius::Ratio(r)).unwrap())
            .collect();
        for w in sets.windows(2) {
            for (a, b) in w[0].patches.iter().zip(&w[1].patches) {
                assert!(a.dofs.is_subset(&b.dofs));
                assert!(a.coarse.is_subset(&b.coarse));
            }
        }
    }

    #[test]
    fn tiny_patch_errors() {
        // element centers fall between network nodes
        let (net, bc, grid, ops) = setup(4, 4);
        let free = bc.free(net.dof_count());
        match build_patches(&grid, &net, &ops, &free, PatchRadius::Ratio(0.1)) {
            Err(Error::EmptyPatch { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(PatchRadius::new(0.0).is_err());
        assert_eq!(PatchRadius::new(f64::INFINITY).unwrap(), PatchRadius::Full);
    }
}
