use rayon::prelude::*;

use crate::coarse::CoarseGrid;
use crate::error::Result;
use crate::models::{ElementMatrix, ElementSource};
use crate::network::{Network, Point};
use crate::scalar::Scalar;
use crate::sparse::{IndexSet, SparseMatrix};

/// `K_E` stored compactly over the dofs it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementBlock<T> {
    pub dofs: IndexSet,
    /// Square matrix over `dofs`.
    pub matrix: SparseMatrix<T>,
}

/// `K = Σ_E K_E`, one block per coarse element.
#[derive(Debug, Clone)]
pub struct ElementSplit<T> {
    dim: usize,
    blocks: Vec<ElementBlock<T>>,
    owner: Vec<usize>,
}

impl<T: Scalar> ElementSplit<T> {
    pub fn blocks(&self) -> &[ElementBlock<T>] {
        &self.blocks
    }

    pub fn block(&self, element: usize) -> &ElementBlock<T> {
        &self.blocks[element]
    }

    /// Owning coarse element of each input element matrix.
    pub fn owner(&self) -> &[usize] {
        &self.owner
    }

    /// `K_E` as an `n × n` matrix.
    pub fn to_global(&self, element: usize) -> SparseMatrix<T> {
        let b = &self.blocks[element];
        let dofs = b.dofs.as_slice();
        let triplets: Vec<_> = b
            .matrix
            .triplets()
            .map(|(r, c, v)| (dofs[r], dofs[c], v))
            .collect();
        SparseMatrix::from_triplets(self.dim, self.dim, &triplets).expect("block dofs are in range")
    }

    /// `Σ_E K_E`.
    pub fn reassemble(&self) -> SparseMatrix<T> {
        let mut triplets = Vec::new();
        for b in &self.blocks {
            let dofs = b.dofs.as_slice();
            triplets.extend(b.matrix.triplets().map(|(r, c, v)| (dofs[r], dofs[c], v)));
        }
        SparseMatrix::from_triplets(self.dim, self.dim, &triplets).expect("block dofs are in range")
    }
}

/// Point deciding which coarse element owns an element matrix: the edge
/// midpoint, or the central node of a pair.
pub fn element_location<T: Scalar>(net: &Network<T>, source: ElementSource) -> Point<T> {
    match source {
        ElementSource::Edge(e) => net.edge_midpoint(e),
        ElementSource::Pair(p) => net.nodes()[net.pairs()[p].center],
    }
}

/// Distributes element matrices over coarse elements. Each matrix goes
/// wholly to one element, so the blocks sum to `K` up to rounding.
pub fn split_elements<T: Scalar>(
    net: &Network<T>,
    grid: &CoarseGrid<T>,
    elements: &[(ElementSource, ElementMatrix<T>)],
) -> Result<ElementSplit<T>> {
    let owner: Vec<usize> = elements
        .iter()
        .map(|(src, _)| grid.element_of(element_location(net, *src)))
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); grid.element_count()];
    for (k, &e) in owner.iter().enumerate() {
        members[e].push(k);
    }
    let n = net.dof_count();
    let blocks = members
        .par_iter()
        .map(|list| {
            let dofs = IndexSet::from_unsorted(
                list.iter()
                    .flat_map(|&k| elements[k].1.dofs.iter().copied()),
                n,
            )?;
            let mut triplets = Vec::new();
            for &k in list {
                let el = &elements[k].1;
                let local: Vec<usize> = el
                    .dofs
                    .iter()
                    .map(|&q| dofs.position(q).expect("dof collected above"))
                    .collect();
                let size = el.size();
                for a in 0..size {
                    for b in 0..size {
                        let v = el.get(a, b);
                        if v != T::zero() {
                            triplets.push((local[a], local[b], v));
                        }
                    }
                }
            }
            let matrix = SparseMatrix::from_triplets(dofs.len(), dofs.len(), &triplets)?;
            Ok(ElementBlock { dofs, matrix })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ElementSplit {
        dim: n,
        blocks,
        owner,
    })
}
