use rayon::prelude::*;

use crate::coarse::{CoarseOperators, PatchIndex};
use crate::error::{Error, Result};
use crate::lod::split::{ElementBlock, ElementSplit};
use crate::scalar::Scalar;
use crate::sparse::{IndexSet, SaddleSolver, SparseMatrix};

/// Which coarse dofs get a corrector.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrectorSet {
    /// `i ∈ ℳ`, enough for homogeneous boundary conditions.
    Free,
    /// Every coarse dof, needed to correct non-zero boundary values.
    All,
    Only(Vec<usize>),
}

impl CorrectorSet {
    fn mask<T: Scalar>(&self, ops: &CoarseOperators<T>) -> Result<Vec<bool>> {
        let m = ops.coarse_dofs();
        let mut mask = vec![false; m];
        match self {
            Self::Free => ops.free().iter().for_each(|i| mask[i] = true),
            Self::All => mask.iter_mut().for_each(|x| *x = true),
            Self::Only(list) => {
                for &i in list {
                    if i >= m {
                        return Err(Error::IndexOutOfRange {
                            index: i,
                            bound: m,
                            context: "coarse dof",
                        });
                    }
                    mask[i] = true;
                }
            }
        }
        Ok(mask)
    }
}

/// Corrector vectors `φ̃_i`, stored as the rows of an `m × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Correctors<T> {
    rows: SparseMatrix<T>,
    computed: Vec<bool>,
    regularized: usize,
}

impl<T: Scalar> Correctors<T> {
    pub fn new(rows: SparseMatrix<T>, computed: Vec<bool>) -> Result<Self> {
        if computed.len() != rows.nrows() {
            return Err(Error::DimensionMismatch {
                expected: rows.nrows(),
                found: computed.len(),
                context: "corrector mask",
            });
        }
        Ok(Self {
            rows,
            computed,
            regularized: 0,
        })
    }

    /// All-zero correctors for every coarse dof.
    pub fn zero(coarse_dofs: usize, fine_dim: usize) -> Self {
        Self {
            rows: SparseMatrix::zeros(coarse_dofs, fine_dim),
            computed: vec![true; coarse_dofs],
            regularized: 0,
        }
    }

    /// Row `i` is `φ̃_i`.
    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.rows
    }

    pub fn is_computed(&self, i: usize) -> bool {
        self.computed[i]
    }

    pub fn computed(&self) -> &[bool] {
        &self.computed
    }

    /// Number of local problems that needed a regularized factorization.
    pub fn regularized_count(&self) -> usize {
        self.regularized
    }

    pub fn vector(&self, i: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.rows.ncols()];
        let (cols, vals) = self.rows.row(i);
        for (&c, &x) in cols.iter().zip(vals) {
            v[c] = x;
        }
        v
    }

    /// `Σ_i α_i φ̃_i`.
    pub fn combine(&self, alpha: &[T]) -> Vec<T> {
        self.rows.mul_vec_transposed(alpha)
    }

    /// `max_i ‖C_H φ̃_i‖_∞`.
    pub fn constraint_defect(&self, ops: &CoarseOperators<T>) -> T {
        let c_phi = ops
            .c_h()
            .matmul(&self.rows.transpose())
            .expect("shapes agree");
        c_phi.max_abs()
    }
}

/// `r_i^E = K_E(𝒩_E, :) λ_i`, indexed like `patch_dofs`.
fn local_rhs<T: Scalar>(
    block: &ElementBlock<T>,
    patch_dofs: &IndexSet,
    lambda_rows: &SparseMatrix<T>,
    i: usize,
) -> Vec<T> {
    let mut lam = vec![T::zero(); block.dofs.len()];
    let (cols, vals) = lambda_rows.row(i);
    for (&c, &v) in cols.iter().zip(vals) {
        if let Some(p) = block.dofs.position(c) {
            lam[p] = v;
        }
    }
    let y = block.matrix.mul_vec(&lam);
    let mut r = vec![T::zero(); patch_dofs.len()];
    for (a, q) in block.dofs.iter().enumerate() {
        if let Some(p) = patch_dofs.position(q) {
            r[p] = y[a];
        }
    }
    r
}

/// Coarse dofs whose `λ_i` is nonzero on some dof of the block.
fn candidates<T: Scalar>(
    block: &ElementBlock<T>,
    ops: &CoarseOperators<T>,
    mask: &[bool],
) -> Vec<usize> {
    let mut hit = vec![false; mask.len()];
    for q in block.dofs.iter() {
        let (cols, vals) = ops.lambda().row(q);
        for (&c, &v) in cols.iter().zip(vals) {
            if v != T::zero() && mask[c] {
                hit[c] = true;
            }
        }
    }
    (0..mask.len()).filter(|&i| hit[i]).collect()
}

struct ElementResult<T> {
    pieces: Vec<(usize, Vec<T>)>,
    regularized: bool,
}

fn element_correctors<T: Scalar>(
    k: &SparseMatrix<T>,
    split: &ElementSplit<T>,
    patches: &PatchIndex,
    ops: &CoarseOperators<T>,
    lambda_rows: &SparseMatrix<T>,
    element: usize,
    mask: &[bool],
) -> Result<ElementResult<T>> {
    let block = split.block(element);
    let patch = &patches.patches[element];
    let rhs: Vec<(usize, Vec<T>)> = candidates(block, ops, mask)
        .into_iter()
        .map(|i| (i, local_rhs(block, &patch.dofs, lambda_rows, i)))
        .filter(|(_, r)| r.iter().any(|&v| v != T::zero()))
        .collect();
    if rhs.is_empty() {
        return Ok(ElementResult {
            pieces: Vec::new(),
            regularized: false,
        });
    }
    let wrap = |dof: Option<usize>| {
        move |e: Error| Error::LocalSolve {
            element,
            dof,
            source: Box::new(e),
        }
    };
    let k_e = k.extract(&patch.dofs, &patch.dofs)?;
    let c_e = ops.c_h().extract(&patch.coarse, &patch.dofs)?;
    let solver = SaddleSolver::new(&k_e, &c_e).map_err(wrap(None))?;
    let mut pieces = Vec::with_capacity(rhs.len());
    for (i, r) in rhs {
        let sol = solver.solve(&r).map_err(wrap(Some(i)))?;
        pieces.push((i, sol.phi));
    }
    Ok(ElementResult {
        pieces,
        regularized: solver.is_regularized(),
    })
}

/// `φ̃_i^E` for one element and coarse dof, zero outside the patch.
pub fn solve_corrector<T: Scalar>(
    k: &SparseMatrix<T>,
    split: &ElementSplit<T>,
    patches: &PatchIndex,
    ops: &CoarseOperators<T>,
    element: usize,
    i: usize,
) -> Result<Vec<T>> {
    let mask = CorrectorSet::Only(vec![i]).mask(ops)?;
    let lambda_rows = ops.lambda().transpose();
    let res = element_correctors(k, split, patches, ops, &lambda_rows, element, &mask)?;
    let dofs = &patches.patches[element].dofs;
    Ok(match res.pieces.into_iter().next() {
        Some((_, phi)) => dofs.scatter(&phi, ops.fine_dim()),
        None => vec![T::zero(); ops.fine_dim()],
    })
}

/// Localized correctors `φ̃_i = Σ_E φ̃_i^E`. Each element's patch matrix is
/// factored once and reused for every `i`; elements run in parallel.
pub fn compute_correctors<T: Scalar>(
    k: &SparseMatrix<T>,
    split: &ElementSplit<T>,
    patches: &PatchIndex,
    ops: &CoarseOperators<T>,
    set: &CorrectorSet,
) -> Result<Correctors<T>> {
    let mask = set.mask(ops)?;
    let lambda_rows = ops.lambda().transpose();
    let results = (0..split.blocks().len())
        .into_par_iter()
        .map(|e| element_correctors(k, split, patches, ops, &lambda_rows, e, &mask))
        .collect::<Result<Vec<_>>>()?;

    let m = ops.coarse_dofs();
    let n = ops.fine_dim();
    let mut by_dof: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (e, res) in results.iter().enumerate() {
        for (slot, (i, _)) in res.pieces.iter().enumerate() {
            by_dof[*i].push((e, slot));
        }
    }
    let rows = by_dof
        .par_iter()
        .map(|list| {
            let mut entries: Vec<(usize, T)> = Vec::new();
            for &(e, slot) in list {
                let dofs = &patches.patches[e].dofs;
                entries.extend(dofs.iter().zip(results[e].pieces[slot].1.iter().copied()));
            }
            // stable: contributions to one dof are summed in element order
            entries.sort_by_key(|&(q, _)| q);
            let mut cols = Vec::new();
            let mut vals: Vec<T> = Vec::new();
            for (q, v) in entries {
                if cols.last() == Some(&q) {
                    *vals.last_mut().expect("paired with cols") += v;
                } else {
                    cols.push(q);
                    vals.push(v);
                }
            }
            (cols, vals)
        })
        .collect::<Vec<(Vec<usize>, Vec<T>)>>();
    let regularized = results.iter().filter(|r| r.regularized).count();
    Ok(Correctors {
        rows: SparseMatrix::from_rows(n, rows)?,
        computed: mask,
        regularized,
    })
}

/// Unlocalized correctors `φ_i ∈ W` with `wᵀK(λ_i − φ_i) = 0` for all
/// `w ∈ W`, from a single factorization over all free dofs.
pub fn global_correctors<T: Scalar>(
    k: &SparseMatrix<T>,
    ops: &CoarseOperators<T>,
    free: &IndexSet,
    set: &CorrectorSet,
) -> Result<Correctors<T>> {
    let mask = set.mask(ops)?;
    let k_f = k.extract(free, free)?;
    let c_f = ops.c_h().extract(&IndexSet::full(ops.coarse_dim()), free)?;
    let solver = SaddleSolver::new(&k_f, &c_f)?;
    let lambda_rows = ops.lambda().transpose();
    let n = ops.fine_dim();
    let rows = (0..mask.len())
        .into_par_iter()
        .map(|i| {
            if !mask[i] || lambda_rows.row(i).0.is_empty() {
                return Ok((Vec::new(), Vec::new()));
            }
            let mut lam = vec![T::zero(); n];
            let (cols, vals) = lambda_rows.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                lam[c] = v;
            }
            let r = free.gather(&k.mul_vec(&lam));
            let sol = solver.solve(&r).map_err(|e| Error::LocalSolve {
                element: usize::MAX,
                dof: Some(i),
                source: Box::new(e),
            })?;
            Ok(free
                .iter()
                .zip(sol.phi)
                .filter(|(_, v)| *v != T::zero())
                .unzip())
        })
        .collect::<Result<Vec<(Vec<usize>, Vec<T>)>>>()?;
    Ok(Correctors {
        rows: SparseMatrix::from_rows(n, rows)?,
        computed: mask,
        regularized: usize::from(solver.is_regularized()),
    })
}
