use crate::coarse::CoarseGrid;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::scalar::Scalar;
use crate::sparse::{IndexSet, SparseMatrix, SpdSolver};

/// Interpolated coarse basis and the prolongation/restriction pair.
#[derive(Debug, Clone)]
pub struct CoarseOperators<T> {
    /// `n × m`, column `i` is `λ_i`, for every coarse dof.
    lambda: SparseMatrix<T>,
    /// `n × m_H`, the columns of `lambda` in `ℳ`.
    b_h: SparseMatrix<T>,
    /// `C_H = B_Hᵀ`.
    c_h: SparseMatrix<T>,
    free: IndexSet,
    gram: SpdSolver<T>,
}

impl<T: Scalar> CoarseOperators<T> {
    pub fn lambda(&self) -> &SparseMatrix<T> {
        &self.lambda
    }

    pub fn b_h(&self) -> &SparseMatrix<T> {
        &self.b_h
    }

    pub fn c_h(&self) -> &SparseMatrix<T> {
        &self.c_h
    }

    /// `ℳ`; position `k` in it is column `k` of `B_H`.
    pub fn free(&self) -> &IndexSet {
        &self.free
    }

    /// `n`.
    pub fn fine_dim(&self) -> usize {
        self.lambda.nrows()
    }

    /// `m`.
    pub fn coarse_dofs(&self) -> usize {
        self.lambda.ncols()
    }

    /// `m_H = |ℳ|`.
    pub fn coarse_dim(&self) -> usize {
        self.b_h.ncols()
    }

    /// Dense `λ_i` for any coarse dof `i`.
    pub fn lambda_vector(&self, i: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.fine_dim()];
        for (r, c, x) in self.lambda.triplets() {
            if c == i {
                v[r] = x;
            }
        }
        v
    }

    /// `B_H a`.
    pub fn prolong(&self, a: &[T]) -> Vec<T> {
        self.b_h.mul_vec(a)
    }

    /// `C_H v`.
    pub fn restrict(&self, v: &[T]) -> Vec<T> {
        self.c_h.mul_vec(v)
    }

    /// Unique splitting `v = v_H + w` with `v_H = B_H (C_H B_H)⁻¹ C_H v` in
    /// the coarse space and `C_H w = 0`.
    pub fn split(&self, v: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let a = self.gram.solve(&self.restrict(v))?;
        let vh = self.prolong(&a);
        let w = v.iter().zip(&vh).map(|(&x, &y)| x - y).collect();
        Ok((vh, w))
    }
}

/// `λ_i(j) = Λ_i(p_j)` when `i ≡ j (mod d)`, zero otherwise.
pub fn interpolate_basis<T: Scalar>(
    grid: &CoarseGrid<T>,
    net: &Network<T>,
) -> Result<CoarseOperators<T>> {
    let d = net.dofs_per_node();
    if d != grid.dofs_per_node() {
        return Err(Error::DimensionMismatch {
            expected: grid.dofs_per_node(),
            found: d,
            context: "dofs per node of grid and network",
        });
    }
    let mut triplets = Vec::with_capacity(4 * net.dof_count());
    for (j, &p) in net.nodes().iter().enumerate() {
        for (cn, value) in grid.supporting_nodes(p) {
            if value != T::zero() {
                for comp in 0..d {
                    triplets.push((d * j + comp, d * cn + comp, value));
                }
            }
        }
    }
    let n = net.dof_count();
    let lambda = SparseMatrix::from_triplets(n, grid.dof_count(), &triplets)?;
    let b_h = lambda.extract(&IndexSet::full(n), grid.free())?;
    let c_h = b_h.transpose();
    let gram = SpdSolver::new(&c_h.matmul(&b_h)?).map_err(|e| match e {
        Error::NotPositiveDefinite { pivot, .. } | Error::Singular { pivot, .. } => {
            Error::RankDeficientProlongation { pivot }
        }
        other => other,
    })?;
    Ok(CoarseOperators {
        lambda,
        b_h,
        c_h,
        free: grid.free().clone(),
        gram,
    })
}

/// `π_H v = Σ_{i∈ℳ} (λ_iᵀ v) λ_i`.
pub fn interpolate_pi_h<T: Scalar>(ops: &CoarseOperators<T>, v: &[T]) -> Vec<T> {
    ops.prolong(&ops.restrict(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_regular, perturb_random, BoundaryConditions};

    #[test]
    fn partition_of_unity_per_component() {
        let net = perturb_random(&generate_regular::<f64>(8).unwrap(), 0.3, 1).unwrap();
        let grid = CoarseGrid::new(4, &net, &BoundaryConditions::none()).unwrap();
        let ops = interpolate_basis(&grid, &net).unwrap();
        let x_nodes: Vec<f64> = (0..grid.dof_count())
            .map(|i| if i % 2 == 0 { 1.0 } else { 0.0 })
            .collect();
        let sum = ops.lambda().mul_vec(&x_nodes);
        for (q, s) in sum.iter().enumerate() {
            let want = if q % 2 == 0 { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-14, "{q}: {s}");
        }
    }

    #[test]
    fn kronecker_and_component_separation() {
        let net = generate_regular::<f64>(8).unwrap();
        let grid = CoarseGrid::new(4, &net, &BoundaryConditions::none()).unwrap();
        let ops = interpolate_basis(&grid, &net).unwrap();
        // coarse node 6 = (0.25, 0.25) coincides with network node (2, 2) = 20
        let l = ops.lambda_vector(2 * 6 + 1);
        assert_eq!(l[2 * 20 + 1], 1.0);
        assert!(l.iter().step_by(2).all(|&v| v == 0.0));
        assert_eq!(l.iter().filter(|&&v| v != 0.0).count(), 9);
    }

    #[test]
    fn pi_h_is_not_a_projection() {
        let net = generate_regular::<f64>(4)
            .unwrap()
            .with_dofs_per_node(1)
            .unwrap();
        let grid = CoarseGrid::new(2, &net, &BoundaryConditions::none()).unwrap();
        let ops = interpolate_basis(&grid, &net).unwrap();
        assert!(interpolate_pi_h(&ops, &[0.0; 25]).iter().all(|&v| v == 0.0));
        let lk = ops.lambda_vector(4);
        let got = interpolate_pi_h(&ops, &lk);
        // direct evaluation of Σ_i (λ_iᵀ λ_k) λ_i
        let mut want = vec![0.0; 25];
        for i in 0..9 {
            let li = ops.lambda_vector(i);
            let c: f64 = li.iter().zip(&lk).map(|(a, b)| a * b).sum();
            for (w, v) in want.iter_mut().zip(&li) {
                *w += c * v;
            }
        }
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-14));
        assert!(got.iter().zip(&lk).any(|(a, b)| (a - b).abs() > 0.1));
    }

    #[test]
    fn splitting() {
        let net = perturb_random(&generate_regular::<f64>(8).unwrap(), 0.4, 2).unwrap();
        let bc = BoundaryConditions::from_rule(&net, |p, _| (p[0] == 0.0).then_some(0.0));
        let grid = CoarseGrid::new(4, &net, &bc).unwrap();
        let ops = interpolate_basis(&grid, &net).unwrap();
        let v: Vec<f64> = (0..net.dof_count())
            .map(|q| ((q * 37 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let (vh, w) = ops.split(&v).unwrap();
        assert!(ops.restrict(&w).iter().all(|x| x.abs() < 1e-10));
        assert!(v
            .iter()
            .zip(vh.iter().zip(&w))
            .all(|(a, (b, c))| (a - b - c).abs() < 1e-14));
        // v_H reproduces itself, so it lies in the range of B_H
        let (vh2, w2) = ops.split(&vh).unwrap();
        assert!(vh.iter().zip(&vh2).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(w2.iter().all(|x| x.abs() < 1e-10));
    }
}
