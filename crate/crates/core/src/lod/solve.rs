use crate::coarse::{CoarseGrid, CoarseOperators};
use crate::error::{Error, Result};
use crate::lod::correctors::Correctors;
use crate::network::{BoundaryConditions, Point};
use crate::scalar::Scalar;
use crate::sparse::{solve_spd, SparseMatrix};

/// Modified basis `B̃ = [λ_i − φ̃_i]_{i∈ℳ}`, stored transposed (`m_H × n`).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleBasis<T> {
    rows: SparseMatrix<T>,
}

impl<T: Scalar> MultiscaleBasis<T> {
    /// The unmodified coarse basis `B_H`.
    pub fn coarse(ops: &CoarseOperators<T>) -> Self {
        Self {
            rows: ops.c_h().clone(),
        }
    }

    /// `B̃ᵀ`, row `k` is basis vector `k`.
    pub fn transposed(&self) -> &SparseMatrix<T> {
        &self.rows
    }

    /// `B̃`, `n × m_H`.
    pub fn matrix(&self) -> SparseMatrix<T> {
        self.rows.transpose()
    }

    pub fn coarse_dim(&self) -> usize {
        self.rows.nrows()
    }
}

/// Columns `λ_i − φ̃_i` for `i ∈ ℳ`.
pub fn build_basis<T: Scalar>(
    ops: &CoarseOperators<T>,
    correctors: &Correctors<T>,
) -> Result<MultiscaleBasis<T>> {
    let phi = correctors.matrix();
    if phi.shape() != (ops.coarse_dofs(), ops.fine_dim()) {
        return Err(Error::DimensionMismatch {
            expected: ops.coarse_dofs(),
            found: phi.nrows(),
            context: "corrector count",
        });
    }
    if let Some(i) = ops.free().iter().find(|&i| !correctors.is_computed(i)) {
        return Err(Error::InvalidParameter(format!(
            "no corrector computed for free coarse dof {i}"
        )));
    }
    let selected = phi.extract_rows(ops.free())?;
    let rows = ops.c_h().add_scaled(T::one(), &selected, -T::one())?;
    Ok(MultiscaleBasis { rows })
}

/// A fine-scale solution with the reduced coefficients when it came from a
/// coarse solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub u: Vec<T>,
    pub coefficients: Option<Vec<T>>,
    pub warnings: Vec<String>,
}

/// `B̃ᵀ K B̃ U = B̃ᵀ F`, `ũ = B̃ U`.
pub fn solve_multiscale<T: Scalar>(
    k: &SparseMatrix<T>,
    f: &[T],
    basis: &MultiscaleBasis<T>,
) -> Result<Solution<T>> {
    let bt = basis.transposed();
    if f.len() != bt.ncols() || k.nrows() != bt.ncols() {
        return Err(Error::DimensionMismatch {
            expected: bt.ncols(),
            found: f.len().min(k.nrows()),
            context: "multiscale load",
        });
    }
    let b = basis.matrix();
    let reduced = bt.matmul(&k.matmul(&b)?)?;
    let half = T::of(0.5);
    let reduced = reduced.add_scaled(half, &reduced.transpose(), half)?;
    let rhs = bt.mul_vec(f);
    let coefficients = solve_spd(&reduced, &rhs)?;
    Ok(Solution {
        u: bt.mul_vec_transposed(&coefficients),
        coefficients: Some(coefficients),
        warnings: Vec::new(),
    })
}

/// Reference solution: `K(𝒩,𝒩) u_𝒩 = F_𝒩 − K(𝒩,𝒩_D) g`, `u = g` on `𝒩_D`.
pub fn solve_full<T: Scalar>(
    k: &SparseMatrix<T>,
    f: &[T],
    bc: &BoundaryConditions<T>,
) -> Result<Solution<T>> {
    let n = k.nrows();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.len(),
            context: "load vector",
        });
    }
    bc.validate(n)?;
    let free = bc.free(n);
    let g = bc.lift(n);
    let kg = k.mul_vec(&g);
    let rhs: Vec<T> = free.iter().map(|q| f[q] - kg[q]).collect();
    let u_free = solve_spd(&k.extract(&free, &free)?, &rhs)?;
    let mut u = g;
    for (q, v) in free.iter().zip(u_free) {
        u[q] = v;
    }
    Ok(Solution {
        u,
        coefficients: None,
        warnings: Vec::new(),
    })
}

/// Coefficients `α_i` of `g_H = Σ α_i λ_i` read off the coarse nodes:
/// `rule(P_i, component)` where it is defined, zero elsewhere.
pub fn nodal_coefficients<T: Scalar, F>(grid: &CoarseGrid<T>, mut rule: F) -> Vec<T>
where
    F: FnMut(Point<T>, usize) -> Option<T>,
{
    let d = grid.dofs_per_node();
    (0..grid.dof_count())
        .map(|i| rule(grid.node_position(i / d), i % d).unwrap_or(T::zero()))
        .collect()
}

/// Non-zero boundary values: `u = ũ_ms + g_H − Σ_i α_i φ̃_i` where `ũ_ms`
/// solves the homogeneous problem with load `−K g_H`.
pub fn solve_displaced<T: Scalar>(
    k: &SparseMatrix<T>,
    bc: &BoundaryConditions<T>,
    basis: &MultiscaleBasis<T>,
    correctors: &Correctors<T>,
    ops: &CoarseOperators<T>,
    alpha: &[T],
) -> Result<Solution<T>> {
    let m = ops.coarse_dofs();
    if alpha.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: alpha.len(),
            context: "coarse boundary coefficients",
        });
    }
    if let Some(i) = (0..m).find(|&i| alpha[i] != T::zero() && !correctors.is_computed(i)) {
        return Err(Error::InvalidParameter(format!(
            "no corrector computed for coarse dof {i} carrying a boundary value"
        )));
    }
    let g_h = ops.lambda().mul_vec(alpha);
    let f: Vec<T> = k.mul_vec(&g_h).into_iter().map(|v| -v).collect();
    let mut sol = solve_multiscale(k, &f, basis)?;
    let correction = correctors.combine(alpha);
    for ((u, &g), &c) in sol.u.iter_mut().zip(&g_h).zip(&correction) {
        *u += g - c;
    }
    let n = ops.fine_dim();
    let target = bc.lift(n);
    let scale = bc.values().iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let defect = bc
        .fixed()
        .iter()
        .fold(T::zero(), |acc, q| acc.max((sol.u[q] - target[q]).abs()));
    if defect > T::of(1e-12) * scale {
        sol.warnings.push(format!(
            "prescribed values are not reproduced by the coarse interpolant (max deviation {:e}); the error bound does not apply",
            defect.as_f64()
        ));
    }
    Ok(sol)
}
