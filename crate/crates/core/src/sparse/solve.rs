use crate::error::{Error, Result};
use crate::scalar::{max_abs, norm2, Scalar};
use crate::sparse::ldl::{LdlFactor, PivotPolicy};
use crate::sparse::SparseMatrix;

/// Relative residual accepted from SPD solves.
pub const SPD_RESIDUAL_TOL: f64 = 1e-10;
/// Relative residual accepted from saddle-point solves.
pub const SADDLE_RESIDUAL_TOL: f64 = 1e-9;

// regularized factorizations can contract slowly
const REFINEMENT_STEPS: usize = 60;

fn residual<T: Scalar>(a: &SparseMatrix<T>, x: &[T], b: &[T]) -> Vec<T> {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .map(|(&ax, &bi)| bi - ax)
        .collect()
}

fn relative<T: Scalar>(res: &[T], b: &[T]) -> f64 {
    let nb = norm2(b);
    let nr = norm2(res);
    if nb == T::zero() {
        nr.as_f64()
    } else {
        (nr / nb).as_f64()
    }
}

/// Solves `factor · x = b` for the system matrix `a`, refining the solution
/// until the relative residual drops below `target` or stops improving, and
/// accepting it if it is below `tol`.
fn refine<T: Scalar>(
    a: &SparseMatrix<T>,
    factor: &LdlFactor<T>,
    b: &[T],
    tol: f64,
    target: f64,
) -> Result<(Vec<T>, f64)> {
    let mut x = factor.solve(b);
    let mut res = residual(a, &x, b);
    let mut rel = relative(&res, b);
    // single precision cannot reach the f64 tolerances
    let tol = tol.max(T::epsilon().as_f64() * 1e2);
    let target = target.clamp(T::epsilon().as_f64() * 1e2, tol);
    let mut steps = 0;
    while rel > target && steps < REFINEMENT_STEPS {
        let dx = factor.solve(&res);
        let trial: Vec<T> = x.iter().zip(dx).map(|(&xi, d)| xi + d).collect();
        let trial_res = residual(a, &trial, b);
        let trial_rel = relative(&trial_res, b);
        // stop once refinement no longer helps
        if !(trial_rel < 0.98 * rel) {
            break;
        }
        x = trial;
        res = trial_res;
        rel = trial_rel;
        steps += 1;
    }
    if rel > tol || !rel.is_finite() {
        return Err(Error::ResidualTooLarge {
            residual: rel,
            tolerance: tol,
        });
    }
    Ok((x, rel))
}

/// Factorization of an SPD matrix, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct SpdSolver<T> {
    matrix: SparseMatrix<T>,
    factor: LdlFactor<T>,
}

impl<T: Scalar> SpdSolver<T> {
    pub fn new(a: &SparseMatrix<T>) -> Result<Self> {
        let factor = LdlFactor::new(a, 0, PivotPolicy::Positive)?;
        Ok(Self {
            matrix: a.clone(),
            factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.factor.dim()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: b.len(),
                context: "SPD right-hand side",
            });
        }
        refine(
            &self.matrix,
            &self.factor,
            b,
            SPD_RESIDUAL_TOL,
            SPD_RESIDUAL_TOL,
        )
        .map(|(x, _)| x)
    }
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd<T: Scalar>(a: &SparseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    SpdSolver::new(a)?.solve(b)
}

/// Solution of a saddle-point system.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution<T> {
    pub phi: Vec<T>,
    pub eta: Vec<T>,
    /// Relative residual of the unregularized block system, with each
    /// constraint row scaled to unit max-norm.
    pub residual: f64,
}

/// Factorization of the block matrix `[[K, Cᵀ], [C, 0]]`.
///
/// Constraint rows are first scaled to unit max-norm: a row with only tiny
/// entries leaves the same constraint but would otherwise produce a
/// near-zero Schur pivot.
///
/// The primal block is ordered by nested dissection and the multipliers are
/// eliminated last, so for SPD `K` and full-rank `C` the pivots are positive
/// on the primal block and negative on the Schur complement `−C K⁻¹ Cᵀ`. When
/// that fails the zero block is replaced by `−εI` with `ε = 1e-12 ‖K‖_max`
/// (rank-deficient `C`), and if the primal block itself is singular it is
/// augmented to `K + γ CᵀC`. Iterative refinement against the original block
/// matrix restores the residual for consistent right-hand sides.
#[derive(Debug, Clone)]
pub struct SaddleSolver<T> {
    block: SparseMatrix<T>,
    factor: LdlFactor<T>,
    /// Constraint rows are scaled to unit max-norm; `η_j = row_scale_j η̃_j`.
    row_scale: Vec<T>,
    n_primal: usize,
    n_constraints: usize,
    regularized: bool,
}

impl<T: Scalar> SaddleSolver<T> {
    pub fn new(k: &SparseMatrix<T>, c: &SparseMatrix<T>) -> Result<Self> {
        let n = k.nrows();
        if k.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k.ncols(),
                context: "saddle primal block must be square",
            });
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.ncols(),
                context: "constraint block columns",
            });
        }
        let m = c.nrows();
        let row_scale: Vec<T> = (0..m)
            .map(|r| {
                let top = c.row(r).1.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
                if top > T::zero() {
                    T::one() / top
                } else {
                    T::one()
                }
            })
            .collect();
        let scaled: Vec<(usize, usize, T)> = c
            .triplets()
            .map(|(r, col, v)| (r, col, v * row_scale[r]))
            .collect();
        let c = &SparseMatrix::from_triplets(m, n, &scaled)?;
        let block = Self::block_matrix(k, c, T::zero())?;
        let first = match LdlFactor::new(&block, m, PivotPolicy::Signed) {
            Ok(factor) => {
                return Ok(Self {
                    block,
                    factor,
                    row_scale,
                    n_primal: n,
                    n_constraints: m,
                    regularized: false,
                })
            }
            Err(e @ Error::Singular { .. }) if m > 0 => e,
            Err(e) => return Err(e),
        };

        let eps = T::of(1e-12) * k.max_abs();
        // A singular primal block cannot be fixed by shifting the multiplier
        // block; K + γ CᵀC has the same solution on C φ = 0 and is definite
        // whenever the block system is nonsingular.
        let c_max = c.max_abs();
        let gamma = if c_max > T::zero() {
            k.max_abs().max(T::one()) / (c_max * c_max)
        } else {
            T::one()
        };
        let augmented = k.add_scaled(T::one(), &c.transpose().matmul(c)?, gamma)?;
        let attempts = [(k, eps), (&augmented, T::zero()), (&augmented, eps)];
        let mut last = first;
        for (primal, shift) in attempts {
            let candidate = Self::block_matrix(primal, c, shift)?;
            match LdlFactor::new(&candidate, m, PivotPolicy::Signed) {
                Ok(factor) => {
                    return Ok(Self {
                        block,
                        factor,
                        row_scale,
                        n_primal: n,
                        n_constraints: m,
                        regularized: true,
                    })
                }
                Err(e @ Error::Singular { .. }) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }

    fn block_matrix(k: &SparseMatrix<T>, c: &SparseMatrix<T>, shift: T) -> Result<SparseMatrix<T>> {
        let n = k.nrows();
        let m = c.nrows();
        let mut trip = Vec::with_capacity(k.nnz() + 2 * c.nnz() + m);
        trip.extend(k.triplets());
        for (r, col, v) in c.triplets() {
            trip.push((n + r, col, v));
            trip.push((col, n + r, v));
        }
        if shift != T::zero() {
            for r in 0..m {
                trip.push((n + r, n + r, -shift));
            }
        }
        SparseMatrix::from_triplets(n + m, n + m, &trip)
    }

    /// Whether a fallback factorization (multiplier shift or augmented
    /// primal block) was needed.
    pub fn is_regularized(&self) -> bool {
        self.regularized
    }

    pub fn n_primal(&self) -> usize {
        self.n_primal
    }

    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    /// Solves `K φ + Cᵀ η = r`, `C φ = 0`.
    pub fn solve(&self, r: &[T]) -> Result<SaddleSolution<T>> {
        if r.len() != self.n_primal {
            return Err(Error::DimensionMismatch {
                expected: self.n_primal,
                found: r.len(),
                context: "saddle right-hand side",
            });
        }
        let mut rhs = r.to_vec();
        rhs.resize(self.n_primal + self.n_constraints, T::zero());
        if max_abs(&rhs) == T::zero() {
            return Ok(SaddleSolution {
                phi: vec![T::zero(); self.n_primal],
                eta: vec![T::zero(); self.n_constraints],
                residual: 0.0,
            });
        }
        // a regularized factor solves a perturbed system, so its first
        // solution is only approximate; refine it as far as it will go
        let target = if self.regularized {
            0.0
        } else {
            SADDLE_RESIDUAL_TOL
        };
        let (mut x, residual) =
            refine(&self.block, &self.factor, &rhs, SADDLE_RESIDUAL_TOL, target)?;
        let eta = x
            .split_off(self.n_primal)
            .into_iter()
            .zip(&self.row_scale)
            .map(|(e, &s)| e * s)
            .collect();
        Ok(SaddleSolution {
            phi: x,
            eta,
            residual,
        })
    }
}

/// Solves the saddle-point system `[[K, Cᵀ], [C, 0]] [φ; η] = [r; 0]`.
pub fn solve_saddle<T: Scalar>(
    k: &SparseMatrix<T>,
    c: &SparseMatrix<T>,
    r: &[T],
) -> Result<SaddleSolution<T>> {
    SaddleSolver::new(k, c)?.solve(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn spd_examples() {
        let a = SparseMatrix::from_diagonal(&[2.0, 2.0]);
        assert!(close(
            &solve_spd(&a, &[2.0, 4.0]).unwrap(),
            &[1.0, 2.0],
            1e-15
        ));

        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(close(
            &solve_spd(&a, &[3.0, 3.0]).unwrap(),
            &[1.0, 1.0],
            1e-15
        ));

        let a = SparseMatrix::<f64>::identity(2);
        assert_eq!(solve_spd(&a, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spd_failure_modes_are_distinct() {
        let indefinite = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let singular = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            solve_spd(&indefinite, &[1.0, 1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            solve_spd(&singular, &[1.0, 1.0]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn saddle_examples() {
        let k = SparseMatrix::<f64>::identity(2);
        let c = SparseMatrix::from_dense(&[vec![1.0, 0.0]]);
        let s = solve_saddle(&k, &c, &[1.0, 1.0]).unwrap();
        assert!(close(&s.phi, &[0.0, 1.0], 1e-14));
        assert!(close(&s.eta, &[1.0], 1e-14));

        let k = SparseMatrix::from_diagonal(&[2.0, 2.0]);
        let c = SparseMatrix::from_dense(&[vec![1.0, 1.0]]);
        let s = solve_saddle(&k, &c, &[2.0, 0.0]).unwrap();
        assert!(close(&s.phi, &[0.5, -0.5], 1e-14));
        assert!(close(&s.eta, &[1.0], 1e-14));
    }

    #[test]
    fn saddle_without_constraints_is_spd_solve() {
        let k = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let c = SparseMatrix::<f64>::zeros(0, 2);
        let s = solve_saddle(&k, &c, &[3.0, 3.0]).unwrap();
        assert!(close(&s.phi, &[1.0, 1.0], 1e-14));
        assert!(s.eta.is_empty());
    }

    #[test]
    fn rank_deficient_constraints_fall_back_to_regularization() {
        let k = SparseMatrix::<f64>::identity(3);
        let c = SparseMatrix::from_dense(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]);
        let solver = SaddleSolver::new(&k, &c).unwrap();
        assert!(solver.is_regularized());
        let s = solver.solve(&[1.0, 0.0, 1.0]).unwrap();
        assert!(close(&s.phi, &[0.5, -0.5, 1.0], 1e-9));
        let cphi = c.mul_vec(&s.phi);
        assert!(cphi.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn singular_primal_block_with_restoring_constraint() {
        let k = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let c = SparseMatrix::from_dense(&[vec![0.0, 1.0]]);
        let solver = SaddleSolver::new(&k, &c).unwrap();
        assert!(solver.is_regularized());
        let s = solver.solve(&[2.0, 3.0]).unwrap();
        assert!(close(&s.phi, &[2.0, 0.0], 1e-12));
        assert!(close(&s.eta, &[3.0], 1e-12));
    }

    #[test]
    fn single_precision_solve() {
        let a = SparseMatrix::from_dense(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]);
        let x = solve_spd(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }
}
