use crate::error::{Error, Result};
use crate::scalar::{norm2, Scalar};
use crate::sparse::SparseMatrix;

/// `|||v||| = (vᵀKv)^{1/2}`. Rounding may push `vᵀKv` slightly below zero;
/// values above `−1e-12` (scaled by `‖K‖_max ‖v‖²` when that exceeds one)
/// are clamped, anything more negative is reported.
pub fn energy_norm<T: Scalar>(k: &SparseMatrix<T>, v: &[T]) -> Result<T> {
    let q = k.quadratic_form(v);
    if q >= T::zero() {
        return Ok(q.sqrt());
    }
    let vv = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let scale = (k.max_abs() * vv).max(T::one());
    if q >= -T::of(1e-12) * scale {
        Ok(T::zero())
    } else {
        Err(Error::NegativeEnergy { value: q.as_f64() })
    }
}

/// `‖v‖ = (vᵀv)^{1/2}`.
pub fn l2_norm<T: Scalar>(v: &[T]) -> T {
    norm2(v)
}

/// Absolute and relative errors of an approximation against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub abs_energy: f64,
    pub rel_energy: f64,
    pub abs_l2: f64,
    pub rel_l2: f64,
}

pub fn compare<T: Scalar>(
    k: &SparseMatrix<T>,
    reference: &[T],
    approx: &[T],
) -> Result<ErrorReport> {
    let diff: Vec<T> = reference.iter().zip(approx).map(|(&a, &b)| a - b).collect();
    let abs_energy = energy_norm(k, &diff)?.as_f64();
    let ref_energy = energy_norm(k, reference)?.as_f64();
    let abs_l2 = l2_norm(&diff).as_f64();
    let ref_l2 = l2_norm(reference).as_f64();
    let rel = |a: f64, r: f64| if r > 0.0 { a / r } else { a };
    Ok(ErrorReport {
        abs_energy,
        rel_energy: rel(abs_energy, ref_energy),
        abs_l2,
        rel_l2: rel(abs_l2, ref_l2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norms() {
        let k = SparseMatrix::<f64>::identity(2);
        assert_eq!(energy_norm(&k, &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(l2_norm(&[3.0, 4.0]), 5.0);
        assert_eq!(energy_norm(&k, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn negative_energy_is_reported() {
        let k = SparseMatrix::from_diagonal(&[-1.0, 1.0]);
        assert!(matches!(
            energy_norm(&k, &[1.0, 0.0]),
            Err(Error::NegativeEnergy { .. })
        ));
        let tiny = SparseMatrix::from_diagonal(&[-1e-14, 1.0]);
        assert_eq!(energy_norm(&tiny, &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn two_evaluation_orders_agree() {
        let k = SparseMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let v = [0.3f64, -1.7, 2.2];
        let e = energy_norm(&k, &v).unwrap().powi(2);
        let kv = k.mul_vec(&v);
        let direct: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        assert!((e - direct).abs() <= 1e-13 * direct.abs());
    }
}
