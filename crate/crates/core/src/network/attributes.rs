use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-edge physical data: width `w` and elastic modulus `k`.
///
/// Rest lengths are not stored; they follow from node positions.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAttributes<T> {
    pub width: Vec<T>,
    pub modulus: Vec<T>,
}

impl<T: Scalar> EdgeAttributes<T> {
    pub fn uniform(count: usize, width: T, modulus: T) -> Self {
        Self {
            width: vec![width; count],
            modulus: vec![modulus; count],
        }
    }

    pub fn len(&self) -> usize {
        self.width.len()
    }

    pub fn is_empty(&self) -> bool {
        self.width.is_empty()
    }

    pub fn validate(&self, edge_count: usize) -> Result<()> {
        if self.width.len() != edge_count || self.modulus.len() != edge_count {
            return Err(Error::DimensionMismatch {
                expected: edge_count,
                found: self.width.len().min(self.modulus.len()),
                context: "edge attributes",
            });
        }
        for (e, (&w, &k)) in self.width.iter().zip(&self.modulus).enumerate() {
            if !(w > T::zero() && k > T::zero()) {
                return Err(Error::InvalidNetwork(format!(
                    "edge {e}: width and modulus must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Per-pair data: angular stiffness product `κV`, Poisson modulus `η` and
/// Poisson coupling `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAttributes<T> {
    pub angular: Vec<T>,
    pub poisson: Vec<T>,
    pub coupling: Vec<T>,
}

impl<T: Scalar> PairAttributes<T> {
    pub fn uniform(count: usize, angular: T, poisson: T, coupling: T) -> Self {
        Self {
            angular: vec![angular; count],
            poisson: vec![poisson; count],
            coupling: vec![coupling; count],
        }
    }

    pub fn len(&self) -> usize {
        self.angular.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angular.is_empty()
    }

    pub fn validate(&self, pair_count: usize) -> Result<()> {
        let lens = [self.angular.len(), self.poisson.len(), self.coupling.len()];
        if lens.iter().any(|&l| l != pair_count) {
            return Err(Error::DimensionMismatch {
                expected: pair_count,
                found: *lens.iter().min().expect("three lengths"),
                context: "pair attributes",
            });
        }
        for p in 0..pair_count {
            if self.angular[p] < T::zero()
                || self.poisson[p] < T::zero()
                || self.coupling[p] < T::zero()
            {
                return Err(Error::InvalidNetwork(format!(
                    "pair {p}: coefficients must be non-negative"
                )));
            }
        }
        Ok(())
    }
}
