use crate::error::{Error, Result};
use crate::network::{Network, Point};
use crate::scalar::Scalar;
use crate::sparse::IndexSet;

/// Fixed dofs `𝒩_D` with prescribed values `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions<T> {
    fixed: IndexSet,
    values: Vec<T>,
}

impl<T: Scalar> BoundaryConditions<T> {
    pub fn new(fixed: IndexSet, values: Vec<T>) -> Result<Self> {
        if fixed.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: fixed.len(),
                found: values.len(),
                context: "prescribed boundary values",
            });
        }
        Ok(Self { fixed, values })
    }

    /// All listed dofs held at zero.
    pub fn homogeneous(fixed: IndexSet) -> Self {
        let values = vec![T::zero(); fixed.len()];
        Self { fixed, values }
    }

    pub fn none() -> Self {
        Self {
            fixed: IndexSet::empty(),
            values: Vec::new(),
        }
    }

    /// Evaluates `rule(position, component)` for every dof; `Some(g)` fixes it.
    pub fn from_rule<F>(net: &Network<T>, mut rule: F) -> Self
    where
        F: FnMut(Point<T>, usize) -> Option<T>,
    {
        let d = net.dofs_per_node();
        let mut fixed = Vec::new();
        let mut values = Vec::new();
        for (node, &p) in net.nodes().iter().enumerate() {
            for comp in 0..d {
                if let Some(g) = rule(p, comp) {
                    fixed.push(net.dof_index(node, comp));
                    values.push(g);
                }
            }
        }
        Self {
            fixed: IndexSet::new(fixed, net.dof_count()).expect("ascending by construction"),
            values,
        }
    }

    pub fn fixed(&self) -> &IndexSet {
        &self.fixed
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Free dofs `𝒩`, the complement of the fixed set.
    pub fn free(&self, dof_count: usize) -> IndexSet {
        self.fixed.complement(dof_count)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.values.iter().all(|&v| v == T::zero())
    }

    /// Full-length vector holding `g` on fixed dofs and zero elsewhere.
    pub fn lift(&self, dof_count: usize) -> Vec<T> {
        self.fixed.scatter(&self.values, dof_count)
    }

    pub fn validate(&self, dof_count: usize) -> Result<()> {
        match self.fixed.as_slice().last() {
            Some(&last) if last >= dof_count => Err(Error::IndexOutOfRange {
                index: last,
                bound: dof_count,
                context: "fixed dof",
            }),
            _ => Ok(()),
        }
    }
}
