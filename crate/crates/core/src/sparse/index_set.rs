use crate::error::{Error, Result};

/// Strictly ascending list of distinct indices into a space of known dimension.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Validates that `indices` is strictly ascending and bounded by `dim`.
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        Self::check(&indices, dim)?;
        Ok(Self { indices })
    }

    pub(crate) fn check(indices: &[usize], dim: usize) -> Result<()> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidIndexSet(format!(
                    "indices not strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    bound: dim,
                    context: "index set",
                });
            }
        }
        Ok(())
    }

    /// Sorts and deduplicates arbitrary indices before validating them.
    pub fn from_unsorted<I: IntoIterator<Item = usize>>(indices: I, dim: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::new(v, dim)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self {
            indices: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            indices: (0..dim).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Indices of `0..dim` not in `self`.
    pub fn complement(&self, dim: usize) -> Self {
        let mut out = Vec::with_capacity(dim.saturating_sub(self.len()));
        let mut it = self.indices.iter().peekable();
        for i in 0..dim {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self { indices: out }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Local position of a global index.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| other.contains(i))
                .collect(),
        }
    }

    /// Dense global-to-local map of length `dim` with `usize::MAX` for absent indices.
    pub fn local_map(&self, dim: usize) -> Vec<usize> {
        let mut map = vec![usize::MAX; dim];
        for (local, &global) in self.indices.iter().enumerate() {
            map[global] = local;
        }
        map
    }

    /// Scatters a local vector into a zero global vector of length `dim`.
    pub fn scatter<T: Copy + Default>(&self, local: &[T], dim: usize) -> Vec<T> {
        let mut out = vec![T::default(); dim];
        for (&g, &v) in self.indices.iter().zip(local) {
            out[g] = v;
        }
        out
    }

    pub fn gather<T: Copy>(&self, global: &[T]) -> Vec<T> {
        self.indices.iter().map(|&g| global[g]).collect()
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}
