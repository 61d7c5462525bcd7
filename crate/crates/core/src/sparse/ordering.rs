//! Fill-reducing symmetric orderings.
//!
//! Nested dissection driven by breadth-first level structures: each connected
//! piece of the graph is rooted at a pseudo-peripheral vertex, the level set
//! that splits the vertices in half becomes the separator, and the two halves
//! are ordered recursively ahead of it. On the planar, grid-like graphs this
//! crate produces, that keeps the factor fill close to `O(n log n)`.

use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

const LEAF_SIZE: usize = 48;

/// Undirected adjacency in compressed form, no self loops.
struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Symmetrized pattern of the leading `n` rows and columns of `a`.
    fn leading_block<T: Scalar>(a: &SparseMatrix<T>, n: usize) -> Self {
        let mut deg = vec![0usize; n + 1];
        for r in 0..n {
            let (cols, _) = a.row(r);
            for &c in cols {
                if c < n && c != r {
                    deg[r + 1] += 1;
                    deg[c + 1] += 1;
                }
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut next = deg.clone();
        let mut adj = vec![0usize; deg[n]];
        for r in 0..n {
            let (cols, _) = a.row(r);
            for &c in cols {
                if c < n && c != r {
                    adj[next[r]] = c;
                    next[r] += 1;
                    adj[next[c]] = r;
                    next[c] += 1;
                }
            }
        }
        // drop the duplicates introduced by symmetric storage
        let mut ptr = Vec::with_capacity(n + 1);
        let mut compact = Vec::with_capacity(adj.len() / 2 + 1);
        ptr.push(0);
        for v in 0..n {
            let nb = &mut adj[deg[v]..deg[v + 1]];
            nb.sort_unstable();
            let mut last = usize::MAX;
            for &u in nb.iter() {
                if u != last {
                    compact.push(u);
                    last = u;
                }
            }
            ptr.push(compact.len());
        }
        Self { ptr, adj: compact }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    fn len(&self) -> usize {
        self.ptr.len() - 1
    }
}

struct Dissector<'g> {
    graph: &'g Graph,
    /// `stamp[v] == current` marks membership in the subgraph being processed.
    stamp: Vec<usize>,
    counter: usize,
    seen: Vec<usize>,
    seen_counter: usize,
}

impl<'g> Dissector<'g> {
    fn new(graph: &'g Graph) -> Self {
        let n = graph.len();
        Self {
            graph,
            stamp: vec![0; n],
            counter: 0,
            seen: vec![0; n],
            seen_counter: 0,
        }
    }

    fn mark(&mut self, verts: &[usize]) -> usize {
        self.counter += 1;
        for &v in verts {
            self.stamp[v] = self.counter;
        }
        self.counter
    }

    /// BFS from `root` inside the stamped subgraph; returns level sets.
    fn levels(&mut self, root: usize, tag: usize) -> Vec<Vec<usize>> {
        self.seen_counter += 1;
        let sc = self.seen_counter;
        let mut out: Vec<Vec<usize>> = vec![vec![root]];
        self.seen[root] = sc;
        loop {
            let mut next = Vec::new();
            for &v in out.last().expect("nonempty") {
                for &u in self.graph.neighbors(v) {
                    if self.stamp[u] == tag && self.seen[u] != sc {
                        self.seen[u] = sc;
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.push(next);
        }
        out
    }

    fn components(&mut self, verts: &[usize], tag: usize) -> Vec<Vec<usize>> {
        self.seen_counter += 1;
        let sc = self.seen_counter;
        let mut comps = Vec::new();
        for &start in verts {
            if self.seen[start] == sc {
                continue;
            }
            let mut comp = vec![start];
            self.seen[start] = sc;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &u in self.graph.neighbors(v) {
                    if self.stamp[u] == tag && self.seen[u] != sc {
                        self.seen[u] = sc;
                        comp.push(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    fn degree_in(&self, v: usize, tag: usize) -> usize {
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&u| self.stamp[u] == tag)
            .count()
    }

    fn dissect(&mut self, verts: Vec<usize>, out: &mut Vec<usize>) {
        if verts.len() <= LEAF_SIZE {
            out.extend(verts);
            return;
        }
        let tag = self.mark(&verts);
        let comps = self.components(&verts, tag);
        if comps.len() > 1 {
            for comp in comps {
                self.dissect(comp, out);
            }
            return;
        }

        // pseudo-peripheral root: walk to a minimum-degree vertex of the last
        // level until the eccentricity stops growing
        let mut levels = self.levels(verts[0], tag);
        for _ in 0..8 {
            let last = levels.last().expect("nonempty");
            let candidate = *last
                .iter()
                .min_by_key(|&&v| self.degree_in(v, tag))
                .expect("nonempty level");
            let trial = self.levels(candidate, tag);
            if trial.len() > levels.len() {
                levels = trial;
            } else {
                break;
            }
        }
        if levels.len() < 3 {
            out.extend(verts);
            return;
        }

        let half = verts.len() / 2;
        let mut acc = 0;
        let mut split = 1;
        for (k, lv) in levels.iter().enumerate() {
            if acc + lv.len() > half {
                split = k;
                break;
            }
            acc += lv.len();
        }
        let split = split.clamp(1, levels.len() - 2);

        let mut first = Vec::new();
        let mut second = Vec::new();
        let mut separator = Vec::new();
        for (k, lv) in levels.into_iter().enumerate() {
            match k.cmp(&split) {
                std::cmp::Ordering::Less => first.extend(lv),
                std::cmp::Ordering::Equal => separator = lv,
                std::cmp::Ordering::Greater => second.extend(lv),
            }
        }
        self.dissect(first, out);
        self.dissect(second, out);
        separator.sort_unstable();
        out.extend(separator);
    }
}

/// Fill-reducing permutation of a symmetric matrix.
///
/// `perm[k]` is the original index eliminated at step `k`. The trailing
/// `n_last` indices are held back and eliminated last in their natural order,
/// which is how constraint multipliers of saddle-point systems are kept away
/// from the zero diagonal block until the primal block is factored.
pub fn nested_dissection<T: Scalar>(a: &SparseMatrix<T>, n_last: usize) -> Vec<usize> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "ordering requires a square matrix");
    assert!(n_last <= n, "held-back block larger than the matrix");
    let lead = n - n_last;
    let graph = Graph::leading_block(a, lead);
    let mut out = Vec::with_capacity(n);
    let mut dissector = Dissector::new(&graph);
    dissector.dissect((0..lead).collect(), &mut out);
    out.extend(lead..n);
    debug_assert_eq!(out.len(), n);
    out
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(side: usize) -> SparseMatrix<f64> {
        let idx = |x: usize, y: usize| y * side + x;
        let mut t = Vec::new();
        for y in 0..side {
            for x in 0..side {
                t.push((idx(x, y), idx(x, y), 4.0));
                if x + 1 < side {
                    t.push((idx(x, y), idx(x + 1, y), -1.0));
                    t.push((idx(x + 1, y), idx(x, y), -1.0));
                }
                if y + 1 < side {
                    t.push((idx(x, y), idx(x, y + 1), -1.0));
                    t.push((idx(x, y + 1), idx(x, y), -1.0));
                }
            }
        }
        SparseMatrix::from_triplets(side * side, side * side, &t).unwrap()
    }

    #[test]
    fn ordering_is_a_permutation() {
        let a = grid_laplacian(20);
        let p = nested_dissection(&a, 0);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..400).collect::<Vec<_>>());
    }

    #[test]
    fn held_back_indices_come_last() {
        let a = grid_laplacian(12);
        let n = a.nrows();
        let p = nested_dissection(&a, 5);
        assert_eq!(&p[n - 5..], &[n - 5, n - 4, n - 3, n - 2, n - 1]);
    }

    #[test]
    fn disconnected_graph() {
        let a = SparseMatrix::<f64>::identity(200);
        let p = nested_dissection(&a, 0);
        assert_eq!(p.len(), 200);
        let inv = inverse_permutation(&p);
        for (k, &v) in p.iter().enumerate() {
            assert_eq!(inv[v], k);
        }
    }
}
