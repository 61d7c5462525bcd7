use crate::error::{Error, Result};
use crate::network::{EdgeAttributes, EdgeIndex, Network, PairAttributes, Point};
use crate::scalar::Scalar;

/// Unit directions and length of an edge `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGeometry<T> {
    /// `d_ij^i`, pointing from `i` to `j`.
    pub dir_i: Point<T>,
    /// `d_ij^j = −d_ij^i`.
    pub dir_j: Point<T>,
    pub length: T,
}

impl<T: Scalar> EdgeGeometry<T> {
    pub fn between(pi: Point<T>, pj: Point<T>) -> Result<Self> {
        let dx = pj[0] - pi[0];
        let dy = pj[1] - pi[1];
        let length = (dx * dx + dy * dy).sqrt();
        if !(length > T::zero()) {
            return Err(Error::InvalidNetwork("zero-length edge".into()));
        }
        let dir_i = [dx / length, dy / length];
        Ok(Self {
            dir_i,
            dir_j: [-dir_i[0], -dir_i[1]],
            length,
        })
    }
}

pub fn edge_geometry<T: Scalar>(net: &Network<T>, edge: usize) -> Result<EdgeGeometry<T>> {
    let (i, j) = *net.edges().get(edge).ok_or(Error::IndexOutOfRange {
        index: edge,
        bound: net.edges().len(),
        context: "edge",
    })?;
    EdgeGeometry::between(net.nodes()[i], net.nodes()[j])
}

/// Linearized length change `(δ_j − δ_i) · d_ij^i`.
pub fn delta_length<T: Scalar>(geom: &EdgeGeometry<T>, delta_i: Point<T>, delta_j: Point<T>) -> T {
    (delta_j[0] - delta_i[0]) * geom.dir_i[0] + (delta_j[1] - delta_i[1]) * geom.dir_i[1]
}

/// `(x, y) × ẑ`.
fn cross_z<T: Scalar>(v: Point<T>) -> Point<T> {
    [v[1], -v[0]]
}

/// Dense element block over the dofs of a few nodes.
///
/// `stiffness` is this element's contribution to `K`, i.e. the negated force
/// matrix, stored row-major over `dofs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix<T> {
    pub dofs: Vec<usize>,
    pub stiffness: Vec<T>,
}

impl<T: Scalar> ElementMatrix<T> {
    fn zeros(dofs: Vec<usize>) -> Self {
        let k = dofs.len();
        Self {
            dofs,
            stiffness: vec![T::zero(); k * k],
        }
    }

    pub fn size(&self) -> usize {
        self.dofs.len()
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.stiffness[a * self.size() + b]
    }

    /// Adds `s · (x yᵀ + y xᵀ)/2`; bitwise symmetric.
    fn add_outer(&mut self, s: T, x: &[T], y: &[T]) {
        let k = self.size();
        let half = T::of(0.5);
        for a in 0..k {
            for b in 0..k {
                self.stiffness[a * k + b] += s * ((x[a] * y[b] + y[a] * x[b]) * half);
            }
        }
    }

    pub fn add(&mut self, other: &ElementMatrix<T>) {
        debug_assert_eq!(self.dofs, other.dofs);
        for (a, &b) in self.stiffness.iter_mut().zip(&other.stiffness) {
            *a += b;
        }
    }

    /// Nodal forces `−S u` for the element's dofs, read from a global vector.
    pub fn forces(&self, u: &[T]) -> Vec<T> {
        let k = self.size();
        (0..k)
            .map(|a| -(0..k).fold(T::zero(), |acc, b| acc + self.get(a, b) * u[self.dofs[b]]))
            .collect()
    }

    pub fn push_triplets(&self, out: &mut Vec<(usize, usize, T)>) {
        let k = self.size();
        for a in 0..k {
            for b in 0..k {
                let v = self.stiffness[a * k + b];
                if v != T::zero() {
                    out.push((self.dofs[a], self.dofs[b], v));
                }
            }
        }
    }
}

fn node_dofs<T: Scalar>(net: &Network<T>, nodes: &[usize]) -> Result<Vec<usize>> {
    if net.dofs_per_node() != 2 {
        return Err(Error::InvalidParameter(
            "elasticity elements need two dofs per node".into(),
        ));
    }
    Ok(nodes.iter().flat_map(|&a| [2 * a, 2 * a + 1]).collect())
}

/// Extension of edge `edge`: `F_a = k (w z / L) ΔL d^a`.
pub fn force_extension<T: Scalar>(
    net: &Network<T>,
    attrs: &EdgeAttributes<T>,
    edge: usize,
) -> Result<ElementMatrix<T>> {
    let geom = edge_geometry(net, edge)?;
    let (i, j) = net.edges()[edge];
    let mut el = ElementMatrix::zeros(node_dofs(net, &[i, j])?);
    let s = attrs.modulus[edge] * attrs.width[edge] * net.thickness() / geom.length;
    // ΔL = hᵀu
    let [ex, ey] = geom.dir_i;
    let h = [-ex, -ey, ex, ey];
    el.add_outer(s, &h, &h);
    Ok(el)
}

/// Pair geometry at the central node: unit vectors from `j` towards `i` and
/// `l`, and the edge lengths.
struct PairGeometry<T> {
    e_i: Point<T>,
    e_l: Point<T>,
    len_i: T,
    len_l: T,
}

fn pair_geometry<T: Scalar>(
    net: &Network<T>,
    pair: usize,
) -> Result<(PairGeometry<T>, [usize; 3])> {
    let p = *net.pairs().get(pair).ok_or(Error::IndexOutOfRange {
        index: pair,
        bound: net.pairs().len(),
        context: "edge pair",
    })?;
    let nodes = net.nodes();
    let gi = EdgeGeometry::between(nodes[p.center], nodes[p.outer_a])?;
    let gl = EdgeGeometry::between(nodes[p.center], nodes[p.outer_b])?;
    Ok((
        PairGeometry {
            e_i: gi.dir_i,
            e_l: gl.dir_i,
            len_i: gi.length,
            len_l: gl.length,
        },
        [p.outer_a, p.center, p.outer_b],
    ))
}

/// Angular resistance of pair `pair`.
///
/// With `n_i = d_ji^j × ẑ`, `n_l = −d_jl^j × ẑ` the angle change is
/// `Δθ = gᵀu`, `g = (n_i/L_i, −n_i/L_i − n_l/L_l, n_l/L_l)` over nodes
/// `(i, j, l)`, and the forces are `−κV g Δθ`.
pub fn force_angular<T: Scalar>(
    net: &Network<T>,
    attrs: &PairAttributes<T>,
    pair: usize,
) -> Result<ElementMatrix<T>> {
    let (g, nodes) = pair_geometry(net, pair)?;
    let mut el = ElementMatrix::zeros(node_dofs(net, &nodes)?);
    let n_i = cross_z(g.e_i);
    let n_l = cross_z(g.e_l).map(|v| -v);
    let a_i = [n_i[0] / g.len_i, n_i[1] / g.len_i];
    let a_l = [n_l[0] / g.len_l, n_l[1] / g.len_l];
    let v = [
        a_i[0],
        a_i[1],
        -a_i[0] - a_l[0],
        -a_i[1] - a_l[1],
        a_l[0],
        a_l[1],
    ];
    el.add_outer(attrs.angular[pair], &v, &v);
    Ok(el)
}

/// Poisson coupling of pair `pair`.
///
/// `ΔL_a = h_aᵀu` for the edge from `j` to `a`; forces are
/// `−η (w_a z / L_a)(ΔL_a + γ (w_b / 2)(ΔL_b / L_b)|n_a · d_b|) h_a`.
pub fn force_poisson<T: Scalar>(
    net: &Network<T>,
    edge_attrs: &EdgeAttributes<T>,
    attrs: &PairAttributes<T>,
    pair: usize,
    edges: &EdgeIndex,
) -> Result<ElementMatrix<T>> {
    let (g, nodes) = pair_geometry(net, pair)?;
    let [i, j, l] = nodes;
    let missing =
        || Error::InvalidNetwork(format!("pair ({i}, {j}, {l}) references a missing edge"));
    let w_i = edge_attrs.width[edges.get(i, j).ok_or_else(missing)?];
    let w_l = edge_attrs.width[edges.get(j, l).ok_or_else(missing)?];
    let mut el = ElementMatrix::zeros(node_dofs(net, &nodes)?);
    let z = net.thickness();
    let eta = attrs.poisson[pair];
    let gamma = attrs.coupling[pair];
    let c = (g.e_i[0] * g.e_l[1] - g.e_i[1] * g.e_l[0]).abs();
    let zero = T::zero();
    let h_i = [g.e_i[0], g.e_i[1], -g.e_i[0], -g.e_i[1], zero, zero];
    let h_l = [zero, zero, -g.e_l[0], -g.e_l[1], g.e_l[0], g.e_l[1]];
    let s_i = eta * w_i * z / g.len_i;
    let s_l = eta * w_l * z / g.len_l;
    let t = eta * z * gamma * c * w_i * w_l / (T::of(2.0) * g.len_i * g.len_l);
    el.add_outer(s_i, &h_i, &h_i);
    el.add_outer(s_l, &h_l, &h_l);
    el.add_outer(t + t, &h_i, &h_l);
    Ok(el)
}
