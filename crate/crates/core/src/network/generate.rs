use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::scalar::Scalar;

/// Regular `r × r` grid network on the unit square: `(r+1)²` nodes at
/// `(a/r, b/r)` joined by horizontal and vertical edges, two dofs per node,
/// unit thickness. Node `(a, b)` has index `b (r+1) + a`.
pub fn generate_regular<T: Scalar>(r: usize) -> Result<Network<T>> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "regular network needs r >= 2, got {r}"
        )));
    }
    let side = r + 1;
    let rf = r as f64;
    let mut nodes = Vec::with_capacity(side * side);
    for b in 0..side {
        for a in 0..side {
            nodes.push([T::of(a as f64 / rf), T::of(b as f64 / rf)]);
        }
    }
    let idx = |a: usize, b: usize| b * side + a;
    let mut edges = Vec::with_capacity(2 * r * side);
    for b in 0..side {
        for a in 0..side {
            if a + 1 < side {
                edges.push((idx(a, b), idx(a + 1, b)));
            }
            if b + 1 < side {
                edges.push((idx(a, b), idx(a, b + 1)));
            }
        }
    }
    Network::new(nodes, edges, 2, T::one())
}

/// Moves every node by `(δx, δy)` drawn uniformly from `[−a h, a h]²`, where
/// `h` is the shortest edge of the input (the grid spacing of a regular
/// network). Nodes on `x ∈ {0, 1}` keep `δx = 0`, nodes on `y ∈ {0, 1}` keep
/// `δy = 0`. Two draws are consumed per node regardless, so the result
/// depends only on the seed.
pub fn perturb_random<T: Scalar>(
    net: &Network<T>,
    amplitude: f64,
    seed: u64,
) -> Result<Network<T>> {
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidParameter(format!(
            "perturbation amplitude must lie in [0, 0.5), got {amplitude}"
        )));
    }
    let h = (0..net.edges().len())
        .map(|e| net.edge_length(e).as_f64())
        .fold(f64::INFINITY, f64::min);
    if !h.is_finite() {
        return Err(Error::InvalidNetwork("network has no edges".into()));
    }
    let bound = amplitude * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_boundary = |v: T| v == T::zero() || v == T::one();
    let nodes = net
        .nodes()
        .iter()
        .map(|&[x, y]| {
            let (dx, dy) = if bound > 0.0 {
                (
                    rng.random_range(-bound..=bound),
                    rng.random_range(-bound..=bound),
                )
            } else {
                (0.0, 0.0)
            };
            let nx = if on_boundary(x) { x } else { x + T::of(dx) };
            let ny = if on_boundary(y) { y } else { y + T::of(dy) };
            [nx, ny]
        })
        .collect();
    net.with_positions(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_counts() {
        let net = generate_regular::<f64>(2).unwrap();
        assert_eq!(net.node_count(), 9);
        assert_eq!(net.edges().len(), 12);
        assert_eq!(net.dofs_per_node(), 2);
        for r in [3, 4, 7, 16] {
            let net = generate_regular::<f64>(r).unwrap();
            assert_eq!(net.node_count(), (r + 1) * (r + 1));
            assert_eq!(net.edges().len(), 2 * r * (r + 1));
            for e in 0..net.edges().len() {
                assert!((net.edge_length(e) - 1.0 / r as f64).abs() < 1e-15);
            }
        }
        assert!(generate_regular::<f64>(1).is_err());
    }

    #[test]
    fn large_regular_node_count() {
        assert_eq!(generate_regular::<f64>(128).unwrap().node_count(), 16641);
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let net = generate_regular::<f64>(4).unwrap();
        let p = perturb_random(&net, 0.0, 7).unwrap();
        assert_eq!(p.nodes(), net.nodes());
    }

    #[test]
    fn perturbation_respects_boundary_and_seed() {
        let net = generate_regular::<f64>(32).unwrap();
        let a = perturb_random(&net, 0.4, 11).unwrap();
        let b = perturb_random(&net, 0.4, 11).unwrap();
        let c = perturb_random(&net, 0.4, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let h = 1.0 / 32.0;
        for (p, q) in net.nodes().iter().zip(a.nodes()) {
            if p[0] == 0.0 || p[0] == 1.0 {
                assert_eq!(p[0], q[0]);
            }
            if p[1] == 0.0 || p[1] == 1.0 {
                assert_eq!(p[1], q[1]);
            }
            assert!((p[0] - q[0]).abs() <= 0.4 * h + 1e-15);
            assert!((p[1] - q[1]).abs() <= 0.4 * h + 1e-15);
        }
        for e in 0..a.edges().len() {
            assert!(a.edge_length(e) > 0.0);
        }
    }

    #[test]
    fn amplitude_limit() {
        let net = generate_regular::<f64>(4).unwrap();
        assert!(perturb_random(&net, 0.5, 1).is_err());
        assert!(perturb_random(&net, -0.1, 1).is_err());
    }
}
