use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{EdgeAttributes, EdgeIndex, Network, PairAttributes};
use crate::scalar::Scalar;

/// Nodal Lamé parameters `l_i` (first parameter) and `μ_i` (shear modulus).
#[derive(Debug, Clone, PartialEq)]
pub struct LameField<T> {
    pub lambda: Vec<T>,
    pub mu: Vec<T>,
}

impl<T: Scalar> LameField<T> {
    pub fn uniform(nodes: usize, lambda: T, mu: T) -> Self {
        Self {
            lambda: vec![lambda; nodes],
            mu: vec![mu; nodes],
        }
    }

    /// Independent uniform draws in `[lo, hi]`, `l_i` then `μ_i` node by node.
    pub fn random<R: Rng>(nodes: usize, lo: f64, hi: f64, rng: &mut R) -> Self {
        let mut lambda = Vec::with_capacity(nodes);
        let mut mu = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            lambda.push(T::of(rng.random_range(lo..=hi)));
            mu.push(T::of(rng.random_range(lo..=hi)));
        }
        Self { lambda, mu }
    }

    pub fn validate(&self, nodes: usize) -> Result<()> {
        if self.lambda.len() != nodes || self.mu.len() != nodes {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                found: self.lambda.len().min(self.mu.len()),
                context: "Lamé field",
            });
        }
        if self
            .lambda
            .iter()
            .chain(&self.mu)
            .any(|&v| !(v > T::zero()))
        {
            return Err(Error::InvalidParameter(
                "Lamé parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Cross-section data that the coefficient mapping does not determine:
/// the edge width `w` and the volume `V` multiplying the angular stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section<T> {
    pub width: T,
    pub volume: T,
}

impl<T: Scalar> Section<T> {
    /// `w = 1`, `V = 1`.
    pub fn unit() -> Self {
        Self {
            width: T::one(),
            volume: T::one(),
        }
    }

    /// Edges as wide as the grid spacing `h`, each pair carrying an `h × h`
    /// cell: `w = h`, `V = h²`.
    pub fn grid(h: T) -> Self {
        Self {
            width: h,
            volume: h * h,
        }
    }
}

/// Model coefficients from a Lamé field:
///
/// ```text
/// k_ij = (2μ̄ + l̄)/(5c)   κ_ij = μ̄/(4c²)   η_ijl = (2μ_j + l_j)/(5c)   γ_ijl = 2 l_j/(4 η c²)
/// ```
///
/// with edge means `μ̄ = (μ_i + μ_j)/2`. A pair takes the mean `κ` of its two
/// edges, times the section volume.
pub fn map_lame<T: Scalar>(
    net: &Network<T>,
    field: &LameField<T>,
    c: T,
    section: Section<T>,
) -> Result<(EdgeAttributes<T>, PairAttributes<T>)> {
    field.validate(net.node_count())?;
    if !(c > T::zero()) || !(section.width > T::zero()) || !(section.volume >= T::zero()) {
        return Err(Error::InvalidParameter(
            "scale c and section width must be positive".into(),
        ));
    }
    let two = T::of(2.0);
    let four = T::of(4.0);
    let five = T::of(5.0);
    let mean = |v: &[T], a: usize, b: usize| (v[a] + v[b]) / two;
    let kappa = |a: usize, b: usize| mean(&field.mu, a, b) / (four * c * c);

    let modulus = net
        .edges()
        .iter()
        .map(|&(i, j)| (two * mean(&field.mu, i, j) + mean(&field.lambda, i, j)) / (five * c))
        .collect::<Vec<_>>();
    let edges = EdgeAttributes {
        width: vec![section.width; modulus.len()],
        modulus,
    };

    let index = EdgeIndex::new(net);
    let mut pairs = PairAttributes {
        angular: Vec::with_capacity(net.pairs().len()),
        poisson: Vec::with_capacity(net.pairs().len()),
        coupling: Vec::with_capacity(net.pairs().len()),
    };
    for p in net.pairs() {
        let (i, j, l) = (p.outer_a, p.center, p.outer_b);
        debug_assert!(index.get(i, j).is_some() && index.get(j, l).is_some());
        let eta = (two * field.mu[j] + field.lambda[j]) / (five * c);
        pairs
            .angular
            .push((kappa(i, j) + kappa(j, l)) / two * section.volume);
        pairs.poisson.push(eta);
        pairs
            .coupling
            .push(two * field.lambda[j] / (four * eta * c * c));
    }
    Ok((edges, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_regular, PairPolicy};

    #[test]
    fn unit_field_coefficients() {
        let net = generate_regular::<f64>(2)
            .unwrap()
            .derive_pairs(PairPolicy::All);
        let field = LameField::uniform(net.node_count(), 1.0, 1.0);
        let (e, p) = map_lame(&net, &field, 0.5, Section::unit()).unwrap();
        assert!(e.modulus.iter().all(|&k| (k - 1.2).abs() < 1e-14));
        assert!(p.angular.iter().all(|&k| (k - 1.0).abs() < 1e-14));
        assert!(p.poisson.iter().all(|&k| (k - 1.2).abs() < 1e-14));
        assert!(p.coupling.iter().all(|&k| (k - 5.0 / 3.0).abs() < 1e-14));
    }

    #[test]
    fn edge_means() {
        let net = Network::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![(0, 1)], 2, 1.0).unwrap();
        let field = LameField {
            lambda: vec![1.0, 1.0],
            mu: vec![1.0, 3.0],
        };
        let (e, _) = map_lame(&net, &field, 0.5, Section::unit()).unwrap();
        // μ̄ = 2, l̄ = 1
        assert!((e.modulus[0] - 5.0f64 / 2.5).abs() < 1e-14);
    }

    #[test]
    fn section_scales_width_and_angular_term() {
        let net = generate_regular::<f64>(4)
            .unwrap()
            .derive_pairs(PairPolicy::All);
        let field = LameField::uniform(net.node_count(), 1.0, 1.0);
        let (e, p) = map_lame(&net, &field, 0.5, Section::grid(0.25)).unwrap();
        assert!(e.width.iter().all(|&w| w == 0.25));
        assert!(p.angular.iter().all(|&k| (k - 0.0625).abs() < 1e-15));
    }

    #[test]
    fn rejects_nonpositive_field() {
        let net = generate_regular::<f64>(2).unwrap();
        let mut field = LameField::uniform(net.node_count(), 1.0, 1.0);
        field.mu[3] = 0.0;
        assert!(map_lame(&net, &field, 0.5, Section::unit()).is_err());
    }
}
