use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::elements::{force_angular, force_extension, force_poisson, ElementMatrix};
use crate::network::{EdgeAttributes, EdgeIndex, Network, PairAttributes};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Which network entity an element matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementSource {
    Edge(usize),
    Pair(usize),
}

/// All element matrices of the fiber model: one per edge (extension) and
/// one per pair (angular plus Poisson), edges first.
#[allow(clippy::type_complexity)]
pub fn elasticity_elements<T: Scalar>(
    net: &Network<T>,
    edge_attrs: &EdgeAttributes<T>,
    pair_attrs: &PairAttributes<T>,
) -> Result<Vec<(ElementSource, ElementMatrix<T>)>> {
    edge_attrs.validate(net.edges().len())?;
    pair_attrs.validate(net.pairs().len())?;
    let index = EdgeIndex::new(net);
    let edges = (0..net.edges().len())
        .into_par_iter()
        .map(|e| Ok((ElementSource::Edge(e), force_extension(net, edge_attrs, e)?)));
    let pairs = (0..net.pairs().len()).into_par_iter().map(|p| {
        let mut el = force_angular(net, pair_attrs, p)?;
        el.add(&force_poisson(net, edge_attrs, pair_attrs, p, &index)?);
        Ok((ElementSource::Pair(p), el))
    });
    edges.chain(pairs).collect()
}

fn assemble<T: Scalar>(
    n: usize,
    elements: &[(ElementSource, ElementMatrix<T>)],
) -> Result<SparseMatrix<T>> {
    let mut triplets = Vec::with_capacity(elements.iter().map(|(_, e)| e.size().pow(2)).sum());
    for (_, el) in elements {
        el.push_triplets(&mut triplets);
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Stiffness matrix `K = −Σ K^I − Σ (K^II + K^III)`.
pub fn assemble_elasticity<T: Scalar>(
    net: &Network<T>,
    edge_attrs: &EdgeAttributes<T>,
    pair_attrs: &PairAttributes<T>,
) -> Result<SparseMatrix<T>> {
    assemble(
        net.dof_count(),
        &elasticity_elements(net, edge_attrs, pair_attrs)?,
    )
}

/// One `[[w, −w], [−w, w]]` block per edge.
pub fn laplacian_elements<T: Scalar>(
    net: &Network<T>,
    weights: &[T],
) -> Result<Vec<(ElementSource, ElementMatrix<T>)>> {
    if net.dofs_per_node() != 1 {
        return Err(Error::InvalidParameter(
            "graph Laplacian needs one dof per node".into(),
        ));
    }
    if weights.len() != net.edges().len() {
        return Err(Error::DimensionMismatch {
            expected: net.edges().len(),
            found: weights.len(),
            context: "edge weights",
        });
    }
    Ok(net
        .edges()
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(e, (&(i, j), &w))| {
            let el = ElementMatrix {
                dofs: vec![i, j],
                stiffness: vec![w, -w, -w, w],
            };
            (ElementSource::Edge(e), el)
        })
        .collect())
}

/// Weighted graph Laplacian: `K_ii = Σ_j w_ij`, `K_ij = −w_ij`.
pub fn assemble_laplacian<T: Scalar>(net: &Network<T>, weights: &[T]) -> Result<SparseMatrix<T>> {
    assemble(net.dof_count(), &laplacian_elements(net, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{map_lame, LameField, Section};
    use crate::network::{generate_regular, perturb_random, PairPolicy};

    fn fiber(r: usize, amplitude: f64) -> (Network<f64>, SparseMatrix<f64>) {
        let net = generate_regular::<f64>(r).unwrap();
        let net = perturb_random(&net, amplitude, 3)
            .unwrap()
            .derive_pairs(PairPolicy::All);
        let field = LameField::uniform(net.node_count(), 1.0, 1.0);
        let h = 1.0 / r as f64;
        let (e, p) = map_lame(&net, &field, 0.5, Section::grid(h)).unwrap();
        let k = assemble_elasticity(&net, &e, &p).unwrap();
        (net, k)
    }

    #[test]
    fn single_edge_is_extension_block() {
        let net = Network::new(vec![[0.0, 0.0], [2.0, 0.0]], vec![(0, 1)], 2, 1.0).unwrap();
        let e = EdgeAttributes::uniform(1, 1.0, 3.0);
        let k = assemble_elasticity(&net, &e, &PairAttributes::uniform(0, 0.0, 0.0, 0.0)).unwrap();
        let expected = [
            [1.5, 0.0, -1.5, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [-1.5, 0.0, 1.5, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for (a, row) in expected.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                assert_eq!(k.get(a, b), v);
            }
        }
    }

    #[test]
    fn symmetric_with_translation_null_space() {
        for amplitude in [0.0, 0.4] {
            let (net, k) = fiber(6, amplitude);
            assert_eq!(k.symmetry_defect(), 0.0);
            let n = net.dof_count();
            for comp in 0..2 {
                let t: Vec<f64> = (0..n)
                    .map(|q| if q % 2 == comp { 1.0 } else { 0.0 })
                    .collect();
                let kt = k.mul_vec(&t);
                assert!(kt.iter().all(|v| v.abs() < 1e-11 * k.max_abs()), "{comp}");
            }
        }
    }

    #[test]
    fn laplacian_path() {
        let net = Network::new(
            vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]],
            vec![(0, 1), (1, 2)],
            1,
            1.0,
        )
        .unwrap();
        let k = assemble_laplacian(&net, &[1.0, 1.0]).unwrap();
        assert_eq!(
            k.to_dense(),
            vec![
                vec![1.0, -1.0, 0.0],
                vec![-1.0, 2.0, -1.0],
                vec![0.0, -1.0, 1.0]
            ]
        );
        assert!(k.mul_vec(&[1.0; 3]).iter().all(|&v| v == 0.0));
        let two_dof = net.with_dofs_per_node(2).unwrap();
        assert!(assemble_laplacian(&two_dof, &[1.0, 1.0]).is_err());
    }
}
