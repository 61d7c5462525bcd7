//! JSON network files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{BoundaryConditions, EdgeAttributes, EdgePair, Network, PairAttributes};
use crate::scalar::Scalar;
use crate::sparse::IndexSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub width: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub angular: f64,
    pub poisson: f64,
    pub coupling: f64,
}

/// On-disk layout. Numbers are written with enough digits to round-trip
/// exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub d: usize,
    pub z: f64,
    pub nodes: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    pub pairs: Vec<[usize; 3]>,
    pub edge_attrs: Vec<EdgeRecord>,
    pub pair_attrs: Vec<PairRecord>,
    pub fixed_dofs: Vec<usize>,
    pub fixed_values: Vec<f64>,
}

impl NetworkFile {
    pub fn from_parts<T: Scalar>(
        net: &Network<T>,
        edges: &EdgeAttributes<T>,
        pairs: &PairAttributes<T>,
        bc: &BoundaryConditions<T>,
    ) -> Self {
        Self {
            d: net.dofs_per_node(),
            z: net.thickness().as_f64(),
            nodes: net
                .nodes()
                .iter()
                .map(|p| [p[0].as_f64(), p[1].as_f64()])
                .collect(),
            edges: net.edges().iter().map(|&(a, b)| [a, b]).collect(),
            pairs: net
                .pairs()
                .iter()
                .map(|p| [p.outer_a, p.center, p.outer_b])
                .collect(),
            edge_attrs: edges
                .width
                .iter()
                .zip(&edges.modulus)
                .map(|(w, k)| EdgeRecord {
                    width: w.as_f64(),
                    modulus: k.as_f64(),
                })
                .collect(),
            pair_attrs: (0..pairs.len())
                .map(|p| PairRecord {
                    angular: pairs.angular[p].as_f64(),
                    poisson: pairs.poisson[p].as_f64(),
                    coupling: pairs.coupling[p].as_f64(),
                })
                .collect(),
            fixed_dofs: bc.fixed().as_slice().to_vec(),
            fixed_values: bc.values().iter().map(|v| v.as_f64()).collect(),
        }
    }

    #[allow(clippy::type_complexity)]
    pub fn into_parts<T: Scalar>(
        self,
    ) -> Result<(
        Network<T>,
        EdgeAttributes<T>,
        PairAttributes<T>,
        BoundaryConditions<T>,
    )> {
        let field = |name: &str, e: Error| Error::Parse {
            line: 0,
            message: format!("field `{name}`: {e}"),
        };
        let nodes = self
            .nodes
            .iter()
            .map(|p| [T::of(p[0]), T::of(p[1])])
            .collect();
        let edges = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let net =
            Network::new(nodes, edges, self.d, T::of(self.z)).map_err(|e| field("edges", e))?;
        let net = net
            .with_pairs(
                self.pairs
                    .iter()
                    .map(|p| EdgePair::new(p[0], p[1], p[2]))
                    .collect(),
            )
            .map_err(|e| field("pairs", e))?;
        if net.pairs().len() != self.pairs.len() {
            return Err(field(
                "pairs",
                Error::InvalidNetwork("duplicate pairs".into()),
            ));
        }
        let edge_attrs = EdgeAttributes {
            width: self.edge_attrs.iter().map(|r| T::of(r.width)).collect(),
            modulus: self.edge_attrs.iter().map(|r| T::of(r.modulus)).collect(),
        };
        edge_attrs
            .validate(net.edges().len())
            .map_err(|e| field("edge_attrs", e))?;
        let pair_attrs = PairAttributes {
            angular: self.pair_attrs.iter().map(|r| T::of(r.angular)).collect(),
            poisson: self.pair_attrs.iter().map(|r| T::of(r.poisson)).collect(),
            coupling: self.pair_attrs.iter().map(|r| T::of(r.coupling)).collect(),
        };
        pair_attrs
            .validate(net.pairs().len())
            .map_err(|e| field("pair_attrs", e))?;
        let fixed =
            IndexSet::new(self.fixed_dofs, net.dof_count()).map_err(|e| field("fixed_dofs", e))?;
        let bc =
            BoundaryConditions::new(fixed, self.fixed_values.iter().map(|&v| T::of(v)).collect())
                .map_err(|e| field("fixed_values", e))?;
        Ok((net, edge_attrs, pair_attrs, bc))
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: format!("column {}: {e}", e.column()),
    }
}

pub fn save_to_string<T: Scalar>(
    net: &Network<T>,
    edges: &EdgeAttributes<T>,
    pairs: &PairAttributes<T>,
    bc: &BoundaryConditions<T>,
) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkFile::from_parts(
        net, edges, pairs, bc,
    ))?)
}

pub fn save<T: Scalar, P: AsRef<Path>>(
    net: &Network<T>,
    edges: &EdgeAttributes<T>,
    pairs: &PairAttributes<T>,
    bc: &BoundaryConditions<T>,
    path: P,
) -> Result<()> {
    fs::write(path, save_to_string(net, edges, pairs, bc)?)?;
    Ok(())
}

#[allow(clippy::type_complexity)]
pub fn load_from_str<T: Scalar>(
    text: &str,
) -> Result<(
    Network<T>,
    EdgeAttributes<T>,
    PairAttributes<T>,
    BoundaryConditions<T>,
)> {
    let file: NetworkFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_parts()
}

#[allow(clippy::type_complexity)]
pub fn load<T: Scalar, P: AsRef<Path>>(
    path: P,
) -> Result<(
    Network<T>,
    EdgeAttributes<T>,
    PairAttributes<T>,
    BoundaryConditions<T>,
)> {
    load_from_str(&fs::read_to_string(path)?)
}
