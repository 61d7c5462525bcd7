//! Reproduction harness for the decay and convergence studies on regular
//! and perturbed unit-square networks.

mod report;

pub use report::{
    fit_slope, write_solution, ConvergenceRow, ConvergenceTable, DecayTable, RowStatus,
    CONVERGENCE_HEADER,
};

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coarse::PatchRadius;
use crate::error::{Error, Result};
use crate::lod::{
    build_basis, compare, nodal_coefficients, solve_displaced, solve_full, solve_multiscale,
    CorrectorSet, Correctors, Discretization, MultiscaleBasis, Solution,
};
use crate::models::{
    elasticity_elements, map_lame, ElementMatrix, ElementSource, LameField, Section,
};
use crate::network::{
    generate_regular, perturb_random, BoundaryConditions, EdgeAttributes, Network, PairAttributes,
    PairPolicy, Point,
};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Whole boundary clamped, uniform load `1/h²`.
    FixedBoundary,
    /// Left side clamped, right side pulled to `x`-displacement `0.1`.
    DisplacedBoundary,
}

impl ProblemKind {
    /// Patch constant `C` in `ρ = C log₂ R`.
    pub fn default_patch_constant(self) -> f64 {
        match self {
            Self::FixedBoundary => 1.0,
            Self::DisplacedBoundary => 1.5,
        }
    }

    /// Prescribed value of `component` at `p`, if fixed.
    pub fn boundary_rule(self, p: Point<f64>, component: usize) -> Option<f64> {
        let [x, y] = p;
        match self {
            Self::FixedBoundary => (x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0).then_some(0.0),
            Self::DisplacedBoundary => {
                if x == 0.0 {
                    Some(0.0)
                } else if x == 1.0 && component == 0 {
                    Some(0.1)
                } else {
                    None
                }
            }
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-boundary" | "fixed" => Ok(Self::FixedBoundary),
            "displaced-boundary" | "displaced" => Ok(Self::DisplacedBoundary),
            other => Err(Error::InvalidParameter(format!(
                "unknown problem `{other}` (expected fixed-boundary or displaced-boundary)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setup {
    /// `l = μ = 1`.
    Basic,
    /// `l_i, μ_i ~ U[0.1, 10]`.
    RandomCoefficients,
    /// Nodes displaced by up to `0.4 h` per coordinate.
    RandomStructure,
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Self::Basic),
            "random-coefficients" => Ok(Self::RandomCoefficients),
            "random-structure" => Ok(Self::RandomStructure),
            other => Err(Error::InvalidParameter(format!(
                "unknown setup `{other}` (expected basic, random-coefficients or random-structure)"
            ))),
        }
    }
}

pub const COEFFICIENT_RANGE: (f64, f64) = (0.1, 10.0);
pub const PERTURBATION: f64 = 0.4;
pub const LAME_SCALE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub setup: Setup,
    /// Network resolution: `(r+1)²` nodes.
    pub r: usize,
    /// Coarse grids, elements per side.
    pub coarse: Vec<usize>,
    /// `C` in `ρ = C log₂ R`.
    pub patch_constant: f64,
    pub seed: u64,
    pub pair_policy: PairPolicy,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, setup: Setup, r: usize, coarse: Vec<usize>) -> Self {
        Self {
            problem,
            setup,
            r,
            coarse,
            patch_constant: problem.default_patch_constant(),
            seed: 0,
            pair_policy: PairPolicy::All,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pow2 = |v: usize| v >= 2 && v.is_power_of_two();
        if !pow2(self.r) {
            return Err(Error::InvalidParameter(format!(
                "r = {} is not a power of two",
                self.r
            )));
        }
        if self.coarse.is_empty() {
            return Err(Error::InvalidParameter("no coarse grid sizes given".into()));
        }
        for &big_r in &self.coarse {
            if !pow2(big_r) {
                return Err(Error::InvalidParameter(format!(
                    "R = {big_r} is not a power of two"
                )));
            }
            if 2 * big_r > self.r {
                return Err(Error::InvalidParameter(format!(
                    "R = {big_r} needs r >= {}, got {}",
                    2 * big_r,
                    self.r
                )));
            }
        }
        if !(self.patch_constant > 0.0) {
            return Err(Error::InvalidParameter(
                "patch constant C must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `ρ(R) = C log₂ R`.
    pub fn patch_ratio(&self, big_r: usize) -> f64 {
        self.patch_constant * (big_r as f64).log2()
    }
}

/// A generated fine-scale problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: ProblemKind,
    pub net: Network<f64>,
    pub edge_attrs: EdgeAttributes<f64>,
    pub pair_attrs: PairAttributes<f64>,
    pub elements: Vec<(ElementSource, ElementMatrix<f64>)>,
    pub bc: BoundaryConditions<f64>,
    pub load: Vec<f64>,
}

impl Problem {
    /// Assembled stiffness matrix `K`.
    pub fn stiffness(&self) -> Result<SparseMatrix<f64>> {
        let n = self.net.dof_count();
        let mut triplets = Vec::new();
        for (_, el) in &self.elements {
            el.push_triplets(&mut triplets);
        }
        SparseMatrix::from_triplets(n, n, &triplets)
    }

    pub fn discretize(&self, big_r: usize) -> Result<Discretization<f64>> {
        Discretization::new(self.net.clone(), &self.elements, self.bc.clone(), big_r)
    }

    pub fn reference(&self, disc: &Discretization<f64>) -> Result<Solution<f64>> {
        solve_full(&disc.k, &self.load, &self.bc)
    }

    /// Correctors needed by this problem's boundary conditions.
    pub fn corrector_set(&self) -> CorrectorSet {
        match self.kind {
            ProblemKind::FixedBoundary => CorrectorSet::Free,
            ProblemKind::DisplacedBoundary => CorrectorSet::All,
        }
    }

    /// Multiscale solution for a given basis and its correctors.
    pub fn solve_with(
        &self,
        disc: &Discretization<f64>,
        basis: &MultiscaleBasis<f64>,
        correctors: &Correctors<f64>,
    ) -> Result<Solution<f64>> {
        match self.kind {
            ProblemKind::FixedBoundary => solve_multiscale(&disc.k, &self.load, basis),
            ProblemKind::DisplacedBoundary => {
                let kind = self.kind;
                let alpha = nodal_coefficients(&disc.grid, |p, c| kind.boundary_rule(p, c));
                solve_displaced(&disc.k, &self.bc, basis, correctors, &disc.ops, &alpha)
            }
        }
    }

    /// LOD solution at patch radius `radius`.
    pub fn solve_lod(
        &self,
        disc: &Discretization<f64>,
        radius: PatchRadius,
    ) -> Result<(Solution<f64>, Correctors<f64>)> {
        let correctors = disc.correctors(radius, &self.corrector_set())?;
        let basis = build_basis(&disc.ops, &correctors)?;
        Ok((self.solve_with(disc, &basis, &correctors)?, correctors))
    }

    /// Standard coarse finite element solution with the unmodified basis.
    pub fn solve_fem(&self, disc: &Discretization<f64>) -> Result<Solution<f64>> {
        let zero = Correctors::zero(disc.ops.coarse_dofs(), disc.ops.fine_dim());
        self.solve_with(disc, &MultiscaleBasis::coarse(&disc.ops), &zero)
    }
}

/// Builds the network, coefficients, stiffness elements, boundary
/// conditions and load described by `config`. All randomness comes from
/// `config.seed`.
pub fn make_problem(config: &ExperimentConfig) -> Result<Problem> {
    let r = config.r;
    if r < 2 {
        return Err(Error::InvalidParameter(format!("r = {r} is too small")));
    }
    let h = 1.0 / r as f64;
    let mut net = generate_regular::<f64>(r)?;
    if config.setup == Setup::RandomStructure {
        net = perturb_random(&net, PERTURBATION, config.seed)?;
    }
    let net = net.derive_pairs(config.pair_policy);
    let field = match config.setup {
        Setup::RandomCoefficients => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let (lo, hi) = COEFFICIENT_RANGE;
            LameField::random(net.node_count(), lo, hi, &mut rng)
        }
        _ => LameField::uniform(net.node_count(), 1.0, 1.0),
    };
    let (edge_attrs, pair_attrs) = map_lame(&net, &field, LAME_SCALE, Section::grid(h))?;
    let elements = elasticity_elements(&net, &edge_attrs, &pair_attrs)?;
    let kind = config.problem;
    let bc = BoundaryConditions::from_rule(&net, |p, c| kind.boundary_rule(p, c));
    let load = match kind {
        ProblemKind::FixedBoundary => {
            let mut f = vec![1.0 / (h * h); net.dof_count()];
            for q in bc.fixed().iter() {
                f[q] = 0.0;
            }
            f
        }
        ProblemKind::DisplacedBoundary => vec![0.0; net.dof_count()],
    };
    Ok(Problem {
        kind,
        net,
        edge_attrs,
        pair_attrs,
        elements,
        bc,
        load,
    })
}

/// Coarse dof at the grid center, `x`-component.
pub fn central_coarse_dof(big_r: usize, dofs_per_node: usize) -> usize {
    let c = big_r / 2;
    dofs_per_node * (c * (big_r + 1) + c)
}

/// Corrector decay on the first configured coarse grid.
pub fn run_decay(config: &ExperimentConfig, radii: &[PatchRadius]) -> Result<DecayTable> {
    config.validate()?;
    let problem = make_problem(config)?;
    let big_r = config.coarse[0];
    let disc = problem.discretize(big_r)?;
    let dof = central_coarse_dof(big_r, disc.net.dofs_per_node());
    let errors = disc.corrector_decay_error(dof, radii)?;
    Ok(DecayTable {
        rows: radii.iter().map(|r| r.as_f64()).zip(errors).collect(),
    })
}

/// LOD and coarse FEM errors against the fine reference for every
/// configured `R`. A failing `R` is recorded and the study continues.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let problem = make_problem(config)?;
    let mut reference: Option<Vec<f64>> = None;
    let mut rows = Vec::with_capacity(config.coarse.len());
    for &big_r in &config.coarse {
        let rho = config.patch_ratio(big_r);
        let outcome = (|| -> Result<ConvergenceRow> {
            let disc = problem.discretize(big_r)?;
            if reference.is_none() {
                reference = Some(problem.reference(&disc)?.u);
            }
            let u = reference.as_ref().expect("set above");
            let (lod, _) = problem.solve_lod(&disc, PatchRadius::new(rho)?)?;
            let fem = problem.solve_fem(&disc)?;
            let mut warnings = lod.warnings;
            warnings.extend(fem.warnings);
            Ok(ConvergenceRow {
                big_r,
                h: 1.0 / big_r as f64,
                rho,
                lod: Some(compare(&disc.k, u, &lod.u)?),
                fem: Some(compare(&disc.k, u, &fem.u)?),
                status: if warnings.is_empty() {
                    RowStatus::Ok
                } else {
                    RowStatus::Warning(warnings.join("; "))
                },
            })
        })();
        rows.push(outcome.unwrap_or_else(|e| ConvergenceRow {
            big_r,
            h: 1.0 / big_r as f64,
            rho,
            lod: None,
            fem: None,
            status: RowStatus::Failed(e.to_string()),
        }));
    }
    Ok(ConvergenceTable { rows })
}
