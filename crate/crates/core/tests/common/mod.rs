//! Dense brute-force reference for the scalar (one dof per node) multiscale
//! method. Everything here is recomputed from node positions and edge
//! weights with dense linear algebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netlod::lod::Discretization;
use netlod::models::laplacian_elements;
use netlod::network::{generate_regular, perturb_random, BoundaryConditions, Network};

pub struct Scalar1 {
    pub net: Network<f64>,
    pub weights: Vec<f64>,
    pub big_r: usize,
}

pub fn on_boundary(p: [f64; 2]) -> bool {
    p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0
}

impl Scalar1 {
    pub fn new(r: usize, big_r: usize, amplitude: f64, seed: u64) -> Self {
        let net = generate_regular::<f64>(r).unwrap();
        let net = perturb_random(&net, amplitude, seed)
            .unwrap()
            .with_dofs_per_node(1)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let weights = (0..net.edges().len())
            .map(|_| rng.random_range(0.1..10.0))
            .collect();
        Self {
            net,
            weights,
            big_r,
        }
    }

    pub fn discretize(&self) -> Discretization<f64> {
        let elements = laplacian_elements(&self.net, &self.weights).unwrap();
        let bc = BoundaryConditions::from_rule(&self.net, |p, _| on_boundary(p).then_some(0.0));
        Discretization::new(self.net.clone(), &elements, bc, self.big_r).unwrap()
    }

    pub fn n(&self) -> usize {
        self.net.node_count()
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&q| !on_boundary(self.net.nodes()[q]))
            .collect()
    }

    pub fn coarse_nodes(&self) -> usize {
        (self.big_r + 1) * (self.big_r + 1)
    }

    pub fn coarse_position(&self, i: usize) -> [f64; 2] {
        let s = self.big_r + 1;
        let h = 1.0 / self.big_r as f64;
        [(i % s) as f64 * h, (i / s) as f64 * h]
    }

    pub fn coarse_free(&self) -> Vec<usize> {
        (0..self.coarse_nodes())
            .filter(|&i| !on_boundary(self.coarse_position(i)))
            .collect()
    }

    pub fn hat(&self, i: usize, p: [f64; 2]) -> f64 {
        let rf = self.big_r as f64;
        let c = self.coarse_position(i);
        let fx = (1.0 - (p[0] * rf - c[0] * rf).abs()).max(0.0);
        let fy = (1.0 - (p[1] * rf - c[1] * rf).abs()).max(0.0);
        fx * fy
    }

    pub fn lambda(&self, i: usize) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.net.nodes().iter().map(|&p| self.hat(i, p)))
    }

    fn edge_matrix(&self, keep: impl Fn(usize) -> bool) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.n(), self.n());
        for (e, &(a, b)) in self.net.edges().iter().enumerate() {
            if !keep(e) {
                continue;
            }
            let w = self.weights[e];
            k[(a, a)] += w;
            k[(b, b)] += w;
            k[(a, b)] -= w;
            k[(b, a)] -= w;
        }
        k
    }

    pub fn k(&self) -> DMatrix<f64> {
        self.edge_matrix(|_| true)
    }

    fn cell(&self, x: f64) -> usize {
        let xi = x * self.big_r as f64;
        let f = xi.floor();
        let k = if f == xi && f > 0.0 { f - 1.0 } else { f };
        (k.max(0.0) as usize).min(self.big_r - 1)
    }

    pub fn owner(&self, e: usize) -> usize {
        let (a, b) = self.net.edges()[e];
        let pa = self.net.nodes()[a];
        let pb = self.net.nodes()[b];
        let m = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
        self.cell(m[1]) * self.big_r + self.cell(m[0])
    }

    pub fn k_element(&self, element: usize) -> DMatrix<f64> {
        self.edge_matrix(|e| self.owner(e) == element)
    }

    pub fn element_center(&self, element: usize) -> [f64; 2] {
        let h = 1.0 / self.big_r as f64;
        [
            (element % self.big_r) as f64 * h + h / 2.0,
            (element / self.big_r) as f64 * h + h / 2.0,
        ]
    }

    /// Free fine nodes within `rho H` of the element center.
    pub fn patch(&self, element: usize, rho: f64) -> Vec<usize> {
        let c = self.element_center(element);
        let reach = rho / self.big_r as f64;
        self.free()
            .into_iter()
            .filter(|&q| {
                let p = self.net.nodes()[q];
                ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= reach
            })
            .collect()
    }

    /// Corrector of coarse node `i` restricted to `dofs` with load
    /// `k_load λ_i`, constrained by every free coarse node whose hat touches
    /// `dofs`. Returned at full length.
    pub fn constrained_solve(
        &self,
        i: usize,
        dofs: &[usize],
        k_load: &DMatrix<f64>,
    ) -> DVector<f64> {
        let k = self.k();
        let lam = self.lambda(i);
        let rhs_full = k_load * &lam;
        let cons: Vec<usize> = self
            .coarse_free()
            .into_iter()
            .filter(|&j| {
                dofs.iter()
                    .any(|&q| self.hat(j, self.net.nodes()[q]) != 0.0)
            })
            .collect();
        let np = dofs.len();
        let c = DMatrix::from_fn(cons.len(), np, |a, b| {
            self.hat(cons[a], self.net.nodes()[dofs[b]])
        });
        let z = null_space(&c);
        let kp = DMatrix::from_fn(np, np, |a, b| k[(dofs[a], dofs[b])]);
        let r = DVector::from_iterator(np, dofs.iter().map(|&q| rhs_full[q]));
        let mut out = DVector::zeros(self.n());
        if z.ncols() == 0 {
            return out;
        }
        let reduced = z.transpose() * &kp * &z;
        let y = reduced
            .lu()
            .solve(&(z.transpose() * r))
            .expect("reduced system");
        let phi = z * y;
        for (a, &q) in dofs.iter().enumerate() {
            out[q] = phi[a];
        }
        out
    }

    pub fn global_corrector(&self, i: usize) -> DVector<f64> {
        self.constrained_solve(i, &self.free(), &self.k())
    }

    /// `Σ_E φ_i^E` with patches of radius `rho H`.
    pub fn local_corrector(&self, i: usize, rho: f64) -> DVector<f64> {
        let mut sum = DVector::zeros(self.n());
        for e in 0..self.big_r * self.big_r {
            sum += self.constrained_solve(i, &self.patch(e, rho), &self.k_element(e));
        }
        sum
    }

    /// `B̃ (B̃ᵀ K B̃)⁻¹ B̃ᵀ F` for basis columns `λ_i − φ_i`.
    pub fn multiscale(&self, correctors: &[DVector<f64>], f: &DVector<f64>) -> DVector<f64> {
        let free = self.coarse_free();
        let mut b = DMatrix::zeros(self.n(), free.len());
        for (col, &i) in free.iter().enumerate() {
            b.set_column(col, &(self.lambda(i) - &correctors[col]));
        }
        let k = self.k();
        let a = b.transpose() * &k * &b;
        let coeffs = a
            .cholesky()
            .expect("reduced matrix SPD")
            .solve(&(b.transpose() * f));
        b * coeffs
    }

    pub fn random_load(&self, seed: u64) -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = DVector::zeros(self.n());
        for q in self.free() {
            f[q] = rng.random_range(-1.0..1.0);
        }
        f
    }
}

/// Orthonormal basis of `{x : C x = 0}` from the eigenvectors of the
/// orthogonal projector onto it.
pub fn null_space(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let projector = if c.nrows() == 0 {
        DMatrix::identity(n, n)
    } else {
        // pseudo-inverse copes with redundant constraint rows
        let pinv = c.clone().pseudo_inverse(1e-12).expect("SVD");
        DMatrix::identity(n, n) - pinv * c
    };
    let eig = SymmetricEigen::new(projector);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
