use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::ConfigIndex;
use crate::hamiltonian::AssembledHamiltonian;

const RESIDUAL_TOL: f64 = 1e-10;
const GRAM_TOL: f64 = 1e-10;
const DEFAULT_DEG_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 10_000;

/// Sorted eigenvalues with orthonormal eigenvectors (as columns) and the
/// grouping of nearly equal eigenvalues into clusters.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    index: ConfigIndex,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    clusters: Vec<Range<usize>>,
    norm: f64,
}

impl Eigensystem {
    pub fn index(&self) -> &ConfigIndex {
        &self.index
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// The `i`-th eigenvector as a slice indexed like [`Eigensystem::index`].
    pub fn vector(&self, i: usize) -> &[f64] {
        let n = self.eigenvalues.len();
        &self.vectors.as_slice()[i * n..(i + 1) * n]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Index ranges of eigenvalue clusters, in increasing order.
    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    /// Cluster number of every eigenvalue.
    pub fn cluster_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.len()];
        for (c, r) in self.clusters.iter().enumerate() {
            for i in r.clone() {
                ids[i] = c;
            }
        }
        ids
    }

    /// Spectral norm `max |θ|`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Distance from `mu` to the spectrum.
    /// Gaps below `1e-9·‖H‖` are not resolved by the solver.
    pub fn resolution(&self) -> f64 {
        DEFAULT_DEG_TOL * self.norm
    }

    pub fn distance_to(&self, mu: f64) -> f64 {
        let pos = self.eigenvalues.partition_point(|&t| t < mu);
        let mut best = f64::INFINITY;
        if pos < self.len() {
            best = best.min(self.eigenvalues[pos] - mu);
        }
        if pos > 0 {
            best = best.min(mu - self.eigenvalues[pos - 1]);
        }
        best
    }

    /// Replaces the eigenvectors of one cluster by another orthonormal basis
    /// of the same span.
    pub(crate) fn with_rotated_cluster(&self, cluster: usize, basis: &DMatrix<f64>) -> Eigensystem {
        let mut out = self.clone();
        let r = self.clusters[cluster].clone();
        out.vectors.columns_mut(r.start, r.len()).copy_from(basis);
        out
    }

    /// Builds an eigensystem from any dense symmetric matrix, checking the
    /// residual and orthonormality tolerances.
    pub fn from_matrix(
        matrix: &DMatrix<f64>,
        index: ConfigIndex,
        deg_tol: Option<f64>,
        provenance: &str,
    ) -> Result<Eigensystem> {
        let n = matrix.nrows();
        if n == 0 || n != matrix.ncols() || n != index.len() {
            return Err(Error::usage("eigensystem needs a non-empty square matrix matching its index"));
        }
        let numerical = |message: String| Error::Numerical {
            message,
            provenance: provenance.to_string(),
        };
        let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| numerical(format!("symmetric eigensolver did not converge on a {n}x{n} matrix")))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            vectors.set_column(k, &eig.eigenvectors.column(i));
        }
        let norm = eigenvalues.iter().fold(0.0, |m: f64, t| m.max(t.abs()));

        let residual = matrix * &vectors - &vectors * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&eigenvalues));
        for k in 0..n {
            let r = residual.column(k).norm();
            if !(r <= RESIDUAL_TOL * norm) && r > 0.0 {
                return Err(numerical(format!(
                    "eigenpair {k} has residual {r:e} above {RESIDUAL_TOL:e}·‖H‖ = {:e}",
                    RESIDUAL_TOL * norm
                )));
            }
        }
        let gram = vectors.transpose() * &vectors;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                if !((gram[(i, j)] - target).abs() <= GRAM_TOL) {
                    return Err(numerical(format!("eigenvectors {i},{j} are not orthonormal")));
                }
            }
        }

        let tol = deg_tol.unwrap_or(DEFAULT_DEG_TOL * norm);
        let mut clusters = Vec::new();
        let mut start = 0;
        for k in 1..=n {
            if k == n || eigenvalues[k] - eigenvalues[k - 1] >= tol {
                clusters.push(start..k);
                start = k;
            }
        }
        Ok(Eigensystem {
            index,
            eigenvalues,
            vectors,
            clusters,
            norm,
        })
    }
}

/// Diagonalizes an assembled Hamiltonian. `deg_tol` defaults to `1e-9·‖H‖`.
pub fn eigensystem(h: &AssembledHamiltonian, deg_tol: Option<f64>) -> Result<Eigensystem> {
    Eigensystem::from_matrix(h.matrix(), h.index().clone(), deg_tol, &h.provenance().to_string())
}
