use nalgebra::DMatrix;
use serde::Serialize;

use crate::num::Real;
use crate::spectral::Eigensystem;

use super::certificate::{locate, orbit_representatives, LocalizationCertificate};

/// Certificates for a full eigenbasis of a cube Hamiltonian.
#[derive(Clone, Debug, Serialize)]
pub struct CubeCertificate {
    pub certificates: Vec<LocalizationCertificate>,
    /// Clusters whose basis was rotated before certification.
    pub rotated_clusters: Vec<usize>,
    pub pass: bool,
}

impl CubeCertificate {
    pub fn passes(&self) -> usize {
        self.certificates.iter().filter(|c| c.pass).count()
    }
}

/// Tests whether the cube with eigensystem `es` (half-width `big`) is
/// `m`-localizing.
///
/// Inside a degenerate cluster the solver's basis is arbitrary. When it fails,
/// the cluster is re-diagonalized against the position observable
/// `Q(x) = Σ_j (x_j − t₀)²`, which splits orbit-degenerate combinations into
/// spatially localized ones, and certified again. The origin `t₀` sits off
/// the half-integer lattice so no reflection of the line preserves `Q`.
pub fn certify_cube(es: &Eigensystem, m: f64, big: f64, tau: f64) -> CubeCertificate {
    let index = es.index();
    let reps = orbit_representatives(index);
    let mut certificates = Vec::with_capacity(es.len());
    let mut rotated_clusters = Vec::new();
    let certify = |es: &Eigensystem, k: usize, rotated: bool| {
        let (center, pass, margin, tested, search) = locate(es.vector(k), index, &reps, m, big, tau);
        LocalizationCertificate {
            eigen_index: k,
            eigenvalue: Real(es.eigenvalues()[k]),
            center,
            m: Real(m),
            big: Real(big),
            tau: Real(tau),
            margin: Real(margin),
            tested,
            pass,
            search,
            rotated,
        }
    };
    for (c, range) in es.clusters().iter().enumerate() {
        let first: Vec<LocalizationCertificate> = range.clone().map(|k| certify(es, k, false)).collect();
        if first.iter().all(|c| c.pass) || range.len() == 1 {
            certificates.extend(first);
            continue;
        }
        let rotated = es.with_rotated_cluster(c, &position_basis(es, range.clone()));
        rotated_clusters.push(c);
        certificates.extend(range.clone().map(|k| certify(&rotated, k, true)));
    }
    let pass = certificates.iter().all(|c| c.pass);
    CubeCertificate {
        certificates,
        rotated_clusters,
        pass,
    }
}

/// Eigenbasis of `Q` compressed to the span of the cluster's vectors.
fn position_basis(es: &Eigensystem, range: std::ops::Range<usize>) -> DMatrix<f64> {
    let index = es.index();
    let span = es.vectors().columns(range.start, range.len()).into_owned();
    let origin = (5f64.sqrt() - 1.0) / 2.0;
    let q: Vec<f64> = (0..index.len())
        .map(|i| index.get(i).coords().iter().map(|&x| (x as f64 - origin).powi(2)).sum())
        .collect();
    let mut weighted = span.clone();
    for (i, mut row) in weighted.row_iter_mut().enumerate() {
        row *= q[i];
    }
    let compressed = span.transpose() * weighted;
    let compressed = (&compressed + compressed.transpose()) * 0.5;
    let eig = compressed.symmetric_eigen();
    span * eig.eigenvectors
}
