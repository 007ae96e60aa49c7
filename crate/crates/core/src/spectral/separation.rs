use serde::Serialize;

use crate::geometry::SymmetricSet;
use crate::num::Real;
use crate::params::separation_threshold;

use super::Eigensystem;

/// `min |a_i − b_j|` for two sorted lists, by a single merge pass.
/// Infinite when either list is empty.
pub fn sorted_min_distance(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut best = f64::INFINITY;
    while i < a.len() && j < b.len() {
        best = best.min((a[i] - b[j]).abs());
        if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    best
}

/// Distance between the spectra of two eigensystems.
pub fn spectral_distance(a: &Eigensystem, b: &Eigensystem) -> f64 {
    sorted_min_distance(a.eigenvalues(), b.eigenvalues())
}

/// Outcome for one pair of a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationVerdict {
    pub first: usize,
    pub second: usize,
    pub distance: Real,
    pub threshold: Real,
    pub separated: bool,
    /// Whether the pair is far enough apart for separation to be required.
    pub applicable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub pairs: Vec<SeparationVerdict>,
    pub separated: bool,
}

/// Checks spectral `L`-separation of every pair `(Θ_j, Θ_k)` with
/// `d_S(Θ_j, Θ_k) >= 8N · max(diam Θ_j, diam Θ_k)`.
pub fn family_separation(
    thetas: &[SymmetricSet],
    eigensystems: &[Eigensystem],
    big: f64,
    beta: f64,
) -> FamilyVerdict {
    assert_eq!(thetas.len(), eigensystems.len(), "sets and eigensystems must align");
    let threshold = separation_threshold(big, beta);
    let mut pairs = Vec::new();
    for j in 0..thetas.len() {
        for k in j + 1..thetas.len() {
            let n = thetas[j].particles() as u64;
            let diam = thetas[j].diameter().unwrap_or(0).max(thetas[k].diameter().unwrap_or(0));
            let applicable = match thetas[j].set_distance(&thetas[k]) {
                Some(d) => d >= 8 * n * diam && d > 0,
                None => false,
            };
            let distance = spectral_distance(&eigensystems[j], &eigensystems[k]);
            pairs.push(SeparationVerdict {
                first: j,
                second: k,
                distance: Real(distance),
                threshold: Real(threshold),
                separated: distance >= threshold,
                applicable,
            });
        }
    }
    let separated = pairs.iter().all(|p| !p.applicable || p.separated);
    FamilyVerdict { pairs, separated }
}
