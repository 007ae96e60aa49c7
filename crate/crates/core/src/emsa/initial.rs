use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{rearrange, Configuration, SymmetricSet};
use crate::hamiltonian::{DisorderRealization, Model};
use crate::num::Real;
use crate::spectral::eigensystem;

use super::decay::NOISE_FLOOR;

/// Outcome of the large-disorder initial step on one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialScaleReport {
    /// Distinct orbits have diagonal energies at least `η` apart.
    pub separated: bool,
    /// Smallest gap between diagonal energies of distinct orbits.
    pub min_gap: Real,
    /// `None` when the separation fails and the decay bound is not tested.
    pub decay_holds: Option<bool>,
    /// `min ln((bound + floor) / |φ(y)|)` over all eigenvectors and points.
    pub margin: Real,
}

/// `Σ_j |x̂_j − ŷ_j|`, which equals `min_π ‖x − πy‖₁`.
pub fn orbit_l1_distance(x: &Configuration, y: &Configuration) -> u64 {
    rearrange(x)
        .coords()
        .iter()
        .zip(rearrange(y).coords())
        .map(|(a, b)| a.abs_diff(*b))
        .sum()
}

/// Checks that diagonal energies of distinct orbits are `η`-separated and,
/// if so, that every eigenvector satisfies
/// `|φ(y)| <= (2N / (η − 2N))^{min_π ‖y − πx‖₁}` where `x` is the orbit whose
/// energy lies within `2N` of the eigenvalue.
pub fn initial_scale(
    theta: &SymmetricSet,
    realization: &DisorderRealization,
    model: &Model,
    eta: f64,
) -> Result<InitialScaleReport> {
    let n = theta.particles() as f64;
    if !(eta > 4.0 * n) {
        return Err(Error::usage(format!("initial scale needs eta > 4N, got {eta}")));
    }
    let h = model.hamiltonian(theta, realization)?;
    let index = h.index();
    let diagonal = h.diagonal();
    let mut energies: Vec<(f64, Configuration)> = Vec::with_capacity(theta.orbit_count());
    for rep in theta.representatives() {
        let i = index.position(rep).expect("representative is in the set");
        energies.push((diagonal[i], rep.clone()));
    }
    energies.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min_gap = energies.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::INFINITY, f64::min);
    let separated = min_gap >= eta;
    if !separated {
        return Ok(InitialScaleReport {
            separated,
            min_gap: Real(min_gap),
            decay_holds: None,
            margin: Real(f64::NAN),
        });
    }

    let es = eigensystem(&h, None)?;
    let rate = 2.0 * n / (eta - 2.0 * n);
    let mut holds = true;
    let mut margin = f64::INFINITY;
    for (k, &theta_k) in es.eigenvalues().iter().enumerate() {
        let pos = energies.partition_point(|e| e.0 < theta_k);
        let nearest = [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter(|&j| j < energies.len())
            .min_by(|&a, &b| (energies[a].0 - theta_k).abs().total_cmp(&(energies[b].0 - theta_k).abs()))
            .expect("non-empty set");
        let center = &energies[nearest].1;
        if (energies[nearest].0 - theta_k).abs() > 2.0 * n + 1e-8 {
            return Err(Error::internal(format!("eigenvalue {theta_k} lies outside every Gershgorin disc")));
        }
        for (i, v) in es.vector(k).iter().enumerate() {
            let bound = rate.powi(orbit_l1_distance(index.get(i), center) as i32);
            let a = v.abs();
            if a > bound + NOISE_FLOOR {
                holds = false;
            }
            if a > 0.0 {
                margin = margin.min(((bound + NOISE_FLOOR) / a).ln());
            }
        }
    }
    Ok(InitialScaleReport {
        separated,
        min_gap: Real(min_gap),
        decay_holds: Some(holds),
        margin: Real(margin),
    })
}
