use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SymmetricSet;
use crate::hamiltonian::Model;
use crate::num::Real;
use crate::rng::split;
use crate::stats::wilson_interval;

use super::{eigensystem, spectral_distance};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerRow {
    pub s: Real,
    pub count: usize,
    pub fraction: Real,
    pub ci_lo: Real,
    pub ci_hi: Real,
}

/// Empirical distribution of the spectral distance between two sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerTable {
    pub rows: Vec<WegnerRow>,
    /// Spectral distance of every trial, by trial index.
    pub distances: Vec<Real>,
}

/// Samples `trials` realizations (trial `i` uses `split(seed, i)`) and
/// tabulates, for each `s`, the fraction of trials with distance `<= s`.
pub fn wegner_empirical(
    theta1: &SymmetricSet,
    theta2: &SymmetricSet,
    model: &Model,
    s_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<WegnerTable> {
    let n = theta1.particles() as u64;
    let diam = theta1.diameter().unwrap_or(0).max(theta2.diameter().unwrap_or(0));
    match theta1.set_distance(theta2) {
        Some(d) if d >= 8 * n * diam && d > 0 => {}
        other => {
            return Err(Error::config(format!(
                "sets must satisfy d_S >= 8N·diam = {}; got d_S = {other:?}",
                8 * n * diam
            )))
        }
    }
    let distances: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let r = model.realize(split(seed, i), [theta1, theta2])?;
            let a = eigensystem(&model.hamiltonian(theta1, &r)?, None)?;
            let b = eigensystem(&model.hamiltonian(theta2, &r)?, None)?;
            Ok(spectral_distance(&a, &b))
        })
        .collect::<Result<_>>()?;
    let rows = s_grid
        .iter()
        .map(|&s| {
            let count = distances.iter().filter(|&&d| d <= s).count();
            let (lo, hi) = wilson_interval(count, trials);
            WegnerRow {
                s: Real(s),
                count,
                fraction: Real(count as f64 / trials.max(1) as f64),
                ci_lo: Real(lo),
                ci_hi: Real(hi),
            }
        })
        .collect();
    Ok(WegnerTable {
        rows,
        distances: distances.into_iter().map(Real).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cube;
    use crate::hamiltonian::{Distribution, InteractionPotential};

    fn windows() -> (SymmetricSet, SymmetricSet) {
        (
            Cube::new([0].into(), 2.0).unwrap().set(),
            Cube::new([40].into(), 2.0).unwrap().set(),
        )
    }

    #[test]
    fn cdf_is_monotone_and_null_at_zero() {
        let (a, b) = windows();
        let model = Model::new(10.0, InteractionPotential::zero(), Distribution::default());
        let grid = [0.0, 1e-3, 1e-2, 1e-1, 1.0];
        let t = wegner_empirical(&a, &b, &model, &grid, 1000, 5).unwrap();
        assert_eq!(t.rows[0].count, 0);
        assert!(t.rows.windows(2).all(|w| w[0].count <= w[1].count));
        assert!(t.rows[1].fraction.0 < t.rows[3].fraction.0);
    }

    #[test]
    fn too_close_is_config_error() {
        let a = Cube::new([0].into(), 2.0).unwrap().set();
        let b = Cube::new([10].into(), 2.0).unwrap().set();
        let model = Model::new(10.0, InteractionPotential::zero(), Distribution::default());
        let r = wegner_empirical(&a, &b, &model, &[0.1], 3, 0);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
