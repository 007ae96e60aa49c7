use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{rearrange, Configuration, Cube};
use crate::hamiltonian::{DisorderRealization, Model};
use crate::num::Real;
use crate::spectral::eigensystem;

use super::interactivity::{classify_cube, InteractivityVerdict};

/// Comparison of one occupation sector of a partially interactive cube with
/// its two fewer-particle factors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorCheck {
    pub n1: usize,
    pub n2: usize,
    pub sector_size: usize,
    /// Largest difference between the sorted sector spectrum and the sorted
    /// sums `θ₁ + θ₂`.
    pub max_deviation: Real,
}

/// Diagonalizes the sector of `Λ_L(center)` with the first `n1` particles in
/// `S1` and compares it with the spectra of `Λ_L` around the two groups.
pub fn tensor_check(center: &Configuration, half_width: f64, model: &Model, realization: &DisorderRealization) -> Result<TensorCheck> {
    let InteractivityVerdict::PartiallyInteractive { n1, n2, s1, s2 } = classify_cube(center, half_width, &model.interaction) else {
        return Err(Error::usage(format!("cube around {center} is fully interactive")));
    };
    let cube = Cube::new(center.clone(), half_width)?;
    let h = model.hamiltonian(&cube.set(), realization)?;
    let index = h.index();
    let sector: Vec<usize> = (0..index.len())
        .filter(|&i| {
            let c = index.get(i).coords();
            c[..n1].iter().all(|x| s1.contains(x)) && c[n1..].iter().all(|x| s2.contains(x))
        })
        .collect();
    let block = DMatrix::from_fn(sector.len(), sector.len(), |a, b| h.matrix()[(sector[a], sector[b])]);
    let mut joint: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
    joint.sort_by(f64::total_cmp);

    let sorted = rearrange(center);
    let part = |coords: &[i64]| -> Result<Vec<f64>> {
        let set = Cube::new(Configuration::new(coords.to_vec())?, half_width)?.set();
        Ok(eigensystem(&model.hamiltonian(&set, realization)?, None)?.eigenvalues().to_vec())
    };
    let first = part(&sorted.coords()[..n1])?;
    let second = part(&sorted.coords()[n1..])?;
    let mut sums: Vec<f64> = first.iter().flat_map(|a| second.iter().map(move |b| a + b)).collect();
    sums.sort_by(f64::total_cmp);
    if sums.len() != joint.len() {
        return Err(Error::internal(format!(
            "sector has {} states but the factors give {}",
            joint.len(),
            sums.len()
        )));
    }
    let max_deviation = joint.iter().zip(&sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(TensorCheck {
        n1,
        n2,
        sector_size: sector.len(),
        max_deviation: Real(max_deviation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Distribution, InteractionPotential};

    #[test]
    fn split_pair_factorizes() {
        let model = Model::new(3.0, InteractionPotential::nearest_neighbour(2.0), Distribution::default());
        for seed in 0..5 {
            let center: Configuration = [0, 7].into();
            let set = Cube::new(center.clone(), 2.0).unwrap().set();
            let r = model.realize(seed, [&set]).unwrap();
            let t = tensor_check(&center, 2.0, &model, &r).unwrap();
            assert_eq!((t.n1, t.n2, t.sector_size), (1, 1, 25));
            assert!(t.max_deviation.0 < 1e-8, "{t:?}");
        }
    }

    #[test]
    fn three_particles_two_plus_one() {
        let model = Model::new(1.0, InteractionPotential::on_site(5.0), Distribution::default());
        let center: Configuration = [9, 0, 1].into();
        let set = Cube::new(center.clone(), 1.0).unwrap().set();
        let r = model.realize(4, [&set]).unwrap();
        let t = tensor_check(&center, 1.0, &model, &r).unwrap();
        assert_eq!((t.n1, t.n2), (2, 1));
        assert!(t.max_deviation.0 < 1e-8, "{t:?}");
    }

    #[test]
    fn fully_interactive_is_rejected() {
        let model = Model::new(1.0, InteractionPotential::nearest_neighbour(1.0), Distribution::default());
        let center: Configuration = [0, 2].into();
        let set = Cube::new(center.clone(), 1.0).unwrap().set();
        let r = model.realize(0, [&set]).unwrap();
        assert!(tensor_check(&center, 1.0, &model, &r).is_err());
    }
}
