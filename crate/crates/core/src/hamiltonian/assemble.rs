use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{boundary, ConfigIndex, Configuration, SymmetricSet};

use super::disorder::DisorderRealization;
use super::interaction::InteractionPotential;

/// Default row cap for dense matrices.
pub const DEFAULT_CAP: usize = 20_000;

/// Where an assembled matrix came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub disorder: String,
    pub interaction: String,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.disorder, self.interaction)
    }
}

/// Dense `H_Θ`, indexed by every configuration of `Θ` in lexicographic order.
#[derive(Clone, Debug)]
pub struct AssembledHamiltonian {
    index: ConfigIndex,
    matrix: DMatrix<f64>,
    lambda: f64,
    provenance: Provenance,
}

impl AssembledHamiltonian {
    pub fn index(&self) -> &ConfigIndex {
        &self.index
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }
}

/// `λ Σ_j 𝒱(x_j) + Σ_{i<j} 𝒰(x_i − x_j)` evaluated on the sorted
/// rearrangement, so every ordering of `x` gets the bitwise same value.
pub(crate) fn potential_energy(
    x: &Configuration,
    realization: &DisorderRealization,
    lambda: f64,
    interaction: &InteractionPotential,
) -> Result<f64> {
    let mut sorted = x.coords().to_vec();
    sorted.sort_unstable();
    let mut v = 0.0;
    for &site in &sorted {
        v += realization
            .value(site)
            .ok_or_else(|| Error::usage(format!("realization has no value at site {site}")))?;
    }
    Ok(lambda * v + interaction.energy(&sorted))
}

pub fn assemble(
    theta: &SymmetricSet,
    realization: &DisorderRealization,
    lambda: f64,
    interaction: &InteractionPotential,
) -> Result<AssembledHamiltonian> {
    assemble_with_cap(theta, realization, lambda, interaction, DEFAULT_CAP)
}

pub fn assemble_with_cap(
    theta: &SymmetricSet,
    realization: &DisorderRealization,
    lambda: f64,
    interaction: &InteractionPotential,
    cap: usize,
) -> Result<AssembledHamiltonian> {
    if theta.is_empty() {
        return Err(Error::usage("cannot assemble a Hamiltonian on an empty set"));
    }
    let size = theta.len();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    if !lambda.is_finite() {
        return Err(Error::config(format!("disorder strength must be finite, got {lambda}")));
    }
    let index = theta.index();
    let n = index.len();
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = potential_energy(index.sorted(i), realization, lambda, interaction)?;
    }
    for i in 0..n {
        let mut y = index.get(i).coords().to_vec();
        for j in 0..y.len() {
            for step in [-1, 1] {
                y[j] += step;
                if let Some(k) = Configuration::new(y.clone()).ok().and_then(|c| index.position(&c)) {
                    matrix[(i, k)] = -1.0;
                }
                y[j] -= step;
            }
        }
    }
    Ok(AssembledHamiltonian {
        index,
        matrix,
        lambda,
        provenance: Provenance {
            disorder: realization.id(),
            interaction: interaction.id(),
        },
    })
}

/// Hopping terms cut by the split of `Θ` into `Φ` and `Θ∖Φ`.
///
/// Entries are 1 at `(x, y)` and `(y, x)` for `x ∈ Φ`, `y ∈ Θ∖Φ` with
/// `‖x − y‖₁ = 1`, so that `H_Θ = H_Φ ⊕ H_{Θ∖Φ} − Γ`. Every such pair is a
/// boundary edge.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    index: ConfigIndex,
    matrix: DMatrix<f64>,
}

impl BoundaryOperator {
    /// Indexing of `Θ` shared with the matrix.
    pub fn index(&self) -> &ConfigIndex {
        &self.index
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest absolute row sum, an upper bound for the operator norm.
    pub fn max_row_sum(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn boundary_operator(phi: &SymmetricSet, theta: &SymmetricSet) -> Result<BoundaryOperator> {
    let edges = boundary(phi, theta)?;
    let index = theta.index();
    let n = index.len();
    let mut matrix = DMatrix::zeros(n, n);
    for (u, v) in edges.expanded_edges() {
        if u.l1_distance(&v) == 1 {
            let i = index.position(&u).expect("edge inside theta");
            let k = index.position(&v).expect("edge inside theta");
            matrix[(i, k)] = 1.0;
            matrix[(k, i)] = 1.0;
        }
    }
    Ok(BoundaryOperator { index, matrix })
}

/// Largest entry of `|H_Θ − (H_Φ ⊕ H_{Θ∖Φ}) + Γ|`; exactly zero when the
/// assembly is consistent.
pub fn check_geometric_decomposition(
    theta: &SymmetricSet,
    phi: &SymmetricSet,
    realization: &DisorderRealization,
    lambda: f64,
    interaction: &InteractionPotential,
) -> Result<f64> {
    let full = assemble_with_cap(theta, realization, lambda, interaction, usize::MAX)?;
    let gamma = boundary_operator(phi, theta)?;
    let mut residual = full.matrix().clone() + gamma.matrix();
    let rest = theta.difference(phi);
    for part in [phi, &rest] {
        if part.is_empty() {
            continue;
        }
        let h = assemble_with_cap(part, realization, lambda, interaction, usize::MAX)?;
        let map: Vec<usize> = (0..h.dim())
            .map(|i| full.index().position(h.index().get(i)).expect("subset"))
            .collect();
        for (a, &i) in map.iter().enumerate() {
            for (b, &k) in map.iter().enumerate() {
                residual[(i, k)] -= h.matrix()[(a, b)];
            }
        }
    }
    Ok(residual.iter().fold(0.0, |m, v| m.max(v.abs())))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cube;
    use crate::hamiltonian::{sample_disorder, Distribution};

    fn zero_disorder(sites: impl IntoIterator<Item = i64>) -> DisorderRealization {
        DisorderRealization::from_values(0, Distribution::default(), sites.into_iter().map(|s| (s, 0.0)))
            .unwrap()
    }

    #[test]
    fn single_site() {
        let theta = SymmetricSet::from_configurations(1, &[[0].into()]).unwrap();
        let r = DisorderRealization::from_values(0, Distribution::default(), [(0, 0.25)]).unwrap();
        let h = assemble(&theta, &r, 4.0, &InteractionPotential::zero()).unwrap();
        assert_eq!(h.matrix().as_slice(), &[1.0]);
    }

    #[test]
    fn two_particle_square_by_hand() {
        let cfgs: Vec<Configuration> = vec![[0, 0].into(), [0, 1].into(), [1, 0].into(), [1, 1].into()];
        let theta = SymmetricSet::from_configurations(2, &cfgs).unwrap();
        let h = assemble(&theta, &zero_disorder([0, 1]), 3.0, &InteractionPotential::on_site(2.5)).unwrap();
        // Lexicographic order: (0,0), (0,1), (1,0), (1,1).
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            2.5, -1.0, -1.0, 0.0,
            -1.0, 0.0, 0.0, -1.0,
            -1.0, 0.0, 0.0, -1.0,
            0.0, -1.0, -1.0, 2.5,
        ]);
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn permutation_invariant_entries() {
        let theta = Cube::new([0, 2, 3].into(), 1.0).unwrap().set();
        let r = sample_disorder(3, crate::geometry::project_sites(&theta), &Distribution::default()).unwrap();
        let h = assemble(&theta, &r, 7.3, &InteractionPotential::nearest_neighbour(0.7)).unwrap();
        let idx = h.index();
        let perms = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1], [0, 2, 1]];
        let apply = |c: &Configuration, p: &[usize; 3]| -> Configuration {
            Configuration::new(p.iter().map(|&k| c.coords()[k]).collect()).unwrap()
        };
        for i in 0..idx.len() {
            for k in 0..idx.len() {
                for p in &perms {
                    let pi = idx.position(&apply(idx.get(i), p)).unwrap();
                    let pk = idx.position(&apply(idx.get(k), p)).unwrap();
                    assert_eq!(h.matrix()[(i, k)].to_bits(), h.matrix()[(pi, pk)].to_bits());
                }
            }
        }
        assert_eq!(h.matrix(), &h.matrix().transpose());
    }

    #[test]
    fn missing_site_and_cap() {
        let theta = Cube::new([0].into(), 2.0).unwrap().set();
        let r = zero_disorder([0]);
        assert!(matches!(assemble(&theta, &r, 1.0, &InteractionPotential::zero()), Err(Error::Usage(_))));
        let r = zero_disorder(-2..=2);
        let e = assemble_with_cap(&theta, &r, 1.0, &InteractionPotential::zero(), 4).unwrap_err();
        assert!(matches!(e, Error::CapExceeded { size: 5, cap: 4 }));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn boundary_operator_small_case() {
        let theta = Cube::new([0].into(), 1.0).unwrap().set();
        let phi = SymmetricSet::from_configurations(1, &[[0].into()]).unwrap();
        let g = boundary_operator(&phi, &theta).unwrap();
        // Order: -1, 0, 1.
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(g.matrix(), &expected);
        assert!(boundary_operator(&theta, &theta).unwrap().matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decomposition_is_exact() {
        let theta = Cube::new([0, 3].into(), 3.0).unwrap().set();
        let phi = Cube::new([1, 3].into(), 1.0).unwrap().set();
        let r = sample_disorder(8, crate::geometry::project_sites(&theta), &Distribution::default()).unwrap();
        let res = check_geometric_decomposition(&theta, &phi, &r, 12.5, &InteractionPotential::on_site(1.0)).unwrap();
        assert_eq!(res, 0.0);
        let res = check_geometric_decomposition(&theta, &theta, &r, 12.5, &InteractionPotential::zero()).unwrap();
        assert_eq!(res, 0.0);
        let g = boundary_operator(&phi, &theta).unwrap();
        assert!(g.max_row_sum() <= 4.0);
    }
}
