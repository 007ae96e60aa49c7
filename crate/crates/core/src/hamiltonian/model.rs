use crate::error::Result;
use crate::geometry::{project_sites, SymmetricSet};

use super::{assemble_with_cap, sample_disorder, AssembledHamiltonian, DisorderRealization, Distribution, InteractionPotential, DEFAULT_CAP};

/// Disorder strength, interaction, single-site law and matrix cap bundled
/// together.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub lambda: f64,
    pub interaction: InteractionPotential,
    pub distribution: Distribution,
    pub cap: usize,
}

impl Model {
    pub fn new(lambda: f64, interaction: InteractionPotential, distribution: Distribution) -> Self {
        Model {
            lambda,
            interaction,
            distribution,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Realization covering every site any of `sets` can occupy.
    pub fn realize<'a>(
        &self,
        seed: u64,
        sets: impl IntoIterator<Item = &'a SymmetricSet>,
    ) -> Result<DisorderRealization> {
        let sites: Vec<i64> = sets.into_iter().flat_map(project_sites).collect();
        sample_disorder(seed, sites, &self.distribution)
    }

    pub fn hamiltonian(
        &self,
        theta: &SymmetricSet,
        realization: &DisorderRealization,
    ) -> Result<AssembledHamiltonian> {
        assemble_with_cap(theta, realization, self.lambda, &self.interaction, self.cap)
    }
}
