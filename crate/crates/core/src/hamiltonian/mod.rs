//! Random single-site potentials, pair interactions and restricted
//! Hamiltonians `H_Θ = −Δ + λV + U` on symmetric configuration sets.

mod assemble;
mod disorder;
mod interaction;

pub use assemble::{
    assemble, assemble_with_cap, boundary_operator, check_geometric_decomposition,
    AssembledHamiltonian, BoundaryOperator, Provenance, DEFAULT_CAP,
};
pub use disorder::{sample_disorder, DisorderRealization, Distribution};
pub use interaction::InteractionPotential;

mod model;
pub use model::Model;
