//! Exact diagonalization, spectral distances and separation checks.

mod eigen;
mod separation;
mod wegner;

pub use eigen::{eigensystem, Eigensystem};
pub use separation::{family_separation, spectral_distance, sorted_min_distance, FamilyVerdict, SeparationVerdict};
pub use wegner::{wegner_empirical, WegnerRow, WegnerTable};
