//! Numerical laboratory for localization of interacting particles on the
//! integer line with random single-site potentials.
//!
//! The crate is organised bottom-up: [`geometry`] handles configurations and
//! their symmetrized distance, [`hamiltonian`] assembles restricted
//! Hamiltonians, [`spectral`] diagonalizes them, [`localization`] certifies
//! exponential decay of eigenvectors, [`emsa`] checks the multiscale
//! machinery on sampled realizations and [`harness`] runs reproducible
//! experiments.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emsa;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod harness;
pub mod localization;
pub mod num;
pub mod params;
pub mod rng;
pub mod spectral;
pub mod stats;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use geometry::{Configuration, Cube, SymmetricSet};
pub use params::{EmsaConstants, MsaParameters};
