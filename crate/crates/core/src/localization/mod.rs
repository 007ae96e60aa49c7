//! Exponential-decay certificates for eigenvectors and whole cubes.

mod certificate;
mod cube;
mod profile;

pub use certificate::{check_vector, find_center, CenterSearch, LocalizationCertificate, SCAN_CAP};
pub use cube::{certify_cube, CubeCertificate};
pub use profile::decay_profile;
