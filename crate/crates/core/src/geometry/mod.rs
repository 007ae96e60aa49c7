//! Configurations of `N` particles on the integer line, the symmetrized
//! distance, cubes, boundaries and covers.

mod boundary;
mod config;
mod cover;
mod set;

pub use boundary::{boundary, inner_core, BoundaryEdgeSet};
pub use config::{rearrange, sym_distance, Configuration};
pub use cover::{make_cover, truncation_center, Cover};
pub use set::{enumerate_cube, number_at, project_sites, ConfigIndex, Cube, SymmetricSet};

pub(crate) use config::sorted_linf;
pub(crate) use set::for_each_non_decreasing;
