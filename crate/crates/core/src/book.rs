#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/geometry.md")]
mod geometry {}

#[doc = include_str!("../../../book/src/hamiltonian.md")]
mod hamiltonian {}

#[doc = include_str!("../../../book/src/localization.md")]
mod localization {}

#[doc = include_str!("../../../book/src/emsa.md")]
mod emsa {}

#[doc = include_str!("../../../book/src/experiments.md")]
mod experiments {}

#[doc = include_str!("../../../book/src/reproducibility.md")]
mod reproducibility {}
