use crate::error::{Error, Result};

use super::boundary::inner_core;
use super::config::{rearrange, sorted_linf, Configuration};
use super::set::{for_each_non_decreasing, Cube, SymmetricSet};

/// All `ℓ`-cubes contained in an `L`-cube, one per permutation orbit of centers.
#[derive(Clone, Debug)]
pub struct Cover {
    big: Cube,
    small_half_width: f64,
    centers: Vec<Configuration>,
}

impl Cover {
    pub fn big(&self) -> &Cube {
        &self.big
    }

    pub fn small_half_width(&self) -> f64 {
        self.small_half_width
    }

    /// Non-decreasing centers in lexicographic order.
    pub fn centers(&self) -> &[Configuration] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn small_cube(&self, i: usize) -> Cube {
        Cube::new(self.centers[i].clone(), self.small_half_width).expect("validated width")
    }

    /// Core of the `i`-th small cube relative to the big cube, at depth `ℓ`.
    pub fn core(&self, i: usize, big_set: &SymmetricSet) -> SymmetricSet {
        inner_core(&self.small_cube(i).set(), big_set, self.small_half_width)
            .expect("small cubes of a cover lie inside the big cube")
    }
}

fn check_widths(big: f64, small: f64) -> Result<()> {
    if !(small >= 1.0) || !big.is_finite() {
        return Err(Error::usage(format!("cover widths need 1 <= l <= L, got l={small}, L={big}")));
    }
    if small > big {
        return Err(Error::usage(format!("small width {small} exceeds big width {big}")));
    }
    Ok(())
}

/// Cover of `Λ_L(b)` by `ℓ`-cubes.
///
/// In one dimension `Λ_ℓ(a) ⊆ Λ_L(b)` holds exactly when
/// `‖â − b̂‖∞ <= ⌊L⌋ − ⌊ℓ⌋`, so the centers are enumerated directly.
pub fn make_cover(b: &Configuration, big: f64, small: f64) -> Result<Cover> {
    check_widths(big, small)?;
    let cube = Cube::new(b.clone(), big)?;
    let slack = cube.radius() - small.floor() as i64;
    let bs = rearrange(b);
    let lo: Vec<i64> = bs.coords().iter().map(|c| c - slack).collect();
    let hi: Vec<i64> = bs.coords().iter().map(|c| c + slack).collect();
    let mut centers = Vec::new();
    for_each_non_decreasing(&lo, &hi, |v| {
        centers.push(Configuration::new(v.to_vec()).expect("non-empty"));
    });
    Ok(Cover {
        big: cube,
        small_half_width: small,
        centers,
    })
}

/// Center of a cover cube whose core contains `x`: each coordinate of `x`
/// clipped to within `⌊L⌋ − ⌊ℓ⌋` of `b`.
pub fn truncation_center(x: &Configuration, b: &Configuration, big: f64, small: f64) -> Result<Configuration> {
    check_widths(big, small)?;
    if !x.is_non_decreasing() || !b.is_non_decreasing() {
        return Err(Error::usage("truncation needs non-decreasing configurations"));
    }
    if x.particles() != b.particles() {
        return Err(Error::usage("particle counts differ"));
    }
    let radius = big.floor() as i64;
    if sorted_linf(x.coords(), b.coords()) > radius as u64 {
        return Err(Error::usage(format!("{x} lies outside the cube of half-width {big} around {b}")));
    }
    let slack = radius - small.floor() as i64;
    let coords = x
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(&xj, &bj)| (bj - slack).max(xj.min(bj + slack)))
        .collect();
    Configuration::new(coords)
}
