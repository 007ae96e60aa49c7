use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{boundary, for_each_non_decreasing, rearrange, sorted_linf, truncation_center, Configuration, Cover, SymmetricSet};
use crate::params::EmsaConstants;

use super::scale::in_core;

/// A bad region `Υ = Λ_{10Nℓ}(b) ∩ Λ_L` with the good cubes sheltering it.
#[derive(Clone, Debug, Serialize)]
pub struct BufferedCube {
    pub center: Configuration,
    #[serde(skip)]
    pub upsilon: SymmetricSet,
    /// Cover indices of the centers `a` with `8Nℓ <= d_S(a, b) <= 12Nℓ`.
    pub shelter: Vec<usize>,
    /// `{v ∈ Λ_L : d_S(v, Υ) <= 2Nℓ}`.
    #[serde(skip)]
    pub fattened: SymmetricSet,
    /// Whether `Υ` is strictly smaller than the big cube.
    pub proper: bool,
    pub size: usize,
}

/// Builds the buffered cube around the cover center `b` and checks that its
/// interior boundary lies in the cores of the sheltering cubes.
pub fn build_buffered(cover: &Cover, b: &Configuration, constants: &EmsaConstants) -> Result<BufferedCube> {
    let b = rearrange(b);
    if cover.centers().binary_search(&b).is_err() {
        return Err(Error::usage(format!("{b} is not a center of the cover")));
    }
    let big = cover.big();
    let big_set = big.set();
    let ell = cover.small_half_width();
    let n = big.particles() as f64;
    let unit = n * ell;
    let center = rearrange(big.center());
    let (radius, big_r) = ((constants.buffer_radius * unit).floor() as i64, big.radius());

    // Both constraints act coordinatewise on non-decreasing vectors.
    let lo: Vec<i64> = b.coords().iter().zip(center.coords()).map(|(&x, &c)| (x - radius).max(c - big_r)).collect();
    let hi: Vec<i64> = b.coords().iter().zip(center.coords()).map(|(&x, &c)| (x + radius).min(c + big_r)).collect();
    let mut reps = Vec::new();
    for_each_non_decreasing(&lo, &hi, |v| reps.push(Configuration::new(v.to_vec()).expect("non-empty")));
    let upsilon = SymmetricSet::from_configurations(big.particles(), &reps)?;

    let fat = (constants.fattening * unit).floor() as i64;
    let fattened = big_set.filter(|v| {
        v.coords()
            .iter()
            .enumerate()
            .all(|(j, &x)| x >= lo[j] - fat && x <= hi[j] + fat)
    });

    let shelter: Vec<usize> = (0..cover.len())
        .filter(|&i| {
            let d = sorted_linf(cover.centers()[i].coords(), b.coords()) as f64;
            d >= constants.shelter_lo * unit && d <= constants.shelter_hi * unit
        })
        .collect();

    for y in boundary(&upsilon, &big_set)?.interior().representatives() {
        let near = truncation_center(y, &center, big.half_width(), ell)?;
        let sheltered = |i: usize| in_core(y, &cover.centers()[i], ell, big);
        let fast = cover
            .centers()
            .binary_search(&near)
            .ok()
            .is_some_and(|i| shelter.binary_search(&i).is_ok() && sheltered(i));
        if !fast && !shelter.iter().any(|&i| sheltered(i)) {
            return Err(Error::internal(format!(
                "boundary point {y} of the buffer around {b} is not in any sheltering core"
            )));
        }
    }

    Ok(BufferedCube {
        proper: upsilon.orbit_count() < big_set.orbit_count(),
        size: upsilon.len(),
        center: b,
        upsilon,
        shelter,
        fattened,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cover, Cube};

    fn direct_upsilon(cover: &Cover, b: &Configuration, radius: f64) -> SymmetricSet {
        Cube::new(b.clone(), radius).unwrap().set().intersection(&cover.big().set())
    }

    #[test]
    fn small_scale_buffer_fills_the_cube() {
        let cover = make_cover(&[0, 0].into(), 8.0, 4.0).unwrap();
        let buf = build_buffered(&cover, &[0, 0].into(), &EmsaConstants::default()).unwrap();
        assert!(!buf.proper);
        assert!(buf.shelter.is_empty());
        assert_eq!(buf.upsilon, cover.big().set());
    }

    #[test]
    fn one_particle_long_line() {
        let cover = make_cover(&[0].into(), 50.0, 2.0).unwrap();
        for b in [-3, 0, 5] {
            let b: Configuration = [b].into();
            let buf = build_buffered(&cover, &b, &EmsaConstants::default()).unwrap();
            assert!(buf.proper);
            assert_eq!(buf.upsilon, direct_upsilon(&cover, &b, 20.0));
            assert!(!buf.shelter.is_empty());
            let fat = Cube::new(b.clone(), 24.0).unwrap().set().intersection(&cover.big().set());
            assert_eq!(buf.fattened, fat);
        }
    }

    #[test]
    fn two_particles() {
        let cover = make_cover(&[0, 0].into(), 60.0, 2.0).unwrap();
        for b in [[0, 0], [-5, 3], [10, 12]] {
            let b: Configuration = b.into();
            let buf = build_buffered(&cover, &b, &EmsaConstants::default()).unwrap();
            assert!(buf.proper);
            assert_eq!(buf.upsilon, direct_upsilon(&cover, &b, 40.0));
            // Fattening by 2Nℓ = 8, checked by distances.
            for v in cover.big().set().representatives() {
                let near = buf.upsilon.distance_to(v).unwrap() <= 8;
                assert_eq!(buf.fattened.contains(v), near, "{v}");
            }
        }
    }

    #[test]
    fn center_must_be_in_cover() {
        let cover = make_cover(&[0].into(), 10.0, 2.0).unwrap();
        assert!(build_buffered(&cover, &[9].into(), &EmsaConstants::default()).is_err());
    }
}
