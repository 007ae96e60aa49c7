use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positions of `N >= 1` particles on the integer line.
///
/// Particle order matters for the configuration itself but not for the
/// symmetrized distance or for anything defined through [`rearrange`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Configuration(Vec<i64>);

impl Configuration {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::usage("a configuration needs at least one particle"));
        }
        Ok(Configuration(coords))
    }

    pub fn particles(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Number of particles sitting on `site`.
    pub fn number_at(&self, site: i64) -> usize {
        self.0.iter().filter(|&&c| c == site).count()
    }

    pub fn l1_distance(&self, other: &Configuration) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    pub fn linf_distance(&self, other: &Configuration) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    /// All distinct reorderings, in lexicographic order.
    pub fn permutations(&self) -> Vec<Configuration> {
        let mut current = self.0.clone();
        current.sort_unstable();
        let mut out = vec![Configuration(current.clone())];
        while next_permutation(&mut current) {
            out.push(Configuration(current.clone()));
        }
        out
    }

    /// Number of distinct reorderings.
    pub fn orbit_size(&self) -> usize {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        let mut total: u128 = 1;
        let mut run = 0u128;
        for (i, c) in sorted.iter().enumerate() {
            run = if i > 0 && sorted[i - 1] == *c { run + 1 } else { 1 };
            total = total * (i as u128 + 1) / run;
        }
        total as usize
    }
}

impl<const K: usize> From<[i64; K]> for Configuration {
    fn from(coords: [i64; K]) -> Self {
        assert!(K > 0, "a configuration needs at least one particle");
        Configuration(coords.to_vec())
    }
}

impl TryFrom<Vec<i64>> for Configuration {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        Configuration::new(coords)
    }
}

impl From<Configuration> for Vec<i64> {
    fn from(c: Configuration) -> Self {
        c.0
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn next_permutation(v: &mut [i64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Non-decreasing rearrangement.
pub fn rearrange(x: &Configuration) -> Configuration {
    let mut c = x.0.clone();
    c.sort_unstable();
    Configuration(c)
}

/// Max-norm distance between already sorted coordinate vectors.
pub(crate) fn sorted_linf(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.abs_diff(*q))
        .max()
        .unwrap_or(0)
}

/// Symmetrized distance: the max-norm distance between the rearrangements.
///
/// Equals the minimum of `‖x − πy‖∞` over all permutations `π`.
pub fn sym_distance(x: &Configuration, y: &Configuration) -> Result<u64> {
    if x.particles() != y.particles() {
        return Err(Error::usage(format!(
            "particle counts differ: {} vs {}",
            x.particles(),
            y.particles()
        )));
    }
    Ok(sorted_linf(rearrange(x).coords(), rearrange(y).coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn min_over_permutations(x: &Configuration, y: &Configuration) -> u64 {
        y.permutations()
            .iter()
            .map(|p| x.linf_distance(p))
            .min()
            .unwrap()
    }

    #[test]
    fn worked_examples() {
        let d = |a: Configuration, b: Configuration| sym_distance(&a, &b).unwrap();
        assert_eq!(d([4, 1].into(), [1, 4].into()), 0);
        assert_eq!(d([4, 1].into(), [4, 4].into()), 3);
        assert_eq!(d([0, 5, 2].into(), [6, 1, 3].into()), 1);
    }

    #[test]
    fn mismatched_particle_counts() {
        let r = sym_distance(&[1].into(), &[1, 2].into());
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn empty_configuration_rejected() {
        assert!(Configuration::new(vec![]).is_err());
        assert!(serde_json::from_str::<Configuration>("[]").is_err());
    }

    #[test]
    fn permutations_are_distinct() {
        let c: Configuration = [2, 1, 2].into();
        let p = c.permutations();
        assert_eq!(p.len(), 3);
        assert_eq!(c.orbit_size(), 3);
        assert_eq!(Configuration::from([1, 2, 3, 4]).orbit_size(), 24);
        assert_eq!(Configuration::from([7, 7]).orbit_size(), 1);
    }

    proptest! {
        #[test]
        fn agrees_with_permutation_minimum(
            x in proptest::collection::vec(-6i64..6, 1..5),
            seed in proptest::collection::vec(-6i64..6, 5),
        ) {
            let n = x.len();
            let x = Configuration::new(x).unwrap();
            let y = Configuration::new(seed[..n].to_vec()).unwrap();
            prop_assert_eq!(sym_distance(&x, &y).unwrap(), min_over_permutations(&x, &y));
        }

        #[test]
        fn metric_axioms(
            a in proptest::collection::vec(-8i64..8, 3),
            b in proptest::collection::vec(-8i64..8, 3),
            c in proptest::collection::vec(-8i64..8, 3),
        ) {
            let (a, b, c) = (
                Configuration::new(a).unwrap(),
                Configuration::new(b).unwrap(),
                Configuration::new(c).unwrap(),
            );
            let d = |p: &Configuration, q: &Configuration| sym_distance(p, q).unwrap();
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
            prop_assert_eq!(d(&a, &b) == 0, rearrange(&a) == rearrange(&b));
        }

        #[test]
        fn permutation_count_matches_orbit_size(x in proptest::collection::vec(-2i64..2, 1..6)) {
            let c = Configuration::new(x).unwrap();
            prop_assert_eq!(c.permutations().len(), c.orbit_size());
        }
    }
}
