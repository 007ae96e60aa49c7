use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

use super::config::{rearrange, sorted_linf, Configuration};

/// Calls `f` on every non-decreasing vector `v` with `lo[j] <= v[j] <= hi[j]`,
/// in lexicographic order.
pub(crate) fn for_each_non_decreasing(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    fn rec(lo: &[i64], hi: &[i64], buf: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        let j = buf.len();
        if j == lo.len() {
            f(buf);
            return;
        }
        let start = match buf.last() {
            Some(&prev) => lo[j].max(prev),
            None => lo[j],
        };
        for v in start..=hi[j] {
            buf.push(v);
            rec(lo, hi, buf, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(lo.len());
    rec(lo, hi, &mut buf, &mut f);
}

/// A set of configurations closed under permutations of the particles.
///
/// Stored by its non-decreasing orbit representatives; the full configuration
/// list is produced on demand by [`SymmetricSet::expand`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricSet {
    particles: usize,
    reps: BTreeSet<Configuration>,
}

impl SymmetricSet {
    pub fn empty(particles: usize) -> Self {
        SymmetricSet {
            particles,
            reps: BTreeSet::new(),
        }
    }

    /// Symmetric closure of the given configurations.
    pub fn from_configurations<'a>(
        particles: usize,
        configs: impl IntoIterator<Item = &'a Configuration>,
    ) -> Result<Self> {
        let mut set = SymmetricSet::empty(particles);
        for c in configs {
            set.insert(c)?;
        }
        Ok(set)
    }

    /// Adds the orbit of `c`. Returns whether the orbit was new.
    pub fn insert(&mut self, c: &Configuration) -> Result<bool> {
        if c.particles() != self.particles {
            return Err(Error::usage(format!(
                "configuration {c} has {} particles, set expects {}",
                c.particles(),
                self.particles
            )));
        }
        Ok(self.reps.insert(rearrange(c)))
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Non-decreasing orbit representatives, in lexicographic order.
    pub fn representatives(&self) -> impl Iterator<Item = &Configuration> + '_ {
        self.reps.iter()
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    /// Number of configurations, counting every ordering.
    pub fn len(&self) -> usize {
        self.reps.iter().map(Configuration::orbit_size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        c.particles() == self.particles && self.reps.contains(&rearrange(c))
    }

    pub fn contains_representative(&self, sorted: &Configuration) -> bool {
        self.reps.contains(sorted)
    }

    /// Every configuration of the set, in lexicographic order.
    pub fn expand(&self) -> Vec<Configuration> {
        let mut all: Vec<Configuration> = self.reps.iter().flat_map(|r| r.permutations()).collect();
        all.sort();
        all
    }

    pub fn index(&self) -> ConfigIndex {
        ConfigIndex::new(self.expand())
    }

    /// `max_j (max x_j − min x_j)` over representatives; `None` when empty.
    pub fn diameter(&self) -> Option<u64> {
        let first = self.reps.iter().next()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for r in &self.reps {
            for (j, &c) in r.coords().iter().enumerate() {
                lo[j] = lo[j].min(c);
                hi[j] = hi[j].max(c);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| a.abs_diff(*b)).max()
    }

    /// Symmetrized distance from `x` to the set; `None` (infinite) when empty.
    pub fn distance_to(&self, x: &Configuration) -> Option<u64> {
        let xs = rearrange(x);
        self.reps
            .iter()
            .map(|r| sorted_linf(r.coords(), xs.coords()))
            .min()
    }

    /// Symmetrized distance between two sets; `None` when either is empty.
    pub fn set_distance(&self, other: &SymmetricSet) -> Option<u64> {
        self.reps
            .iter()
            .filter_map(|r| other.distance_to(r))
            .min()
    }

    pub fn is_subset(&self, other: &SymmetricSet) -> bool {
        self.particles == other.particles && self.reps.is_subset(&other.reps)
    }

    pub fn difference(&self, other: &SymmetricSet) -> SymmetricSet {
        SymmetricSet {
            particles: self.particles,
            reps: self.reps.difference(&other.reps).cloned().collect(),
        }
    }

    pub fn union(&self, other: &SymmetricSet) -> SymmetricSet {
        SymmetricSet {
            particles: self.particles,
            reps: self.reps.union(&other.reps).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &SymmetricSet) -> SymmetricSet {
        SymmetricSet {
            particles: self.particles,
            reps: self.reps.intersection(&other.reps).cloned().collect(),
        }
    }

    /// Keeps the orbits whose representative satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Configuration) -> bool) -> SymmetricSet {
        SymmetricSet {
            particles: self.particles,
            reps: self.reps.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}

/// Dense numbering of the configurations of a set.
#[derive(Clone, Debug)]
pub struct ConfigIndex {
    configs: Vec<Configuration>,
    sorted: Vec<Configuration>,
    lookup: HashMap<Configuration, usize>,
}

impl ConfigIndex {
    pub fn new(configs: Vec<Configuration>) -> Self {
        let lookup = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let sorted = configs.iter().map(rearrange).collect();
        ConfigIndex {
            configs,
            sorted,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn get(&self, i: usize) -> &Configuration {
        &self.configs[i]
    }

    /// Non-decreasing rearrangement of the `i`-th configuration.
    pub fn sorted(&self, i: usize) -> &Configuration {
        &self.sorted[i]
    }

    pub fn position(&self, c: &Configuration) -> Option<usize> {
        self.lookup.get(c).copied()
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }
}

/// The symmetrized ball `{y : d_S(y, center) <= half_width}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube {
    center: Configuration,
    half_width: f64,
}

impl Cube {
    pub fn new(center: Configuration, half_width: f64) -> Result<Self> {
        if !half_width.is_finite() || half_width < 0.0 {
            return Err(Error::usage(format!(
                "cube half-width must be finite and non-negative, got {half_width}"
            )));
        }
        Ok(Cube { center, half_width })
    }

    pub fn center(&self) -> &Configuration {
        &self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn particles(&self) -> usize {
        self.center.particles()
    }

    /// Integer radius `⌊L⌋`.
    pub fn radius(&self) -> i64 {
        self.half_width.floor() as i64
    }

    pub fn contains(&self, y: &Configuration) -> bool {
        y.particles() == self.particles()
            && sorted_linf(rearrange(y).coords(), rearrange(&self.center).coords())
                <= self.radius() as u64
    }

    pub fn set(&self) -> SymmetricSet {
        enumerate_cube(self)
    }
}

/// All configurations of the cube, stored by orbit representatives.
pub fn enumerate_cube(cube: &Cube) -> SymmetricSet {
    let c = rearrange(cube.center());
    let r = cube.radius();
    let lo: Vec<i64> = c.coords().iter().map(|x| x - r).collect();
    let hi: Vec<i64> = c.coords().iter().map(|x| x + r).collect();
    let mut set = SymmetricSet::empty(cube.particles());
    for_each_non_decreasing(&lo, &hi, |v| {
        set.reps.insert(Configuration::new(v.to_vec()).expect("non-empty"));
    });
    set
}

/// Sites occupied by at least one particle of at least one configuration.
pub fn project_sites(set: &SymmetricSet) -> BTreeSet<i64> {
    set.representatives()
        .flat_map(|r| r.coords().iter().copied())
        .collect()
}

/// Number of particles of `x` on `site`.
pub fn number_at(site: i64, x: &Configuration) -> usize {
    x.number_at(site)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sym_distance;
    use proptest::prelude::*;

    /// Brute-force cube: scan every ordered configuration in a bounding box.
    fn brute_cube(center: &Configuration, radius: i64) -> BTreeSet<Configuration> {
        let n = center.particles();
        let lo = center.coords().iter().min().unwrap() - radius;
        let hi = center.coords().iter().max().unwrap() + radius;
        let width = (hi - lo + 1) as usize;
        let mut out = BTreeSet::new();
        for code in 0..width.pow(n as u32) {
            let mut rest = code;
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(lo + (rest % width) as i64);
                rest /= width;
            }
            let y = Configuration::new(v).unwrap();
            if sym_distance(&y, center).unwrap() <= radius as u64 {
                out.insert(y);
            }
        }
        out
    }

    #[test]
    fn two_particle_cube() {
        let cube = Cube::new([0, 0].into(), 1.0).unwrap();
        let set = cube.set();
        // Non-decreasing pairs in [-1,1]^2: 6 orbits, 9 ordered configurations.
        assert_eq!(set.orbit_count(), 6);
        assert_eq!(set.len(), 9);
        assert_eq!(set.diameter(), Some(2));
    }

    #[test]
    fn fractional_half_width_floors() {
        let a = Cube::new([3].into(), 2.9).unwrap().set();
        let b = Cube::new([3].into(), 2.0).unwrap().set();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn bad_half_width() {
        assert!(Cube::new([0].into(), -1.0).is_err());
        assert!(Cube::new([0].into(), f64::NAN).is_err());
    }

    #[test]
    fn projections_and_occupation() {
        let set = Cube::new([5, 1].into(), 1.0).unwrap().set();
        let sites: Vec<i64> = project_sites(&set).into_iter().collect();
        assert_eq!(sites, vec![0, 1, 2, 4, 5, 6]);
        assert_eq!(number_at(2, &[2, 2, 5].into()), 2);
    }

    #[test]
    fn set_distance_of_separated_cubes() {
        let a = Cube::new([0, 0].into(), 1.0).unwrap().set();
        let b = Cube::new([10, 10].into(), 2.0).unwrap().set();
        assert_eq!(a.set_distance(&b), Some(7));
        assert_eq!(a.set_distance(&SymmetricSet::empty(2)), None);
    }

    #[test]
    fn index_roundtrip() {
        let idx = Cube::new([1, 4].into(), 1.0).unwrap().set().index();
        for i in 0..idx.len() {
            assert_eq!(idx.position(idx.get(i)), Some(i));
        }
        assert!(idx.configurations().windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn enumeration_matches_brute_force(
            center in proptest::collection::vec(-3i64..3, 1..4),
            half in 0.0f64..2.5,
        ) {
            let c = Configuration::new(center).unwrap();
            let cube = Cube::new(c.clone(), half).unwrap();
            let expanded: BTreeSet<_> = cube.set().expand().into_iter().collect();
            prop_assert_eq!(expanded, brute_cube(&c, cube.radius()));
        }

        #[test]
        fn membership_is_permutation_invariant(
            center in proptest::collection::vec(-3i64..3, 2..4),
            y in proptest::collection::vec(-5i64..5, 4),
        ) {
            let n = center.len();
            let cube = Cube::new(Configuration::new(center).unwrap(), 1.5).unwrap();
            let set = cube.set();
            let y = Configuration::new(y[..n].to_vec()).unwrap();
            for p in y.permutations() {
                prop_assert_eq!(set.contains(&p), set.contains(&y));
                prop_assert_eq!(cube.contains(&p), set.contains(&y));
            }
        }
    }
}
