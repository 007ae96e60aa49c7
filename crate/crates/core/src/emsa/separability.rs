use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{project_sites, Configuration, SymmetricSet};

/// How a separability witness was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// A connected component of the windows around two reference points.
    Components,
    /// Search over intervals of occupied sites.
    IntervalSearch,
}

/// A site set `S` holding exactly `n1` particles of every configuration of
/// the first set and `n2 != n1` of every configuration of the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakSeparabilityWitness {
    pub sites: BTreeSet<i64>,
    pub n1: usize,
    pub n2: usize,
    pub method: WitnessMethod,
}

fn occupation(x: &Configuration, sites: &BTreeSet<i64>) -> usize {
    x.coords().iter().filter(|c| sites.contains(c)).count()
}

/// The common occupation of `sites` over the set, if it is constant.
fn constant_occupation(set: &SymmetricSet, sites: &BTreeSet<i64>) -> Option<usize> {
    let mut reps = set.representatives();
    let first = occupation(reps.next()?, sites);
    reps.all(|r| occupation(r, sites) == first).then_some(first)
}

fn verified(theta1: &SymmetricSet, theta2: &SymmetricSet, sites: BTreeSet<i64>, method: WitnessMethod) -> Option<WeakSeparabilityWitness> {
    let n1 = constant_occupation(theta1, &sites)?;
    let n2 = constant_occupation(theta2, &sites)?;
    (n1 != n2).then_some(WeakSeparabilityWitness { sites, n1, n2, method })
}

/// Overlap components of the windows `[c − r, c + r]` over all coordinates of `a`
/// and `b`, as `(first, last)` site pairs.
fn window_components(a: &Configuration, b: &Configuration, r: i64) -> Vec<(i64, i64)> {
    let mut centers: Vec<i64> = a.coords().iter().chain(b.coords()).copied().collect();
    centers.sort_unstable();
    let mut out: Vec<(i64, i64)> = Vec::new();
    for c in centers {
        match out.last_mut() {
            Some(last) if c - r <= last.1 => last.1 = c + r,
            _ => out.push((c - r, c + r)),
        }
    }
    out
}

/// Finds a region occupied by constant but different particle numbers on
/// `theta1` and `theta2`.
///
/// First tries the component construction around the first representative of
/// each set, with windows of half-width `max diam`. When that does not
/// produce a valid witness, intervals of occupied sites are searched,
/// preferring the largest `n1 + n2`, then the fewest sites, then the leftmost.
/// Returns an internal error if the sets are at least `8N·max diam` apart and
/// the construction fails, since that cannot happen for correct geometry.
pub fn weak_separability(theta1: &SymmetricSet, theta2: &SymmetricSet) -> Result<Option<WeakSeparabilityWitness>> {
    if theta1.particles() != theta2.particles() {
        return Err(Error::usage("sets have different particle numbers"));
    }
    let (Some(a), Some(b)) = (theta1.representatives().next(), theta2.representatives().next()) else {
        return Err(Error::usage("weak separability needs non-empty sets"));
    };
    let diam = theta1.diameter().unwrap_or(0).max(theta2.diameter().unwrap_or(0));
    let far = theta1
        .set_distance(theta2)
        .is_some_and(|d| d >= 8 * theta1.particles() as u64 * diam && d > 0);

    for (lo, hi) in window_components(a, b, diam as i64) {
        let sites: BTreeSet<i64> = (lo..=hi).collect();
        if occupation(a, &sites) == occupation(b, &sites) {
            continue;
        }
        if let Some(w) = verified(theta1, theta2, sites, WitnessMethod::Components) {
            return Ok(Some(w));
        }
        if far {
            return Err(Error::internal(format!(
                "component [{lo}, {hi}] around {a} and {b} has non-constant occupation"
            )));
        }
        break;
    }
    if far {
        return Err(Error::internal(format!("no separating component around {a} and {b}")));
    }

    let occupied: Vec<i64> = project_sites(theta1).union(&project_sites(theta2)).copied().collect();
    let mut best: Option<(usize, usize, WeakSeparabilityWitness)> = None;
    for i in 0..occupied.len() {
        for j in i..occupied.len() {
            let sites: BTreeSet<i64> = occupied[i..=j].iter().copied().collect();
            let Some(w) = verified(theta1, theta2, sites, WitnessMethod::IntervalSearch) else {
                continue;
            };
            let (total, size) = (w.n1 + w.n2, j - i + 1);
            let better = match &best {
                None => true,
                Some((t, s, _)) => total > *t || (total == *t && size < *s),
            };
            if better {
                best = Some((total, size, w));
            }
        }
    }
    Ok(best.map(|(_, _, w)| w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sym_distance, Cube};
    use crate::rng::CounterRng;

    fn cube(c: &[i64], l: f64) -> SymmetricSet {
        Cube::new(Configuration::new(c.to_vec()).unwrap(), l).unwrap().set()
    }

    fn check(w: &WeakSeparabilityWitness, t1: &SymmetricSet, t2: &SymmetricSet) {
        assert_ne!(w.n1, w.n2);
        for x in t1.expand() {
            assert_eq!(occupation(&x, &w.sites), w.n1);
        }
        for y in t2.expand() {
            assert_eq!(occupation(&y, &w.sites), w.n2);
        }
    }

    #[test]
    fn definition_example() {
        let t1 = cube(&[4, 1], 1.0);
        let t2 = cube(&[4, 4], 1.0);
        let w = weak_separability(&t1, &t2).unwrap().unwrap();
        assert_eq!(w.sites, [3, 4, 5].into());
        assert_eq!((w.n1, w.n2), (1, 2));
        check(&w, &t1, &t2);
    }

    #[test]
    fn identical_sets_have_no_witness() {
        let t = cube(&[0, 3], 1.0);
        assert_eq!(weak_separability(&t, &t).unwrap(), None);
    }

    #[test]
    fn far_pairs_use_the_construction() {
        let mut rng = CounterRng::new(11);
        let mut trials = 0;
        while trials < 200 {
            let n = rng.range_i64(1, 3) as usize;
            let l = rng.range_i64(0, 2) as f64;
            let a: Vec<i64> = (0..n).map(|_| rng.range_i64(-30, 30)).collect();
            let b: Vec<i64> = (0..n).map(|_| rng.range_i64(-30, 30)).collect();
            let (t1, t2) = (cube(&a, l), cube(&b, l));
            let diam = t1.diameter().unwrap().max(t2.diameter().unwrap());
            let d = t1.set_distance(&t2).unwrap();
            if d < 8 * n as u64 * diam || d == 0 {
                continue;
            }
            trials += 1;
            let w = weak_separability(&t1, &t2).unwrap().expect("lemma hypothesis holds");
            assert_eq!(w.method, WitnessMethod::Components);
            check(&w, &t1, &t2);
        }
    }

    #[test]
    fn returned_witnesses_reverify() {
        let mut rng = CounterRng::new(5);
        for _ in 0..150 {
            let n = rng.range_i64(1, 3) as usize;
            let a: Vec<i64> = (0..n).map(|_| rng.range_i64(-6, 6)).collect();
            let b: Vec<i64> = (0..n).map(|_| rng.range_i64(-6, 6)).collect();
            let (t1, t2) = (cube(&a, 1.0), cube(&b, 1.0));
            if let Some(w) = weak_separability(&t1, &t2).unwrap() {
                check(&w, &t1, &t2);
            }
            let ca = Configuration::new(a).unwrap();
            let cb = Configuration::new(b).unwrap();
            if sym_distance(&ca, &cb).unwrap() == 0 {
                assert!(weak_separability(&t1, &t2).unwrap().is_none());
            }
        }
    }

    #[test]
    fn mismatched_inputs() {
        assert!(weak_separability(&cube(&[0], 1.0), &cube(&[0, 0], 1.0)).is_err());
        assert!(weak_separability(&SymmetricSet::empty(1), &cube(&[0], 1.0)).is_err());
    }
}
