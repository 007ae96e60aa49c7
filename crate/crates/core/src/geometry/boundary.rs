use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::config::{sorted_linf, Configuration};
use super::set::{for_each_non_decreasing, SymmetricSet};

/// Pairs `(u, v)` with `u ∈ Φ`, `v ∈ Θ∖Φ` and `d_S(u, v) = 1`.
///
/// Edges are stored between orbit representatives; every ordering of either
/// endpoint is also an edge since the distance is permutation invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryEdgeSet {
    particles: usize,
    edges: BTreeSet<(Configuration, Configuration)>,
}

impl BoundaryEdgeSet {
    /// Edges between orbit representatives, inner endpoint first.
    pub fn representative_edges(&self) -> impl Iterator<Item = &(Configuration, Configuration)> {
        self.edges.iter()
    }

    /// Number of representative-level edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Every ordered edge `(u, v)`.
    pub fn expanded_edges(&self) -> Vec<(Configuration, Configuration)> {
        let mut out = Vec::new();
        for (u, v) in &self.edges {
            let vs = v.permutations();
            for pu in u.permutations() {
                for pv in &vs {
                    out.push((pu.clone(), pv.clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Endpoints outside `Φ`.
    pub fn exterior(&self) -> SymmetricSet {
        let mut s = SymmetricSet::empty(self.particles);
        for (_, v) in &self.edges {
            s.insert(v).expect("particle count checked on construction");
        }
        s
    }

    /// Endpoints inside `Φ`.
    pub fn interior(&self) -> SymmetricSet {
        let mut s = SymmetricSet::empty(self.particles);
        for (u, _) in &self.edges {
            s.insert(u).expect("particle count checked on construction");
        }
        s
    }
}

fn check_nested(phi: &SymmetricSet, theta: &SymmetricSet) -> Result<()> {
    if phi.particles() != theta.particles() {
        return Err(Error::usage("inner and outer sets have different particle counts"));
    }
    if !phi.is_subset(theta) {
        return Err(Error::usage("inner set is not contained in the outer set"));
    }
    Ok(())
}

/// Boundary of `phi` relative to `theta`.
pub fn boundary(phi: &SymmetricSet, theta: &SymmetricSet) -> Result<BoundaryEdgeSet> {
    check_nested(phi, theta)?;
    let mut edges = BTreeSet::new();
    for u in phi.representatives() {
        let lo: Vec<i64> = u.coords().iter().map(|c| c - 1).collect();
        let hi: Vec<i64> = u.coords().iter().map(|c| c + 1).collect();
        for_each_non_decreasing(&lo, &hi, |v| {
            if sorted_linf(u.coords(), v) != 1 {
                return;
            }
            let v = Configuration::new(v.to_vec()).expect("non-empty");
            if theta.contains_representative(&v) && !phi.contains_representative(&v) {
                edges.insert((u.clone(), v));
            }
        });
    }
    Ok(BoundaryEdgeSet {
        particles: phi.particles(),
        edges,
    })
}

/// `{x ∈ Φ : d_S(x, Θ∖Φ) >= r}`; the distance to an empty set is infinite.
pub fn inner_core(phi: &SymmetricSet, theta: &SymmetricSet, r: f64) -> Result<SymmetricSet> {
    check_nested(phi, theta)?;
    let rest = theta.difference(phi);
    Ok(phi.filter(|x| match rest.distance_to(x) {
        Some(d) => d as f64 >= r,
        None => true,
    }))
}
