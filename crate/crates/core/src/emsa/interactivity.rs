use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{project_sites, rearrange, sym_distance, Configuration, Cube};
use crate::hamiltonian::InteractionPotential;

/// Whether the particles of a cube split into two groups that never come
/// within interaction range of each other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractivityVerdict {
    FullyInteractive,
    /// Every configuration of the cube has `n1` particles in `s1` and `n2` in
    /// `s2`, with `dist(s1, s2) >= C_U`.
    PartiallyInteractive {
        n1: usize,
        n2: usize,
        s1: BTreeSet<i64>,
        s2: BTreeSet<i64>,
    },
}

impl InteractivityVerdict {
    pub fn is_partial(&self) -> bool {
        matches!(self, InteractivityVerdict::PartiallyInteractive { .. })
    }
}

/// Classifies `Λ_L(center)`.
///
/// Each particle of the sorted center sweeps the window `[x̂_j − ⌊L⌋, x̂_j + ⌊L⌋]`.
/// Consecutive windows closer than `C_U` are chained together; a single chain
/// means fully interactive. Otherwise the first chain is `S1` and the others
/// form `S2`.
pub fn classify_cube(center: &Configuration, half_width: f64, interaction: &InteractionPotential) -> InteractivityVerdict {
    let x = rearrange(center);
    let r = half_width.floor() as i64;
    let reach = interaction.range() as i64;
    let windows: Vec<(i64, i64)> = x.coords().iter().map(|&c| (c - r, c + r)).collect();
    let split = (1..windows.len()).find(|&j| windows[j].0 - windows[j - 1].1 >= reach);
    let Some(split) = split else {
        return InteractivityVerdict::FullyInteractive;
    };
    let sites = |ws: &[(i64, i64)]| ws.iter().flat_map(|&(a, b)| a..=b).collect::<BTreeSet<i64>>();
    InteractivityVerdict::PartiallyInteractive {
        n1: split,
        n2: windows.len() - split,
        s1: sites(&windows[..split]),
        s2: sites(&windows[split..]),
    }
}

/// Outcome of comparing the single-particle footprints of two cubes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionVerdict {
    pub disjoint: bool,
    pub distance: u64,
    /// `L > C_U` and `d_S >= 8NL`: the situation in which disjointness is
    /// guaranteed.
    pub hypothesis_met: bool,
}

/// Tests whether two fully interactive cubes of equal width occupy disjoint
/// sites.
pub fn disjoint_projection_check(
    first: &Cube,
    second: &Cube,
    interaction: &InteractionPotential,
) -> Result<ProjectionVerdict> {
    if first.particles() != second.particles() {
        return Err(Error::usage("cubes have different particle numbers"));
    }
    if first.half_width() != second.half_width() {
        return Err(Error::usage("cubes have different widths"));
    }
    for cube in [first, second] {
        if classify_cube(cube.center(), cube.half_width(), interaction).is_partial() {
            return Err(Error::usage(format!(
                "cube around {} is partially interactive",
                cube.center()
            )));
        }
    }
    let distance = sym_distance(first.center(), second.center())?;
    let a = project_sites(&first.set());
    let b = project_sites(&second.set());
    let n = first.particles() as f64;
    let l = first.half_width();
    Ok(ProjectionVerdict {
        disjoint: a.is_disjoint(&b),
        distance,
        hypothesis_met: l > interaction.range() as f64 && distance as f64 >= 8.0 * n * l,
    })
}
