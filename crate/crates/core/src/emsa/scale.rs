use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{boundary, inner_core, make_cover, rearrange, sorted_linf, Configuration, Cover, Cube, SymmetricSet};
use crate::hamiltonian::{DisorderRealization, Model};
use crate::localization::{certify_cube, CubeCertificate};
use crate::num::Real;
use crate::params::{EmsaConstants, MsaParameters};
use crate::spectral::{eigensystem, sorted_min_distance, Eigensystem};

use super::interactivity::{classify_cube, InteractivityVerdict};

/// One `ℓ`-cube of a cover with its spectral data.
#[derive(Clone, Debug)]
pub struct CoverCube {
    pub center: Configuration,
    pub set: SymmetricSet,
    pub verdict: InteractivityVerdict,
    pub eigensystem: Eigensystem,
    pub certificate: CubeCertificate,
    /// Representatives at distance `>= ℓ^τ̃` from the rest of the big cube.
    pub decay_core: Vec<Configuration>,
    /// Representatives of the exterior boundary inside the big cube.
    pub exterior: Vec<Configuration>,
    /// Number of configurations (all orderings) in the exterior boundary.
    pub exterior_count: usize,
}

impl CoverCube {
    pub fn localizing(&self) -> bool {
        self.certificate.pass
    }
}

/// A big cube `Λ_L`, its cover by `ℓ`-cubes and their eigensystems, all at
/// one disorder realization.
#[derive(Clone, Debug)]
pub struct ScaleAnalysis {
    pub big: Cube,
    pub big_set: SymmetricSet,
    pub cover: Cover,
    pub ell: f64,
    pub mass: f64,
    pub cubes: Vec<CoverCube>,
}

impl ScaleAnalysis {
    /// Diagonalizes and certifies every cover cube at mass `mass`.
    pub fn new(
        big: &Cube,
        ell: f64,
        model: &Model,
        realization: &DisorderRealization,
        params: &MsaParameters,
        mass: f64,
    ) -> Result<Self> {
        let cover = make_cover(big.center(), big.half_width(), ell)?;
        let big_set = big.set();
        let cubes = (0..cover.len())
            .into_par_iter()
            .map(|i| {
                let cube = cover.small_cube(i);
                let set = cube.set();
                let es = eigensystem(&model.hamiltonian(&set, realization)?, None)?;
                let certificate = certify_cube(&es, mass, ell, params.tau);
                let decay_core = inner_core(&set, &big_set, ell.powf(params.tau_tilde()))?
                    .representatives()
                    .cloned()
                    .collect();
                let exterior = boundary(&set, &big_set)?.exterior();
                Ok(CoverCube {
                    decay_core,
                    exterior_count: exterior.len(),
                    exterior: exterior.representatives().cloned().collect(),
                    center: cover.centers()[i].clone(),
                    verdict: classify_cube(cube.center(), ell, &model.interaction),
                    set,
                    eigensystem: es,
                    certificate,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaleAnalysis {
            big: big.clone(),
            big_set,
            cover,
            ell,
            mass,
            cubes,
        })
    }

    pub fn particles(&self) -> usize {
        self.big.particles()
    }

    pub fn big_width(&self) -> f64 {
        self.big.half_width()
    }

    pub fn center_distance(&self, i: usize, j: usize) -> u64 {
        sorted_linf(self.cubes[i].center.coords(), self.cubes[j].center.coords())
    }

    /// Whether `y` lies in the depth-`ℓ` core of the `i`-th cube relative to
    /// the big cube.
    pub fn in_core(&self, i: usize, y: &Configuration) -> bool {
        in_core(y, &self.cubes[i].center, self.ell, &self.big)
    }
}

/// `y ∈ Λ_ℓ(a)` with every point of `Λ_L` closer than `ℓ` to `y` also in
/// `Λ_ℓ(a)`.
pub(crate) fn in_core(y: &Configuration, a: &Configuration, ell: f64, big: &Cube) -> bool {
    let y = rearrange(y);
    let a = rearrange(a);
    let r = ell.floor() as i64;
    if sorted_linf(y.coords(), a.coords()) > r as u64 || !big.contains(&y) {
        return false;
    }
    let reach = ell.ceil() as i64 - 1;
    let b = rearrange(big.center());
    let big_r = big.radius();
    let lo: Vec<i64> = y.coords().iter().zip(b.coords()).map(|(&c, &bc)| (c - reach).max(bc - big_r)).collect();
    let hi: Vec<i64> = y.coords().iter().zip(b.coords()).map(|(&c, &bc)| (c + reach).min(bc + big_r)).collect();
    let mut inside = true;
    crate::geometry::for_each_non_decreasing(&lo, &hi, |z| {
        if inside && sorted_linf(z, a.coords()) > r as u64 {
            inside = false;
        }
    });
    inside
}

/// A pair of regions whose spectra came closer than the separation threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFailure {
    pub first: Configuration,
    pub second: Configuration,
    /// Whether each side is the enlarged region `Λ_{10Nℓ}(a) ∩ Λ_L`.
    pub first_enlarged: bool,
    pub second_enlarged: bool,
    pub distance: Real,
}

/// The three good events of one scale step and what made them fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub partial: bool,
    pub full: bool,
    pub nonresonant: bool,
    pub good: bool,
    pub partial_cubes: usize,
    pub full_pairs: usize,
    pub resonance_pairs: usize,
    pub threshold: Real,
    pub partial_failures: Vec<Configuration>,
    pub full_failures: Vec<(Configuration, Configuration)>,
    pub resonance_failures: Vec<ResonanceFailure>,
}

/// Evaluates the good events on one realization.
///
/// Partially interactive cubes must all localize; fully interactive pairs at
/// distance `>= fi_distance·Nℓ` need one localizing member; pairs at distance
/// `>= nr_distance·N²ℓ` must have separated spectra (threshold `½e^{−L^β}`)
/// for every choice of `Λ_ℓ(a)` or `Λ_{buffer·Nℓ}(a) ∩ Λ_L` on each side.
pub fn evaluate_events(
    scale: &ScaleAnalysis,
    model: &Model,
    realization: &DisorderRealization,
    params: &MsaParameters,
    constants: &EmsaConstants,
) -> Result<EventReport> {
    let n = scale.particles() as f64;
    let ell = scale.ell;
    let cubes = &scale.cubes;

    let partial: Vec<usize> = (0..cubes.len()).filter(|&i| cubes[i].verdict.is_partial()).collect();
    let partial_failures: Vec<Configuration> = partial
        .iter()
        .filter(|&&i| !cubes[i].localizing())
        .map(|&i| cubes[i].center.clone())
        .collect();

    let fi_reach = constants.fi_distance * n * ell;
    let mut full_pairs = 0;
    let mut full_failures = Vec::new();
    for i in 0..cubes.len() {
        if cubes[i].verdict.is_partial() {
            continue;
        }
        for j in i + 1..cubes.len() {
            if cubes[j].verdict.is_partial() || (scale.center_distance(i, j) as f64) < fi_reach {
                continue;
            }
            full_pairs += 1;
            if !cubes[i].localizing() && !cubes[j].localizing() {
                full_failures.push((cubes[i].center.clone(), cubes[j].center.clone()));
            }
        }
    }

    let threshold = params.separation_threshold(scale.big_width());
    let nr_reach = constants.nr_distance * n * n * ell;
    let mut enlarged: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut enlarged_spectrum = |i: usize| -> Result<Vec<f64>> {
        if let Some(s) = enlarged.get(&i) {
            return Ok(s.clone());
        }
        let region = Cube::new(cubes[i].center.clone(), constants.buffer_radius * n * ell)?
            .set()
            .intersection(&scale.big_set);
        let es = eigensystem(&model.hamiltonian(&region, realization)?, None)?;
        let s = es.eigenvalues().to_vec();
        enlarged.insert(i, s.clone());
        Ok(s)
    };
    let mut resonance_pairs = 0;
    let mut resonance_failures = Vec::new();
    for i in 0..cubes.len() {
        for j in i + 1..cubes.len() {
            if (scale.center_distance(i, j) as f64) < nr_reach {
                continue;
            }
            resonance_pairs += 1;
            let sides_i = [cubes[i].eigensystem.eigenvalues().to_vec(), enlarged_spectrum(i)?];
            let sides_j = [cubes[j].eigensystem.eigenvalues().to_vec(), enlarged_spectrum(j)?];
            for (ei, si) in sides_i.iter().enumerate() {
                for (ej, sj) in sides_j.iter().enumerate() {
                    let d = sorted_min_distance(si, sj);
                    if !(d >= threshold) {
                        resonance_failures.push(ResonanceFailure {
                            first: cubes[i].center.clone(),
                            second: cubes[j].center.clone(),
                            first_enlarged: ei == 1,
                            second_enlarged: ej == 1,
                            distance: Real(d),
                        });
                    }
                }
            }
        }
    }

    let (p, f, r) = (partial_failures.is_empty(), full_failures.is_empty(), resonance_failures.is_empty());
    Ok(EventReport {
        partial: p,
        full: f,
        nonresonant: r,
        good: p && f && r,
        partial_cubes: partial.len(),
        full_pairs,
        resonance_pairs,
        threshold: Real(threshold),
        partial_failures,
        full_failures,
        resonance_failures,
    })
}
