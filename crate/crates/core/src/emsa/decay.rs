use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{boundary, sorted_linf, ConfigIndex, Configuration, SymmetricSet};
use crate::num::Real;
use crate::params::{EmsaConstants, MsaParameters};
use crate::spectral::Eigensystem;

use super::buffered::BufferedCube;
use super::scale::ScaleAnalysis;

/// Absolute slack added to every decay inequality.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Orbit-wise summary of a vector on a symmetric set: the largest entry and
/// the squared norm over each permutation orbit.
#[derive(Clone, Debug)]
pub struct Amplitudes {
    peak: HashMap<Configuration, f64>,
    weight: HashMap<Configuration, f64>,
    residual: f64,
}

impl Amplitudes {
    pub fn new(psi: &[f64], index: &ConfigIndex) -> Self {
        let mut peak: HashMap<Configuration, f64> = HashMap::new();
        let mut weight: HashMap<Configuration, f64> = HashMap::new();
        for (i, v) in psi.iter().enumerate() {
            let rep = index.sorted(i);
            let p = peak.entry(rep.clone()).or_insert(0.0);
            *p = p.max(v.abs());
            *weight.entry(rep.clone()).or_insert(0.0) += v * v;
        }
        Amplitudes {
            peak,
            weight,
            residual: 0.0,
        }
    }

    /// Records `‖Hψ − μψ‖`, which widens the tolerance of every check by
    /// `residual / η`.
    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = residual;
        self
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max |ψ|` over the orbit of a non-decreasing representative.
    pub fn peak(&self, rep: &Configuration) -> f64 {
        self.peak.get(rep).copied().unwrap_or(0.0)
    }

    /// `‖ψ‖` restricted to a symmetric set.
    pub fn norm_on(&self, set: &SymmetricSet) -> f64 {
        set.representatives()
            .map(|r| self.weight.get(r).copied().unwrap_or(0.0))
            .sum::<f64>()
            .sqrt()
    }

    /// Representative with the largest peak; ties go to the smallest.
    pub fn argmax<'a>(&self, reps: impl IntoIterator<Item = &'a Configuration>) -> Option<Configuration> {
        let mut best: Option<(&Configuration, f64)> = None;
        for r in reps {
            let p = self.peak(r);
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((r, p));
            }
        }
        best.map(|(r, _)| r.clone())
    }

    fn tolerance(&self, eta: f64) -> f64 {
        NOISE_FLOOR + self.residual / eta
    }
}

/// Outcome of one conditional inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecayCheck {
    NotApplicable { reason: &'static str },
    /// `margin` is `min ln((rhs + tol) / lhs)`; it is non-negative exactly
    /// when the check passes.
    Checked { pass: bool, margin: Real, points: usize },
}

impl DecayCheck {
    pub fn applicable(&self) -> bool {
        matches!(self, DecayCheck::Checked { .. })
    }

    pub fn passed(&self) -> Option<bool> {
        match self {
            DecayCheck::Checked { pass, .. } => Some(*pass),
            DecayCheck::NotApplicable { .. } => None,
        }
    }
}

fn not_applicable(reason: &'static str) -> Result<DecayCheck> {
    Ok(DecayCheck::NotApplicable { reason })
}

struct Tally {
    pass: bool,
    margin: f64,
    points: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            pass: true,
            margin: f64::INFINITY,
            points: 0,
        }
    }

    fn add(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.points += 1;
        if lhs > rhs + tol {
            self.pass = false;
        }
        if lhs > 0.0 {
            self.margin = self.margin.min(((rhs + tol) / lhs).ln());
        }
    }

    fn finish(self) -> Result<DecayCheck> {
        Ok(DecayCheck::Checked {
            pass: self.pass,
            margin: Real(self.margin),
            points: self.points,
        })
    }
}

/// Checks `|ψ(y)| <= max_v e^{−m′ d_S(y, v)} |ψ(v)|` for `y` in the depth
/// `ℓ^τ̃` core of the `i`-th cover cube and `v` on its exterior boundary,
/// with `m′ = m (1 − 3ℓ^{−(1−τ)/2})`.
///
/// `ψ` is an eigenvector of the big cube with eigenvalue `mu`. The check
/// applies when the small cube is localizing, `mu` is at least `½e^{−L^β}`
/// from its spectrum and `ℓ >= ell_min`.
pub fn verify_local_decay(
    amp: &Amplitudes,
    mu: f64,
    scale: &ScaleAnalysis,
    i: usize,
    params: &MsaParameters,
    constants: &EmsaConstants,
) -> Result<DecayCheck> {
    let cube = scale.cubes.get(i).ok_or_else(|| Error::usage(format!("no cover cube {i}")))?;
    if scale.ell < constants.ell_min {
        return not_applicable("scale below ell_min");
    }
    if !cube.localizing() {
        return not_applicable("cube not localizing");
    }
    let eta = cube.eigensystem.distance_to(mu);
    if !(eta >= params.separation_threshold(scale.big_width())) {
        return not_applicable("resonant energy");
    }
    if cube.exterior.is_empty() {
        return not_applicable("empty boundary");
    }
    if cube.decay_core.is_empty() {
        return not_applicable("empty core");
    }
    let reduced = scale.mass * params.local_factor(scale.ell);
    let boundary: Vec<(&Configuration, f64)> = cube.exterior.iter().map(|v| (v, amp.peak(v))).collect();
    let tol = amp.tolerance(eta);
    let mut tally = Tally::new();
    for y in &cube.decay_core {
        let rhs = boundary
            .iter()
            .map(|(v, p)| (-reduced * sorted_linf(y.coords(), v.coords()) as f64).exp() * p)
            .fold(0.0, f64::max);
        tally.add(amp.peak(y), rhs, tol);
    }
    tally.finish()
}

/// Checks `‖ψ‖_{ℓ²(Φ)} <= 2N η⁻¹ (#∂_ex Φ)^{1/2} max_{v ∈ ∂_ex Φ} |ψ(v)|` for
/// `Φ ⊆ Θ`, applicable when `dist(mu, σ(H_Φ)) >= η`, `η` exceeds the
/// solver resolution of `H_Φ` and the exterior boundary is non-empty.
pub fn crude_bound_check(
    amp: &Amplitudes,
    mu: f64,
    phi: &SymmetricSet,
    theta: &SymmetricSet,
    phi_spectrum: &Eigensystem,
    eta: f64,
) -> Result<DecayCheck> {
    if !(eta > phi_spectrum.resolution()) || !(phi_spectrum.distance_to(mu) >= eta) {
        return not_applicable("energy inside the spectral window");
    }
    let exterior = boundary(phi, theta)?.exterior();
    if exterior.is_empty() {
        return not_applicable("empty boundary");
    }
    let peak = exterior.representatives().map(|v| amp.peak(v)).fold(0.0, f64::max);
    let n = phi.particles() as f64;
    let rhs = 2.0 * n / eta * (exterior.len() as f64).sqrt() * peak;
    let mut tally = Tally::new();
    tally.add(amp.norm_on(phi), rhs, amp.tolerance(eta));
    tally.finish()
}

/// `e^{−(m′/2)ℓ}`, the factor gained across a buffered cube.
pub fn buffered_gain(reduced_mass: f64, ell: f64) -> f64 {
    (-reduced_mass / 2.0 * ell).exp()
}

/// Checks `max_{y ∈ Υ} |ψ(y)| <= e^{−(m′/2)ℓ} max_{a ∈ 𝒢_Υ} max_{v ∈ ∂_ex Λ_ℓ(a)} |ψ(v)|`.
///
/// Applicable when the sheltering cubes exist and localize, and `mu` is at
/// least `½e^{−L^β}` from the spectra of `Υ` and of every sheltering cube.
pub fn verify_buffered_decay(
    amp: &Amplitudes,
    mu: f64,
    buffered: &BufferedCube,
    upsilon_spectrum: &Eigensystem,
    scale: &ScaleAnalysis,
    params: &MsaParameters,
    constants: &EmsaConstants,
) -> Result<DecayCheck> {
    if scale.ell < constants.ell_min {
        return not_applicable("scale below ell_min");
    }
    if buffered.shelter.is_empty() {
        return not_applicable("no sheltering cubes");
    }
    if buffered.shelter.iter().any(|&a| !scale.cubes[a].localizing()) {
        return not_applicable("sheltering cube not localizing");
    }
    let threshold = params.separation_threshold(scale.big_width());
    let mut eta = upsilon_spectrum.distance_to(mu);
    for &a in &buffered.shelter {
        eta = eta.min(scale.cubes[a].eigensystem.distance_to(mu));
    }
    if !(eta >= threshold) {
        return not_applicable("resonant energy");
    }
    let gain = buffered_gain(scale.mass * params.local_factor(scale.ell), scale.ell);
    let outer = buffered
        .shelter
        .iter()
        .flat_map(|&a| scale.cubes[a].exterior.iter())
        .map(|v| amp.peak(v))
        .fold(0.0, f64::max);
    let inner = buffered.upsilon.representatives().map(|y| amp.peak(y)).fold(0.0, f64::max);
    let mut tally = Tally::new();
    tally.add(inner, gain * outer, amp.tolerance(eta));
    tally.finish()
}
