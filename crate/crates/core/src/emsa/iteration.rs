use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rearrange, sorted_linf, Configuration};
use crate::num::Real;
use crate::params::{EmsaConstants, MsaParameters};
use crate::spectral::Eigensystem;

use super::buffered::BufferedCube;
use super::decay::{buffered_gain, Amplitudes, NOISE_FLOOR};
use super::scale::ScaleAnalysis;

/// Everything the iteration needs besides the vector itself.
#[derive(Clone, Copy, Debug)]
pub struct IterationSetup<'a> {
    pub scale: &'a ScaleAnalysis,
    pub buffered: Option<&'a BufferedCube>,
    /// Cover indices of the good cubes, `d_S(a, b) >= 8Nℓ`.
    pub good: &'a [usize],
    pub params: &'a MsaParameters,
    pub constants: &'a EmsaConstants,
}

impl IterationSetup<'_> {
    fn reduced_mass(&self) -> f64 {
        self.scale.mass * self.params.local_factor(self.scale.ell)
    }

    /// `m (1 − 3ℓ^{−(1−τ)/2})(1 − 250N²ℓ^{1−τγ})`; `None` if either factor
    /// is not positive.
    pub fn final_mass(&self) -> Option<f64> {
        let ell = self.scale.ell;
        let a = self.params.local_factor(ell);
        let b = self.params.loss_factor(ell, self.scale.particles(), self.constants.mass_loss);
        (a > 0.0 && b > 0.0).then_some(self.scale.mass * a * b)
    }

    /// Radius `200N²ℓ` at which the iteration stops.
    pub fn stop_radius(&self) -> f64 {
        let n = self.scale.particles() as f64;
        self.constants.nr_distance * n * n * self.scale.ell
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Good,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub from: Configuration,
    pub to: Configuration,
    pub kind: StepKind,
    pub gain: Real,
    pub distance: u64,
    /// Center of the good cube used, for good steps.
    pub cube: Option<Configuration>,
    /// The point was also in the buffered region.
    pub overlap: bool,
    /// Good steps move at least `ℓ`; bad steps land in the fattened buffer.
    pub admissible: bool,
    /// `|ψ(from)| <= gain · |ψ(to)|` up to the noise floor.
    pub holds: bool,
}

/// The chain `y₀, y₁, …, y_K` walked towards the localization center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub start: Configuration,
    pub center: Configuration,
    pub steps: Vec<IterationStep>,
    pub end: Configuration,
    /// Product of the step gains.
    pub gain: Real,
    /// `|ψ(y₀)| <= gain · |ψ(y_K)|` up to the noise floor.
    pub bound_holds: bool,
    pub mass: Option<Real>,
    /// `|ψ(y₀)| <= e^{−M d_S(y₀, x_μ)}`, when `M > 0` and `d_S >= L^τ`.
    pub localized: Option<bool>,
    pub pass: bool,
}

/// The sorted representative of largest `|ψ|` in the first region (good
/// cube, then the buffer) whose spectrum comes within `½e^{−L^β}` of `mu`.
pub fn localization_center(
    amp: &Amplitudes,
    mu: f64,
    setup: &IterationSetup<'_>,
    upsilon_spectrum: Option<&Eigensystem>,
) -> Option<Configuration> {
    let scale = setup.scale;
    let threshold = setup.params.separation_threshold(scale.big_width());
    for &i in setup.good {
        let cube = &scale.cubes[i];
        if cube.eigensystem.distance_to(mu) < threshold {
            return amp.argmax(cube.set.representatives());
        }
    }
    let (buffered, spectrum) = (setup.buffered?, upsilon_spectrum?);
    (spectrum.distance_to(mu) < threshold).then(|| amp.argmax(buffered.upsilon.representatives()))?
}

/// Walks from `start` to within the stop radius of `center`.
///
/// In the core of a good cube the next point maximizes `e^{−m′ d_S}|ψ|` over
/// its exterior boundary; in the buffer it maximizes `|ψ|` over the exterior
/// boundaries of the sheltering cubes, with gain `e^{−m′ℓ/2}`. Errors when
/// neither applies or when the walk exceeds `#Λ_L` steps.
pub fn run_iteration(
    amp: &Amplitudes,
    setup: &IterationSetup<'_>,
    center: &Configuration,
    start: &Configuration,
) -> Result<IterationTrace> {
    let scale = setup.scale;
    let ell = scale.ell;
    let center = rearrange(center);
    let mut y = rearrange(start);
    let stop = setup.stop_radius();
    let reduced = setup.reduced_mass();
    let limit = scale.big_set.len();
    let mut steps: Vec<IterationStep> = Vec::new();
    let mut product = 1.0;
    let stuck = |steps: &[IterationStep], why: &str| Error::Numerical {
        message: format!(
            "iteration from {start} towards {center} {why} after {} steps: {}",
            steps.len(),
            serde_json::to_string(steps).unwrap_or_default()
        ),
        provenance: scale.big.center().to_string(),
    };

    while (sorted_linf(y.coords(), center.coords()) as f64) >= stop {
        if steps.len() >= limit {
            return Err(stuck(&steps, "did not terminate"));
        }
        let in_buffer = setup.buffered.is_some_and(|b| b.upsilon.contains_representative(&y));
        let good = setup.good.iter().copied().find(|&i| scale.in_core(i, &y));
        let step = if let Some(i) = good {
            let cube = &scale.cubes[i];
            let (to, weight) = cube
                .exterior
                .iter()
                .map(|v| (v, (-reduced * sorted_linf(y.coords(), v.coords()) as f64).exp() * amp.peak(v)))
                .fold(None, |best: Option<(&Configuration, f64)>, (v, w)| match best {
                    Some((_, bw)) if bw >= w => best,
                    _ => Some((v, w)),
                })
                .ok_or_else(|| stuck(&steps, "met a good cube without boundary"))?;
            let distance = sorted_linf(y.coords(), to.coords());
            IterationStep {
                from: y.clone(),
                to: to.clone(),
                kind: StepKind::Good,
                gain: Real((-reduced * distance as f64).exp()),
                distance,
                cube: Some(cube.center.clone()),
                overlap: in_buffer,
                admissible: distance as f64 >= ell,
                holds: amp.peak(&y) <= weight + NOISE_FLOOR,
            }
        } else if in_buffer {
            let buffered = setup.buffered.expect("checked above");
            let to = amp
                .argmax(buffered.shelter.iter().flat_map(|&a| scale.cubes[a].exterior.iter()))
                .ok_or_else(|| stuck(&steps, "met a buffer without sheltering cubes"))?;
            let gain = buffered_gain(reduced, ell);
            IterationStep {
                distance: sorted_linf(y.coords(), to.coords()),
                admissible: buffered.fattened.contains_representative(&to),
                holds: amp.peak(&y) <= gain * amp.peak(&to) + NOISE_FLOOR,
                from: y.clone(),
                to,
                kind: StepKind::Bad,
                gain: Real(gain),
                cube: None,
                overlap: false,
            }
        } else {
            return Err(stuck(&steps, "left every good core and the buffer"));
        };
        product *= step.gain.0;
        y = step.to.clone();
        steps.push(step);
    }

    let start = rearrange(start);
    let bound_holds = amp.peak(&start) <= product * amp.peak(&y) + NOISE_FLOOR;
    let mass = setup.final_mass();
    let distance = sorted_linf(start.coords(), center.coords()) as f64;
    let localized = mass
        .filter(|_| distance >= scale.big_width().powf(setup.params.tau))
        .map(|m| amp.peak(&start) <= (-m * distance).exp());
    Ok(IterationTrace {
        pass: bound_holds && localized != Some(false),
        start,
        center,
        steps,
        end: y,
        gain: Real(product),
        bound_holds,
        mass: mass.map(Real),
        localized,
    })
}
