use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{boundary, rearrange, sorted_linf, Configuration, Cube};
use crate::hamiltonian::Model;
use crate::localization::certify_cube;
use crate::num::Real;
use crate::params::{EmsaConstants, MsaParameters};
use crate::spectral::{eigensystem, Eigensystem};

use super::buffered::{build_buffered, BufferedCube};
use super::decay::{crude_bound_check, verify_buffered_decay, verify_local_decay, Amplitudes, DecayCheck};
use super::iteration::{localization_center, run_iteration, IterationSetup, IterationTrace};
use super::scale::{evaluate_events, EventReport, ScaleAnalysis};

pub const EMSA_SCHEMA: &str = "mpal.emsa.v1";

/// Inputs of one scale step `ℓ → L = ℓ^γ` around a fixed center.
#[derive(Clone, Debug)]
pub struct EmsaSetup {
    pub center: Configuration,
    pub ell: f64,
    pub model: Model,
    pub params: MsaParameters,
    /// Mass the small cubes are certified at.
    pub mass: f64,
    pub constants: EmsaConstants,
    /// Number of iteration traces kept in a report.
    pub trace_cap: usize,
}

impl EmsaSetup {
    pub fn big_width(&self) -> f64 {
        self.ell.powf(self.params.gamma)
    }
}

/// Applicable and passing counts for one lemma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCount {
    pub checked: usize,
    pub applicable: usize,
    pub passed: usize,
    pub violated: usize,
    /// Smallest margin among applicable checks.
    pub worst_margin: Real,
}

impl Default for LemmaCount {
    fn default() -> Self {
        LemmaCount {
            checked: 0,
            applicable: 0,
            passed: 0,
            violated: 0,
            worst_margin: Real(f64::INFINITY),
        }
    }
}

impl LemmaCount {
    pub fn add(&mut self, check: &DecayCheck) {
        self.checked += 1;
        if let DecayCheck::Checked { pass, margin, .. } = check {
            self.applicable += 1;
            if *pass {
                self.passed += 1;
            } else {
                self.violated += 1;
            }
            self.worst_margin = Real(self.worst_margin.0.min(margin.0));
        }
    }

    pub fn merge(&mut self, other: &LemmaCount) {
        self.checked += other.checked;
        self.applicable += other.applicable;
        self.passed += other.passed;
        self.violated += other.violated;
        self.worst_margin = Real(self.worst_margin.0.min(other.worst_margin.0));
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationCount {
    /// Eigenpairs for which no localization region was found.
    pub without_center: usize,
    pub traces: usize,
    pub passed: usize,
    pub steps: usize,
    pub localization_checked: usize,
    pub localization_passed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferSummary {
    pub center: Configuration,
    pub shelter: usize,
    pub proper: bool,
    pub size: usize,
}

/// Everything measured on one realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmsaReport {
    pub schema: String,
    pub seed: u64,
    pub disorder: String,
    pub lambda: Real,
    pub center: Configuration,
    pub ell: Real,
    pub big: Real,
    pub size: usize,
    pub cover_cubes: usize,
    pub localizing_cubes: usize,
    pub events: EventReport,
    /// Localization of the big cube at the small-scale mass.
    pub big_localizing: bool,
    pub buffer: Option<BufferSummary>,
    pub local_decay: LemmaCount,
    pub crude_bound: LemmaCount,
    pub buffered_decay: LemmaCount,
    pub iteration: IterationCount,
    pub traces: Vec<IterationTrace>,
}

impl EmsaReport {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: EmsaReport = serde_json::from_str(text)?;
        if report.schema != EMSA_SCHEMA {
            return Err(Error::config(format!("unknown report schema {}", report.schema)));
        }
        Ok(report)
    }

    /// No applicable decay check failed.
    pub fn violations(&self) -> usize {
        self.local_decay.violated + self.crude_bound.violated + self.buffered_decay.violated
    }
}

/// The first non-localizing cover cube all of whose distant partners
/// localize, or the cube at the big center when every cube localizes.
fn bad_center(scale: &ScaleAnalysis, reach: f64) -> Option<usize> {
    let cubes = &scale.cubes;
    let bad: Vec<usize> = (0..cubes.len()).filter(|&i| !cubes[i].localizing()).collect();
    if bad.is_empty() {
        let center = rearrange(scale.big.center());
        return cubes.iter().position(|c| c.center == center);
    }
    bad.into_iter().find(|&b| {
        (0..cubes.len()).all(|j| cubes[j].localizing() || (scale.center_distance(b, j) as f64) < reach)
    })
}

struct PairOutcome {
    local: LemmaCount,
    crude: LemmaCount,
    buffered: LemmaCount,
    iteration: IterationCount,
    traces: Vec<IterationTrace>,
}

/// Runs the scale step on the realization drawn from `seed`.
pub fn run_emsa_seed(setup: &EmsaSetup, seed: u64) -> Result<EmsaReport> {
    let params = &setup.params;
    let constants = &setup.constants;
    let big = Cube::new(setup.center.clone(), setup.big_width())?;
    let big_set = big.set();
    let realization = setup.model.realize(seed, [&big_set])?;
    let scale = ScaleAnalysis::new(&big, setup.ell, &setup.model, &realization, params, setup.mass)?;
    let events = evaluate_events(&scale, &setup.model, &realization, params, constants)?;

    let h = setup.model.hamiltonian(&big_set, &realization)?;
    let es = eigensystem(&h, None)?;
    let big_localizing = certify_cube(&es, setup.mass, big.half_width(), params.tau).pass;
    let residuals = h.matrix() * es.vectors()
        - es.vectors() * nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(es.eigenvalues()));
    let residuals: Vec<f64> = residuals.column_iter().map(|c| c.norm()).collect();

    let n = big.particles() as f64;
    let reach = constants.fi_distance * n * setup.ell;
    let bad = bad_center(&scale, reach);
    let buffered: Option<BufferedCube> = match bad {
        Some(b) => Some(build_buffered(&scale.cover, &scale.cubes[b].center, constants)?),
        None => None,
    };
    let upsilon_es: Option<Eigensystem> = match &buffered {
        Some(buf) if buf.proper => Some(eigensystem(&setup.model.hamiltonian(&buf.upsilon, &realization)?, None)?),
        _ => None,
    };
    let upsilon_spectrum: Option<&Eigensystem> = match (&buffered, &upsilon_es) {
        (Some(_), Some(e)) => Some(e),
        (Some(_), None) => Some(&es),
        _ => None,
    };
    let upsilon_has_boundary = match &buffered {
        Some(buf) if buf.proper => !boundary(&buf.upsilon, &big_set)?.is_empty(),
        _ => false,
    };
    let good: Vec<usize> = match bad {
        Some(b) => (0..scale.cubes.len())
            .filter(|&j| scale.center_distance(b, j) as f64 >= reach)
            .collect(),
        None => Vec::new(),
    };
    let iteration_setup = IterationSetup {
        scale: &scale,
        buffered: buffered.as_ref(),
        good: &good,
        params,
        constants,
    };
    let run_iterations = events.good && bad.is_some();

    let outcomes: Vec<PairOutcome> = (0..es.len())
        .into_par_iter()
        .map(|k| -> Result<PairOutcome> {
            let mu = es.eigenvalues()[k];
            let amp = Amplitudes::new(es.vector(k), es.index()).with_residual(residuals[k]);
            let mut out = PairOutcome {
                local: LemmaCount::default(),
                crude: LemmaCount::default(),
                buffered: LemmaCount::default(),
                iteration: IterationCount::default(),
                traces: Vec::new(),
            };
            for (i, cube) in scale.cubes.iter().enumerate() {
                out.local.add(&verify_local_decay(&amp, mu, &scale, i, params, constants)?);
                let eta = cube.eigensystem.distance_to(mu);
                out.crude.add(&crude_bound_check(&amp, mu, &cube.set, &big_set, &cube.eigensystem, eta)?);
            }
            if let (Some(buf), Some(spectrum)) = (&buffered, upsilon_spectrum) {
                if upsilon_has_boundary {
                    let eta = spectrum.distance_to(mu);
                    out.crude.add(&crude_bound_check(&amp, mu, &buf.upsilon, &big_set, spectrum, eta)?);
                }
                out.buffered.add(&verify_buffered_decay(&amp, mu, buf, spectrum, &scale, params, constants)?);
            }
            if run_iterations {
                match localization_center(&amp, mu, &iteration_setup, upsilon_spectrum) {
                    None => out.iteration.without_center += 1,
                    Some(x) => {
                        let stop = iteration_setup.stop_radius();
                        for y0 in big_set.representatives() {
                            if (sorted_linf(y0.coords(), x.coords()) as f64) < stop {
                                continue;
                            }
                            let trace = run_iteration(&amp, &iteration_setup, &x, y0)?;
                            out.iteration.traces += 1;
                            out.iteration.passed += trace.pass as usize;
                            out.iteration.steps += trace.steps.len();
                            if let Some(ok) = trace.localized {
                                out.iteration.localization_checked += 1;
                                out.iteration.localization_passed += ok as usize;
                            }
                            if out.traces.len() < setup.trace_cap {
                                out.traces.push(trace);
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut local_decay = LemmaCount::default();
    let mut crude_bound = LemmaCount::default();
    let mut buffered_decay = LemmaCount::default();
    let mut iteration = IterationCount::default();
    let mut traces = Vec::new();
    for o in outcomes {
        local_decay.merge(&o.local);
        crude_bound.merge(&o.crude);
        buffered_decay.merge(&o.buffered);
        iteration.without_center += o.iteration.without_center;
        iteration.traces += o.iteration.traces;
        iteration.passed += o.iteration.passed;
        iteration.steps += o.iteration.steps;
        iteration.localization_checked += o.iteration.localization_checked;
        iteration.localization_passed += o.iteration.localization_passed;
        for t in o.traces {
            if traces.len() < setup.trace_cap {
                traces.push(t);
            }
        }
    }

    Ok(EmsaReport {
        schema: EMSA_SCHEMA.to_string(),
        seed,
        disorder: realization.id(),
        lambda: Real(setup.model.lambda),
        center: setup.center.clone(),
        ell: Real(setup.ell),
        big: Real(big.half_width()),
        size: big_set.len(),
        cover_cubes: scale.cubes.len(),
        localizing_cubes: scale.cubes.iter().filter(|c| c.localizing()).count(),
        events,
        big_localizing,
        buffer: buffered.map(|b| BufferSummary {
            center: b.center,
            shelter: b.shelter.len(),
            proper: b.proper,
            size: b.size,
        }),
        local_decay,
        crude_bound,
        buffered_decay,
        iteration,
        traces,
    })
}
