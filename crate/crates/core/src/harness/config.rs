use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::hamiltonian::{Distribution, InteractionPotential, Model, DEFAULT_CAP};
use crate::params::{EmsaConstants, MsaParameters};

/// Experiment selected by a config or a CLI subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Localize,
    Wegner,
    Emsa,
    Schedule,
    Geometry,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Localize => "localize",
            ExperimentKind::Wegner => "wegner",
            ExperimentKind::Emsa => "emsa",
            ExperimentKind::Schedule => "schedule",
            ExperimentKind::Geometry => "geometry",
        }
    }
}

/// A single value or a list, for sweep axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub particles: OneOrMany<usize>,
    pub lambda: OneOrMany<f64>,
    pub distribution: Distribution,
    /// Pair potential as a map from displacement to value.
    pub interaction: InteractionPotential,
    /// Fixed realization to use instead of sampling (sites missing from the
    /// file are drawn from its seed).
    pub realization: Option<PathBuf>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            particles: OneOrMany::One(1),
            lambda: OneOrMany::One(1.0),
            distribution: Distribution::default(),
            interaction: InteractionPotential::zero(),
            realization: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    /// Cube center; defaults to the origin.
    pub center: Option<Vec<i64>>,
    /// Half-width `L` of the big cube, or a sweep.
    pub half_width: OneOrMany<f64>,
    /// Small scale `ℓ`; the EMSA big cube is `ℓ^γ`.
    pub ell: f64,
    /// Center of the second set for Wegner runs.
    pub second_center: Option<Vec<i64>>,
    /// Initial scale for the schedule; defaults to the mass threshold.
    pub l0: Option<f64>,
    pub k_max: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            center: None,
            half_width: OneOrMany::One(8.0),
            ell: 4.0,
            second_center: None,
            l0: None,
            k_max: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MsaSection {
    pub beta: f64,
    pub tau: f64,
    pub gamma: f64,
    pub m: f64,
    pub ell_min: Option<f64>,
    /// Target decay exponent of the schedule.
    pub p: f64,
}

impl Default for MsaSection {
    fn default() -> Self {
        let d = MsaParameters::default();
        MsaSection {
            beta: d.beta,
            tau: d.tau,
            gamma: d.gamma,
            m: d.m,
            ell_min: None,
            p: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub experiment: Option<ExperimentKind>,
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Largest matrix dimension that may be diagonalized.
    pub cap: usize,
    /// Iteration traces kept per EMSA seed report.
    pub trace_cap: usize,
    /// Spectral distance grid of Wegner runs.
    pub s_grid: Vec<f64>,
    /// Also write spectra, certificates, decay profiles and realizations of
    /// every localization trial.
    pub per_instance: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            experiment: None,
            trials: 1,
            base_seed: 0,
            workers: 0,
            out: None,
            cap: DEFAULT_CAP,
            trace_cap: 16,
            s_grid: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            per_instance: false,
        }
    }
}

/// One experiment description, read from a single JSON document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub geometry: GeometrySection,
    pub msa: MsaSection,
    pub emsa_constants: EmsaConstants,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.run.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.run.cap == 0 {
            return Err(Error::config("cap must be positive"));
        }
        self.model.distribution.validate()?;
        let particles = self.model.particles.to_vec();
        if particles.is_empty() || particles.contains(&0) {
            return Err(Error::config("particle numbers must be positive"));
        }
        let lambdas = self.model.lambda.to_vec();
        if lambdas.is_empty() || lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::config("disorder strengths must be finite and non-negative"));
        }
        let widths = self.geometry.half_width.to_vec();
        if widths.is_empty() || widths.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::config("half widths must be finite and non-negative"));
        }
        if !(self.geometry.ell.is_finite() && self.geometry.ell >= 1.0) {
            return Err(Error::config(format!("ell must be at least 1, got {}", self.geometry.ell)));
        }
        for (name, c) in [("center", &self.geometry.center), ("second_center", &self.geometry.second_center)] {
            if let Some(c) = c {
                if particles.iter().any(|&n| n != c.len()) {
                    return Err(Error::config(format!("{name} has {} coordinates but N = {particles:?}", c.len())));
                }
            }
        }
        if self.run.s_grid.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("s_grid values must be finite"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MsaParameters> {
        let m = &self.msa;
        MsaParameters::new(m.beta, m.tau, m.gamma, m.m)
    }

    pub fn constants(&self) -> EmsaConstants {
        let mut c = self.emsa_constants;
        if let Some(e) = self.msa.ell_min {
            c.ell_min = e;
        }
        c
    }

    pub fn model(&self, lambda: f64) -> Model {
        Model::new(lambda, self.model.interaction.clone(), self.model.distribution.clone()).with_cap(self.run.cap)
    }

    pub fn center(&self, particles: usize) -> Result<Configuration> {
        Configuration::new(self.geometry.center.clone().unwrap_or_else(|| vec![0; particles]))
    }

    /// Fails when the config names a different experiment.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<()> {
        match self.run.experiment {
            Some(k) if k != kind => Err(Error::config(format!(
                "config is for the {} experiment, not {}",
                k.name(),
                kind.name()
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c.run.trials, 1);
        assert_eq!(c.model.particles.to_vec(), vec![1]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"modle": {}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"run": {"trails": 3}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"emsa_constants": {"fi": 3}}"#).is_err());
    }

    #[test]
    fn sweeps_and_sections() {
        let c = ExperimentConfig::from_json(
            r#"{
                "model": {"particles": 2, "lambda": [0, 1, 10], "interaction": {"1": 0.5},
                          "distribution": {"kind": "uniform", "v_max": 2.0}},
                "geometry": {"center": [0, 3], "half_width": [1, 2]},
                "msa": {"m": 0.25, "ell_min": 2},
                "run": {"trials": 5, "base_seed": 9, "experiment": "localize"}
            }"#,
        )
        .unwrap();
        assert_eq!(c.model.lambda.to_vec(), vec![0.0, 1.0, 10.0]);
        assert_eq!(c.model.interaction.range(), 2);
        assert_eq!(c.constants().ell_min, 2.0);
        assert_eq!(c.params().unwrap().m, 0.25);
        assert!(c.check_kind(ExperimentKind::Localize).is_ok());
        assert!(c.check_kind(ExperimentKind::Emsa).is_err());
    }

    #[test]
    fn invalid_values() {
        for bad in [
            r#"{"run": {"trials": 0}}"#,
            r#"{"msa": {"gamma": 2.5}}"#,
            r#"{"model": {"lambda": -1}}"#,
            r#"{"model": {"particles": 2}, "geometry": {"center": [0]}}"#,
            r#"{"model": {"distribution": {"kind": "uniform", "v_max": 0}}}"#,
            r#"{"model": {"interaction": {"1": 1.0, "-1": 2.0}}}"#,
        ] {
            let err = ExperimentConfig::from_json(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::from_json(r#"{"model": {"lambda": [1, 2]}, "run": {"trials": 3}}"#).unwrap();
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
