use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::site_uniform;

/// Single-site law of the random potential, supported in `[0, v_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    /// Uniform on `[0, v_max]`.
    Uniform { v_max: f64 },
    /// Density interpolated linearly between `(value, density)` nodes and
    /// normalized. The support runs from the first to the last node.
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Uniform { v_max: 1.0 }
    }
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::Uniform { v_max } => {
                if !(v_max.is_finite() && *v_max > 0.0) {
                    return Err(Error::config(format!("uniform law needs v_max > 0, got {v_max}")));
                }
            }
            Distribution::PiecewiseLinear { nodes } => {
                if nodes.len() < 2 {
                    return Err(Error::config("piecewise-linear density needs at least two nodes"));
                }
                if nodes[0].0 < 0.0 {
                    return Err(Error::config("density support must lie in [0, v_max]"));
                }
                for w in nodes.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::config("density nodes must be strictly increasing"));
                    }
                }
                for &(t, rho) in nodes {
                    if !t.is_finite() || !rho.is_finite() || rho < 0.0 {
                        return Err(Error::config(format!("invalid density node ({t}, {rho})")));
                    }
                }
                if self.segment_masses().iter().sum::<f64>() <= 0.0 {
                    return Err(Error::config("density has zero mass"));
                }
            }
        }
        Ok(())
    }

    /// Upper end of the support.
    pub fn v_max(&self) -> f64 {
        match self {
            Distribution::Uniform { v_max } => *v_max,
            Distribution::PiecewiseLinear { nodes } => nodes.last().map_or(0.0, |n| n.0),
        }
    }

    /// Supremum of the normalized density.
    pub fn density_max(&self) -> f64 {
        match self {
            Distribution::Uniform { v_max } => 1.0 / v_max,
            Distribution::PiecewiseLinear { nodes } => {
                let total: f64 = self.segment_masses().iter().sum();
                nodes.iter().map(|n| n.1).fold(0.0, f64::max) / total
            }
        }
    }

    /// Whether the density is differentiable in the interior of its support.
    pub fn smooth_inside_support(&self) -> bool {
        match self {
            Distribution::Uniform { .. } => true,
            Distribution::PiecewiseLinear { nodes } => {
                let slopes: Vec<f64> = nodes
                    .windows(2)
                    .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
                    .collect();
                slopes.windows(2).all(|s| s[0] == s[1])
            }
        }
    }

    fn segment_masses(&self) -> Vec<f64> {
        match self {
            Distribution::Uniform { .. } => vec![1.0],
            Distribution::PiecewiseLinear { nodes } => nodes
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .collect(),
        }
    }

    /// Inverse distribution function at `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Distribution::Uniform { v_max } => u * v_max,
            Distribution::PiecewiseLinear { nodes } => {
                let masses = self.segment_masses();
                let total: f64 = masses.iter().sum();
                let mut remaining = u * total;
                let last = masses.iter().rposition(|&m| m > 0.0).expect("validated mass");
                for (i, &mass) in masses.iter().enumerate() {
                    if mass <= 0.0 {
                        continue;
                    }
                    if remaining > mass && i < last {
                        remaining -= mass;
                        continue;
                    }
                    let (a, p) = nodes[i];
                    let (b, q) = nodes[i + 1];
                    let width = b - a;
                    let slope = (q - p) / width;
                    let r = remaining.min(mass);
                    // Solve p s + slope s²/2 = r for s in [0, width].
                    let s = 2.0 * r / (p + (p * p + 2.0 * slope * r).max(0.0).sqrt());
                    let s = if s.is_finite() { s } else { 0.0 };
                    return (a + s).clamp(a, b);
                }
                unreachable!("validated density has positive mass")
            }
        }
    }
}

/// Values of the random potential on a finite set of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderRealization {
    seed: u64,
    distribution: Distribution,
    site_values: BTreeMap<i64, f64>,
}

/// Draws the potential on `sites`. The value at a site depends only on
/// `(seed, site)`.
pub fn sample_disorder(
    seed: u64,
    sites: impl IntoIterator<Item = i64>,
    distribution: &Distribution,
) -> Result<DisorderRealization> {
    distribution.validate()?;
    let mut r = DisorderRealization {
        seed,
        distribution: distribution.clone(),
        site_values: BTreeMap::new(),
    };
    r.extend(sites);
    Ok(r)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealizationFile {
    schema: String,
    seed: u64,
    distribution: Distribution,
    sites: Vec<SiteValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteValue {
    site: i64,
    value: Real,
}

const REALIZATION_SCHEMA: &str = "mpal.disorder.v1";

impl DisorderRealization {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }

    pub fn value(&self, site: i64) -> Option<f64> {
        self.site_values.get(&site).copied()
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.site_values.iter().map(|(&s, &v)| (s, v))
    }

    /// Samples any of `sites` not yet present.
    pub fn extend(&mut self, sites: impl IntoIterator<Item = i64>) {
        for site in sites {
            let d = &self.distribution;
            let seed = self.seed;
            self.site_values
                .entry(site)
                .or_insert_with(|| d.quantile(site_uniform(seed, site)));
        }
    }

    /// Realization with explicitly given values, e.g. for constructed tests.
    pub fn from_values(
        seed: u64,
        distribution: Distribution,
        values: impl IntoIterator<Item = (i64, f64)>,
    ) -> Result<Self> {
        distribution.validate()?;
        let v_max = distribution.v_max();
        let site_values: BTreeMap<i64, f64> = values.into_iter().collect();
        for (&s, &v) in &site_values {
            if !(0.0..=v_max).contains(&v) {
                return Err(Error::config(format!("value {v} at site {s} outside [0, {v_max}]")));
            }
        }
        Ok(DisorderRealization {
            seed,
            distribution,
            site_values,
        })
    }

    /// Short identifier used in provenance strings.
    pub fn id(&self) -> String {
        format!("disorder-{:016x}", self.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = RealizationFile {
            schema: REALIZATION_SCHEMA.into(),
            seed: self.seed,
            distribution: self.distribution.clone(),
            sites: self
                .sites()
                .map(|(site, value)| SiteValue { site, value: Real(value) })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RealizationFile = serde_json::from_str(text)?;
        if file.schema != REALIZATION_SCHEMA {
            return Err(Error::config(format!("unsupported realization schema {:?}", file.schema)));
        }
        Self::from_values(
            file.seed,
            file.distribution,
            file.sites.into_iter().map(|s| (s.site, s.value.0)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_support_and_mean() {
        let d = Distribution::Uniform { v_max: 1.0 };
        let r = sample_disorder(11, 0..100_000, &d).unwrap();
        let mut sum = 0.0;
        for (_, v) in r.sites() {
            assert!((0.0..=1.0).contains(&v));
            sum += v;
        }
        assert!((sum / 100_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn per_site_values_ignore_the_requested_set() {
        let d = Distribution::default();
        let a = sample_disorder(5, [-3, 0, 7], &d).unwrap();
        let b = sample_disorder(5, -10..=10, &d).unwrap();
        for s in [-3, 0, 7] {
            assert_eq!(a.value(s).unwrap().to_bits(), b.value(s).unwrap().to_bits());
        }
        let c = sample_disorder(6, [0], &d).unwrap();
        assert_ne!(a.value(0), c.value(0));
    }

    #[test]
    fn bad_descriptors() {
        assert!(Distribution::Uniform { v_max: 0.0 }.validate().is_err());
        let bad = Distribution::PiecewiseLinear { nodes: vec![(0.0, 1.0), (0.0, 1.0)] };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let neg = Distribution::PiecewiseLinear { nodes: vec![(-1.0, 1.0), (1.0, 1.0)] };
        assert!(neg.validate().is_err());
        let zero = Distribution::PiecewiseLinear { nodes: vec![(0.0, 0.0), (1.0, 0.0)] };
        assert!(zero.validate().is_err());
        let err = serde_json::from_str::<Distribution>(r#"{"kind":"bernoulli","p":0.5}"#);
        assert!(err.is_err());
    }

    #[test]
    fn triangular_quantile_matches_closed_form() {
        // Density 2t on [0,1]: F(t) = t², quantile √u.
        let d = Distribution::PiecewiseLinear { nodes: vec![(0.0, 0.0), (1.0, 2.0)] };
        d.validate().unwrap();
        for u in [0.0, 0.01, 0.25, 0.5, 0.9, 0.999] {
            assert!((d.quantile(u) - f64::sqrt(u)).abs() < 1e-12);
        }
        assert_eq!(d.density_max(), 2.0);
        assert!(d.smooth_inside_support());
    }

    #[test]
    fn tent_quantile_by_bisection() {
        let d = Distribution::PiecewiseLinear {
            nodes: vec![(0.0, 0.5), (1.0, 2.0), (3.0, 0.0)],
        };
        d.validate().unwrap();
        assert!(!d.smooth_inside_support());
        let cdf = |t: f64| {
            // Numerical integral of the normalized density.
            let steps = 200_000;
            let h = t / steps as f64;
            let dens = |x: f64| if x <= 1.0 { 0.5 + 1.5 * x } else { 2.0 * (3.0 - x) / 2.0 };
            let mut acc = 0.0;
            for i in 0..steps {
                acc += dens((i as f64 + 0.5) * h) * h;
            }
            acc / 3.25
        };
        for u in [0.1, 0.3, 0.6, 0.95] {
            let q = d.quantile(u);
            assert!((0.0..=3.0).contains(&q));
            assert!((cdf(q) - u).abs() < 1e-6, "u={u} q={q}");
        }
    }

    #[test]
    fn json_round_trip() {
        let d = Distribution::PiecewiseLinear { nodes: vec![(0.0, 1.0), (2.0, 1.0)] };
        let r = sample_disorder(99, -2..3, &d).unwrap();
        let text = r.to_json().unwrap();
        let back = DisorderRealization::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn import_rejects_out_of_support() {
        let text = r#"{"schema":"mpal.disorder.v1","seed":1,
            "distribution":{"kind":"uniform","v_max":1.0},
            "sites":[{"site":0,"value":1.5}]}"#;
        assert!(DisorderRealization::from_json(text).is_err());
    }
}
