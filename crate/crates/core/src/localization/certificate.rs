use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{rearrange, sorted_linf, ConfigIndex, Configuration};
use crate::num::Real;

/// Largest number of orbit representatives scanned when searching a center.
pub const SCAN_CAP: usize = 10_000;

const NORM_TOL: f64 = 1e-10;

/// How the localization center was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterSearch {
    /// Given by the caller.
    Given,
    /// The position of the largest entry.
    Argmax,
    /// Full scan over orbit representatives.
    Scan,
    /// Too many representatives: only the largest entry and its neighbours
    /// were tried.
    Capped,
}

/// Result of testing `|φ(y)| <= e^{−m d_S(y, x)}` for `d_S(y, x) >= L^τ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationCertificate {
    pub eigen_index: usize,
    pub eigenvalue: Real,
    /// Non-decreasing representative of the center.
    pub center: Configuration,
    pub m: Real,
    pub big: Real,
    pub tau: Real,
    /// `min (−m d_S(y, x) − ln|φ(y)|)` over tested `y`; infinite when nothing
    /// is tested.
    pub margin: Real,
    pub tested: usize,
    pub pass: bool,
    pub search: CenterSearch,
    /// Whether the vector came from a rotated degenerate cluster.
    pub rotated: bool,
}

fn check_normalized(phi: &[f64]) -> Result<()> {
    let norm = phi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::usage(format!("vector has norm {norm}, expected 1")));
    }
    Ok(())
}

pub(crate) fn evaluate(
    phi: &[f64],
    index: &ConfigIndex,
    center: &Configuration,
    m: f64,
    big: f64,
    tau: f64,
) -> (bool, f64, usize) {
    let exempt = big.powf(tau);
    let mut pass = true;
    let mut margin = f64::INFINITY;
    let mut tested = 0;
    for (i, &value) in phi.iter().enumerate() {
        let d = sorted_linf(index.sorted(i).coords(), center.coords()) as f64;
        if d < exempt {
            continue;
        }
        tested += 1;
        let a = value.abs();
        if a > (-m * d).exp() {
            pass = false;
        }
        margin = margin.min(-m * d - a.ln());
    }
    (pass, margin, tested)
}

/// Tests whether `phi` is `(x, m)`-localizing with `x = center`.
pub fn check_vector(
    phi: &[f64],
    index: &ConfigIndex,
    center: &Configuration,
    m: f64,
    big: f64,
    tau: f64,
) -> Result<LocalizationCertificate> {
    check_normalized(phi)?;
    if phi.len() != index.len() {
        return Err(Error::usage("vector length differs from the index size"));
    }
    let center = rearrange(center);
    if !index.configurations().iter().any(|c| rearrange(c) == center) {
        return Err(Error::usage(format!("center {center} is not in the set")));
    }
    let (pass, margin, tested) = evaluate(phi, index, &center, m, big, tau);
    Ok(LocalizationCertificate {
        eigen_index: 0,
        eigenvalue: Real(f64::NAN),
        center,
        m: Real(m),
        big: Real(big),
        tau: Real(tau),
        margin: Real(margin),
        tested,
        pass,
        search: CenterSearch::Given,
        rotated: false,
    })
}

/// Distinct sorted configurations of an index, ordered by decreasing orbit
/// weight `max |φ|` then lexicographically.
pub(crate) fn orbit_representatives(index: &ConfigIndex) -> Vec<(Configuration, Vec<usize>)> {
    let mut map: std::collections::BTreeMap<Configuration, Vec<usize>> = Default::default();
    for i in 0..index.len() {
        map.entry(index.sorted(i).clone()).or_default().push(i);
    }
    map.into_iter().collect()
}

/// Searches a localization center: first the position of the largest
/// entry, then every orbit representative (up to [`SCAN_CAP`]).
pub(crate) fn locate(
    phi: &[f64],
    index: &ConfigIndex,
    reps: &[(Configuration, Vec<usize>)],
    m: f64,
    big: f64,
    tau: f64,
) -> (Configuration, bool, f64, usize, CenterSearch) {
    let argmax = (0..phi.len())
        .max_by(|&a, &b| phi[a].abs().total_cmp(&phi[b].abs()).then(b.cmp(&a)))
        .expect("non-empty vector");
    let first = index.sorted(argmax).clone();
    let (pass, margin, tested) = evaluate(phi, index, &first, m, big, tau);
    if pass {
        return (first, pass, margin, tested, CenterSearch::Argmax);
    }
    let candidates: Vec<Configuration> = if reps.len() <= SCAN_CAP {
        let mut weighted: Vec<(f64, &Configuration)> = reps
            .iter()
            .map(|(c, members)| (members.iter().map(|&i| phi[i].abs()).fold(0.0, f64::max), c))
            .collect();
        weighted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
        weighted.into_iter().map(|(_, c)| c.clone()).collect()
    } else {
        let mut out = Vec::new();
        for j in 0..first.particles() {
            for step in [-1, 1] {
                let mut c = first.coords().to_vec();
                c[j] += step;
                let c = rearrange(&Configuration::new(c).expect("non-empty"));
                if reps.binary_search_by(|(r, _)| r.cmp(&c)).is_ok() {
                    out.push(c);
                }
            }
        }
        out
    };
    let search = if reps.len() <= SCAN_CAP { CenterSearch::Scan } else { CenterSearch::Capped };
    for c in candidates {
        if c == first {
            continue;
        }
        let (pass, margin, tested) = evaluate(phi, index, &c, m, big, tau);
        if pass {
            return (c, pass, margin, tested, search);
        }
    }
    (first, false, margin, tested, search)
}

/// A center for which `phi` is `m`-localizing, if any.
pub fn find_center(phi: &[f64], index: &ConfigIndex, m: f64, big: f64, tau: f64) -> Result<Option<Configuration>> {
    check_normalized(phi)?;
    let reps = orbit_representatives(index);
    let (center, pass, ..) = locate(phi, index, &reps, m, big, tau);
    Ok(pass.then_some(center))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sym_distance, Cube};

    fn cube_index(c: [i64; 2], half: f64) -> ConfigIndex {
        Cube::new(c.into(), half).unwrap().set().index()
    }

    fn normalized(mut v: Vec<f64>) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        v
    }

    fn exponential(index: &ConfigIndex, center: &Configuration, rate: f64) -> Vec<f64> {
        normalized(
            index
                .configurations()
                .iter()
                .map(|y| (-rate * sym_distance(y, center).unwrap() as f64).exp())
                .collect(),
        )
    }

    #[test]
    fn point_mass_passes() {
        let idx = cube_index([0, 3], 3.0);
        let x: Configuration = [1, 2].into();
        let mut phi = vec![0.0; idx.len()];
        phi[idx.position(&x).unwrap()] = 1.0;
        for m in [0.1, 1.0, 50.0] {
            assert!(check_vector(&phi, &idx, &x, m, 3.0, 0.8).unwrap().pass);
        }
        assert_eq!(find_center(&phi, &idx, 5.0, 3.0, 0.8).unwrap(), Some(x));
    }

    #[test]
    fn flat_vector_fails() {
        let idx = Cube::new([0].into(), 4.0).unwrap().set().index();
        let phi = vec![1.0 / 3.0; 9];
        let c = check_vector(&phi, &idx, &[0].into(), 1.0, 4.0, 0.7).unwrap();
        assert!(!c.pass);
        assert_eq!(c.tested, 4);
        assert_eq!(find_center(&phi, &idx, 5.0, 4.0, 0.7).unwrap(), None);
    }

    #[test]
    fn exponential_profile_threshold() {
        let idx = cube_index([0, 5], 4.0);
        let x: Configuration = [5, 1].into();
        let phi = exponential(&idx, &x, 2.0);
        assert!(check_vector(&phi, &idx, &x, 1.0, 4.0, 0.8).unwrap().pass);
        assert!(!check_vector(&phi, &idx, &x, 3.0, 4.0, 0.8).unwrap().pass);
        assert_eq!(find_center(&phi, &idx, 1.0, 4.0, 0.8).unwrap(), Some([1, 5].into()));
    }

    #[test]
    fn preconditions() {
        let idx = cube_index([0, 0], 1.0);
        let phi = vec![1.0; idx.len()];
        assert!(matches!(check_vector(&phi, &idx, &[0, 0].into(), 1.0, 1.0, 0.8), Err(Error::Usage(_))));
        let mut unit = vec![0.0; idx.len()];
        unit[0] = 1.0;
        assert!(check_vector(&unit, &idx, &[9, 9].into(), 1.0, 1.0, 0.8).is_err());
    }

    #[test]
    fn monotone_in_mass_and_tau() {
        let idx = cube_index([0, 4], 3.0);
        let x: Configuration = [0, 4].into();
        let phi = exponential(&idx, &x, 1.3);
        let ms = [0.2, 0.6, 1.0, 1.2, 1.4, 2.0];
        let passes: Vec<bool> = ms.iter().map(|&m| check_vector(&phi, &idx, &x, m, 3.0, 0.8).unwrap().pass).collect();
        assert!(passes.windows(2).all(|w| w[0] >= w[1]));
        let taus = [0.5, 0.7, 0.9, 0.99];
        let passes: Vec<bool> = taus.iter().map(|&t| check_vector(&phi, &idx, &x, 1.4, 3.0, t).unwrap().pass).collect();
        assert!(passes.windows(2).all(|w| w[0] <= w[1]));
    }
}
