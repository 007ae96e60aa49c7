use crate::geometry::{rearrange, sorted_linf, ConfigIndex, Configuration};

/// Largest `|φ(y)|` on each occupied shell `d_S(y, center) = r`, in
/// increasing `r`.
pub fn decay_profile(phi: &[f64], index: &ConfigIndex, center: &Configuration) -> Vec<(u64, f64)> {
    let center = rearrange(center);
    let mut shells = std::collections::BTreeMap::new();
    for (i, &v) in phi.iter().enumerate() {
        let r = sorted_linf(index.sorted(i).coords(), center.coords());
        let e = shells.entry(r).or_insert(0.0f64);
        *e = e.max(v.abs());
    }
    shells.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sym_distance, Cube};

    #[test]
    fn point_mass_profile() {
        let idx = Cube::new([0].into(), 3.0).unwrap().set().index();
        let mut phi = vec![0.0; 7];
        phi[3] = 1.0;
        assert_eq!(decay_profile(&phi, &idx, &[0].into()), vec![(0, 1.0), (1, 0.0), (2, 0.0), (3, 0.0)]);
    }

    #[test]
    fn exponential_profile_is_log_linear() {
        let idx = Cube::new([2, 5].into(), 4.0).unwrap().set().index();
        let x: Configuration = [2, 5].into();
        let phi: Vec<f64> = idx
            .configurations()
            .iter()
            .map(|y| (-(sym_distance(y, &x).unwrap() as f64)).exp())
            .collect();
        let prof = decay_profile(&phi, &idx, &x);
        for w in prof.windows(2) {
            let slope = (w[1].1.ln() - w[0].1.ln()) / (w[1].0 as f64 - w[0].0 as f64);
            assert!((slope + 1.0).abs() < 1e-12);
        }
        for (i, y) in idx.configurations().iter().enumerate() {
            let r = sym_distance(y, &x).unwrap();
            let shell = prof.iter().find(|p| p.0 == r).unwrap().1;
            assert!(phi[i].abs() <= shell);
        }
    }
}
