use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even, finitely supported pair potential `𝒰(u) = 𝒰(−u)`.
///
/// Serialized as a map from displacement to value; giving only one of `u`
/// and `−u` is enough.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<i64, f64>", into = "BTreeMap<i64, f64>")]
pub struct InteractionPotential {
    /// Nonzero values keyed by `|u|`.
    values: BTreeMap<u64, f64>,
}

impl InteractionPotential {
    pub fn new(table: BTreeMap<i64, f64>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (&u, &v) in &table {
            if !v.is_finite() {
                return Err(Error::config(format!("interaction value at {u} is not finite")));
            }
            if let Some(&w) = table.get(&-u) {
                if w != v {
                    return Err(Error::config(format!(
                        "interaction must be even: U({u}) = {v} but U({}) = {w}",
                        -u
                    )));
                }
            }
            if v != 0.0 {
                values.insert(u.unsigned_abs(), v);
            }
        }
        Ok(InteractionPotential { values })
    }

    pub fn zero() -> Self {
        InteractionPotential::default()
    }

    /// `𝒰(0) = g`, zero elsewhere.
    pub fn on_site(g: f64) -> Self {
        InteractionPotential::new(BTreeMap::from([(0, g)])).expect("finite")
    }

    /// `𝒰(±1) = g`, zero elsewhere.
    pub fn nearest_neighbour(g: f64) -> Self {
        InteractionPotential::new(BTreeMap::from([(1, g)])).expect("finite")
    }

    pub fn value(&self, displacement: i64) -> f64 {
        self.values.get(&displacement.unsigned_abs()).copied().unwrap_or(0.0)
    }

    /// Interaction range `C_U = max |u| + 1` over the support, 1 when empty.
    pub fn range(&self) -> u64 {
        self.values.keys().next_back().map_or(1, |r| r + 1)
    }

    /// `Σ_{i<j} 𝒰(x_i − x_j)` summed in the order given.
    pub fn energy(&self, coords: &[i64]) -> f64 {
        let mut e = 0.0;
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                e += self.value(coords[i] - coords[j]);
            }
        }
        e
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn id(&self) -> String {
        let parts: Vec<String> = self.values.iter().map(|(u, v)| format!("{u}:{v}")).collect();
        format!("interaction[{}]", parts.join(","))
    }
}

impl TryFrom<BTreeMap<i64, f64>> for InteractionPotential {
    type Error = Error;

    fn try_from(table: BTreeMap<i64, f64>) -> Result<Self> {
        InteractionPotential::new(table)
    }
}

impl From<InteractionPotential> for BTreeMap<i64, f64> {
    fn from(p: InteractionPotential) -> Self {
        p.values.into_iter().map(|(u, v)| (u as i64, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(InteractionPotential::zero().range(), 1);
        assert_eq!(InteractionPotential::on_site(2.0).range(), 1);
        assert_eq!(InteractionPotential::nearest_neighbour(1.0).range(), 2);
        let wide = InteractionPotential::new(BTreeMap::from([(-3, 0.5), (1, 1.0)])).unwrap();
        assert_eq!(wide.range(), 4);
        assert_eq!(wide.value(3), 0.5);
    }

    #[test]
    fn zeros_are_not_support() {
        let p = InteractionPotential::new(BTreeMap::from([(5, 0.0)])).unwrap();
        assert_eq!(p.range(), 1);
    }

    #[test]
    fn odd_table_rejected() {
        let r = InteractionPotential::new(BTreeMap::from([(1, 1.0), (-1, 2.0)]));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn energy_counts_pairs() {
        let p = InteractionPotential::on_site(3.0);
        assert_eq!(p.energy(&[1, 1, 1]), 9.0);
        assert_eq!(p.energy(&[1, 2, 1]), 3.0);
    }

    #[test]
    fn json_form() {
        let p: InteractionPotential = serde_json::from_str(r#"{"0": 1.5, "-2": 0.25}"#).unwrap();
        assert_eq!(p.value(2), 0.25);
        assert_eq!(p.value(0), 1.5);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"0":1.5,"2":0.25}"#);
    }
}
