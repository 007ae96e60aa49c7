use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents and mass of the multiscale scheme.
///
/// Valid parameters satisfy `β < 1/γ < 1 < γ < 2` and `max(γβ, 1/γ) < τ < 1`,
/// with `m > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawParameters")]
pub struct MsaParameters {
    pub beta: f64,
    pub tau: f64,
    pub gamma: f64,
    pub m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameters {
    beta: f64,
    tau: f64,
    gamma: f64,
    m: f64,
}

impl TryFrom<RawParameters> for MsaParameters {
    type Error = Error;

    fn try_from(r: RawParameters) -> Result<Self> {
        MsaParameters::new(r.beta, r.tau, r.gamma, r.m)
    }
}

impl MsaParameters {
    pub fn new(beta: f64, tau: f64, gamma: f64, m: f64) -> Result<Self> {
        let p = MsaParameters { beta, tau, gamma, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let MsaParameters { beta, tau, gamma, m } = *self;
        if ![beta, tau, gamma, m].iter().all(|v| v.is_finite()) {
            return Err(Error::config("parameters must be finite"));
        }
        if !(beta > 0.0 && beta < 1.0 / gamma && gamma > 1.0 && gamma < 2.0) {
            return Err(Error::config(format!(
                "need 0 < beta < 1/gamma < 1 < gamma < 2, got beta={beta}, gamma={gamma}"
            )));
        }
        if !(tau > (gamma * beta).max(1.0 / gamma) && tau < 1.0) {
            return Err(Error::config(format!(
                "need max(gamma*beta, 1/gamma) < tau < 1, got tau={tau}"
            )));
        }
        if !(m > 0.0) {
            return Err(Error::config(format!("mass must be positive, got {m}")));
        }
        Ok(())
    }

    /// `(1 + τ) / 2`.
    pub fn tau_tilde(&self) -> f64 {
        (1.0 + self.tau) / 2.0
    }

    /// Mass after one decay-propagation step at scale `ell`:
    /// `m (1 − 3 ℓ^{−(1−τ)/2})`. Negative at small scales.
    pub fn reduced_mass(&self, ell: f64) -> f64 {
        self.m * self.local_factor(ell)
    }

    pub(crate) fn local_factor(&self, ell: f64) -> f64 {
        1.0 - 3.0 * ell.powf(-(1.0 - self.tau) / 2.0)
    }

    pub(crate) fn loss_factor(&self, ell: f64, particles: usize, loss: f64) -> f64 {
        let n = particles as f64;
        1.0 - loss * n * n * ell.powf(1.0 - self.tau * self.gamma)
    }

    /// Spectral-separation threshold `½ e^{−L^β}`.
    pub fn separation_threshold(&self, big: f64) -> f64 {
        separation_threshold(big, self.beta)
    }
}

impl Default for MsaParameters {
    fn default() -> Self {
        MsaParameters {
            beta: 0.3,
            tau: 0.8,
            gamma: 1.5,
            m: 0.5,
        }
    }
}

/// `½ e^{−L^β}`; logs when the value underflows to zero.
pub fn separation_threshold(big: f64, beta: f64) -> f64 {
    let exponent = big.powf(beta);
    if exponent > 700.0 {
        log::warn!("separation threshold underflows at L={big}, beta={beta}");
    }
    0.5 * (-exponent).exp()
}

/// Geometric constants of the induction step, in units of `Nℓ` or `N²ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmsaConstants {
    /// Fully interactive pairs are examined from `d_S >= fi_distance · Nℓ`.
    pub fi_distance: f64,
    /// Resonance pairs and the iteration stop radius, in units of `N²ℓ`.
    pub nr_distance: f64,
    /// Buffer radius `· Nℓ`.
    pub buffer_radius: f64,
    /// Good cubes sheltering a buffer sit at `[lo, hi] · Nℓ` from its center.
    pub shelter_lo: f64,
    pub shelter_hi: f64,
    /// Fattening of a buffer for bad steps, `· Nℓ`.
    pub fattening: f64,
    /// Mass loss coefficient, `· N²`.
    pub mass_loss: f64,
    /// Smallest scale at which the local decay lemma is applied.
    pub ell_min: f64,
}

impl Default for EmsaConstants {
    fn default() -> Self {
        EmsaConstants {
            fi_distance: 8.0,
            nr_distance: 200.0,
            buffer_radius: 10.0,
            shelter_lo: 8.0,
            shelter_hi: 12.0,
            fattening: 2.0,
            mass_loss: 250.0,
            ell_min: 4.0,
        }
    }
}
