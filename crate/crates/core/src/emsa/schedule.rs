use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::params::{EmsaConstants, MsaParameters};

/// One scale of the induction: `L_k`, the mass `m_k` and the mass `M_k =
/// m_{k+1}` reached at the next scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub k: usize,
    /// `log₁₀ L_k`; the scales themselves overflow quickly.
    pub log10_scale: Real,
    pub mass: Real,
    pub next_mass: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleSchedule {
    pub rows: Vec<ScaleRow>,
    /// `inf_k m_k`, from continuing the product until its factors reach 1.
    pub limit: Real,
    /// Whether every `m_k`, and the limit, stays at or above `m`.
    pub above_mass: bool,
}

/// `(1 − 3L^{−(1−τ)/2}, 1 − loss·N²·L^{1−τγ})` from `ln L`.
fn factors(ln_scale: f64, params: &MsaParameters, particles: usize, loss: f64) -> (f64, f64) {
    let n = particles as f64;
    let local = 1.0 - 3.0 * (-(1.0 - params.tau) / 2.0 * ln_scale).exp();
    let lost = 1.0 - loss * n * n * ((1.0 - params.tau * params.gamma) * ln_scale).exp();
    (local, lost)
}

/// Iterates `m_k = m_{k−1} f(L_{k−1})` from `m_0 = 2m`; the error names the
/// first scale with a non-positive factor.
fn masses(l0: f64, params: &MsaParameters, particles: usize, loss: f64, steps: usize) -> Result<(Vec<(f64, f64)>, f64)> {
    let mut ln_scale = l0.ln();
    let mut mass = 2.0 * params.m;
    let mut out = Vec::with_capacity(steps + 1);
    let mut limit = mass;
    for k in 0..=steps.max(200) {
        let (a, b) = factors(ln_scale, params, particles, loss);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::config(format!(
                "mass factor not positive at scale k={k} (log10 L = {:.6}): {a:.6}, {b:.6}",
                ln_scale / std::f64::consts::LN_10
            )));
        }
        if k <= steps {
            out.push((ln_scale, mass));
        }
        mass *= a * b;
        limit = limit.min(mass);
        ln_scale *= params.gamma;
        if k >= steps && (a * b == 1.0 || !ln_scale.is_finite()) {
            break;
        }
    }
    Ok((out, limit))
}

/// Tabulates `L_k = L_{k−1}^γ` and the mass recursion for `k = 0..=k_max`.
pub fn scale_schedule(
    l0: f64,
    params: &MsaParameters,
    particles: usize,
    k_max: usize,
    constants: &EmsaConstants,
) -> Result<ScaleSchedule> {
    params.validate()?;
    if !(l0 >= 2.0) || !l0.is_finite() {
        return Err(Error::config(format!("initial scale must be at least 2, got {l0}")));
    }
    if particles == 0 {
        return Err(Error::config("particle number must be positive"));
    }
    let (values, limit) = masses(l0, params, particles, constants.mass_loss, k_max + 1)?;
    let rows: Vec<ScaleRow> = (0..=k_max)
        .map(|k| ScaleRow {
            k,
            log10_scale: Real(values[k].0 / std::f64::consts::LN_10),
            mass: Real(values[k].1),
            next_mass: Real(values[k + 1].1),
        })
        .collect();
    let above_mass = limit >= params.m && rows.iter().all(|r| r.mass.0 >= params.m);
    Ok(ScaleSchedule {
        rows,
        limit: Real(limit),
        above_mass,
    })
}

/// Smallest `L_0` (to a relative precision of `1e-9` in `ln L_0`) from which
/// every mass factor is positive and `inf m_k >= m`.
pub fn mass_threshold(params: &MsaParameters, particles: usize, constants: &EmsaConstants) -> Result<f64> {
    params.validate()?;
    let ok = |ln_l0: f64| {
        masses(ln_l0.exp(), params, particles, constants.mass_loss, 0)
            .is_ok_and(|(_, limit)| limit >= params.m)
    };
    let (mut lo, mut hi) = (2f64.ln(), 2f64.ln());
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::config("no initial scale below e^700 keeps the mass above m"));
        }
    }
    if lo == hi {
        return Ok(hi.exp());
    }
    while (hi - lo) > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}

/// Decay exponents `p(1), …, p(N)` of the induction, with the checks of
/// their hypotheses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySchedule {
    /// `p(n)` for `n = 1..=N`.
    pub values: Vec<Real>,
    /// `20 max((γ−1)⁻¹, (2/γ−1)⁻¹) γ^N max(p, N)`.
    pub upper_bound: Real,
    /// `(2/γ − 1)⁻¹ (4N + 2) <= p(N)`.
    pub base_holds: bool,
    /// `p(n) <= (p(n−1) − 1)/γ − 2n − 2` for `2 <= n <= N`.
    pub chain_holds: bool,
    pub decreasing: bool,
    pub within_bound: bool,
}

/// Backward recursion `p(N) = max(p, (2/γ−1)⁻¹(4N+2))`,
/// `p(n−1) = γ(p(n) + 2n + 2) + 1`.
pub fn decay_parameter_schedule(p: f64, particles: usize, gamma: f64) -> Result<DecaySchedule> {
    if !(gamma > 1.0 && gamma < 2.0) {
        return Err(Error::config(format!("need 1 < gamma < 2, got {gamma}")));
    }
    if particles == 0 || !(p > 0.0) || !p.is_finite() {
        return Err(Error::config("need a positive particle number and a positive finite p"));
    }
    let n = particles;
    let slope = 1.0 / (2.0 / gamma - 1.0);
    let base = slope * (4 * n + 2) as f64;
    let mut values = vec![0.0; n];
    values[n - 1] = p.max(base);
    for k in (2..=n).rev() {
        values[k - 2] = gamma * (values[k - 1] + (2 * k) as f64 + 2.0) + 1.0;
    }
    let chain_holds = (2..=n).all(|k| {
        let allowed = (values[k - 2] - 1.0) / gamma - (2 * k) as f64 - 2.0;
        values[k - 1] <= allowed * (1.0 + 1e-12)
    });
    let upper = 20.0 * (1.0 / (gamma - 1.0)).max(slope) * gamma.powi(n as i32) * p.max(n as f64);
    Ok(DecaySchedule {
        base_holds: base <= values[n - 1],
        chain_holds,
        decreasing: values.windows(2).all(|w| w[0] > w[1]),
        within_bound: values.iter().all(|&v| v <= upper),
        upper_bound: Real(upper),
        values: values.into_iter().map(Real).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_exponents() {
        let params = MsaParameters::default();
        let constants = EmsaConstants {
            mass_loss: 1e-6,
            ..EmsaConstants::default()
        };
        let s = scale_schedule(1e20, &params, 1, 2, &constants).unwrap();
        assert!((s.rows[1].log10_scale.0 - 30.0).abs() < 1e-12);
        assert!((s.rows[2].log10_scale.0 - 45.0).abs() < 1e-12);
    }

    #[test]
    fn masses_follow_the_recursion() {
        let params = MsaParameters::default();
        let constants = EmsaConstants::default();
        let l0 = 1e40;
        let s = scale_schedule(l0, &params, 2, 3, &constants).unwrap();
        assert_eq!(s.rows[0].mass.0, 1.0);
        // Independent evaluation with powf instead of the log domain.
        let mut mass = 1.0;
        let mut l = l0;
        for row in &s.rows {
            assert!((row.mass.0 - mass).abs() < 1e-12, "{row:?}");
            mass *= (1.0 - 3.0 * l.powf(-0.1)) * (1.0 - 250.0 * 4.0 * l.powf(1.0 - 1.2));
            assert!((row.next_mass.0 - mass).abs() < 1e-12);
            l = l.powf(1.5);
            if !l.is_finite() {
                break;
            }
        }
        assert!(s.rows.windows(2).all(|w| w[1].mass.0 <= w[0].mass.0));
        assert!(s.limit.0 <= s.rows.last().unwrap().mass.0);
    }

    #[test]
    fn small_scales_are_rejected() {
        let params = MsaParameters::default();
        let err = scale_schedule(100.0, &params, 2, 2, &EmsaConstants::default()).unwrap_err();
        assert!(err.to_string().contains("k=0"), "{err}");
        assert!(scale_schedule(1.0, &params, 1, 2, &EmsaConstants::default()).is_err());
    }

    #[test]
    fn threshold_keeps_mass_above_m() {
        let params = MsaParameters::default();
        let constants = EmsaConstants::default();
        for n in [1, 2] {
            let t = mass_threshold(&params, n, &constants).unwrap();
            let s = scale_schedule(t, &params, n, 6, &constants).unwrap();
            assert!(s.above_mass, "{n}: {s:?}");
            // Just below the threshold the limit drops under m or a factor fails.
            let below = (t.ln() * (1.0 - 1e-6)).exp();
            assert!(scale_schedule(below, &params, n, 6, &constants).map_or(true, |s| !s.above_mass));
        }
    }

    #[test]
    fn decay_exponents() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        let one = decay_parameter_schedule(1.0, 1, 1.5).unwrap();
        assert!(close(one.values[0].0, 18.0));
        let big_p = decay_parameter_schedule(40.0, 1, 1.5).unwrap();
        assert_eq!(big_p.values, vec![Real(40.0)]);

        let two = decay_parameter_schedule(1.0, 2, 1.5).unwrap();
        // (2/γ − 1)⁻¹ (4·2 + 2) = 3 · 10.
        assert!(close(two.values[1].0, 30.0));
        assert!(close(two.values[0].0, 1.5 * (30.0 + 6.0) + 1.0));
        assert!(two.base_holds && two.chain_holds && two.decreasing && two.within_bound);

        let five = decay_parameter_schedule(2.0, 5, 1.2).unwrap();
        assert!(five.decreasing && five.chain_holds);
        assert!(decay_parameter_schedule(1.0, 2, 2.0).is_err());
    }
}
