//! Closed-form purchase when a single jammer dominates the relay's input.
//!
//! With `s2 << Pk << p_J g_J` and `log(1 + x) ~ x`, the source utility
//! collapses to `E / p_J - m p_J` where
//!
//! ```text
//! E = (aW/2) [ (pr g2/s2 - 1) P1/g_J + (pr g1/s2 - 1) P2/g_J ]
//! ```
//!
//! and the conventional constant is `D1 = -E`. The closed form
//! `p* = sqrt(D1 / m)` needs `D1 > 0`, which contradicts the sign of the
//! expansion whenever jamming can help (`s2/pr < min(g1, g2)`). The two
//! conventions are kept side by side here: `p* = min(sqrt(|D1| / m), p_max)`
//! when `E > 0`, otherwise `p* = 0`.

use crate::channel::{ChannelGains, SystemConfig};
use crate::error::{ModelError, Result};
use crate::rates::PowerAllocation;

use super::market::Market;

/// Largest ratio that still counts as "much smaller than one".
pub const REGIME_RATIO: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighInterferenceApprox {
    /// Signed `D1` in its conventional form.
    pub d1: f64,
    /// Coefficient of `1/p_J` in the expanded utility (`-D1`).
    pub expansion_coefficient: f64,
    pub p_star: f64,
    /// `[s2/P1, s2/P2, P1/(p* g_J), P2/(p* g_J)]`
    pub regime_ratios: [f64; 4],
    /// All regime ratios are at most [`REGIME_RATIO`].
    pub in_regime: bool,
}

/// `min(sqrt(|D1| / m), p_max)` for a positive expansion coefficient.
pub fn high_interference_demand(d1: f64, price: f64, power_cap: f64) -> f64 {
    if !(-d1 > 0.0) {
        return 0.0;
    }
    if price <= 0.0 {
        return power_cap;
    }
    (d1.abs() / price).sqrt().min(power_cap)
}

/// Closed-form purchase from jammer `jammer_index`, ignoring every other jammer.
pub fn high_interference_best_response(
    jammer_index: usize,
    gains: &ChannelGains,
    market: &Market,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
) -> Result<HighInterferenceApprox> {
    market.check_index(jammer_index)?;
    let g_j = *gains
        .g_jr
        .get(jammer_index)
        .ok_or(ModelError::JammerIndex {
            index: jammer_index,
            count: gains.num_jammers(),
        })?;
    if !(g_j > 0.0) {
        return Err(ModelError::InvalidArgument(
            "jammer gain must be > 0".into(),
        ));
    }
    let PowerAllocation { p1, p2, pr, .. } = *powers_fixed;
    let (g1, g2) = (gains.g_s1r, gains.g_s2r);
    let s2 = config.noise_power;
    let (rx1, rx2) = (p1 * g1, p2 * g2);
    let scale = config.rate_gain * config.bandwidth / 2.0;
    let d1 = scale * ((1.0 - pr * g2 / s2) * rx1 / g_j + (1.0 - pr * g1 / s2) * rx2 / g_j);

    let p_star = high_interference_demand(d1, market.prices[jammer_index], config.power_cap);
    let jam_rx = p_star * g_j;
    let regime_ratios = [s2 / rx1, s2 / rx2, rx1 / jam_rx, rx2 / jam_rx];
    let in_regime = regime_ratios.iter().all(|r| *r <= REGIME_RATIO);
    Ok(HighInterferenceApprox {
        d1,
        expansion_coefficient: -d1,
        p_star,
        regime_ratios,
        in_regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demand_examples() {
        assert_eq!(high_interference_demand(-4.0, 1.0, 10.0), 2.0);
        assert_eq!(high_interference_demand(-400.0, 1.0, 10.0), 10.0);
        // negative expansion coefficient: the jammer is not used
        assert_eq!(high_interference_demand(4.0, 1.0, 10.0), 0.0);
        assert_eq!(high_interference_demand(-4.0, 0.0, 10.0), 10.0);
    }

    #[test]
    fn constructed_regime_instance() {
        let cfg = SystemConfig {
            noise_power: 0.01,
            ..Default::default()
        };
        let g = ChannelGains::new(1.0, 1.0, vec![400.0]).unwrap();
        let m = Market::uniform(1, 1.0, 1.0).unwrap();
        let p = PowerAllocation::new(10.0, 10.0, 10.0, vec![0.0]);
        let hi = high_interference_best_response(0, &g, &m, &p, &cfg).unwrap();
        // |D1| = 0.5 * 2 * 999 * 10 / 400
        assert!((hi.d1 + 24.975).abs() < 1e-12);
        assert!((hi.p_star - 24.975f64.sqrt()).abs() < 1e-12);
        assert!(hi.in_regime, "{hi:?}");
    }

    #[test]
    fn weak_relay_gives_no_purchase() {
        // pr g / s2 < 1 makes the expansion coefficient negative
        let cfg = SystemConfig {
            noise_power: 100.0,
            ..Default::default()
        };
        let g = ChannelGains::new(1.0, 1.0, vec![400.0]).unwrap();
        let m = Market::uniform(1, 1.0, 1.0).unwrap();
        let p = PowerAllocation::new(10.0, 10.0, 10.0, vec![0.0]);
        let hi = high_interference_best_response(0, &g, &m, &p, &cfg).unwrap();
        assert!(hi.expansion_coefficient < 0.0);
        assert_eq!(hi.p_star, 0.0);
        assert!(!hi.in_regime);
    }
}
