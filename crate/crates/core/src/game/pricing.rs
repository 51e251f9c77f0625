use serde::{Deserialize, Serialize};

use crate::channel::{ChannelGains, SystemConfig};
use crate::error::Result;
use crate::rates::PowerAllocation;

use super::approx::high_interference_best_response;
use super::market::{jammer_utility, Market};
use super::source::best_response_with;

/// Multiplicative probe used when the demand derivative is unusable.
pub const FALLBACK_STEP: f64 = 0.05;

/// Relative utility loss below which a step does not count as an overshoot;
/// keeps rounding on flat utilities (e.g. `c = 2` closed-form demand) from
/// triggering the safeguard.
const OVERSHOOT_RTOL: f64 = 1e-12;

/// Difference quotients at or above this are treated as flat.
const FLAT_DERIVATIVE: f64 = -1e-12;

/// How the sources' purchase from a jammer responds to its price.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandModel {
    /// Numerical maximization of the exact source utility.
    #[default]
    Exact,
    /// Closed-form single-dominant-jammer purchase.
    HighInterference,
}

/// Power bought from `jammer_index` at the market's current prices.
pub fn demand(
    model: DemandModel,
    jammer_index: usize,
    gains: &ChannelGains,
    market: &Market,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
) -> Result<f64> {
    match model {
        DemandModel::Exact => {
            best_response_with(jammer_index, gains, market, powers_fixed, config).map(|m| m.x)
        }
        DemandModel::HighInterference => {
            high_interference_best_response(jammer_index, gains, market, powers_fixed, config)
                .map(|h| h.p_star)
        }
    }
}

/// Why the derivative-based update was skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceFallback {
    /// Demand at or beyond `0` / `p_max` somewhere in the difference stencil.
    Boundary,
    /// Difference quotient not negative.
    FlatDerivative,
    /// One-sided quotients disagree, e.g. a jump in demand inside the stencil.
    NonSmooth,
    /// The damped fixed-point step would lower the jammer's own utility.
    Overshoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceUpdate {
    /// The proposed next price `I_i(m)`.
    pub price: f64,
    /// Demand at the current price.
    pub demand: f64,
    /// Central difference `dp/dm`.
    pub derivative: f64,
    pub fallback: Option<PriceFallback>,
}

/// Next price for `jammer_index`: `-p / (c dp/dm)` from a central difference
/// with step `max(1e-4 m, 1e-8)`, other jammers' powers held at
/// `powers_fixed`. Where the derivative is unusable the price is probed by
/// `+-5%` instead and moves in the direction that raises the jammer's
/// utility, or stays put if neither does.
pub fn price_update(
    jammer_index: usize,
    market: &Market,
    gains: &ChannelGains,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
    model: DemandModel,
) -> Result<PriceUpdate> {
    market.check_index(jammer_index)?;
    let m = market.prices[jammer_index];
    let c = market.cost_exponents[jammer_index];
    let p_max = config.power_cap;
    let demand_at = |price: f64| {
        demand(
            model,
            jammer_index,
            gains,
            &market.with_price(jammer_index, price),
            powers_fixed,
            config,
        )
    };

    let p0 = demand_at(m)?;
    let h = (1e-4 * m).max(1e-8);
    let lo = (m - h).max(0.0);
    let hi = m + h;
    let p_lo = demand_at(lo)?;
    let p_hi = demand_at(hi)?;
    let derivative = (p_hi - p_lo) / (hi - lo);

    let interior = |p: f64| p > 0.0 && p < p_max;
    let fallback = if !(interior(p0) && interior(p_lo) && interior(p_hi)) {
        Some(PriceFallback::Boundary)
    } else if derivative >= FLAT_DERIVATIVE {
        Some(PriceFallback::FlatDerivative)
    } else {
        let left = (p0 - p_lo) / (m - lo);
        let right = (p_hi - p0) / (hi - m);
        let ratio = left / right;
        (!(0.25..=4.0).contains(&ratio)).then_some(PriceFallback::NonSmooth)
    };

    let price = match fallback {
        None => -p0 / (c * derivative),
        Some(_) => probe_price(jammer_index, market, gains, powers_fixed, config, model, p0)?,
    };
    Ok(PriceUpdate {
        price,
        demand: p0,
        derivative,
        fallback,
    })
}

/// Best of `m`, `m (1 + FALLBACK_STEP)` and `m (1 - FALLBACK_STEP)` for the
/// jammer's utility; `m` wins ties. `p0` is the demand at `m`.
fn probe_price(
    jammer_index: usize,
    market: &Market,
    gains: &ChannelGains,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
    model: DemandModel,
    p0: f64,
) -> Result<f64> {
    let m = market.prices[jammer_index];
    let mut best = (m, jammer_utility(jammer_index, market, p0)?);
    for probe in [m * (1.0 + FALLBACK_STEP), m * (1.0 - FALLBACK_STEP)] {
        let probed = market.with_price(jammer_index, probe);
        let p = demand(model, jammer_index, gains, &probed, powers_fixed, config)?;
        let u = jammer_utility(jammer_index, &probed, p)?;
        if u > best.1 {
            best = (probe, u);
        }
    }
    Ok(best.0)
}

/// One damped price step `m <- (1 - damping) m + damping I(m)`. A step that
/// would lower the jammer's utility, other powers held fixed, is replaced by
/// the damped `+-5%` probe.
pub fn damped_price_step(
    jammer_index: usize,
    market: &Market,
    gains: &ChannelGains,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
    model: DemandModel,
    damping: f64,
) -> Result<PriceUpdate> {
    let mut up = price_update(jammer_index, market, gains, powers_fixed, config, model)?;
    let m = market.prices[jammer_index];
    let damp = |target: f64| (1.0 - damping) * m + damping * target;
    if up.fallback.is_none() {
        let stepped = market.with_price(jammer_index, damp(up.price));
        let p = demand(model, jammer_index, gains, &stepped, powers_fixed, config)?;
        let before = jammer_utility(jammer_index, market, up.demand)?;
        let after = jammer_utility(jammer_index, &stepped, p)?;
        if after < before - OVERSHOOT_RTOL * before.abs() {
            up.price = probe_price(
                jammer_index,
                market,
                gains,
                powers_fixed,
                config,
                model,
                up.demand,
            )?;
            up.fallback = Some(PriceFallback::Overshoot);
        }
    }
    up.price = damp(up.price);
    Ok(up)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regime_instance(
        price: f64,
        c: f64,
    ) -> (ChannelGains, Market, PowerAllocation, SystemConfig) {
        let cfg = SystemConfig {
            noise_power: 0.01,
            ..Default::default()
        };
        let g = ChannelGains::new(1.0, 1.0, vec![400.0]).unwrap();
        let m = Market::new(vec![price], vec![c]).unwrap();
        (g, m, PowerAllocation::new(10.0, 10.0, 10.0, vec![0.0]), cfg)
    }

    #[test]
    fn closed_form_update_doubles_price_over_exponent() {
        for c in [1.0, 1.5, 2.0, 3.0] {
            let (g, m, p, cfg) = regime_instance(1.0, c);
            let up = price_update(0, &m, &g, &p, &cfg, DemandModel::HighInterference).unwrap();
            assert!(up.fallback.is_none());
            assert!((up.price - 2.0 / c).abs() < 1e-6 * 2.0 / c, "c={c}: {up:?}");
        }
    }

    #[test]
    fn saturated_demand_probes_upward() {
        // demand sqrt(24.975 / 0.1) > p_max, so raising the price costs nothing
        let (g, m, p, cfg) = regime_instance(0.1, 1.0);
        let up = price_update(0, &m, &g, &p, &cfg, DemandModel::HighInterference).unwrap();
        assert_eq!(up.fallback, Some(PriceFallback::Boundary));
        assert!((up.price - 0.1 * 1.05).abs() < 1e-15);
    }

    #[test]
    fn idle_jammer_keeps_price_when_no_probe_helps() {
        let cfg = SystemConfig::default();
        let g = ChannelGains::new(1.0, 1.0, vec![4.0]).unwrap();
        let m = Market::uniform(1, 1e3, 1.0).unwrap();
        let p = PowerAllocation::new(10.0, 10.0, 10.0, vec![0.0]);
        let up = price_update(0, &m, &g, &p, &cfg, DemandModel::Exact).unwrap();
        assert_eq!(up.demand, 0.0);
        assert_eq!(up.fallback, Some(PriceFallback::Boundary));
        assert_eq!(up.price, 1e3);
    }
}
