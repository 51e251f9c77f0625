use crate::channel::{ChannelGains, SystemConfig};
use crate::error::{ModelError, Result};
use crate::rates::{secrecy_sum, secrecy_sum_partial, PowerAllocation, SourcePowers};
use crate::search::{maximize_on_interval, Maximum, ScanOptions};

use super::market::Market;

/// Inner-loop stopping threshold on the purchased power vector.
const PURCHASE_TOL: f64 = 1e-8;
const PURCHASE_MAX_CYCLES: usize = 100;
/// Half-width of the stationarity bracket around a golden-section maximum,
/// as a fraction of `p_max`.
const POLISH_WIDTH: f64 = 1e-6;
/// Bisection steps; enough to reach adjacent floats from `POLISH_WIDTH`.
const POLISH_STEPS: usize = 80;

/// Coefficients that write the source utility as a rational function of
/// the jamming powers:
///
/// ```text
/// U_s = (aW/2) sum_k log2[(1 + 1/(A_k + sum_i T_ki p_i)) / (1 + 1/(B_k + sum_i L_ki p_i))] - sum_i m_i p_i
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
}

pub fn utility_coefficients(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<UtilityCoefficients> {
    let PowerAllocation { p1, p2, pr, .. } = *powers;
    let (g1, g2) = (gains.g_s1r, gains.g_s2r);
    if !(p1 > 0.0 && p2 > 0.0 && pr > 0.0 && g1 > 0.0 && g2 > 0.0) {
        return Err(ModelError::InvalidArgument(
            "utility coefficients need positive source powers, relay power and gains".into(),
        ));
    }
    let s2 = config.noise_power;
    let (rx1, rx2) = (p1 * g1, p2 * g2);
    let rx_total = rx1 + rx2 + s2;
    let k1 = s2 * rx_total / (pr * g2);
    let k2 = s2 * rx_total / (pr * g1);
    Ok(UtilityCoefficients {
        a1: (s2 + k1) / rx1,
        a2: (s2 + k2) / rx2,
        b1: (s2 + rx2) / rx1,
        b2: (s2 + rx1) / rx2,
        t1: gains
            .g_jr
            .iter()
            .map(|g| s2 * g / (pr * p1 * g2 * g1))
            .collect(),
        t2: gains
            .g_jr
            .iter()
            .map(|g| s2 * g / (pr * p2 * g2 * g1))
            .collect(),
        l1: gains.g_jr.iter().map(|g| g / rx1).collect(),
        l2: gains.g_jr.iter().map(|g| g / rx2).collect(),
    })
}

/// Source utility evaluated from [`UtilityCoefficients`]. Does not clip the
/// per-direction secrecy rates, so it agrees with [`source_utility`] only
/// where both are positive.
pub fn source_utility_from_coefficients(
    coeffs: &UtilityCoefficients,
    jamming: &[f64],
    market: &Market,
    config: &SystemConfig,
) -> f64 {
    let dot = |w: &[f64]| -> f64 { w.iter().zip(jamming).map(|(w, p)| w * p).sum() };
    let term = |a: f64, t: &[f64], b: f64, l: &[f64]| -> f64 {
        ((1.0 + 1.0 / (a + dot(t))) / (1.0 + 1.0 / (b + dot(l)))).log2()
    };
    let rate = term(coeffs.a1, &coeffs.t1, coeffs.b1, &coeffs.l1)
        + term(coeffs.a2, &coeffs.t2, coeffs.b2, &coeffs.l2);
    config.rate_gain * config.bandwidth / 2.0 * rate - market.payment(jamming)
}

/// `U_s = a (C1s + C2s) - sum_i m_i p_i`.
pub fn source_utility(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    market: &Market,
    config: &SystemConfig,
) -> Result<f64> {
    market.expect_len(powers.pj.len())?;
    let rate = secrecy_sum(powers, gains, config)?;
    Ok(config.rate_gain * rate - market.payment(&powers.pj))
}

/// `dU_s/dp_i` with every other power held at `powers`.
pub fn source_utility_partial(
    jammer_index: usize,
    powers: &PowerAllocation,
    gains: &ChannelGains,
    market: &Market,
    config: &SystemConfig,
) -> Result<f64> {
    market.check_index(jammer_index)?;
    let d = secrecy_sum_partial(powers, gains, config, jammer_index)?;
    Ok(config.rate_gain * d - market.prices[jammer_index])
}

/// Moves an interior maximum onto the sign change of `dU_s/dp_i` by
/// bisection, so the argmax is a smooth function of the prices. Returns the
/// input unchanged when no sign change brackets it.
fn polish(
    best: Maximum,
    jammer_index: usize,
    gains: &ChannelGains,
    market: &Market,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
) -> Maximum {
    let p_max = config.power_cap;
    if !(best.x > 0.0 && best.x < p_max) {
        return best;
    }
    let mut trial = powers_fixed.clone();
    let mut slope = |p: f64| {
        trial.pj[jammer_index] = p;
        source_utility_partial(jammer_index, &trial, gains, market, config).unwrap_or(f64::NAN)
    };
    let width = POLISH_WIDTH * p_max;
    let (mut lo, mut hi) = ((best.x - width).max(0.0), (best.x + width).min(p_max));
    if !(slope(lo) > 0.0 && slope(hi) < 0.0) {
        return best;
    }
    for _ in 0..POLISH_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    trial.pj[jammer_index] = x;
    match source_utility(&trial, gains, market, config) {
        // rounding slack: both points sit on the same peak
        Ok(value) if value >= best.value - 1e-12 * (1.0 + best.value.abs()) => Maximum { x, value },
        _ => best,
    }
}

pub(crate) fn best_response_with(
    jammer_index: usize,
    gains: &ChannelGains,
    market: &Market,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
) -> Result<Maximum> {
    market.check_index(jammer_index)?;
    market.expect_len(gains.num_jammers())?;
    // validates dimensions and the relay link once up front
    source_utility(powers_fixed, gains, market, config)?;
    let mut trial = powers_fixed.clone();
    let objective = |p: f64| {
        trial.pj[jammer_index] = p;
        source_utility(&trial, gains, market, config).unwrap_or(f64::NEG_INFINITY)
    };
    let coarse = maximize_on_interval(objective, config.power_cap, &ScanOptions::default());
    Ok(polish(
        coarse,
        jammer_index,
        gains,
        market,
        powers_fixed,
        config,
    ))
}

/// Power the sources buy from `jammer_index` with every other power held at
/// `powers_fixed`. The entry for `jammer_index` in `powers_fixed` is ignored.
pub fn source_best_response(
    jammer_index: usize,
    gains: &ChannelGains,
    market: &Market,
    powers_fixed: &PowerAllocation,
    config: &SystemConfig,
) -> Result<f64> {
    best_response_with(jammer_index, gains, market, powers_fixed, config).map(|m| m.x)
}

pub(crate) fn purchases_with(
    gains: &ChannelGains,
    market: &Market,
    sources: SourcePowers,
    config: &SystemConfig,
    warm_start: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = gains.num_jammers();
    market.expect_len(n)?;
    let start = match warm_start {
        Some(w) if w.len() == n => w.to_vec(),
        Some(w) => {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                got: w.len(),
            })
        }
        None => vec![0.0; n],
    };
    let mut alloc = sources.with_jamming(start);
    for _ in 0..PURCHASE_MAX_CYCLES {
        let mut change = 0.0f64;
        for i in 0..n {
            let p = best_response_with(i, gains, market, &alloc, config)?.x;
            change = change.max((p - alloc.pj[i]).abs());
            alloc.pj[i] = p;
        }
        if change < PURCHASE_TOL {
            break;
        }
    }
    Ok(alloc.pj)
}

/// Jamming powers bought at the given prices: cyclic best responses in
/// jammer order until the power vector settles.
pub fn source_purchases(
    gains: &ChannelGains,
    market: &Market,
    sources: SourcePowers,
    config: &SystemConfig,
    warm_start: Option<&[f64]>,
) -> Result<Vec<f64>> {
    purchases_with(gains, market, sources, config, warm_start)
}
