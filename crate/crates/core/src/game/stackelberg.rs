use crate::channel::{ChannelGains, SystemConfig};
use crate::error::{ModelError, Result};
use crate::rates::{PowerAllocation, SourcePowers};

use super::approx::high_interference_best_response;
use super::market::{jammer_utility, Market};
use super::pricing::{damped_price_step, demand, DemandModel};
use super::source::{purchases_with, source_utility};

/// Relative utility gain a unilateral deviation may find at an equilibrium.
pub const EQUILIBRIUM_RTOL: f64 = 1e-4;
/// Price deviations probed by [`check_equilibrium`] span `m (1 +- span)`.
const PRICE_PROBE_SPAN: f64 = 0.1;
const PRICE_PROBES: usize = 21;
const POWER_PROBES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackelbergOptions {
    /// Weight `lambda` of the proposed price in `m <- (1 - lambda) m + lambda I(m)`.
    pub damping: f64,
    /// Relative change in prices and purchases below which the game stops.
    pub tol: f64,
    pub max_iter: usize,
    pub demand: DemandModel,
}

impl Default for StackelbergOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-6,
            max_iter: 500,
            demand: DemandModel::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilitySnapshot {
    pub source: f64,
    pub jammers: Vec<f64>,
}

/// Full history of one game run. Entry `t` of every history holds the
/// state after `t` price updates.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub sources: SourcePowers,
    pub cost_exponents: Vec<f64>,
    pub price_history: Vec<Vec<f64>>,
    pub power_history: Vec<Vec<f64>>,
    pub utility_history: Vec<UtilitySnapshot>,
    pub converged: bool,
    pub iterations: usize,
    /// Number of per-jammer updates that fell back to price probing.
    pub fallbacks: usize,
}

impl GameTrace {
    pub fn final_prices(&self) -> &[f64] {
        self.price_history.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_powers(&self) -> &[f64] {
        self.power_history.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_utilities(&self) -> &UtilitySnapshot {
        self.utility_history
            .last()
            .expect("trace always holds the initial state")
    }

    pub fn final_market(&self) -> Market {
        Market {
            prices: self.final_prices().to_vec(),
            cost_exponents: self.cost_exponents.clone(),
        }
    }

    pub fn final_allocation(&self) -> PowerAllocation {
        self.sources.with_jamming(self.final_powers().to_vec())
    }
}

fn purchases(
    model: DemandModel,
    gains: &ChannelGains,
    market: &Market,
    sources: SourcePowers,
    config: &SystemConfig,
    warm: &[f64],
) -> Result<Vec<f64>> {
    match model {
        DemandModel::Exact => purchases_with(gains, market, sources, config, Some(warm)),
        DemandModel::HighInterference => {
            let alloc = sources.with_jamming(warm.to_vec());
            (0..market.len())
                .map(|i| {
                    high_interference_best_response(i, gains, market, &alloc, config)
                        .map(|h| h.p_star)
                })
                .collect()
        }
    }
}

fn snapshot(
    gains: &ChannelGains,
    market: &Market,
    alloc: &PowerAllocation,
    config: &SystemConfig,
) -> Result<UtilitySnapshot> {
    let source = source_utility(alloc, gains, market, config)?;
    let jammers = alloc
        .pj
        .iter()
        .enumerate()
        .map(|(i, p)| jammer_utility(i, market, *p))
        .collect::<Result<Vec<_>>>()?;
    Ok(UtilitySnapshot { source, jammers })
}

fn max_relative_change(old: &[f64], new: &[f64], floor: f64) -> f64 {
    old.iter()
        .zip(new)
        .map(|(o, n)| {
            let diff = (n - o).abs();
            if diff == 0.0 {
                0.0
            } else {
                diff / o.abs().max(n.abs()).max(floor)
            }
        })
        .fold(0.0, f64::max)
}

/// Iterates source purchases and damped jammer price updates until both
/// settle to within `options.tol` (relative), or `max_iter` is reached.
///
/// All prices are updated simultaneously from the same state. A run that
/// hits `max_iter` is returned with `converged == false`.
pub fn run_stackelberg(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    market_init: &Market,
    options: &StackelbergOptions,
) -> Result<GameTrace> {
    config.validate()?;
    let n = gains.num_jammers();
    market_init.expect_len(n)?;
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(ModelError::InvalidArgument(format!(
            "damping must lie in (0, 1], got {}",
            options.damping
        )));
    }

    let mut market = market_init.clone();
    let mut powers = purchases(
        options.demand,
        gains,
        &market,
        sources,
        config,
        &vec![0.0; n],
    )?;
    let mut trace = GameTrace {
        sources,
        cost_exponents: market.cost_exponents.clone(),
        price_history: vec![market.prices.clone()],
        power_history: vec![powers.clone()],
        utility_history: vec![snapshot(
            gains,
            &market,
            &sources.with_jamming(powers.clone()),
            config,
        )?],
        converged: n == 0,
        iterations: 0,
        fallbacks: 0,
    };
    if n == 0 {
        return Ok(trace);
    }

    let power_floor = 1e-12 * config.power_cap;
    for t in 1..=options.max_iter {
        let alloc = sources.with_jamming(powers.clone());
        let mut next = market.prices.clone();
        for (i, price) in next.iter_mut().enumerate() {
            let up = damped_price_step(
                i,
                &market,
                gains,
                &alloc,
                config,
                options.demand,
                options.damping,
            )?;
            if up.fallback.is_some() {
                trace.fallbacks += 1;
            }
            *price = up.price;
        }
        let next_market = Market {
            prices: next,
            cost_exponents: market.cost_exponents.clone(),
        };
        let next_powers = purchases(
            options.demand,
            gains,
            &next_market,
            sources,
            config,
            &powers,
        )?;

        let price_change =
            max_relative_change(&market.prices, &next_market.prices, f64::MIN_POSITIVE);
        let power_change = max_relative_change(&powers, &next_powers, power_floor);

        trace.price_history.push(next_market.prices.clone());
        trace.power_history.push(next_powers.clone());
        trace.utility_history.push(snapshot(
            gains,
            &next_market,
            &sources.with_jamming(next_powers.clone()),
            config,
        )?);
        trace.iterations = t;

        market = next_market;
        powers = next_powers;
        if price_change < options.tol && power_change < options.tol {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// Largest relative utility gains found by unilateral deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCheck {
    /// Best gain for the sources from changing any single purchase on a
    /// uniform grid over `[0, p_max]`.
    pub source_gain: f64,
    /// Per jammer, best gain from re-pricing within `+-10%` while the sources
    /// re-optimize that jammer's purchase.
    pub jammer_gains: Vec<f64>,
    pub holds: bool,
}

/// Probes a price/power pair for profitable unilateral deviations.
pub fn check_equilibrium(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    market: &Market,
    powers: &[f64],
) -> Result<EquilibriumCheck> {
    let alloc = sources.with_jamming(powers.to_vec());
    let base = source_utility(&alloc, gains, market, config)?;
    let rel = |gain: f64, reference: f64| (gain.max(0.0)) / reference.abs().max(1e-12);

    let mut source_gain = 0.0f64;
    for i in 0..powers.len() {
        let mut trial = alloc.clone();
        for k in 0..POWER_PROBES {
            trial.pj[i] = config.power_cap * k as f64 / (POWER_PROBES - 1) as f64;
            let u = source_utility(&trial, gains, market, config)?;
            source_gain = source_gain.max(rel(u - base, base));
        }
    }

    let mut jammer_gains = Vec::with_capacity(powers.len());
    for (i, &p) in powers.iter().enumerate() {
        let here = jammer_utility(i, market, p)?;
        let mut best = 0.0f64;
        for k in 0..PRICE_PROBES {
            let theta = 1.0 - PRICE_PROBE_SPAN
                + 2.0 * PRICE_PROBE_SPAN * k as f64 / (PRICE_PROBES - 1) as f64;
            let probe = market.with_price(i, market.prices[i] * theta);
            let bought = demand(DemandModel::Exact, i, gains, &probe, &alloc, config)?;
            let u = jammer_utility(i, &probe, bought)?;
            best = best.max(rel(u - here, here));
        }
        jammer_gains.push(best);
    }

    let holds =
        source_gain <= EQUILIBRIUM_RTOL && jammer_gains.iter().all(|g| *g <= EQUILIBRIUM_RTOL);
    Ok(EquilibriumCheck {
        source_gain,
        jammer_gains,
        holds,
    })
}
