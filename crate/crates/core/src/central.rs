//! Centralized baseline: jamming powers that maximize `C1s + C2s` with full
//! channel knowledge and no payments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelGains, SystemConfig};
use crate::error::Result;
use crate::rates::{secrecy_sum, PowerAllocation, SourcePowers};
use crate::search::{maximize_on_interval, Maximum, ScanOptions};

/// Absolute slack when comparing a single jammer against the full set.
pub const EFFECTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralOptions {
    /// Seed for the two random restarts.
    pub seed: u64,
    pub max_cycles: usize,
    /// A cycle improving the objective by less than this ends a restart.
    pub cycle_tol: f64,
}

impl Default for CentralOptions {
    fn default() -> Self {
        Self {
            seed: 0x5EC_2E7,
            max_cycles: 200,
            cycle_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralOptimum {
    pub pj_opt: Vec<f64>,
    pub secrecy_sum: f64,
}

fn coordinate_ascent(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    start: Vec<f64>,
    opts: &CentralOptions,
) -> Result<CentralOptimum> {
    let scan = ScanOptions::default();
    let mut alloc = sources.with_jamming(start);
    let mut value = secrecy_sum(&alloc, gains, config)?;
    for _ in 0..opts.max_cycles {
        let before = value;
        for i in 0..alloc.pj.len() {
            let mut trial = alloc.clone();
            let best = maximize_on_interval(
                |p| {
                    trial.pj[i] = p;
                    secrecy_sum(&trial, gains, config).unwrap_or(f64::NEG_INFINITY)
                },
                config.power_cap,
                &scan,
            );
            if best.value > value {
                alloc.pj[i] = best.x;
                value = best.value;
            }
        }
        if value - before < opts.cycle_tol {
            break;
        }
    }
    Ok(CentralOptimum {
        pj_opt: alloc.pj,
        secrecy_sum: value,
    })
}

/// [`centralized_optimize_with`] using default options.
pub fn centralized_optimize(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
) -> Result<CentralOptimum> {
    centralized_optimize_with(gains, sources, config, &CentralOptions::default())
}

/// Cyclic coordinate ascent on `C1s + C2s` over `[0, p_max]^N`, restarted
/// from all-zero, all-`p_max` and two random points. The best restart wins;
/// earlier restarts win ties.
pub fn centralized_optimize_with(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    opts: &CentralOptions,
) -> Result<CentralOptimum> {
    config.validate()?;
    let n = gains.num_jammers();
    let p_max = config.power_cap;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![vec![0.0; n], vec![p_max; n]];
    for _ in 0..2 {
        starts.push((0..n).map(|_| rng.random_range(0.0..=p_max)).collect());
    }
    if n == 0 {
        starts.truncate(1);
    }

    let mut best: Option<CentralOptimum> = None;
    for start in starts {
        let cand = coordinate_ascent(gains, sources, config, start, opts)?;
        if best
            .as_ref()
            .is_none_or(|b| cand.secrecy_sum > b.secrecy_sum)
        {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Best secrecy sum over total received jamming power `x in [0, x_max]`,
/// ignoring per-jammer caps. Secrecy depends on the jammers only through
/// `x = sum_i p_i g_i`, so this is the ceiling any jammer set can reach.
pub fn secrecy_ceiling(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    x_max: f64,
) -> Result<Maximum> {
    let virtual_jammer = ChannelGains::new(gains.g_s1r, gains.g_s2r, vec![1.0])?;
    let mut alloc: PowerAllocation = sources.with_jamming(vec![0.0]);
    secrecy_sum(&alloc, &virtual_jammer, config)?;
    Ok(maximize_on_interval(
        |x| {
            alloc.pj[0] = x;
            secrecy_sum(&alloc, &virtual_jammer, config).unwrap_or(f64::NEG_INFINITY)
        },
        x_max,
        &ScanOptions::default(),
    ))
}

/// Per jammer: whether it alone, with some power in `(0, p_max]`, reaches
/// the centralized optimum of the full jammer set.
pub fn sufficiently_effective(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
) -> Result<Vec<bool>> {
    let all = centralized_optimize(gains, sources, config)?;
    effective_against(gains, sources, config, all.secrecy_sum)
}

/// [`sufficiently_effective`] against a known optimum of the full set.
pub fn effective_against(
    gains: &ChannelGains,
    sources: SourcePowers,
    config: &SystemConfig,
    optimum: f64,
) -> Result<Vec<bool>> {
    (0..gains.num_jammers())
        .map(|i| {
            let alone = centralized_optimize(&gains.single_jammer(i)?, sources, config)?;
            Ok(alone.pj_opt[0] > 0.0 && alone.secrecy_sum >= optimum - EFFECTIVE_TOL)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::secrecy_rates_without_jamming;

    #[test]
    fn no_jammers_gives_jammer_free_rate() {
        let cfg = SystemConfig::default();
        let g = ChannelGains::sources_only(0.9, 0.4).unwrap();
        let src = SourcePowers::at_cap(&cfg);
        let opt = centralized_optimize(&g, src, &cfg).unwrap();
        assert!(opt.pj_opt.is_empty());
        let (a, b) = secrecy_rates_without_jamming(src, &g, &cfg).unwrap();
        assert_eq!(opt.secrecy_sum, a + b);
    }

    #[test]
    fn near_jammer_improves_secrecy() {
        let cfg = SystemConfig::default();
        let g = ChannelGains::new(1.0, 1.0, vec![4.0]).unwrap();
        let src = SourcePowers::at_cap(&cfg);
        let opt = centralized_optimize(&g, src, &cfg).unwrap();
        let (a, b) = secrecy_rates_without_jamming(src, &g, &cfg).unwrap();
        assert!(opt.secrecy_sum > a + b);
        assert!(opt.pj_opt[0] > 0.0 && opt.pj_opt[0] < cfg.power_cap);
    }

    #[test]
    fn ceiling_bounds_every_jammer_set() {
        let cfg = SystemConfig::default();
        let src = SourcePowers::at_cap(&cfg);
        let g = ChannelGains::new(1.0, 1.0, vec![0.1, 0.16, 0.2]).unwrap();
        let ceiling = secrecy_ceiling(&g, src, &cfg, 1e3).unwrap();
        let opt = centralized_optimize(&g, src, &cfg).unwrap();
        assert!(opt.secrecy_sum <= ceiling.value + 1e-12);
    }

    #[test]
    fn effectiveness_of_near_and_far_jammers() {
        let cfg = SystemConfig::default();
        let src = SourcePowers::at_cap(&cfg);
        // one near jammer, one far jammer that cannot reach the optimum alone
        let g = ChannelGains::new(1.0, 1.0, vec![4.0, 0.1]).unwrap();
        assert_eq!(
            sufficiently_effective(&g, src, &cfg).unwrap(),
            vec![true, false]
        );
    }
}
