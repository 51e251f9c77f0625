//! Closed-form capacities and secrecy rates of the two-way AF relay link.
//!
//! Rates are in bits (log base 2) scaled by `W / 2` for the two-phase
//! protocol. Secrecy rates are clipped at zero.

use crate::channel::{ChannelGains, SystemConfig};
use crate::error::{ModelError, Result};

/// Transmit powers of the two sources and the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePowers {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
}

impl SourcePowers {
    pub const fn new(p1: f64, p2: f64, pr: f64) -> Self {
        Self { p1, p2, pr }
    }

    /// Every node at the power cap.
    pub fn at_cap(config: &SystemConfig) -> Self {
        let p = config.power_cap;
        Self::new(p, p, p)
    }

    pub fn with_jamming(self, pj: Vec<f64>) -> PowerAllocation {
        PowerAllocation {
            p1: self.p1,
            p2: self.p2,
            pr: self.pr,
            pj,
        }
    }
}

/// Full power vector: sources, relay and one entry per jammer.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
    pub pj: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(p1: f64, p2: f64, pr: f64, pj: Vec<f64>) -> Self {
        Self { p1, p2, pr, pj }
    }

    pub fn sources(&self) -> SourcePowers {
        SourcePowers::new(self.p1, self.p2, self.pr)
    }
}

/// Every intermediate of the rate computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub beta: f64,
    pub k1: f64,
    pub k2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c1m: f64,
    pub c2m: f64,
    pub c1s: f64,
    pub c2s: f64,
}

impl RateReport {
    pub fn secrecy_sum(&self) -> f64 {
        self.c1s + self.c2s
    }
}

/// SNRs of the two legitimate directions after self-interference removal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegitimateSnrs {
    /// S1 -> S2.
    pub gamma1: f64,
    /// S2 -> S1.
    pub gamma2: f64,
    pub k1: f64,
    pub k2: f64,
}

fn check(powers: &PowerAllocation, gains: &ChannelGains) -> Result<()> {
    if powers.pj.len() != gains.g_jr.len() {
        return Err(ModelError::DimensionMismatch {
            expected: gains.g_jr.len(),
            got: powers.pj.len(),
        });
    }
    let ok = [powers.p1, powers.p2, powers.pr]
        .iter()
        .chain(powers.pj.iter())
        .all(|p| p.is_finite() && *p >= 0.0);
    if !ok {
        return Err(ModelError::InvalidArgument(
            "powers must be finite and >= 0".into(),
        ));
    }
    Ok(())
}

/// Total jamming power received at the relay, `sum_i p_i g_i`.
pub fn received_jamming(powers: &PowerAllocation, gains: &ChannelGains) -> f64 {
    powers.pj.iter().zip(&gains.g_jr).map(|(p, g)| p * g).sum()
}

/// Relay amplification factor that normalizes its output to unit power.
pub fn beta_factor(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<f64> {
    check(powers, gains)?;
    let total = powers.p1 * gains.g_s1r
        + powers.p2 * gains.g_s2r
        + received_jamming(powers, gains)
        + config.noise_power;
    Ok(total.powf(-0.5))
}

fn eavesdropper_sinrs(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> (f64, f64) {
    let rx1 = powers.p1 * gains.g_s1r;
    let rx2 = powers.p2 * gains.g_s2r;
    let jam = received_jamming(powers, gains);
    let s2 = config.noise_power;
    (rx1 / (s2 + rx2 + jam), rx2 / (s2 + rx1 + jam))
}

/// Matched-filter capacities `(C1m, C2m)` of the relay eavesdropping on each source.
pub fn eavesdropper_capacities(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<(f64, f64)> {
    check(powers, gains)?;
    let (s1, s2) = eavesdropper_sinrs(powers, gains, config);
    let half_w = config.bandwidth / 2.0;
    Ok((half_w * (1.0 + s1).log2(), half_w * (1.0 + s2).log2()))
}

/// `(K1, K2)`: relay-noise terms forwarded to S2 and S1.
fn forwarded_noise(
    p1: f64,
    p2: f64,
    pr: f64,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<(f64, f64)> {
    if !(pr > 0.0) {
        return Err(ModelError::RelayLinkUnusable(format!(
            "relay power must be > 0, got {pr}"
        )));
    }
    if !(gains.g_s1r > 0.0 && gains.g_s2r > 0.0) {
        return Err(ModelError::RelayLinkUnusable(
            "source-relay gains must be > 0".into(),
        ));
    }
    let s2 = config.noise_power;
    let rx_total = p1 * gains.g_s1r + p2 * gains.g_s2r + s2;
    let k1 = s2 * rx_total / (pr * gains.g_s2r);
    let k2 = s2 * rx_total / (pr * gains.g_s1r);
    Ok((k1, k2))
}

/// SNRs of both legitimate directions, with the forwarded jamming residue.
pub fn legitimate_snrs(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<LegitimateSnrs> {
    check(powers, gains)?;
    let (k1, k2) = forwarded_noise(powers.p1, powers.p2, powers.pr, gains, config)?;
    let s2 = config.noise_power;
    let mut jam1 = 0.0;
    let mut jam2 = 0.0;
    for (p, g) in powers.pj.iter().zip(&gains.g_jr) {
        jam1 += s2 * g / (powers.pr * gains.g_s2r) * p;
        jam2 += s2 * g / (powers.pr * gains.g_s1r) * p;
    }
    Ok(LegitimateSnrs {
        gamma1: powers.p1 * gains.g_s1r / (s2 + k1 + jam1),
        gamma2: powers.p2 * gains.g_s2r / (s2 + k2 + jam2),
        k1,
        k2,
    })
}

fn clipped_difference(half_w: f64, legit_snr: f64, eaves_snr: f64) -> f64 {
    (half_w * ((1.0 + legit_snr).log2() - (1.0 + eaves_snr).log2())).max(0.0)
}

/// All rates for one power allocation and channel frame.
pub fn secrecy_rates(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<RateReport> {
    let snr = legitimate_snrs(powers, gains, config)?;
    let beta = beta_factor(powers, gains, config)?;
    let (e1, e2) = eavesdropper_sinrs(powers, gains, config);
    let half_w = config.bandwidth / 2.0;
    Ok(RateReport {
        beta,
        k1: snr.k1,
        k2: snr.k2,
        gamma1: snr.gamma1,
        gamma2: snr.gamma2,
        c1: half_w * (1.0 + snr.gamma1).log2(),
        c2: half_w * (1.0 + snr.gamma2).log2(),
        c1m: half_w * (1.0 + e1).log2(),
        c2m: half_w * (1.0 + e2).log2(),
        c1s: clipped_difference(half_w, snr.gamma1, e1),
        c2s: clipped_difference(half_w, snr.gamma2, e2),
    })
}

/// `C1s + C2s`; the scalar objective used by the optimizers.
pub fn secrecy_sum(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<f64> {
    secrecy_rates(powers, gains, config).map(|r| r.secrecy_sum())
}

/// `d(C1s + C2s)/dp_i` for jammer `jammer_index`. A clipped direction
/// contributes zero; at the clipping kink the unclipped slope is used.
pub fn secrecy_sum_partial(
    powers: &PowerAllocation,
    gains: &ChannelGains,
    config: &SystemConfig,
    jammer_index: usize,
) -> Result<f64> {
    let g_j = *gains
        .g_jr
        .get(jammer_index)
        .ok_or(ModelError::JammerIndex {
            index: jammer_index,
            count: gains.num_jammers(),
        })?;
    let r = secrecy_rates(powers, gains, config)?;
    let s2 = config.noise_power;
    let pr = powers.pr;
    let x = received_jamming(powers, gains);
    let rx1 = powers.p1 * gains.g_s1r;
    let rx2 = powers.p2 * gains.g_s2r;
    let (e1, e2) = eavesdropper_sinrs(powers, gains, config);

    // d ln(1 + s)/dp for s = num / (c + w p): -s/(1+s) * w / (c + w p)
    let slope = |snr: f64, weight: f64, denom: f64| -snr / (1.0 + snr) * weight / denom;
    let legit1 = slope(
        r.gamma1,
        s2 * g_j / (pr * gains.g_s2r),
        s2 + r.k1 + s2 * x / (pr * gains.g_s2r),
    );
    let legit2 = slope(
        r.gamma2,
        s2 * g_j / (pr * gains.g_s1r),
        s2 + r.k2 + s2 * x / (pr * gains.g_s1r),
    );
    let eaves1 = slope(e1, g_j, s2 + rx2 + x);
    let eaves2 = slope(e2, g_j, s2 + rx1 + x);

    let scale = config.bandwidth / 2.0 / std::f64::consts::LN_2;
    let mut d = 0.0;
    if r.c1s > 0.0 {
        d += scale * (legit1 - eaves1);
    }
    if r.c2s > 0.0 {
        d += scale * (legit2 - eaves2);
    }
    Ok(d)
}

/// Secrecy rates `(C~1s, C~2s)` of the jammer-free system, written directly
/// in terms of the source powers.
pub fn secrecy_rates_without_jamming(
    sources: SourcePowers,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<(f64, f64)> {
    let SourcePowers { p1, p2, pr } = sources;
    if ![p1, p2, pr].iter().all(|p| p.is_finite() && *p >= 0.0) {
        return Err(ModelError::InvalidArgument(
            "powers must be finite and >= 0".into(),
        ));
    }
    let (k1, k2) = forwarded_noise(p1, p2, pr, gains, config)?;
    let s2 = config.noise_power;
    let rx1 = p1 * gains.g_s1r;
    let rx2 = p2 * gains.g_s2r;
    let half_w = config.bandwidth / 2.0;
    let c1s = clipped_difference(half_w, rx1 / (s2 + k1), rx1 / (s2 + rx2));
    let c2s = clipped_difference(half_w, rx2 / (s2 + k2), rx2 / (s2 + rx1));
    Ok((c1s, c2s))
}
