//! Jammer-free two-way relaying: when a positive secrecy rate exists and
//! which `(p1, p2, pr)` maximizes it.
//!
//! The sum secrecy rate is `(W/2) (log2 F~)^+` with
//!
//! ```text
//!        (1 + P1/(s2+K1)) (1 + P2/(s2+K2))
//! F~ = -------------------------------------     Pk = pk gk
//!        (1 + P1/(s2+P2)) (1 + P2/(s2+P1))
//! ```
//!
//! `F~` increases in `pr`, so the relay always transmits at the cap. The
//! source behind the stronger link then backs off to the interior maximizer
//! of `F~` while the weaker one transmits at the cap.

use crate::channel::{ChannelGains, SystemConfig};
use crate::error::{ModelError, Result};
use crate::rates::{secrecy_rates_without_jamming, SourcePowers};
use crate::search::golden_section_max;

/// Relative tolerance for treating the two source-relay gains as equal.
pub const EQUAL_GAIN_RTOL: f64 = 1e-12;

/// Which source-relay link is stronger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainOrdering {
    G1Greater,
    G2Greater,
    Equal,
}

impl GainOrdering {
    pub fn of(gains: &ChannelGains) -> Self {
        let (g1, g2) = (gains.g_s1r, gains.g_s2r);
        if (g1 - g2).abs() <= EQUAL_GAIN_RTOL * g1.max(g2) {
            Self::Equal
        } else if g1 > g2 {
            Self::G1Greater
        } else {
            Self::G2Greater
        }
    }
}

/// Optimal jammer-free power vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoJamOptimum {
    pub p1_opt: f64,
    pub p2_opt: f64,
    pub pr_opt: f64,
    /// `C~1s + C~2s` achieved at the returned powers.
    pub secrecy_sum: f64,
    /// `(W/2) (log2 F~)^+` at the returned powers.
    pub objective: f64,
    pub case_tag: GainOrdering,
    /// False when the channel admits no point with both secrecy rates positive.
    pub feasible: bool,
}

/// `F~` together with its rate form and the feasibility of the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTilde {
    pub value: f64,
    /// `(W/2) (log2 F~)^+`
    pub secrecy: f64,
    /// `pr > max(T / (p2 g2^2), T / (p1 g1^2))`, i.e. both individual
    /// secrecy rates are positive. When false, `secrecy` is not the
    /// clipped sum of the individual rates.
    pub feasible: bool,
}

fn positive_gains(gains: &ChannelGains) -> Result<()> {
    if gains.g_s1r > 0.0 && gains.g_s2r > 0.0 {
        Ok(())
    } else {
        Err(ModelError::RelayLinkUnusable(
            "source-relay gains must be > 0".into(),
        ))
    }
}

/// `(lhs, rhs)` of the channel condition `(g1 + g2) / (g1 g2) < p_max / sigma^2`.
fn feasibility_sides(gains: &ChannelGains, config: &SystemConfig) -> (f64, f64) {
    let (g1, g2) = (gains.g_s1r, gains.g_s2r);
    ((g1 + g2) / (g1 * g2), config.power_cap / config.noise_power)
}

/// Whether some powers within the caps give both sources a positive secrecy rate.
pub fn feasible_nonzero_secrecy(gains: &ChannelGains, config: &SystemConfig) -> Result<bool> {
    positive_gains(gains)?;
    let (lhs, rhs) = feasibility_sides(gains, config);
    Ok(lhs < rhs)
}

/// Evaluates `F~(pr, p1, p2)`.
pub fn f_tilde(
    sources: SourcePowers,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<FTilde> {
    positive_gains(gains)?;
    let SourcePowers { p1, p2, pr } = sources;
    if !(pr > 0.0) || ![p1, p2].iter().all(|p| p.is_finite() && *p >= 0.0) {
        return Err(ModelError::InvalidArgument(format!(
            "invalid powers {sources:?}"
        )));
    }
    let s2 = config.noise_power;
    let (g1, g2) = (gains.g_s1r, gains.g_s2r);
    let (rx1, rx2) = (p1 * g1, p2 * g2);
    let rx_total = rx1 + rx2 + s2;
    let k1 = s2 * rx_total / (pr * g2);
    let k2 = s2 * rx_total / (pr * g1);
    let value = (1.0 + rx1 / (s2 + k1)) * (1.0 + rx2 / (s2 + k2))
        / ((1.0 + rx1 / (s2 + rx2)) * (1.0 + rx2 / (s2 + rx1)));

    let t = rx_total * s2;
    let threshold = (t / (p2 * g2 * g2)).max(t / (p1 * g1 * g1));
    Ok(FTilde {
        value,
        secrecy: (config.bandwidth / 2.0 * value.log2()).max(0.0),
        feasible: pr > threshold,
    })
}

fn optimum_at(
    p1: f64,
    p2: f64,
    case_tag: GainOrdering,
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<NoJamOptimum> {
    let pr = config.power_cap;
    let sources = SourcePowers::new(p1, p2, pr);
    let (c1s, c2s) = secrecy_rates_without_jamming(sources, gains, config)?;
    let ft = f_tilde(sources, gains, config)?;
    Ok(NoJamOptimum {
        p1_opt: p1,
        p2_opt: p2,
        pr_opt: pr,
        secrecy_sum: c1s + c2s,
        objective: ft.secrecy,
        case_tag,
        feasible: true,
    })
}

/// Maximizes `F~(p_max, ., .)` over the free source power; the other two
/// powers sit at the cap.
pub fn optimize_no_jammer(gains: &ChannelGains, config: &SystemConfig) -> Result<NoJamOptimum> {
    config.validate()?;
    positive_gains(gains)?;
    let (lhs, rhs) = feasibility_sides(gains, config);
    if !(lhs < rhs) {
        return Err(ModelError::Infeasible { lhs, rhs });
    }

    let p_max = config.power_cap;
    let case_tag = GainOrdering::of(gains);
    let free_power = |set: &dyn Fn(f64) -> SourcePowers| -> Result<f64> {
        let objective = |p: f64| {
            f_tilde(set(p), gains, config)
                .map(|f| f.value)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let interior = golden_section_max(objective, 1e-6 * p_max, p_max, 1e-9 * p_max);
        // the cap wins unless the interior point is strictly better
        Ok(if interior.value > objective(p_max) {
            interior.x
        } else {
            p_max
        })
    };

    match case_tag {
        GainOrdering::Equal => optimum_at(p_max, p_max, case_tag, gains, config),
        GainOrdering::G1Greater => {
            let p1 = free_power(&|p| SourcePowers::new(p, p_max, p_max))?;
            optimum_at(p1, p_max, case_tag, gains, config)
        }
        GainOrdering::G2Greater => {
            let p2 = free_power(&|p| SourcePowers::new(p_max, p, p_max))?;
            optimum_at(p_max, p2, case_tag, gains, config)
        }
    }
}

/// Like [`optimize_no_jammer`], but an infeasible channel yields all powers
/// at the cap, zero secrecy and `feasible == false` instead of an error.
pub fn optimize_no_jammer_best_effort(
    gains: &ChannelGains,
    config: &SystemConfig,
) -> Result<NoJamOptimum> {
    match optimize_no_jammer(gains, config) {
        Err(ModelError::Infeasible { .. }) => {
            let p = config.power_cap;
            Ok(NoJamOptimum {
                p1_opt: p,
                p2_opt: p,
                pr_opt: p,
                secrecy_sum: 0.0,
                objective: 0.0,
                case_tag: GainOrdering::of(gains),
                feasible: false,
            })
        }
        other => other,
    }
}
