//! Node geometry, path loss and per-frame fading.
//!
//! Only power gains ever enter the rate expressions, so a Rayleigh frame is
//! drawn directly as `Exp(1)` (the squared magnitude of a unit-variance
//! circular complex Gaussian) and scaled by the distance path loss.
//!
//! All randomness comes from a ChaCha8 stream seeded with a `u64`. Draws are
//! consumed in node order: source 1, source 2, then jammers by index. A given
//! jammer's gain therefore does not depend on how many jammers follow it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// A point in the unitless simulation plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
}

impl NodePosition {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &NodePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }
}

impl From<[f64; 2]> for NodePosition {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<NodePosition> for [f64; 2] {
    fn from(p: NodePosition) -> Self {
        [p.x, p.y]
    }
}

/// Physical constants shared by every node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Thermal noise power at every receiver.
    pub noise_power: f64,
    pub bandwidth: f64,
    /// Per-node transmit power cap.
    pub power_cap: f64,
    pub pathloss_exponent: f64,
    /// Economic gain per unit of secrecy rate in the source utility.
    pub rate_gain: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            noise_power: 0.01,
            bandwidth: 1.0,
            power_cap: 10.0,
            pathloss_exponent: 2.0,
            rate_gain: 1.0,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("noise_power", self.noise_power),
            ("bandwidth", self.bandwidth),
            ("power_cap", self.power_cap),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        let non_negative = [
            ("pathloss_exponent", self.pathloss_exponent),
            ("rate_gain", self.rate_gain),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same configuration with a different rate gain `a`.
    pub fn with_rate_gain(mut self, rate_gain: f64) -> Self {
        self.rate_gain = rate_gain;
        self
    }
}

/// Two sources, the untrusted relay and an ordered list of friendly jammers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Topology {
    pub source1: NodePosition,
    pub source2: NodePosition,
    pub relay: NodePosition,
    pub jammers: Vec<NodePosition>,
}

impl Default for Topology {
    fn default() -> Self {
        Self::reference(Vec::new())
    }
}

impl Topology {
    /// Sources at (-1, 0) and (1, 0), relay at the origin.
    pub fn reference(jammers: Vec<NodePosition>) -> Self {
        Self {
            source1: NodePosition::new(-1.0, 0.0),
            source2: NodePosition::new(1.0, 0.0),
            relay: NodePosition::new(0.0, 0.0),
            jammers,
        }
    }

    pub fn num_jammers(&self) -> usize {
        self.jammers.len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut nodes = vec![
            ("source1".to_string(), self.source1),
            ("source2".to_string(), self.source2),
        ];
        nodes.extend(
            self.jammers
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("jammer {i}"), *p)),
        );
        if !self.relay.is_finite() {
            return Err(ModelError::InvalidArgument(
                "relay coordinates must be finite".into(),
            ));
        }
        for (name, pos) in nodes {
            if !pos.is_finite() {
                return Err(ModelError::InvalidArgument(format!(
                    "{name} coordinates must be finite"
                )));
            }
            if pos.distance(&self.relay) <= 0.0 {
                return Err(ModelError::CoLocated { node: name });
            }
        }
        Ok(())
    }

    /// Rigid translation of every node.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            source1: self.source1.shifted(dx, dy),
            source2: self.source2.shifted(dx, dy),
            relay: self.relay.shifted(dx, dy),
            jammers: self.jammers.iter().map(|j| j.shifted(dx, dy)).collect(),
        }
    }

    /// Same sources and relay with only jammer `index`.
    pub fn with_single_jammer(&self, index: usize) -> Result<Self> {
        let jammer = *self.jammers.get(index).ok_or(ModelError::JammerIndex {
            index,
            count: self.jammers.len(),
        })?;
        Ok(Self {
            jammers: vec![jammer],
            ..self.clone()
        })
    }
}

/// Realized power gains towards the relay for one fading frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    pub g_s1r: f64,
    pub g_s2r: f64,
    pub g_jr: Vec<f64>,
}

impl ChannelGains {
    pub fn new(g_s1r: f64, g_s2r: f64, g_jr: Vec<f64>) -> Result<Self> {
        let all_ok = std::iter::once(&g_s1r)
            .chain(std::iter::once(&g_s2r))
            .chain(g_jr.iter())
            .all(|g| g.is_finite() && *g >= 0.0);
        if !all_ok {
            return Err(ModelError::InvalidArgument(
                "channel gains must be finite and >= 0".into(),
            ));
        }
        Ok(Self { g_s1r, g_s2r, g_jr })
    }

    /// Gains with no jammers present.
    pub fn sources_only(g_s1r: f64, g_s2r: f64) -> Result<Self> {
        Self::new(g_s1r, g_s2r, Vec::new())
    }

    pub fn num_jammers(&self) -> usize {
        self.g_jr.len()
    }

    /// The first `n` jammers only.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            g_jr: self.g_jr[..n.min(self.g_jr.len())].to_vec(),
            ..self.clone()
        }
    }

    /// Only jammer `index`.
    pub fn single_jammer(&self, index: usize) -> Result<Self> {
        let g = *self.g_jr.get(index).ok_or(ModelError::JammerIndex {
            index,
            count: self.g_jr.len(),
        })?;
        Ok(Self {
            g_jr: vec![g],
            ..self.clone()
        })
    }
}

/// Small-scale fading model applied on top of path loss.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fading {
    #[default]
    Rayleigh,
    /// Fading coefficient fixed to 1: gains are pure path loss.
    Unit,
}

/// Mean power gain `d^-alpha` at distance `d`.
pub fn path_loss_gain(distance: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(ModelError::NonPositiveDistance(distance));
    }
    Ok(distance.powf(-exponent))
}

/// Draws one frame of power gains for `topology`.
pub fn sample_gains(
    topology: &Topology,
    config: &SystemConfig,
    seed: u64,
    fading: Fading,
) -> Result<ChannelGains> {
    topology.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gain = |pos: &NodePosition| -> Result<f64> {
        let mean = path_loss_gain(pos.distance(&topology.relay), config.pathloss_exponent)?;
        let fade: f64 = match fading {
            Fading::Rayleigh => Exp1.sample(&mut rng),
            Fading::Unit => 1.0,
        };
        Ok(mean * fade)
    };
    let g_s1r = gain(&topology.source1)?;
    let g_s2r = gain(&topology.source2)?;
    let g_jr = topology
        .jammers
        .iter()
        .map(&mut gain)
        .collect::<Result<Vec<_>>>()?;
    ChannelGains::new(g_s1r, g_s2r, g_jr)
}

/// Derives an independent seed for sub-run `index` from a master seed
/// (SplitMix64 finalizer over the pair).
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_gain(1.0, 2.0).unwrap(), 1.0);
        assert!((path_loss_gain(2.0, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((path_loss_gain(0.5, 2.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn path_loss_rejects_non_positive_distance() {
        assert!(matches!(
            path_loss_gain(0.0, 2.0),
            Err(ModelError::NonPositiveDistance(_))
        ));
        assert!(path_loss_gain(-1.0, 2.0).is_err());
        assert!(path_loss_gain(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn unit_fading_is_pure_path_loss() {
        let topo = Topology::reference(vec![NodePosition::new(0.3, 0.4)]);
        let g = sample_gains(&topo, &SystemConfig::default(), 0, Fading::Unit).unwrap();
        assert_eq!(g.g_s1r, 1.0);
        assert_eq!(g.g_s2r, 1.0);
        assert!((g.g_jr[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_is_reproducible() {
        let topo = Topology::reference(vec![
            NodePosition::new(0.3, 0.4),
            NodePosition::new(2.0, 1.0),
        ]);
        let cfg = SystemConfig::default();
        let a = sample_gains(&topo, &cfg, 42, Fading::Rayleigh).unwrap();
        let b = sample_gains(&topo, &cfg, 42, Fading::Rayleigh).unwrap();
        assert_eq!(a, b);
        let c = sample_gains(&topo, &cfg, 43, Fading::Rayleigh).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn jammer_draws_are_prefix_stable() {
        let cfg = SystemConfig::default();
        let full = Topology::reference(vec![
            NodePosition::new(0.3, 0.4),
            NodePosition::new(0.5, 0.5),
            NodePosition::new(2.0, 2.0),
        ]);
        let short = Topology {
            jammers: full.jammers[..2].to_vec(),
            ..full.clone()
        };
        let a = sample_gains(&full, &cfg, 9, Fading::Rayleigh).unwrap();
        let b = sample_gains(&short, &cfg, 9, Fading::Rayleigh).unwrap();
        assert_eq!(a.truncated(2), b);
    }

    #[test]
    fn rayleigh_fades_have_unit_mean() {
        let topo = Topology::reference(vec![]);
        let cfg = SystemConfig::default();
        let n = 100_000u64;
        let mean = (0..n)
            .map(|s| {
                sample_gains(&topo, &cfg, s, Fading::Rayleigh)
                    .unwrap()
                    .g_s1r
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean fade {mean}");
    }

    #[test]
    fn co_located_node_is_rejected() {
        let topo = Topology::reference(vec![NodePosition::new(0.0, 0.0)]);
        let err = sample_gains(&topo, &SystemConfig::default(), 1, Fading::Unit).unwrap_err();
        assert!(matches!(err, ModelError::CoLocated { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::default().validate().is_ok());
        let bad = SystemConfig {
            noise_power: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let zero_gain = SystemConfig {
            rate_gain: 0.0,
            ..Default::default()
        };
        assert!(zero_gain.validate().is_ok());
    }

    #[test]
    fn sub_seeds_differ_by_index() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| sub_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(sub_seed(7, 3), sub_seed(7, 3));
    }
}
