//! Experiment description files.
//!
//! One experiment per TOML file. Everything except `name` has a default, so
//! a file holding only `name = "secrecy_vs_jampower"` is a complete spec.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{Fading, SystemConfig, Topology};
use crate::game::{DemandModel, StackelbergOptions};

use super::ExperimentError;

pub const DEFAULT_SEED: u64 = 2015;
pub const DEFAULT_DRAWS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    NojamSurface,
    SecrecyVsJampower,
    DemandVsPrice,
    TwoJammerPriceGrid,
    RateVsNumJammers,
    CentralVsDistributed,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 6] = [
        ExperimentName::NojamSurface,
        ExperimentName::SecrecyVsJampower,
        ExperimentName::DemandVsPrice,
        ExperimentName::TwoJammerPriceGrid,
        ExperimentName::RateVsNumJammers,
        ExperimentName::CentralVsDistributed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::NojamSurface => "nojam_surface",
            ExperimentName::SecrecyVsJampower => "secrecy_vs_jampower",
            ExperimentName::DemandVsPrice => "demand_vs_price",
            ExperimentName::TwoJammerPriceGrid => "two_jammer_price_grid",
            ExperimentName::RateVsNumJammers => "rate_vs_num_jammers",
            ExperimentName::CentralVsDistributed => "central_vs_distributed",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentName::NojamSurface => {
                "secrecy sum over a (p1, p2) grid without jammers, relay at p_max"
            }
            ExperimentName::SecrecyVsJampower => {
                "secrecy sum against jamming power, each jammer alone"
            }
            ExperimentName::DemandVsPrice => {
                "power bought from each jammer alone against its price"
            }
            ExperimentName::TwoJammerPriceGrid => {
                "purchases, secrecy and utilities over a two-jammer price grid"
            }
            ExperimentName::RateVsNumJammers => {
                "centralized secrecy sum against the number of jammers"
            }
            ExperimentName::CentralVsDistributed => {
                "centralized against Stackelberg secrecy sum over the rate gain a"
            }
        }
    }

    /// The only sweep variable this experiment accepts.
    pub fn sweep_variable(self) -> SweepVariable {
        match self {
            ExperimentName::NojamSurface => SweepVariable::SourcePower,
            ExperimentName::SecrecyVsJampower => SweepVariable::JammerPower,
            ExperimentName::DemandVsPrice | ExperimentName::TwoJammerPriceGrid => {
                SweepVariable::Price
            }
            ExperimentName::RateVsNumJammers => SweepVariable::NumJammers,
            ExperimentName::CentralVsDistributed => SweepVariable::RateGain,
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// `p1` and `p2` on the same axis, forming a square grid.
    SourcePower,
    JammerPower,
    Price,
    NumJammers,
    /// The rate gain `a` of the source utility.
    RateGain,
}

impl SweepVariable {
    fn is_power(self) -> bool {
        matches!(
            self,
            SweepVariable::SourcePower | SweepVariable::JammerPower
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

/// One sweep axis. Unset fields are filled per experiment by [`load_spec`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxis {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<SweepVariable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<SweepScale>,
}

impl SweepAxis {
    /// Axis values in sweep order. Requires a filled axis.
    pub fn values(&self) -> Vec<f64> {
        let (min, max, steps) = (
            self.min.unwrap_or(0.0),
            self.max.unwrap_or(0.0),
            self.steps.unwrap_or(2),
        );
        let last = (steps - 1) as f64;
        (0..steps)
            .map(|k| {
                let t = k as f64 / last;
                if k + 1 == steps {
                    return max;
                }
                match self.scale.unwrap_or_default() {
                    SweepScale::Linear => min + (max - min) * t,
                    SweepScale::Log => 10f64.powf(min.log10() + (max.log10() - min.log10()) * t),
                }
            })
            .collect()
    }
}

/// Unit price and cost exponent every jammer starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketDefaults {
    pub initial_price: f64,
    pub cost_exponent: f64,
}

impl Default for MarketDefaults {
    fn default() -> Self {
        Self {
            initial_price: 1.0,
            cost_exponent: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameSettings {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub demand: DemandModel,
}

impl Default for GameSettings {
    fn default() -> Self {
        let o = StackelbergOptions::default();
        Self {
            damping: o.damping,
            tol: o.tol,
            max_iter: o.max_iter,
            demand: o.demand,
        }
    }
}

impl GameSettings {
    pub fn options(&self) -> StackelbergOptions {
        StackelbergOptions {
            damping: self.damping,
            tol: self.tol,
            max_iter: self.max_iter,
            demand: self.demand,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Fading draws per sweep point for averaged experiments. Unit fading
    /// always uses a single draw.
    pub draws: usize,
    /// Treat any non-converged game run as a failure.
    pub require_convergence: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            draws: DEFAULT_DRAWS,
            require_convergence: false,
        }
    }
}

/// Fixed power gains that replace the sampled ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsOverride {
    pub s1r: f64,
    pub s2r: f64,
    #[serde(default)]
    pub jammers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub fading: Fading,
    #[serde(default)]
    pub config: SystemConfig,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainsOverride>,
    #[serde(default)]
    pub sweep: SweepAxis,
    #[serde(default)]
    pub market: MarketDefaults,
    #[serde(default)]
    pub game: GameSettings,
    #[serde(default)]
    pub run: RunSettings,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Invalid(msg.into())
}

impl ExperimentSpec {
    /// A spec with every default for `name`, already filled and valid for
    /// experiments that need no jammers.
    pub fn new(name: ExperimentName) -> Self {
        let mut spec = Self {
            name,
            seed: DEFAULT_SEED,
            fading: Fading::default(),
            config: SystemConfig::default(),
            topology: Topology::default(),
            gains: None,
            sweep: SweepAxis::default(),
            market: MarketDefaults::default(),
            game: GameSettings::default(),
            run: RunSettings::default(),
        };
        spec.fill_defaults();
        spec
    }

    fn num_jammers(&self) -> usize {
        match &self.gains {
            Some(g) => g.jammers.len(),
            None => self.topology.num_jammers(),
        }
    }

    /// Fills every unset sweep field with the experiment's default.
    pub fn fill_defaults(&mut self) {
        let p_max = self.config.power_cap;
        let (min, max, steps, scale) = match self.name {
            ExperimentName::NojamSurface => (0.0, p_max, 41, SweepScale::Linear),
            ExperimentName::SecrecyVsJampower => (0.0, p_max, 101, SweepScale::Linear),
            ExperimentName::DemandVsPrice => (1e-3, 1e2, 51, SweepScale::Log),
            ExperimentName::TwoJammerPriceGrid => (1e-2, 1e2, 40, SweepScale::Log),
            ExperimentName::RateVsNumJammers => {
                let n = self.num_jammers().max(1);
                (0.0, n as f64, n + 1, SweepScale::Linear)
            }
            ExperimentName::CentralVsDistributed => (1.0, 1e3, 4, SweepScale::Log),
        };
        let s = &mut self.sweep;
        s.variable.get_or_insert(self.name.sweep_variable());
        s.min.get_or_insert(min);
        s.max.get_or_insert(max);
        s.steps.get_or_insert(steps);
        s.scale.get_or_insert(scale);
    }

    /// Checks a filled spec.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.config
            .validate()
            .map_err(|e| invalid(format!("config: {e}")))?;
        if self.seed > i64::MAX as u64 {
            return Err(invalid(format!(
                "seed must be at most {}, got {}",
                i64::MAX,
                self.seed
            )));
        }
        match &self.gains {
            Some(g) => {
                let all = [g.s1r, g.s2r].into_iter().chain(g.jammers.iter().copied());
                if all.into_iter().any(|v| !(v.is_finite() && v >= 0.0)) {
                    return Err(invalid("gains: every gain must be finite and >= 0"));
                }
                if !(g.s1r > 0.0 && g.s2r > 0.0) {
                    return Err(invalid("gains: source gains must be > 0"));
                }
            }
            None => self
                .topology
                .validate()
                .map_err(|e| invalid(format!("topology: {e}")))?,
        }

        let n = self.num_jammers();
        let need = match self.name {
            ExperimentName::SecrecyVsJampower
            | ExperimentName::DemandVsPrice
            | ExperimentName::CentralVsDistributed => 1,
            ExperimentName::TwoJammerPriceGrid => 2,
            _ => 0,
        };
        if n < need {
            return Err(invalid(format!(
                "{} needs at least {need} jammer(s), spec has {n}",
                self.name
            )));
        }
        if self.name == ExperimentName::TwoJammerPriceGrid && n != 2 {
            return Err(invalid(format!(
                "two_jammer_price_grid needs exactly 2 jammers, spec has {n}"
            )));
        }

        let s = &self.sweep;
        let (Some(variable), Some(min), Some(max), Some(steps), Some(scale)) =
            (s.variable, s.min, s.max, s.steps, s.scale)
        else {
            return Err(invalid("sweep: axis is not fully specified"));
        };
        if variable != self.name.sweep_variable() {
            return Err(invalid(format!(
                "sweep.variable: {} sweeps {:?}, got {variable:?}",
                self.name,
                self.name.sweep_variable()
            )));
        }
        if steps < 2 {
            return Err(invalid(format!("sweep.steps must be >= 2, got {steps}")));
        }
        if !(min.is_finite() && max.is_finite() && min >= 0.0 && min < max) {
            return Err(invalid(format!(
                "sweep: need 0 <= min < max, got min = {min}, max = {max}"
            )));
        }
        if variable.is_power() && max > self.config.power_cap {
            return Err(invalid(format!(
                "sweep.max: power axis exceeds p_max = {}, got {max}",
                self.config.power_cap
            )));
        }
        if scale == SweepScale::Log && min <= 0.0 {
            return Err(invalid(format!(
                "sweep.min: log scale needs min > 0, got {min}"
            )));
        }
        if variable == SweepVariable::NumJammers {
            if scale != SweepScale::Linear {
                return Err(invalid("sweep.scale: num_jammers must be linear"));
            }
            for v in s.values() {
                if v.fract() != 0.0 {
                    return Err(invalid(format!(
                        "sweep: num_jammers axis hits non-integer {v}"
                    )));
                }
            }
            if max > n as f64 {
                return Err(invalid(format!(
                    "sweep.max: only {n} jammers are defined, got {max}"
                )));
            }
        }

        let m = &self.market;
        if !(m.initial_price.is_finite() && m.initial_price >= 0.0) {
            return Err(invalid(format!(
                "market.initial_price must be >= 0, got {}",
                m.initial_price
            )));
        }
        if !(m.cost_exponent.is_finite() && m.cost_exponent >= 1.0) {
            return Err(invalid(format!(
                "market.cost_exponent must be >= 1, got {}",
                m.cost_exponent
            )));
        }
        let g = &self.game;
        if !(g.damping > 0.0 && g.damping <= 1.0) {
            return Err(invalid(format!(
                "game.damping must lie in (0, 1], got {}",
                g.damping
            )));
        }
        if !(g.tol > 0.0) || g.max_iter == 0 {
            return Err(invalid("game: tol must be > 0 and max_iter >= 1"));
        }
        if self.run.draws == 0 {
            return Err(invalid("run.draws must be >= 1"));
        }
        Ok(())
    }

    /// Canonical TOML form. Loading it back yields an identical spec.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec fields are TOML-representable")
    }
}

/// Parses, fills and validates a spec from TOML text.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, ExperimentError> {
    let mut spec: ExperimentSpec =
        toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    spec.fill_defaults();
    spec.validate()?;
    Ok(spec)
}

/// Reads and parses a spec file.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| match e {
        ExperimentError::Parse(msg) => ExperimentError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
