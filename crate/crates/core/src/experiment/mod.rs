//! Reproducible experiment sweeps: TOML spec in, CSV table out.

mod runner;
mod spec;
mod table;

pub use runner::{
    central_draw, draw_seed, effective_draws, game_draw, run_experiment, spec_gains, CentralDraw,
    GameDraw, CEILING_SPAN,
};
pub use spec::{
    load_spec, parse_spec, ExperimentName, ExperimentSpec, GainsOverride, GameSettings,
    MarketDefaults, RunSettings, SweepAxis, SweepScale, SweepVariable, DEFAULT_DRAWS, DEFAULT_SEED,
};
pub use table::ResultTable;

use crate::error::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("cannot read spec: {0}")]
    Io(String),
    #[error("spec parse error: {0}")]
    Parse(String),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("at {at}: {source}")]
    Model {
        at: String,
        #[source]
        source: ModelError,
    },
}

impl ExperimentError {
    /// The spec file is missing, unreadable or invalid, as opposed to a
    /// failure of the computation.
    pub fn is_spec_error(&self) -> bool {
        matches!(
            self,
            ExperimentError::Io(_) | ExperimentError::Parse(_) | ExperimentError::Invalid(_)
        )
    }
}
