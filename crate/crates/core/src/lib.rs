//! Physical-layer secrecy for two-way relaying through an untrusted
//! amplify-and-forward relay, with friendly jammers paid through a
//! buyer/seller Stackelberg game.
//!
//! Module map:
//! - [`channel`]: geometry, path loss, fading and system parameters.
//! - [`rates`]: relay scaling, legitimate and eavesdropper rates, secrecy.
//! - [`nojam`]: optimal source/relay powers without jammers.
//! - [`game`]: source demand, jammer pricing and the iterated game.
//! - [`central`]: the centralized jamming baseline.
//! - [`experiment`]: reproducible sweeps driven by TOML specs.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod central;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod game;
pub mod nojam;
pub mod rates;
pub mod search;

pub use channel::{ChannelGains, Fading, NodePosition, SystemConfig, Topology};
pub use error::{ModelError, Result};
pub use rates::{PowerAllocation, RateReport, SourcePowers};
