//! Buyer/seller Stackelberg game between the two sources (one buyer) and
//! the friendly jammers (sellers of jamming power).
//!
//! The sources buy jamming power `p_i` from jammer `i` at unit price `m_i`
//! and maximize `U_s = a (C1s + C2s) - sum_i m_i p_i`. Each jammer earns
//! `U_i = m_i p_i^{c_i}` and adjusts its price through the fixed-point map
//! `m_i <- -p_i / (c_i dp_i/dm_i)`.

mod approx;
mod market;
mod pricing;
mod source;
mod stackelberg;

pub use approx::{
    high_interference_best_response, high_interference_demand, HighInterferenceApprox, REGIME_RATIO,
};
pub use market::{jammer_utility, Market};
pub use pricing::{
    damped_price_step, demand, price_update, DemandModel, PriceFallback, PriceUpdate, FALLBACK_STEP,
};
pub use source::{
    source_best_response, source_purchases, source_utility, source_utility_from_coefficients,
    source_utility_partial, utility_coefficients, UtilityCoefficients,
};
pub use stackelberg::{
    check_equilibrium, run_stackelberg, EquilibriumCheck, GameTrace, StackelbergOptions,
    UtilitySnapshot,
};
