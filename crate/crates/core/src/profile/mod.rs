//! Synthetic BEV profile generation.
//!
//! A profile is a coherent triple of time series for one vehicle over a
//! representative year at 15-minute resolution: mobility (km driven per
//! step), driving electricity consumption (kWh per step) and grid
//! availability (kW per step). Generation is deterministic given a seed and
//! a configuration, so pools serialize and reload bit-exactly.

mod derive;
mod mobility;
mod pool;
mod rules;
mod vehicle;

pub use derive::{derive_driving_consumption, derive_grid_availability, replay_min_soc};
pub use mobility::{generate_mobility, MobilityProfile, StepState, TripRecord};
pub use pool::{build_pool, load_pool, save_pool, BevProfile, PoolConfig, ProfilePool};
pub use rules::{ChargerDistribution, ChargerSpec, DayType, Destination, LogNormalSpec, MobilityRules};
pub use vehicle::{VehicleCatalog, VehicleModel};

/// Steps per day at 15-minute resolution.
pub const STEPS_PER_DAY: usize = 96;

/// Full representative year at 15-minute resolution.
pub const YEAR_STEPS: usize = 365 * STEPS_PER_DAY;
