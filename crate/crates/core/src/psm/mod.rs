//! Capacity-expansion and dispatch model: configuration, LP construction,
//! and solution extraction.

pub mod build;
pub mod config;
pub mod extract;

pub use build::{
    attach_bev_block, attach_hydrogen_demand, build_reference_model, hourly_h2_demand, PsmModel,
    Registry, Strategy, HOURS_PER_YEAR,
};
pub use config::{
    BevParams, GenerationTech, HydrogenChain, NodeConfig, NtcLink, SeriesSpec, StorageTech,
    SystemConfig,
};
pub use extract::{extract_solution, ScenarioResult};
