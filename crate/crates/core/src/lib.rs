//! Capacity-expansion power sector model coupled with individual, scaled
//! battery-electric-vehicle profiles.
//!
//! The crate is organised around five subsystems:
//!
//! * [`profile`] — synthetic BEV profile generation (mobility, driving
//!   consumption, grid availability) and pool serialization,
//! * [`sampling`] — reproducible profile sampling, fleet scaling and
//!   aggregate-characteristic trimming,
//! * [`lp`] — sparse LP representation, a bundled bounded-variable revised
//!   simplex, MPS export/import and solution validation,
//! * [`psm`] — the yearly investment-and-dispatch model builder with
//!   storage, a hydrogen chain, interconnections and BEV blocks,
//! * [`harness`] — scenario sweeps, deltas to the reference, spike
//!   statistics and CSV/SVG reporting.

pub mod cli;
pub mod error;
pub mod harness;
pub mod lp;
pub mod profile;
pub mod psm;
pub mod sampling;
pub mod series;

pub use error::{Error, Result};
