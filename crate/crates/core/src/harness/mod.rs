//! Experiment orchestration: scenario runs, deltas to the reference,
//! sweeps over the (profile count × sample × strategy) grid, spike
//! statistics, and CSV/SVG reporting with run manifests.

pub mod delta;
pub mod manifest;
pub mod report;
pub mod scenario;
pub mod spikes;
pub mod sweep;

pub use delta::{compute_capacity_delta, compute_cost_delta, delta_record, DeltaRecord};
pub use manifest::{sha256_file, sha256_hex, RunManifest};
pub use report::{emit_outputs, read_results_csv, write_results_csv, write_scatter_svg, Series};
pub use scenario::{run_scenario, ChargingStrategy, ScenarioConfig};
pub use spikes::{spike_statistics, SpikeStats};
pub use sweep::{mean_std, sweep, ResultTable, SweepConfig, SweepRow};
