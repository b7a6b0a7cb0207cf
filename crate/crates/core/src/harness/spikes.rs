//! Spike statistics of scaled aggregate BEV driving consumption: few
//! profiles at high per-profile scale produce tall, narrow load spikes that
//! average out as the sample grows.

use serde::{Deserialize, Serialize};

use crate::profile::ProfilePool;
use crate::sampling::Sample;
use crate::Result;

/// Reference fleet at which `threshold_gw` applies; the threshold scales
/// linearly with the actual fleet.
pub const THRESHOLD_REFERENCE_FLEET: f64 = 15e6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpikeStats {
    pub peak_gw: f64,
    pub mean_gw: f64,
    pub threshold_gw: f64,
    pub hours_above_threshold: usize,
}

/// Scaled aggregate hourly driving consumption of `sample`, its peak and
/// mean, and how many hours exceed the (fleet-scaled) threshold.
pub fn spike_statistics(
    sample: &Sample,
    pool: &ProfilePool,
    threshold_gw: f64,
) -> Result<SpikeStats> {
    let scale = sample.scale();
    let mut aggregate: Vec<f64> = Vec::new();
    for pid in &sample.profile_ids {
        let hourly = pool.get(*pid)?.hourly_consumption().values;
        if aggregate.is_empty() {
            aggregate = vec![0.0; hourly.len()];
        }
        for (a, v) in aggregate.iter_mut().zip(&hourly) {
            // kWh per vehicle-hour → GW for `scale` vehicles
            *a += v * scale / 1e6;
        }
    }
    let peak = aggregate.iter().cloned().fold(0.0, f64::max);
    let mean = if aggregate.is_empty() {
        0.0
    } else {
        aggregate.iter().sum::<f64>() / aggregate.len() as f64
    };
    let threshold = threshold_gw * sample.fleet_size / THRESHOLD_REFERENCE_FLEET;
    let hours_above = aggregate.iter().filter(|v| **v > threshold).count();
    Ok(SpikeStats {
        peak_gw: peak,
        mean_gw: mean,
        threshold_gw: threshold,
        hours_above_threshold: hours_above,
    })
}
