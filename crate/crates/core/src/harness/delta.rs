//! Differences of a scenario against its reference: system cost per vehicle
//! and per-technology capacity changes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::psm::ScenarioResult;
use crate::{Error, Result};

/// Cost and capacity changes of one scenario relative to the reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaRecord {
    /// absolute €
    pub cost_delta_eur: f64,
    /// positive = additional cost
    pub cost_delta_eur_per_bev_yr: f64,
    /// `node/tech[/energy]` → MW or MWh difference
    pub capacity_deltas: BTreeMap<String, f64>,
    pub bevs_per_profile: f64,
}

/// (scenario − reference) per vehicle; positive means BEVs made the system
/// more expensive.
pub fn compute_cost_delta(objective: f64, reference_objective: f64, fleet_size: f64) -> Result<f64> {
    if fleet_size <= 0.0 {
        return Err(Error::Input("cost delta needs fleet_size > 0".into()));
    }
    Ok((objective - reference_objective) / fleet_size)
}

/// Elementwise capacity difference over an identical technology set.
pub fn compute_capacity_delta(
    result: &ScenarioResult,
    reference: &ScenarioResult,
) -> Result<BTreeMap<String, f64>> {
    let keys: Vec<&String> = result.capacities.keys().collect();
    let ref_keys: Vec<&String> = reference.capacities.keys().collect();
    if keys != ref_keys {
        return Err(Error::Input(format!(
            "technology sets differ: scenario {keys:?} vs reference {ref_keys:?}"
        )));
    }
    Ok(result
        .capacities
        .iter()
        .map(|(k, v)| (k.clone(), v - reference.capacities[k]))
        .collect())
}

pub fn delta_record(
    result: &ScenarioResult,
    reference: &ScenarioResult,
    fleet_size: f64,
    n_profiles: usize,
) -> Result<DeltaRecord> {
    Ok(DeltaRecord {
        cost_delta_eur: result.objective - reference.objective,
        cost_delta_eur_per_bev_yr: compute_cost_delta(
            result.objective,
            reference.objective,
            fleet_size,
        )?,
        capacity_deltas: compute_capacity_delta(result, reference)?,
        bevs_per_profile: crate::sampling::scale_factor(fleet_size, n_profiles)?,
    })
}
