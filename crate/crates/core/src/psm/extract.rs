//! Turn a raw solution vector back into model terms via the registry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lp::{validate_solution, FeasibilityReport, RawSolution, SolveStatus};
use crate::psm::build::PsmModel;
use crate::{Error, Result};

/// Everything the harness reports about one solved scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub name: String,
    pub status: SolveStatus,
    pub objective: f64,
    pub iterations: usize,
    pub solve_time_s: f64,
    /// End-to-end wall time (data load through solve); filled by the caller.
    pub runtime_s: f64,
    /// `node/tech` → MW (generation, storage power, hydrogen units) and
    /// `node/tech/energy` → MWh (storage and cavern energy capacity).
    pub capacities: BTreeMap<String, f64>,
    /// `node/tech` → summed MWh generated over the horizon.
    pub generation_totals: BTreeMap<String, f64>,
    /// Aggregate BEV grid draw / feed-in per hour, MW.
    pub bev_charge: Vec<f64>,
    pub bev_discharge: Vec<f64>,
    pub feasibility: FeasibilityReport,
}

impl ScenarioResult {
    pub fn bev_charge_total_mwh(&self) -> f64 {
        self.bev_charge.iter().sum()
    }
}

/// Extract capacities, dispatch totals, and BEV aggregates from `raw`,
/// independently re-validating the solution against the LP.
pub fn extract_solution(m: &PsmModel, raw: &RawSolution) -> Result<ScenarioResult> {
    if raw.x.len() != m.lp.n_vars() {
        return Err(Error::Internal(format!(
            "solution has {} values, model has {} variables",
            raw.x.len(),
            m.lp.n_vars()
        )));
    }
    let reg = &m.registry;
    let x = |v: crate::lp::VarId| raw.x[v.0];

    let mut capacities = BTreeMap::new();
    for ((node, tech), cap) in &reg.gen_cap {
        capacities.insert(format!("{node}/{tech}"), x(*cap));
    }
    for ((node, tech), cap) in &reg.stor_power_cap {
        capacities.insert(format!("{node}/{tech}"), x(*cap));
    }
    for ((node, tech), cap) in &reg.stor_energy_cap {
        capacities.insert(format!("{node}/{tech}/energy"), x(*cap));
    }
    for (node, h2) in &reg.h2 {
        capacities.insert(format!("{node}/electrolyzer"), x(h2.ely_cap));
        capacities.insert(format!("{node}/h2_turbine"), x(h2.turbine_cap));
        capacities.insert(format!("{node}/h2_cavern/energy"), x(h2.cavern_cap));
    }

    let mut generation_totals = BTreeMap::new();
    for ((node, tech), vars) in &reg.gen {
        generation_totals.insert(
            format!("{node}/{tech}"),
            vars.iter().map(|v| x(*v)).sum(),
        );
    }

    let mut bev_charge = vec![0.0; m.horizon];
    let mut bev_discharge = vec![0.0; m.horizon];
    for block in &reg.bev {
        for (t, v) in block.charge.iter().enumerate() {
            bev_charge[t] += x(*v);
        }
        if let Some(d) = &block.discharge {
            for (t, v) in d.iter().enumerate() {
                bev_discharge[t] += x(*v);
            }
        }
    }

    let feasibility = validate_solution(&m.lp, raw, 1e-6)?;
    Ok(ScenarioResult {
        name: m.lp.name.clone(),
        status: raw.status,
        objective: raw.objective,
        iterations: raw.iterations,
        solve_time_s: raw.solve_time_s,
        runtime_s: 0.0,
        capacities,
        generation_totals,
        bev_charge,
        bev_discharge,
        feasibility,
    })
}
