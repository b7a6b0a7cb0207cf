//! Scenario grid: (profile count × sample × strategy) against a shared
//! reference, with sample sets reused across strategies so the comparison
//! isolates the charging strategy.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::harness::delta::delta_record;
use crate::harness::scenario::{run_scenario, ChargingStrategy, ScenarioConfig};
use crate::lp::{SimplexOptions, SolveStatus};
use crate::profile::ProfilePool;
use crate::psm::{ScenarioResult, Strategy, SystemConfig};
use crate::sampling::{draw_sample_set, Sample};
use crate::{Error, Result};

/// Grid definition for one setting.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub setting: String,
    pub system: SystemConfig,
    pub base_dir: PathBuf,
    pub node: Option<String>,
    pub fleet_size: f64,
    pub profile_counts: Vec<usize>,
    pub samples_per_count: usize,
    pub master_seed: u64,
    pub strategies: Vec<Strategy>,
    pub options: SimplexOptions,
}

/// One results-table row (the CSV schema mirrors this struct).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub setting: String,
    pub strategy: String,
    pub fleet_size: f64,
    pub n_profiles: usize,
    pub sample_id: u32,
    pub bevs_per_profile: f64,
    pub objective_eur: f64,
    pub cost_delta_eur: f64,
    pub cost_delta_eur_per_bev_yr: f64,
    pub runtime_s: f64,
    pub status: String,
    /// `node/tech[/energy]` → capacity
    pub capacities: BTreeMap<String, f64>,
    pub capacity_deltas: BTreeMap<String, f64>,
    /// profile ids of the sample, for cross-strategy identity checks
    pub profile_ids: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub reference_objective: f64,
    pub rows: Vec<SweepRow>,
    /// scenarios that failed to solve; excluded from `rows`
    pub warnings: Vec<String>,
}

impl ResultTable {
    pub fn rows_for(&self, strategy: Strategy, n_profiles: usize) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.strategy == strategy.as_str() && r.n_profiles == n_profiles)
            .collect()
    }

    /// Mean and standard deviation of the per-BEV cost delta for one cell.
    pub fn delta_stats(&self, strategy: Strategy, n_profiles: usize) -> (f64, f64) {
        let deltas: Vec<f64> = self
            .rows_for(strategy, n_profiles)
            .iter()
            .map(|r| r.cost_delta_eur_per_bev_yr)
            .collect();
        mean_std(&deltas)
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Solve the reference once, then every (count, sample, strategy) cell.
/// Failed solves become warnings, not errors, and the sweep continues.
pub fn sweep(cfg: &SweepConfig, pool: &ProfilePool) -> Result<ResultTable> {
    if cfg.profile_counts.is_empty() || cfg.strategies.is_empty() {
        return Err(Error::Config("sweep needs profile counts and strategies".into()));
    }
    let reference = run_scenario(
        &ScenarioConfig::reference(cfg.setting.clone(), cfg.system.clone(), cfg.base_dir.clone()),
        None,
    )?;
    if reference.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "reference did not solve: {}",
            reference.status.as_str()
        )));
    }

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &n_profiles in &cfg.profile_counts {
        // One draw per profile count, shared by all strategies.
        let samples = draw_sample_set(
            pool,
            n_profiles,
            cfg.samples_per_count,
            cfg.fleet_size,
            cfg.master_seed,
        )?;
        for sample in &samples {
            for &strategy in &cfg.strategies {
                match run_cell(cfg, pool, sample, strategy, &reference) {
                    Ok(row) => rows.push(row),
                    Err(e) => warnings.push(format!(
                        "{} n={} sample={} {}: {e}",
                        cfg.setting,
                        n_profiles,
                        sample.sample_id,
                        strategy.as_str()
                    )),
                }
            }
        }
    }
    Ok(ResultTable { reference_objective: reference.objective, rows, warnings })
}

fn run_cell(
    cfg: &SweepConfig,
    pool: &ProfilePool,
    sample: &Sample,
    strategy: Strategy,
    reference: &ScenarioResult,
) -> Result<SweepRow> {
    let scenario = ScenarioConfig {
        setting: cfg.setting.clone(),
        system: cfg.system.clone(),
        base_dir: cfg.base_dir.clone(),
        strategy: match strategy {
            Strategy::Smart => ChargingStrategy::Smart,
            Strategy::Bidirectional => ChargingStrategy::Bidirectional,
        },
        sample: Some(sample.clone()),
        node: cfg.node.clone(),
        options: cfg.options.clone(),
    };
    let result = run_scenario(&scenario, Some(pool))?;
    if result.status != SolveStatus::Optimal {
        return Err(Error::Solver(result.status.as_str().into()));
    }
    if !result.feasibility.pass {
        return Err(Error::Solver(format!(
            "solution failed validation: relative residual {}",
            result.feasibility.max_relative_residual
        )));
    }
    let delta = delta_record(&result, reference, cfg.fleet_size, sample.n_profiles())?;
    Ok(SweepRow {
        setting: cfg.setting.clone(),
        strategy: strategy.as_str().into(),
        fleet_size: cfg.fleet_size,
        n_profiles: sample.n_profiles(),
        sample_id: sample.sample_id,
        bevs_per_profile: delta.bevs_per_profile,
        objective_eur: result.objective,
        cost_delta_eur: delta.cost_delta_eur,
        cost_delta_eur_per_bev_yr: delta.cost_delta_eur_per_bev_yr,
        runtime_s: result.runtime_s,
        status: result.status.as_str().into(),
        capacities: result.capacities,
        capacity_deltas: delta.capacity_deltas,
        profile_ids: sample.profile_ids.clone(),
    })
}
