//! Run a single scenario end to end: build the model from configuration,
//! attach the BEV block, solve, extract, and time the whole thing.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::lp::SimplexOptions;
use crate::profile::ProfilePool;
use crate::psm::{
    attach_bev_block, build_reference_model, extract_solution, ScenarioResult, Strategy,
    SystemConfig,
};
use crate::sampling::Sample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargingStrategy {
    /// No BEVs: the system every scenario is compared against.
    Reference,
    Smart,
    Bidirectional,
}

impl ChargingStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            ChargingStrategy::Reference => "reference",
            ChargingStrategy::Smart => "smart",
            ChargingStrategy::Bidirectional => "bidirectional",
        }
    }

    pub fn to_bev_strategy(self) -> Option<Strategy> {
        match self {
            ChargingStrategy::Reference => None,
            ChargingStrategy::Smart => Some(Strategy::Smart),
            ChargingStrategy::Bidirectional => Some(Strategy::Bidirectional),
        }
    }
}

impl std::str::FromStr for ChargingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" | "none" => Ok(ChargingStrategy::Reference),
            "smart" => Ok(ChargingStrategy::Smart),
            "bidirectional" => Ok(ChargingStrategy::Bidirectional),
            other => Err(Error::Input(format!(
                "unknown strategy '{other}' (reference | smart | bidirectional)"
            ))),
        }
    }
}

/// Everything needed to run one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    /// island | hydrogen | interconnected | stylized — a label, not a code path
    pub setting: String,
    pub system: SystemConfig,
    /// directory CSV series paths resolve against
    pub base_dir: PathBuf,
    pub strategy: ChargingStrategy,
    /// required unless strategy is Reference
    pub sample: Option<Sample>,
    /// node the BEV block joins; defaults to the first node
    pub node: Option<String>,
    pub options: SimplexOptions,
}

impl ScenarioConfig {
    pub fn reference(setting: impl Into<String>, system: SystemConfig, base_dir: PathBuf) -> Self {
        ScenarioConfig {
            setting: setting.into(),
            system,
            base_dir,
            strategy: ChargingStrategy::Reference,
            sample: None,
            node: None,
            options: SimplexOptions::default(),
        }
    }
}

/// Build, solve and extract. The reported runtime spans model construction
/// through solving on a monotonic clock; the solution itself is
/// deterministic for a fixed configuration, the timing is not.
pub fn run_scenario(cfg: &ScenarioConfig, pool: Option<&ProfilePool>) -> Result<ScenarioResult> {
    let start = Instant::now();
    let mut model = build_reference_model(&cfg.system, &cfg.base_dir)?;
    if let Some(strategy) = cfg.strategy.to_bev_strategy() {
        let sample = cfg
            .sample
            .as_ref()
            .ok_or_else(|| Error::Config("scenario with BEVs needs a sample".into()))?;
        let pool =
            pool.ok_or_else(|| Error::Config("scenario with BEVs needs a profile pool".into()))?;
        let node = cfg
            .node
            .clone()
            .unwrap_or_else(|| cfg.system.nodes[0].id.clone());
        attach_bev_block(&mut model, sample, pool, strategy, &node)?;
    }
    let raw = crate::lp::solve_problem(&model.lp, &cfg.options)?;
    let mut result = extract_solution(&model, &raw)?;
    result.runtime_s = start.elapsed().as_secs_f64();
    Ok(result)
}
