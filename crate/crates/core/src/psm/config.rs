//! System configuration: technologies, costs, bounds and time series.
//!
//! Everything numeric lives in the config file, never in code. Series can be
//! given as a scalar, a CSV file (`hour,value`), or one of the bundled
//! deterministic synthetic shapes used by the desk configurations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A time series source. Scalars repeat; CSV paths are resolved relative to
/// the config file; builtins are closed-form shapes (no RNG) so desk systems
/// need no data files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesSpec {
    Scalar(f64),
    Csv {
        csv: PathBuf,
    },
    Builtin {
        builtin: String,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl SeriesSpec {
    /// Materialize `horizon` hourly values.
    pub fn resolve(&self, horizon: usize, base_dir: &Path) -> Result<Vec<f64>> {
        match self {
            SeriesSpec::Scalar(v) => Ok(vec![*v; horizon]),
            SeriesSpec::Csv { csv } => {
                let path = if csv.is_absolute() { csv.clone() } else { base_dir.join(csv) };
                let values = read_series_csv(&path)?;
                if values.len() < horizon {
                    return Err(Error::Input(format!(
                        "series {} has {} hours, horizon needs {horizon}",
                        path.display(),
                        values.len()
                    )));
                }
                Ok(values[..horizon].to_vec())
            }
            SeriesSpec::Builtin { builtin, scale } => {
                builtin_series(builtin, horizon).map(|mut v| {
                    for x in &mut v {
                        *x *= scale;
                    }
                    v
                })
            }
        }
    }
}

/// Hourly CSV with a `hour,value` header.
pub fn read_series_csv(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| {
        Error::Input(format!("cannot read series {}: {e}", path.display()))
    })?;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line: i + 2,
            msg: e.to_string(),
        })?;
        let v: f64 = rec
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::Parse {
                path: path.into(),
                line: i + 2,
                msg: format!("bad value '{}'", rec.get(1).unwrap_or("")),
            })?;
        values.push(v);
    }
    Ok(values)
}

pub fn write_series_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::from("hour,value\n");
    for (t, v) in values.iter().enumerate() {
        out.push_str(&format!("{t},{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Deterministic closed-form shapes. All return values in [0,1] before the
/// caller's `scale` is applied, except `demand` which is a normalized load
/// shape with mean 1.
fn builtin_series(name: &str, horizon: usize) -> Result<Vec<f64>> {
    use std::f64::consts::TAU;
    let series: Vec<f64> = match name {
        // Daytime half-sine, stronger in summer.
        "solar" => (0..horizon)
            .map(|t| {
                let hour = (t % 24) as f64;
                let day = (t / 24) as f64;
                let diurnal = (TAU / 2.0 * ((hour - 6.0) / 12.0)).sin().max(0.0);
                let seasonal = 0.75 - 0.45 * (TAU * (day + 10.0) / 365.0).cos();
                (diurnal * seasonal).clamp(0.0, 1.0)
            })
            .collect(),
        // Overlapping sinusoids with incommensurate periods; gusty, mean ≈ 0.4.
        "wind" => (0..horizon)
            .map(|t| {
                let t = t as f64;
                let v = 0.4
                    + 0.22 * (TAU * t / 37.0).sin()
                    + 0.16 * (TAU * t / 101.0).sin()
                    + 0.12 * (TAU * t / 13.0).cos()
                    + 0.08 * (TAU * t / 211.0).cos();
                v.clamp(0.0, 1.0)
            })
            .collect(),
        "wind_offshore" => (0..horizon)
            .map(|t| {
                let t = t as f64;
                let v = 0.55
                    + 0.2 * (TAU * (t + 11.0) / 43.0).sin()
                    + 0.14 * (TAU * t / 97.0).cos()
                    + 0.08 * (TAU * t / 17.0).sin();
                v.clamp(0.0, 1.0)
            })
            .collect(),
        // Workday double peak plus weekend dip and a mild seasonal swell.
        "demand" => (0..horizon)
            .map(|t| {
                let hour = (t % 24) as f64;
                let day = t / 24;
                let weekday = day % 7 < 5;
                let morning = (-((hour - 9.0) / 3.5).powi(2)).exp();
                let evening = (-((hour - 19.0) / 3.0).powi(2)).exp();
                let base = 0.75 + 0.25 * morning + 0.35 * evening;
                let week = if weekday { 1.0 } else { 0.88 };
                let seasonal = 1.0 + 0.12 * (TAU * (day as f64 + 20.0) / 365.0).cos();
                base * week * seasonal
            })
            .collect(),
        "flat" => vec![1.0; horizon],
        other => {
            return Err(Error::Config(format!(
                "unknown builtin series '{other}' (known: solar, wind, wind_offshore, demand, flat)"
            )))
        }
    };
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationTech {
    pub name: String,
    /// €/MW/yr
    #[serde(default)]
    pub investment_cost: f64,
    /// €/MW/yr
    #[serde(default)]
    pub fixed_om: f64,
    /// €/MWh, fuel included, carbon excluded
    #[serde(default)]
    pub variable_cost: f64,
    /// tCO₂ per MWh of generated electricity
    #[serde(default)]
    pub co2_intensity: f64,
    #[serde(default)]
    pub capacity_min: f64,
    /// MW; absent means unbounded
    pub capacity_max: Option<f64>,
    pub availability: SeriesSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageTech {
    pub name: String,
    /// €/MW/yr on charge/discharge power
    #[serde(default)]
    pub power_cost: f64,
    /// €/MWh/yr on energy capacity
    #[serde(default)]
    pub energy_cost: f64,
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
    pub power_max: Option<f64>,
    pub energy_max: Option<f64>,
    /// MWh/h natural inflow (hydro); defaults to none
    pub inflow: Option<SeriesSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydrogenChain {
    /// €/MW_el/yr
    pub electrolyzer_cost: f64,
    /// MWh_H₂ per MWh_el
    pub electrolyzer_efficiency: f64,
    /// €/MWh_H₂/yr on cavern energy capacity
    pub cavern_cost: f64,
    /// fraction of stored H₂ lost per hour
    #[serde(default)]
    pub cavern_loss: f64,
    /// €/MW_el/yr on turbine output power
    pub turbine_cost: f64,
    /// MWh_el per MWh_H₂
    pub turbine_efficiency: f64,
    /// exogenous industrial demand, TWh_H₂ per (8760-hour) year
    #[serde(default)]
    pub annual_demand_twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeConfig {
    pub id: String,
    /// MWh per hour
    pub load: SeriesSpec,
    #[serde(default)]
    pub generation: Vec<GenerationTech>,
    #[serde(default)]
    pub storage: Vec<StorageTech>,
    pub hydrogen: Option<HydrogenChain>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NtcLink {
    pub from: String,
    pub to: String,
    /// MW, each direction gets its own entry
    pub capacity: f64,
}

/// BEV block parameters shared by all profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BevParams {
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
}

impl Default for BevParams {
    fn default() -> Self {
        BevParams { charge_efficiency: 0.95, discharge_efficiency: 0.95 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    /// hours
    pub horizon: usize,
    /// €/tCO₂
    #[serde(default)]
    pub carbon_price: f64,
    #[serde(rename = "node")]
    pub nodes: Vec<NodeConfig>,
    #[serde(default, rename = "ntc")]
    pub ntc: Vec<NtcLink>,
    #[serde(default)]
    pub bev: BevParams,
}

impl SystemConfig {
    pub fn load(path: &Path) -> Result<SystemConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SystemConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::Config("horizon must be ≥ 2 hours".into()));
        }
        if self.nodes.is_empty() {
            return Err(Error::Config("at least one node required".into()));
        }
        if self.carbon_price < 0.0 {
            return Err(Error::Config("carbon_price must be ≥ 0".into()));
        }
        let mut ids: Vec<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate node id".into()));
        }
        for node in &self.nodes {
            for g in &node.generation {
                if g.investment_cost < 0.0 || g.fixed_om < 0.0 || g.variable_cost < 0.0 {
                    return Err(Error::Config(format!("{}: negative cost", g.name)));
                }
                if g.capacity_min < 0.0
                    || g.capacity_max.is_some_and(|m| m < g.capacity_min)
                {
                    return Err(Error::Config(format!("{}: bad capacity bounds", g.name)));
                }
            }
            for s in &node.storage {
                for (label, eff) in [
                    ("charge_efficiency", s.charge_efficiency),
                    ("discharge_efficiency", s.discharge_efficiency),
                ] {
                    if !(eff > 0.0 && eff <= 1.0) {
                        return Err(Error::Config(format!("{}: {label} must be in (0,1]", s.name)));
                    }
                }
            }
            if let Some(h) = &node.hydrogen {
                if !(h.electrolyzer_efficiency > 0.0 && h.electrolyzer_efficiency <= 1.0)
                    || !(h.turbine_efficiency > 0.0 && h.turbine_efficiency <= 1.0)
                {
                    return Err(Error::Config(format!(
                        "{}: hydrogen efficiencies must be in (0,1]",
                        node.id
                    )));
                }
                if h.annual_demand_twh < 0.0 || !(0.0..1.0).contains(&h.cavern_loss) {
                    return Err(Error::Config(format!("{}: bad hydrogen parameters", node.id)));
                }
            }
        }
        for link in &self.ntc {
            if link.capacity < 0.0 {
                return Err(Error::Config(format!(
                    "ntc {}→{}: capacity must be ≥ 0",
                    link.from, link.to
                )));
            }
            for end in [&link.from, &link.to] {
                if !self.nodes.iter().any(|n| &n.id == end) {
                    return Err(Error::Config(format!("ntc references unknown node '{end}'")));
                }
            }
            if link.from == link.to {
                return Err(Error::Config("ntc must join two distinct nodes".into()));
            }
        }
        Ok(())
    }
}
