use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::derive::{derive_driving_consumption, derive_grid_availability};
use super::mobility::generate_mobility;
use super::rules::{ChargerDistribution, MobilityRules};
use super::vehicle::{VehicleCatalog, VehicleModel};
use super::YEAR_STEPS;
use crate::series::{AvailabilitySeries, ConsumptionSeries, Resolution};
use crate::{Error, Result};

/// One vehicle's year: mobility, driving consumption and grid availability
/// at 15-minute resolution, plus the vehicle it was generated for.
#[derive(Debug, Clone, PartialEq)]
pub struct BevProfile {
    pub id: u32,
    pub seed: u64,
    pub vehicle: VehicleModel,
    /// km driven per 15-minute step
    pub mobility_km: Vec<f64>,
    pub consumption: ConsumptionSeries,
    pub availability: AvailabilitySeries,
}

impl BevProfile {
    pub fn hourly_consumption(&self) -> ConsumptionSeries {
        self.consumption.resample_hourly().expect("15-min profile")
    }

    pub fn hourly_availability(&self) -> AvailabilitySeries {
        self.availability.resample_hourly().expect("15-min profile")
    }

    pub fn annual_consumption_kwh(&self) -> f64 {
        self.consumption.total_kwh()
    }
}

/// Generator configuration for a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub n_profiles: usize,
    pub base_seed: u64,
    /// Steps at 15-minute resolution, multiple of 96. Defaults to a year.
    #[serde(default = "default_horizon")]
    pub horizon_steps: usize,
    #[serde(default)]
    pub rules: Option<MobilityRules>,
    #[serde(default)]
    pub catalog: Option<VehicleCatalog>,
    #[serde(default)]
    pub chargers: Option<ChargerDistribution>,
}

fn default_horizon() -> usize {
    YEAR_STEPS
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            n_profiles: 200,
            base_seed: 42,
            horizon_steps: YEAR_STEPS,
            rules: None,
            catalog: None,
            chargers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePool {
    pub profiles: Vec<BevProfile>,
}

impl ProfilePool {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, id: u32) -> Result<&BevProfile> {
        self.profiles
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Error::Input(format!("unknown profile id {id}")))
    }

    pub fn mean_battery_capacity(&self) -> f64 {
        if self.profiles.is_empty() {
            return 0.0;
        }
        self.profiles
            .iter()
            .map(|p| p.vehicle.battery_capacity)
            .sum::<f64>()
            / self.profiles.len() as f64
    }
}

/// Build `n` complete profiles; profile `i` uses seed `base_seed + i`.
pub fn build_pool(cfg: &PoolConfig) -> Result<ProfilePool> {
    if cfg.n_profiles == 0 {
        return Err(Error::Input("pool size must be >= 1".into()));
    }
    let rules = cfg.rules.clone().unwrap_or_default();
    let catalog = cfg.catalog.clone().unwrap_or_default();
    let chargers = cfg.chargers.clone().unwrap_or_default();
    rules.validate()?;
    catalog.validate()?;
    chargers.validate()?;

    let mut profiles = Vec::with_capacity(cfg.n_profiles);
    for i in 0..cfg.n_profiles {
        let seed = cfg.base_seed + i as u64;
        let vehicle = draw_vehicle(&catalog, seed);
        let mobility = generate_mobility(seed, &rules, cfg.horizon_steps)
            .map_err(|e| Error::Generation(format!("profile {i}: {e}")))?;
        let consumption = derive_driving_consumption(&mobility, &vehicle);
        let availability = derive_grid_availability(&mobility, &chargers, &vehicle, seed)
            .map_err(|e| Error::Generation(format!("profile {i}: {e}")))?;
        profiles.push(BevProfile {
            id: i as u32,
            seed,
            vehicle,
            mobility_km: mobility.km_per_step(),
            consumption,
            availability,
        });
    }
    Ok(ProfilePool { profiles })
}

fn draw_vehicle(catalog: &VehicleCatalog, seed: u64) -> VehicleModel {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(3); // vehicle choice
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (model, w) in catalog.models.iter().zip(&catalog.weights) {
        acc += w;
        if x < acc {
            return model.clone();
        }
    }
    catalog.models.last().expect("validated catalog").clone()
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolManifest {
    n_profiles: usize,
    horizon_steps: usize,
    profiles: Vec<ProfileMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileMeta {
    id: u32,
    seed: u64,
    vehicle: VehicleModel,
}

fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(values.len() * 12);
    out.push_str("step_index,value\n");
    for (i, v) in values.iter().enumerate() {
        // `{}` prints the shortest representation that round-trips exactly.
        out.push_str(&format!("{i},{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let value = line.rsplit(',').next().unwrap_or_default();
        let v: f64 = value.parse().map_err(|_| Error::Parse {
            path: path.into(),
            line: lineno + 1,
            msg: format!("bad float '{value}'"),
        })?;
        values.push(v);
    }
    Ok(values)
}

/// One directory per pool: a manifest plus three CSV files per profile.
pub fn save_pool(pool: &ProfilePool, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = PoolManifest {
        n_profiles: pool.profiles.len(),
        horizon_steps: pool
            .profiles
            .first()
            .map(|p| p.mobility_km.len())
            .unwrap_or(0),
        profiles: pool
            .profiles
            .iter()
            .map(|p| ProfileMeta {
                id: p.id,
                seed: p.seed,
                vehicle: p.vehicle.clone(),
            })
            .collect(),
    };
    let manifest_path = dir.join("pool.toml");
    let text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;
    let mut f = fs::File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::io(&manifest_path, e))?;

    for p in &pool.profiles {
        write_series(&dir.join(format!("profile_{:04}_mobility.csv", p.id)), &p.mobility_km)?;
        write_series(
            &dir.join(format!("profile_{:04}_consumption.csv", p.id)),
            &p.consumption.values,
        )?;
        write_series(
            &dir.join(format!("profile_{:04}_availability.csv", p.id)),
            &p.availability.values,
        )?;
    }
    Ok(())
}

pub fn load_pool(dir: &Path) -> Result<ProfilePool> {
    let manifest_path = dir.join("pool.toml");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: PoolManifest =
        toml::from_str(&text).map_err(|e| Error::Config(format!("pool manifest: {e}")))?;
    let mut profiles = Vec::with_capacity(manifest.profiles.len());
    for meta in manifest.profiles {
        let mobility_km = read_series(&dir.join(format!("profile_{:04}_mobility.csv", meta.id)))?;
        let consumption = read_series(&dir.join(format!("profile_{:04}_consumption.csv", meta.id)))?;
        let availability =
            read_series(&dir.join(format!("profile_{:04}_availability.csv", meta.id)))?;
        profiles.push(BevProfile {
            id: meta.id,
            seed: meta.seed,
            vehicle: meta.vehicle,
            mobility_km,
            consumption: ConsumptionSeries {
                values: consumption,
                resolution: Resolution::QuarterHour,
            },
            availability: AvailabilitySeries {
                values: availability,
                resolution: Resolution::QuarterHour,
            },
        });
    }
    Ok(ProfilePool { profiles })
}
