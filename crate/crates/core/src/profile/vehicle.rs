use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A BEV model with the parameters the generator and the dispatch model need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleModel {
    pub name: String,
    /// kWh
    pub battery_capacity: f64,
    /// kWh per km
    pub drive_consumption: f64,
    /// kW, AC charging at regular destinations
    pub max_home_charge: f64,
    /// kW, DC fast charging en route
    pub max_fast_charge: f64,
}

impl VehicleModel {
    pub fn validate(&self) -> Result<()> {
        if self.battery_capacity <= 0.0 {
            return Err(Error::Config(format!(
                "vehicle {}: battery_capacity must be > 0",
                self.name
            )));
        }
        if self.drive_consumption <= 0.0 {
            return Err(Error::Config(format!(
                "vehicle {}: drive_consumption must be > 0",
                self.name
            )));
        }
        if self.max_home_charge <= 0.0 || self.max_fast_charge < self.max_home_charge {
            return Err(Error::Config(format!(
                "vehicle {}: requires max_fast_charge >= max_home_charge > 0",
                self.name
            )));
        }
        Ok(())
    }
}

/// Vehicle models with mix weights used when building a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleCatalog {
    pub models: Vec<VehicleModel>,
    /// Probability of each model when drawing a profile's vehicle.
    pub weights: Vec<f64>,
}

impl VehicleCatalog {
    pub fn validate(&self) -> Result<()> {
        if self.models.len() != self.weights.len() || self.models.is_empty() {
            return Err(Error::Config(
                "vehicle catalog: models and weights must be non-empty and equal length".into(),
            ));
        }
        for m in &self.models {
            m.validate()?;
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 || self.weights.iter().any(|w| *w < 0.0) {
            return Err(Error::Config(format!(
                "vehicle catalog: mix weights must be non-negative and sum to 1 (got {total})"
            )));
        }
        Ok(())
    }

    pub fn mean_battery_capacity(&self) -> f64 {
        self.models
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| m.battery_capacity * w)
            .sum()
    }
}

impl Default for VehicleCatalog {
    /// Four mid-size 2021 BEV models; the mix is weighted so the expected
    /// battery capacity is close to 58 kWh per vehicle.
    fn default() -> Self {
        let models = vec![
            VehicleModel {
                name: "model_3".into(),
                battery_capacity: 75.0,
                drive_consumption: 0.16,
                max_home_charge: 11.0,
                max_fast_charge: 190.0,
            },
            VehicleModel {
                name: "id_3".into(),
                battery_capacity: 58.0,
                drive_consumption: 0.16,
                max_home_charge: 11.0,
                max_fast_charge: 100.0,
            },
            VehicleModel {
                name: "kona".into(),
                battery_capacity: 64.0,
                drive_consumption: 0.15,
                max_home_charge: 11.0,
                max_fast_charge: 75.0,
            },
            VehicleModel {
                name: "zoe".into(),
                battery_capacity: 52.0,
                drive_consumption: 0.17,
                max_home_charge: 22.0,
                max_fast_charge: 46.0,
            },
        ];
        let weights = vec![0.10, 0.40, 0.14, 0.36];
        VehicleCatalog { models, weights }
    }
}
