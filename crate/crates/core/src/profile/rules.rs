use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Fixed destination set. `Home` is the anchor of every tour.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Destination {
    Home,
    Workplace,
    Shopping,
    Errands,
    Escort,
    Leisure,
}

impl Destination {
    pub const AWAY: [Destination; 5] = [
        Destination::Workplace,
        Destination::Shopping,
        Destination::Errands,
        Destination::Escort,
        Destination::Leisure,
    ];

    pub const ALL: [Destination; 6] = [
        Destination::Home,
        Destination::Workplace,
        Destination::Shopping,
        Destination::Errands,
        Destination::Escort,
        Destination::Leisure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Destination::Home => "home",
            Destination::Workplace => "workplace",
            Destination::Shopping => "shopping",
            Destination::Errands => "errands",
            Destination::Escort => "escort",
            Destination::Leisure => "leisure",
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum DayType {
    Weekday,
    Saturday,
    Sunday,
}

impl DayType {
    /// Day 0 of the horizon is a Monday.
    pub fn of_day(day_index: usize) -> DayType {
        match day_index % 7 {
            5 => DayType::Saturday,
            6 => DayType::Sunday,
            _ => DayType::Weekday,
        }
    }
}

/// Log-normal distribution spec with truncation, used for trip distances
/// (km) and dwell durations (hours).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalSpec {
    /// Mean of ln(x)
    pub mu: f64,
    /// Std dev of ln(x)
    pub sigma: f64,
    pub min: f64,
    pub max: f64,
}

impl LogNormalSpec {
    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.mu.is_finite() {
            return Err(Error::Config(format!("{what}: invalid log-normal parameters")));
        }
        if !(self.min > 0.0) || self.max < self.min {
            return Err(Error::Config(format!(
                "{what}: truncation bounds must satisfy 0 < min <= max"
            )));
        }
        Ok(())
    }
}

/// Per-destination charger presence probability and power rating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargerSpec {
    pub probability: f64,
    pub power_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChargerDistribution {
    pub chargers: BTreeMap<Destination, ChargerSpec>,
}

impl ChargerDistribution {
    pub fn validate(&self) -> Result<()> {
        for dest in Destination::ALL {
            let spec = self.chargers.get(&dest).ok_or_else(|| {
                Error::Config(format!("charger distribution: missing destination {}", dest.as_str()))
            })?;
            if !(0.0..=1.0).contains(&spec.probability) {
                return Err(Error::Config(format!(
                    "charger distribution [{}]: probability outside [0,1]",
                    dest.as_str()
                )));
            }
            if spec.power_kw <= 0.0 {
                return Err(Error::Config(format!(
                    "charger distribution [{}]: power rating must be > 0",
                    dest.as_str()
                )));
            }
        }
        Ok(())
    }
}

impl Default for ChargerDistribution {
    fn default() -> Self {
        let mut chargers = BTreeMap::new();
        chargers.insert(Destination::Home, ChargerSpec { probability: 0.9, power_kw: 11.0 });
        chargers.insert(Destination::Workplace, ChargerSpec { probability: 0.5, power_kw: 11.0 });
        chargers.insert(Destination::Shopping, ChargerSpec { probability: 0.3, power_kw: 22.0 });
        chargers.insert(Destination::Errands, ChargerSpec { probability: 0.1, power_kw: 11.0 });
        chargers.insert(Destination::Escort, ChargerSpec { probability: 0.1, power_kw: 11.0 });
        chargers.insert(Destination::Leisure, ChargerSpec { probability: 0.2, power_kw: 22.0 });
        ChargerDistribution { chargers }
    }
}

/// Distribution tables driving the mobility generator.
///
/// Tours anchor at home: home → destination → (dwell) → home. The number of
/// tours per day follows `tour_count` for the day type, the primary
/// destination follows `destination_weights`, and departure time, distance
/// and dwell duration are drawn per destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MobilityRules {
    /// Probability of k tours per day (index = k), per day type.
    pub tour_count: BTreeMap<DayType, Vec<f64>>,
    /// Probability of each away destination, aligned with [`Destination::AWAY`].
    pub destination_weights: Vec<f64>,
    /// 24 hour-of-day bins per destination; the quarter within the drawn
    /// hour is uniform.
    pub departure: BTreeMap<Destination, Vec<f64>>,
    /// Trip distance in km per destination.
    pub distance: BTreeMap<Destination, LogNormalSpec>,
    /// Dwell duration in hours per destination.
    pub dwell: BTreeMap<Destination, LogNormalSpec>,
    /// Average driving speed used to turn distances into durations.
    pub max_speed_kmh: f64,
}

fn check_table(name: &str, probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Config(format!("distribution table '{name}' is empty")));
    }
    if probs.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::Config(format!(
            "distribution table '{name}' has a negative or non-finite entry"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "distribution table '{name}' sums to {total}, expected 1"
        )));
    }
    Ok(())
}

impl MobilityRules {
    pub fn validate(&self) -> Result<()> {
        for day in [DayType::Weekday, DayType::Saturday, DayType::Sunday] {
            let table = self.tour_count.get(&day).ok_or_else(|| {
                Error::Config(format!("tour_count: missing day type {day:?}"))
            })?;
            check_table(&format!("tour_count[{day:?}]"), table)?;
        }
        check_table("destination_weights", &self.destination_weights)?;
        if self.destination_weights.len() != Destination::AWAY.len() {
            return Err(Error::Config(format!(
                "destination_weights must have {} entries",
                Destination::AWAY.len()
            )));
        }
        for dest in Destination::AWAY {
            let dep = self.departure.get(&dest).ok_or_else(|| {
                Error::Config(format!("departure: missing destination {}", dest.as_str()))
            })?;
            if dep.len() != 24 {
                return Err(Error::Config(format!(
                    "departure[{}] must have 24 hour bins",
                    dest.as_str()
                )));
            }
            check_table(&format!("departure[{}]", dest.as_str()), dep)?;
            self.distance
                .get(&dest)
                .ok_or_else(|| {
                    Error::Config(format!("distance: missing destination {}", dest.as_str()))
                })?
                .validate(&format!("distance[{}]", dest.as_str()))?;
            self.dwell
                .get(&dest)
                .ok_or_else(|| {
                    Error::Config(format!("dwell: missing destination {}", dest.as_str()))
                })?
                .validate(&format!("dwell[{}]", dest.as_str()))?;
        }
        if !(self.max_speed_kmh > 0.0) {
            return Err(Error::Config("max_speed_kmh must be > 0".into()));
        }
        Ok(())
    }
}

fn departure_bins(peaks: &[(usize, f64)]) -> Vec<f64> {
    // Gaussian bumps over the 24 hour bins, normalised to 1.
    let mut bins = vec![0.0f64; 24];
    for (hour, weight) in peaks {
        for (b, bin) in bins.iter_mut().enumerate() {
            let d = (b as f64 - *hour as f64).abs().min(24.0 - (b as f64 - *hour as f64).abs());
            *bin += weight * (-0.5 * (d / 1.5).powi(2)).exp();
        }
    }
    let total: f64 = bins.iter().sum();
    bins.iter().map(|b| b / total).collect()
}

impl Default for MobilityRules {
    /// Synthetic stand-in for empirical travel-survey distributions:
    /// bimodal commute departures, log-normal distances with a heavy tail
    /// for leisure trips, destination-typical dwell times.
    fn default() -> Self {
        let mut tour_count = BTreeMap::new();
        tour_count.insert(DayType::Weekday, vec![0.10, 0.62, 0.24, 0.04]);
        tour_count.insert(DayType::Saturday, vec![0.25, 0.50, 0.20, 0.05]);
        tour_count.insert(DayType::Sunday, vec![0.45, 0.40, 0.13, 0.02]);

        // workplace, shopping, errands, escort, leisure
        let destination_weights = vec![0.42, 0.20, 0.12, 0.10, 0.16];

        let mut departure = BTreeMap::new();
        departure.insert(Destination::Workplace, departure_bins(&[(7, 1.0), (8, 0.8)]));
        departure.insert(Destination::Shopping, departure_bins(&[(10, 1.0), (16, 0.7)]));
        departure.insert(Destination::Errands, departure_bins(&[(9, 1.0), (14, 0.6)]));
        departure.insert(Destination::Escort, departure_bins(&[(7, 1.0), (13, 0.8)]));
        departure.insert(Destination::Leisure, departure_bins(&[(11, 0.6), (18, 1.0)]));

        let mut distance = BTreeMap::new();
        distance.insert(Destination::Workplace, LogNormalSpec { mu: 2.5, sigma: 0.8, min: 1.0, max: 150.0 });
        distance.insert(Destination::Shopping, LogNormalSpec { mu: 1.6, sigma: 0.7, min: 0.5, max: 60.0 });
        distance.insert(Destination::Errands, LogNormalSpec { mu: 1.5, sigma: 0.7, min: 0.5, max: 60.0 });
        distance.insert(Destination::Escort, LogNormalSpec { mu: 1.4, sigma: 0.6, min: 0.5, max: 40.0 });
        // Heavy tail: occasional several-hundred-km leisure trips.
        distance.insert(Destination::Leisure, LogNormalSpec { mu: 2.2, sigma: 1.4, min: 1.0, max: 700.0 });

        let mut dwell = BTreeMap::new();
        dwell.insert(Destination::Workplace, LogNormalSpec { mu: 2.1, sigma: 0.2, min: 4.0, max: 11.0 });
        dwell.insert(Destination::Shopping, LogNormalSpec { mu: 0.0, sigma: 0.5, min: 0.25, max: 4.0 });
        dwell.insert(Destination::Errands, LogNormalSpec { mu: -0.3, sigma: 0.5, min: 0.25, max: 3.0 });
        dwell.insert(Destination::Escort, LogNormalSpec { mu: -0.7, sigma: 0.4, min: 0.25, max: 2.0 });
        dwell.insert(Destination::Leisure, LogNormalSpec { mu: 0.9, sigma: 0.6, min: 0.5, max: 9.0 });

        MobilityRules {
            tour_count,
            destination_weights,
            departure,
            distance,
            dwell,
            max_speed_kmh: 100.0,
        }
    }
}
