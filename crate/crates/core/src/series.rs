//! Time series primitives shared by the profile generator and the model.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Time step length tag carried by every profile series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    QuarterHour,
    Hourly,
}

impl Resolution {
    pub fn hours(self) -> f64 {
        match self {
            Resolution::QuarterHour => 0.25,
            Resolution::Hourly => 1.0,
        }
    }
}

/// Driving electricity consumption, kWh per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionSeries {
    pub values: Vec<f64>,
    pub resolution: Resolution,
}

/// Maximum grid-connection power, kW per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilitySeries {
    pub values: Vec<f64>,
    pub resolution: Resolution,
}

fn check_quarter_hour(resolution: Resolution, len: usize) -> Result<()> {
    if resolution != Resolution::QuarterHour {
        return Err(Error::Input(
            "resample_hourly expects a 15-minute series".into(),
        ));
    }
    if len % 4 != 0 {
        return Err(Error::Input(format!(
            "series length {len} is not divisible by 4"
        )));
    }
    Ok(())
}

impl ConsumptionSeries {
    /// Aggregate 15-minute consumption to hourly by summing energy.
    pub fn resample_hourly(&self) -> Result<ConsumptionSeries> {
        check_quarter_hour(self.resolution, self.values.len())?;
        let values = self
            .values
            .chunks_exact(4)
            .map(|c| c.iter().sum())
            .collect();
        Ok(ConsumptionSeries {
            values,
            resolution: Resolution::Hourly,
        })
    }

    pub fn total_kwh(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl AvailabilitySeries {
    /// Aggregate 15-minute availability to hourly as the time-weighted mean
    /// power, which conserves the maximum transferable energy per hour.
    pub fn resample_hourly(&self) -> Result<AvailabilitySeries> {
        check_quarter_hour(self.resolution, self.values.len())?;
        let values = self
            .values
            .chunks_exact(4)
            .map(|c| c.iter().sum::<f64>() / 4.0)
            .collect();
        Ok(AvailabilitySeries {
            values,
            resolution: Resolution::Hourly,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consumption_resamples_by_sum() {
        let s = ConsumptionSeries {
            values: vec![0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
            resolution: Resolution::QuarterHour,
        };
        let h = s.resample_hourly().unwrap();
        assert_eq!(h.values, vec![2.0, 0.0]);
        assert_eq!(h.resolution, Resolution::Hourly);
    }

    #[test]
    fn availability_resamples_by_mean() {
        let s = AvailabilitySeries {
            values: vec![11.0, 11.0, 0.0, 0.0],
            resolution: Resolution::QuarterHour,
        };
        let h = s.resample_hourly().unwrap();
        assert_eq!(h.values, vec![5.5]);
    }

    #[test]
    fn rejects_bad_length() {
        let s = ConsumptionSeries {
            values: vec![1.0; 7],
            resolution: Resolution::QuarterHour,
        };
        assert!(s.resample_hourly().is_err());
    }

    #[test]
    fn rejects_hourly_input() {
        let s = AvailabilitySeries {
            values: vec![1.0; 8],
            resolution: Resolution::Hourly,
        };
        assert!(s.resample_hourly().is_err());
    }
}
