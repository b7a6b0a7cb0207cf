use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::mobility::{MobilityProfile, StepState};
use super::rules::ChargerDistribution;
use super::vehicle::VehicleModel;
use crate::series::{AvailabilitySeries, ConsumptionSeries, Resolution};
use crate::{Error, Result};

/// Fraction of the battery kept as a reserve when sizing en-route
/// fast-charge windows.
pub const RESERVE_FRACTION: f64 = 0.10;

/// Charge efficiency assumed when sizing en-route windows, aligned with the
/// dispatch model's default so generated profiles stay feasible there.
pub const WINDOW_CHARGE_EFFICIENCY: f64 = 0.95;

/// Driving electricity consumption: km in each step times the vehicle's
/// consumption rate. Zero whenever parked.
pub fn derive_driving_consumption(p: &MobilityProfile, v: &VehicleModel) -> ConsumptionSeries {
    let values = p
        .steps
        .iter()
        .map(|s| match s {
            StepState::Parked(_) => 0.0,
            StepState::Driving { km, .. } => km * v.drive_consumption,
        })
        .collect();
    ConsumptionSeries {
        values,
        resolution: Resolution::QuarterHour,
    }
}

/// Grid availability: one charger draw per parking event, plus en-route
/// fast-charge windows inserted where a trip would otherwise run the
/// battery below its reserve.
///
/// Windows are placed at the latest feasible point, i.e. exactly at the
/// driving step where the reserve would be breached, assuming the vehicle
/// charges at full availability at all other times. This is the weakest
/// condition under which any charging schedule in the dispatch model can
/// keep the state of charge non-negative.
pub fn derive_grid_availability(
    p: &MobilityProfile,
    chargers: &ChargerDistribution,
    v: &VehicleModel,
    seed: u64,
) -> Result<AvailabilitySeries> {
    chargers.validate()?;
    v.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(2); // availability draws; mobility uses stream 1
    let n = p.steps.len();
    let mut avail = vec![0.0f64; n];

    // One draw per parking event: a charger does not appear or disappear
    // mid-parking.
    let mut i = 0;
    while i < n {
        match p.steps[i] {
            StepState::Driving { .. } => i += 1,
            StepState::Parked(dest) => {
                let mut j = i;
                while j < n && p.steps[j] == StepState::Parked(dest) {
                    j += 1;
                }
                let spec = chargers.chargers[&dest];
                let present: f64 = rng.gen();
                if present < spec.probability {
                    let power = spec.power_kw.min(v.max_home_charge);
                    for a in avail.iter_mut().take(j).skip(i) {
                        *a = power;
                    }
                }
                i = j;
            }
        }
    }

    // Full-horizon energy replay at full availability; insert fast-charge
    // windows during driving steps when the reserve would be breached.
    let reserve = RESERVE_FRACTION * v.battery_capacity;
    let fast_step_kwh = v.max_fast_charge * 0.25 * WINDOW_CHARGE_EFFICIENCY;
    let mut soc = v.battery_capacity;
    for (t, state) in p.steps.iter().enumerate() {
        soc = (soc + avail[t] * 0.25 * WINDOW_CHARGE_EFFICIENCY).min(v.battery_capacity);
        if let StepState::Driving { trip, km } = state {
            let need = km * v.drive_consumption;
            if soc - need < reserve {
                avail[t] = v.max_fast_charge;
                soc = (soc + fast_step_kwh).min(v.battery_capacity);
                if soc - need < 0.0 {
                    return Err(Error::Generation(format!(
                        "trip {trip} infeasible even with continuous fast charging"
                    )));
                }
            }
            soc -= need;
        }
    }

    Ok(AvailabilitySeries {
        values: avail,
        resolution: Resolution::QuarterHour,
    })
}

/// Replays the state of charge assuming charging at full availability.
/// Returns the minimum state of charge encountered.
pub fn replay_min_soc(
    consumption: &ConsumptionSeries,
    availability: &AvailabilitySeries,
    battery_kwh: f64,
    charge_efficiency: f64,
) -> f64 {
    let dt = consumption.resolution.hours();
    let mut soc = battery_kwh;
    let mut min_soc = soc;
    for (c, a) in consumption.values.iter().zip(&availability.values) {
        soc = (soc + a * dt * charge_efficiency).min(battery_kwh) - c;
        min_soc = min_soc.min(soc);
    }
    min_soc
}
