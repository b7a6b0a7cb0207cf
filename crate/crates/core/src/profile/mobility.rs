use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, LogNormal};

use super::rules::{DayType, Destination, LogNormalSpec, MobilityRules};
use super::STEPS_PER_DAY;
use crate::{Error, Result};

/// State of the vehicle in one 15-minute step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepState {
    Parked(Destination),
    Driving { trip: u32, km: f64 },
}

/// One recorded driving leg, kept for replay checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub id: u32,
    pub from: Destination,
    pub to: Destination,
    pub depart_step: usize,
    pub n_steps: usize,
    pub km: f64,
}

/// A year of 15-minute vehicle states plus the trip list they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityProfile {
    pub steps: Vec<StepState>,
    pub trips: Vec<TripRecord>,
}

impl MobilityProfile {
    pub fn km_per_step(&self) -> Vec<f64> {
        self.steps
            .iter()
            .map(|s| match s {
                StepState::Parked(_) => 0.0,
                StepState::Driving { km, .. } => *km,
            })
            .collect()
    }

    pub fn total_km(&self) -> f64 {
        self.trips.iter().map(|t| t.km).sum()
    }

    /// Checks location continuity and the home boundary conditions.
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Internal("empty mobility profile".into()));
        }
        if self.steps.first() != Some(&StepState::Parked(Destination::Home))
            || !matches!(self.steps.last(), Some(StepState::Parked(Destination::Home)))
        {
            return Err(Error::Internal(
                "mobility profile must start and end parked at home".into(),
            ));
        }
        let mut location = Destination::Home;
        for (i, trip) in self.trips.iter().enumerate() {
            if trip.from != location {
                return Err(Error::Internal(format!(
                    "trip {i} departs from {:?} but vehicle is at {location:?}",
                    trip.from
                )));
            }
            location = trip.to;
        }
        if location != Destination::Home {
            return Err(Error::Internal("trip chain does not return home".into()));
        }
        Ok(())
    }
}

fn draw_categorical(rng: &mut ChaCha12Rng, probs: &[f64]) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn draw_lognormal(rng: &mut ChaCha12Rng, spec: &LogNormalSpec) -> f64 {
    let dist = LogNormal::new(spec.mu, spec.sigma).expect("validated spec");
    for _ in 0..64 {
        let x = dist.sample(rng);
        if x >= spec.min && x <= spec.max {
            return x;
        }
    }
    // Truncation rejected every draw; fall back to clamping.
    dist.sample(rng).clamp(spec.min, spec.max)
}

/// Generate a year of home-anchored tours at 15-minute resolution.
///
/// Deterministic for a fixed `(seed, rules)` pair. Each tour is
/// home → destination → dwell → home; tours that would not complete within
/// the horizon are dropped so the profile always ends parked at home. Tours
/// may spill past midnight, in which case the next day's departures are
/// pushed behind the ongoing tour.
pub fn generate_mobility(
    seed: u64,
    rules: &MobilityRules,
    horizon: usize,
) -> Result<MobilityProfile> {
    rules.validate()?;
    if horizon == 0 || horizon % STEPS_PER_DAY != 0 {
        return Err(Error::Input(format!(
            "horizon {horizon} must be a positive multiple of {STEPS_PER_DAY}"
        )));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(1); // mobility draws; availability uses stream 2
    let mut steps = vec![StepState::Parked(Destination::Home); horizon];
    let mut trips = Vec::new();
    let km_per_drive_step = rules.max_speed_kmh * 0.25;

    let mut cursor = 0usize; // first step at which the vehicle is back home
    let mut trip_id = 0u32;
    let days = horizon / STEPS_PER_DAY;

    for day in 0..days {
        let day_type = DayType::of_day(day);
        let table = &rules.tour_count[&day_type];
        let n_tours = draw_categorical(&mut rng, table);

        for _ in 0..n_tours {
            let dest = Destination::AWAY[draw_categorical(&mut rng, &rules.destination_weights)];
            let hour = draw_categorical(&mut rng, &rules.departure[&dest]);
            let quarter = rng.gen_range(0..4usize);
            let distance = draw_lognormal(&mut rng, &rules.distance[&dest]);
            let dwell_h = draw_lognormal(&mut rng, &rules.dwell[&dest]);

            let mut depart = day * STEPS_PER_DAY + hour * 4 + quarter;
            if depart < cursor {
                depart = cursor;
            }
            let n_drive = (distance / km_per_drive_step).ceil().max(1.0) as usize;
            let n_dwell = ((dwell_h * 4.0).round() as usize).max(1);
            let total = 2 * n_drive + n_dwell;
            if depart + total >= horizon {
                continue; // would not return home within the horizon
            }

            let km_step = distance / n_drive as f64;
            for s in 0..n_drive {
                steps[depart + s] = StepState::Driving { trip: trip_id, km: km_step };
            }
            trips.push(TripRecord {
                id: trip_id,
                from: Destination::Home,
                to: dest,
                depart_step: depart,
                n_steps: n_drive,
                km: distance,
            });
            trip_id += 1;

            for s in 0..n_dwell {
                steps[depart + n_drive + s] = StepState::Parked(dest);
            }

            let back = depart + n_drive + n_dwell;
            for s in 0..n_drive {
                steps[back + s] = StepState::Driving { trip: trip_id, km: km_step };
            }
            trips.push(TripRecord {
                id: trip_id,
                from: dest,
                to: Destination::Home,
                depart_step: back,
                n_steps: n_drive,
                km: distance,
            });
            trip_id += 1;

            cursor = back + n_drive;
        }
    }

    let profile = MobilityProfile { steps, trips };
    profile.validate()?;
    Ok(profile)
}
