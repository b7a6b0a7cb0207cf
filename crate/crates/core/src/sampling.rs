//! Profile sampling, fleet scaling and aggregate-characteristic trimming.
//!
//! Samples draw uniformly without replacement within a sample; profiles are
//! replaced in the pool across samples. Sample sets are reproducible from a
//! master seed alone: sample `i` of a set draws from ChaCha stream `i` of
//! the master seed, so sets are stable under parallel generation and
//! identical across charging strategies.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::profile::ProfilePool;
use crate::{Error, Result};

/// An ordered set of distinct profile ids plus the fleet it represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_id: u32,
    pub profile_ids: Vec<u32>,
    /// vehicles represented by the whole sample
    pub fleet_size: f64,
}

impl Sample {
    pub fn n_profiles(&self) -> usize {
        self.profile_ids.len()
    }

    /// Vehicles per profile.
    pub fn scale(&self) -> f64 {
        self.fleet_size / self.profile_ids.len() as f64
    }
}

/// Scaled aggregate characteristics of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub total_battery_capacity_gwh: f64,
    pub annual_driving_consumption_twh: f64,
    pub peak_scaled_consumption_gw: f64,
    pub mean_battery_kwh_per_vehicle: f64,
    pub mean_annual_consumption_mwh_per_vehicle: f64,
}

/// Exact vehicles-per-profile quotient.
pub fn scale_factor(fleet_size: f64, n_profiles: usize) -> Result<f64> {
    if fleet_size <= 0.0 || n_profiles == 0 {
        return Err(Error::Input(
            "scale_factor requires fleet_size > 0 and n_profiles > 0".into(),
        ));
    }
    Ok(fleet_size / n_profiles as f64)
}

/// Uniform draw of `n_profiles` distinct ids from the pool.
pub fn draw_sample(
    pool: &ProfilePool,
    n_profiles: usize,
    fleet_size: f64,
    sample_id: u32,
    rng: &mut ChaCha12Rng,
) -> Result<Sample> {
    if n_profiles == 0 || n_profiles > pool.len() {
        return Err(Error::Input(format!(
            "sample size {n_profiles} outside 1..={}",
            pool.len()
        )));
    }
    let profile_ids = index::sample(rng, pool.len(), n_profiles)
        .iter()
        .map(|i| pool.profiles[i].id)
        .collect();
    Ok(Sample {
        sample_id,
        profile_ids,
        fleet_size,
    })
}

/// Independent samples; sample `i` uses ChaCha stream `i` of `master_seed`.
pub fn draw_sample_set(
    pool: &ProfilePool,
    n_profiles: usize,
    n_samples: usize,
    fleet_size: f64,
    master_seed: u64,
) -> Result<Vec<Sample>> {
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be >= 1".into()));
    }
    (0..n_samples)
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
            rng.set_stream(i as u64);
            draw_sample(pool, n_profiles, fleet_size, i as u32, &mut rng)
        })
        .collect()
}

/// Nested samples: prefixes of one uniform permutation, so each is a
/// uniform without-replacement draw and smaller samples are subsets of
/// larger ones.
pub fn draw_nested_samples(
    pool: &ProfilePool,
    sizes: &[usize],
    fleet_size: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<Sample>> {
    let max = sizes.iter().copied().max().unwrap_or(0);
    let base = draw_sample(pool, max, fleet_size, 0, rng)?;
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(i, &k)| Sample {
            sample_id: i as u32,
            profile_ids: base.profile_ids[..k].to_vec(),
            fleet_size,
        })
        .collect())
}

/// Exact scaled sums over the sample's profiles.
pub fn aggregate_characteristics(sample: &Sample, pool: &ProfilePool) -> Result<AggregateStats> {
    let scale = sample.scale();
    let mut battery_kwh = 0.0;
    let mut annual_kwh = 0.0;
    let mut hourly_sum: Vec<f64> = Vec::new();
    for &id in &sample.profile_ids {
        let p = pool.get(id)?;
        battery_kwh += p.vehicle.battery_capacity;
        annual_kwh += p.annual_consumption_kwh();
        let hourly = p.hourly_consumption();
        if hourly_sum.is_empty() {
            hourly_sum = hourly.values;
        } else {
            for (acc, v) in hourly_sum.iter_mut().zip(&hourly.values) {
                *acc += v;
            }
        }
    }
    let peak_kwh_per_h = hourly_sum.iter().cloned().fold(0.0f64, f64::max);
    let n = sample.n_profiles() as f64;
    Ok(AggregateStats {
        total_battery_capacity_gwh: scale * battery_kwh / 1e6,
        annual_driving_consumption_twh: scale * annual_kwh / 1e9,
        peak_scaled_consumption_gw: scale * peak_kwh_per_h / 1e6,
        mean_battery_kwh_per_vehicle: battery_kwh / n,
        mean_annual_consumption_mwh_per_vehicle: annual_kwh / n / 1e3,
    })
}

/// Keep samples whose aggregate battery capacity AND annual consumption
/// both deviate from the cross-sample mean by at most `threshold`
/// (relative). An empty result is allowed.
pub fn trim_samples(
    samples: &[Sample],
    pool: &ProfilePool,
    threshold: f64,
) -> Result<Vec<Sample>> {
    if samples.is_empty() {
        return Err(Error::Input("trim_samples requires at least one sample".into()));
    }
    let stats: Vec<AggregateStats> = samples
        .iter()
        .map(|s| aggregate_characteristics(s, pool))
        .collect::<Result<_>>()?;
    let n = stats.len() as f64;
    let mean_cap = stats.iter().map(|s| s.total_battery_capacity_gwh).sum::<f64>() / n;
    let mean_cons = stats
        .iter()
        .map(|s| s.annual_driving_consumption_twh)
        .sum::<f64>()
        / n;
    let within = |x: f64, mean: f64| {
        if threshold.is_infinite() {
            true
        } else {
            (x - mean).abs() <= threshold * mean.abs()
        }
    };
    Ok(samples
        .iter()
        .zip(&stats)
        .filter(|(_, st)| {
            within(st.total_battery_capacity_gwh, mean_cap)
                && within(st.annual_driving_consumption_twh, mean_cons)
        })
        .map(|(s, _)| s.clone())
        .collect())
}

/// Serialize sample sets as `n_profiles,sample_id,profile_id` rows so
/// experiments re-run without the RNG.
pub fn save_samples_csv(samples: &[Sample], path: &Path) -> Result<()> {
    let mut out = String::from("n_profiles,sample_id,profile_id\n");
    for s in samples {
        for &id in &s.profile_ids {
            out.push_str(&format!("{},{},{}\n", s.n_profiles(), s.sample_id, id));
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_samples_csv(path: &Path, fleet_size: f64) -> Result<Vec<Sample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples: Vec<Sample> = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                path: path.into(),
                line: lineno + 1,
                msg: "expected n_profiles,sample_id,profile_id".into(),
            });
        }
        let parse = |s: &str| -> Result<u32> {
            s.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                msg: format!("bad integer '{s}'"),
            })
        };
        let sample_id = parse(parts[1])?;
        let profile_id = parse(parts[2])?;
        match samples.iter_mut().find(|s| s.sample_id == sample_id) {
            Some(s) => s.profile_ids.push(profile_id),
            None => samples.push(Sample {
                sample_id,
                profile_ids: vec![profile_id],
                fleet_size,
            }),
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{build_pool, PoolConfig};

    fn pool(n: usize) -> ProfilePool {
        build_pool(&PoolConfig {
            n_profiles: n,
            base_seed: 1,
            horizon_steps: 96,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn whole_pool_sample() {
        let pool = pool(8);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let s = draw_sample(&pool, 8, 100.0, 0, &mut rng).unwrap();
        let mut ids = s.profile_ids.clone();
        ids.sort_unstable();
        assert_eq!(ids, (0..8).collect::<Vec<u32>>());
    }

    #[test]
    fn oversized_sample_rejected() {
        let pool = pool(3);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(draw_sample(&pool, 4, 100.0, 0, &mut rng).is_err());
    }

    #[test]
    fn identical_rng_state_gives_identical_samples() {
        let pool = pool(10);
        let mut a = ChaCha12Rng::seed_from_u64(9);
        let mut b = ChaCha12Rng::seed_from_u64(9);
        assert_eq!(
            draw_sample(&pool, 4, 1.0, 0, &mut a).unwrap(),
            draw_sample(&pool, 4, 1.0, 0, &mut b).unwrap()
        );
    }

    #[test]
    fn single_draw_frequencies_are_uniform() {
        // chi-square style check: each profile's frequency over 10,000
        // single-id draws within 3 sigma of uniform.
        let pool = pool(10);
        let n_draws = 10_000usize;
        let mut counts = vec![0usize; 10];
        for i in 0..n_draws {
            let mut rng = ChaCha12Rng::seed_from_u64(123);
            rng.set_stream(i as u64);
            let s = draw_sample(&pool, 1, 1.0, 0, &mut rng).unwrap();
            counts[s.profile_ids[0] as usize] += 1;
        }
        let p = 0.1f64;
        let expected = n_draws as f64 * p;
        let sigma = (n_draws as f64 * p * (1.0 - p)).sqrt();
        for (id, c) in counts.iter().enumerate() {
            assert!(
                (*c as f64 - expected).abs() <= 3.0 * sigma,
                "profile {id}: count {c} vs expected {expected}"
            );
        }
    }

    #[test]
    fn sample_set_reproducible_and_distinct_within() {
        let pool = pool(12);
        let a = draw_sample_set(&pool, 5, 10, 100.0, 77).unwrap();
        let b = draw_sample_set(&pool, 5, 10, 100.0, 77).unwrap();
        assert_eq!(a, b);
        for s in &a {
            let mut ids = s.profile_ids.clone();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), 5, "duplicate id within a sample");
        }
    }

    #[test]
    fn overlap_across_samples_occurs_for_large_draws() {
        // two samples of 9 from a pool of 12 must share ids
        let pool = pool(12);
        let set = draw_sample_set(&pool, 9, 2, 1.0, 5).unwrap();
        let shared = set[0]
            .profile_ids
            .iter()
            .filter(|id| set[1].profile_ids.contains(id))
            .count();
        assert!(shared > 0);
    }

    #[test]
    fn scale_factor_matches_reported_correspondence() {
        assert_eq!(scale_factor(15_000_000.0, 60).unwrap(), 250_000.0);
        assert_eq!(scale_factor(15_000_000.0, 75).unwrap(), 200_000.0);
        assert_eq!(scale_factor(15_000_000.0, 5).unwrap(), 3_000_000.0);
        assert!(scale_factor(0.0, 5).is_err());
        assert!(scale_factor(1.0, 0).is_err());
    }

    #[test]
    fn aggregates_match_brute_force() {
        let pool = build_pool(&PoolConfig {
            n_profiles: 6,
            base_seed: 3,
            horizon_steps: 7 * 96,
            ..Default::default()
        })
        .unwrap();
        let set = draw_sample_set(&pool, 3, 1, 15e6, 2).unwrap();
        let s = &set[0];
        let stats = aggregate_characteristics(s, &pool).unwrap();

        // independent summation straight over the raw series
        let scale = 15e6 / 3.0;
        let mut battery = 0.0;
        let mut annual = 0.0;
        for &id in &s.profile_ids {
            let p = pool.get(id).unwrap();
            battery += p.vehicle.battery_capacity;
            annual += p.consumption.values.iter().sum::<f64>();
        }
        assert!((stats.total_battery_capacity_gwh - scale * battery / 1e6).abs() < 1e-9);
        assert!((stats.annual_driving_consumption_twh - scale * annual / 1e9).abs() < 1e-12);
    }

    #[test]
    fn single_58kwh_profile_at_15m_fleet_is_870_gwh() {
        let mut pool = pool(1);
        pool.profiles[0].vehicle.battery_capacity = 58.0;
        let s = Sample {
            sample_id: 0,
            profile_ids: vec![0],
            fleet_size: 15e6,
        };
        let stats = aggregate_characteristics(&s, &pool).unwrap();
        assert!((stats.total_battery_capacity_gwh - 870.0).abs() < 1e-9);
    }

    #[test]
    fn trim_keeps_identical_and_removes_outlier() {
        let pool = pool(6);
        let identical: Vec<Sample> = (0..4)
            .map(|i| Sample {
                sample_id: i,
                profile_ids: vec![0, 1],
                fleet_size: 100.0,
            })
            .collect();
        assert_eq!(trim_samples(&identical, &pool, 0.05).unwrap().len(), 4);

        // Outlier: same profiles but a fleet 10% larger scales both
        // aggregates up by 10%.
        let mut with_outlier = identical.clone();
        with_outlier[3].fleet_size = 110.0;
        let kept = trim_samples(&with_outlier, &pool, 0.05).unwrap();
        assert_eq!(kept.len(), 3);
        assert!(kept.iter().all(|s| s.sample_id != 3));
        assert_eq!(trim_samples(&with_outlier, &pool, f64::INFINITY).unwrap().len(), 4);
    }

    #[test]
    fn samples_csv_roundtrip() {
        let pool = pool(10);
        let set = draw_sample_set(&pool, 4, 3, 10.0, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        save_samples_csv(&set, &path).unwrap();
        let loaded = load_samples_csv(&path, 10.0).unwrap();
        assert_eq!(set, loaded);
    }

    #[test]
    fn nested_samples_are_prefixes() {
        let pool = pool(12);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let nested = draw_nested_samples(&pool, &[2, 5, 10], 1.0, &mut rng).unwrap();
        assert_eq!(nested[0].profile_ids, nested[1].profile_ids[..2].to_vec());
        assert_eq!(nested[1].profile_ids, nested[2].profile_ids[..5].to_vec());
    }
}
