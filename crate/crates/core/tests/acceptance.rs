//! End-to-end acceptance checks for the whole pipeline: solver correctness
//! against an exhaustive oracle, model identities (zero fleet, cloned
//! profiles), convergence and spike behaviour of the weekly sweep, format
//! round-trips, and runtime scaling.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see one PASS/FAIL
//! line per check. Everything is seeded; a pass is reproducible.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use bevpsm::harness::{
    run_scenario, spike_statistics, sweep, write_results_csv, ChargingStrategy, ResultTable,
    ScenarioConfig, SweepConfig,
};
use bevpsm::lp::{
    read_external_solution, read_mps, solve_problem, validate_solution, write_mps, write_solution,
    SimplexOptions, SolveStatus,
};
use bevpsm::profile::{build_pool, BevProfile, PoolConfig, ProfilePool};
use bevpsm::psm::{ScenarioResult, Strategy, SystemConfig};
use bevpsm::sampling::{draw_nested_samples, draw_sample_set, scale_factor, trim_samples, Sample};

const FLEET: f64 = 15e6;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn desk_pool() -> ProfilePool {
    let path = configs_dir().join("pool_desk.toml");
    let cfg: PoolConfig =
        toml::from_str(&std::fs::read_to_string(&path).expect("pool config")).expect("pool config");
    build_pool(&cfg).expect("pool generation")
}

fn load_system(name: &str) -> SystemConfig {
    SystemConfig::load(&configs_dir().join(name)).expect(name)
}

fn run_bev(
    system: &SystemConfig,
    strategy: ChargingStrategy,
    sample: Option<Sample>,
    pool: Option<&ProfilePool>,
) -> Result<ScenarioResult, String> {
    let cfg = ScenarioConfig {
        setting: system.name.clone(),
        system: system.clone(),
        base_dir: configs_dir(),
        strategy,
        sample,
        node: None,
        options: SimplexOptions::default(),
    };
    let r = run_scenario(&cfg, pool).map_err(|e| e.to_string())?;
    if r.status != SolveStatus::Optimal {
        return Err(format!("status {}", r.status.as_str()));
    }
    Ok(r)
}

fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * f64::max(1.0, f64::max(a.abs(), b.abs()))
}

/// Simplex agrees with exhaustive vertex enumeration on 50 random bounded
/// LPs of up to 8 variables and 8 rows, within 1e-9, in under 5 seconds.
fn check_simplex_vs_enumeration() -> Result<(), String> {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(777);
    let opts = SimplexOptions::default();
    for i in 0..50 {
        let (p, dense) = common::random_boxed_lp(&mut rng, i);
        let sol = solve_problem(&p, &opts).map_err(|e| format!("lp {i}: {e}"))?;
        if sol.status != SolveStatus::Optimal {
            return Err(format!("lp {i}: status {}", sol.status.as_str()));
        }
        let oracle = common::enumerate_optimum(&dense)
            .ok_or_else(|| format!("lp {i}: oracle found no vertex"))?;
        if !close_rel(sol.objective, oracle, 1e-9) {
            return Err(format!(
                "lp {i}: simplex {} vs enumeration {}",
                sol.objective, oracle
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        return Err(format!("took {elapsed:.1}s, budget 5s"));
    }
    Ok(())
}

/// Every bundled system solves and its solution re-validates at 1e-6,
/// with and without BEV blocks.
fn check_bundled_systems_validate(pool: &ProfilePool) -> Result<(), String> {
    for name in ["island.toml", "hydrogen.toml", "interconnected.toml", "stylized.toml"] {
        let r = run_bev(&load_system(name), ChargingStrategy::Reference, None, None)
            .map_err(|e| format!("{name}: {e}"))?;
        if !r.feasibility.pass || r.feasibility.max_relative_residual > 1e-6 {
            return Err(format!("{name}: residual {}", r.feasibility.max_relative_residual));
        }
    }
    let island = load_system("island.toml");
    let sample = draw_sample_set(pool, 5, 1, FLEET, 7).unwrap().remove(0);
    for strategy in [ChargingStrategy::Smart, ChargingStrategy::Bidirectional] {
        let r = run_bev(&island, strategy, Some(sample.clone()), Some(pool))
            .map_err(|e| format!("island {strategy:?}: {e}"))?;
        if !r.feasibility.pass {
            return Err(format!("island {strategy:?}: validation failed"));
        }
    }
    Ok(())
}

/// A BEV block representing zero vehicles leaves the objective unchanged.
fn check_zero_fleet_identity(pool: &ProfilePool) -> Result<(), String> {
    let island = load_system("island.toml");
    let reference = run_bev(&island, ChargingStrategy::Reference, None, None)?;
    let sample = Sample {
        sample_id: 0,
        profile_ids: vec![pool.profiles[0].id, pool.profiles[1].id],
        fleet_size: 0.0,
    };
    let zero = run_bev(&island, ChargingStrategy::Smart, Some(sample), Some(pool))?;
    if !close_rel(reference.objective, zero.objective, 1e-9) {
        return Err(format!(
            "reference {} vs zero-fleet {}",
            reference.objective, zero.objective
        ));
    }
    Ok(())
}

/// Bidirectional charging never costs more than smart charging in any
/// sweep cell (same sample, same count).
fn check_bidirectional_dominates(table: &ResultTable) -> Result<(), String> {
    for smart in table.rows.iter().filter(|r| r.strategy == "smart") {
        let bidi = table
            .rows
            .iter()
            .find(|r| {
                r.strategy == "bidirectional"
                    && r.n_profiles == smart.n_profiles
                    && r.sample_id == smart.sample_id
            })
            .ok_or_else(|| {
                format!("no bidirectional row for ({}, {})", smart.n_profiles, smart.sample_id)
            })?;
        if bidi.profile_ids != smart.profile_ids {
            return Err("sample ids differ across strategies".into());
        }
        let tol = 1e-7 * f64::max(1.0, smart.objective_eur.abs());
        if bidi.objective_eur > smart.objective_eur + tol {
            return Err(format!(
                "({}, {}): bidirectional {} > smart {}",
                smart.n_profiles, smart.sample_id, bidi.objective_eur, smart.objective_eur
            ));
        }
    }
    Ok(())
}

/// Repeating every profile of a sample k times at the same fleet size
/// leaves the objective unchanged.
fn check_clone_invariance(pool: &ProfilePool) -> Result<(), String> {
    let island = load_system("island.toml");
    let base = draw_sample_set(pool, 2, 1, FLEET, 99).unwrap().remove(0);
    let base_obj = run_bev(&island, ChargingStrategy::Smart, Some(base.clone()), Some(pool))?
        .objective;
    for k in [2usize, 5, 10] {
        let cloned = Sample {
            sample_id: 0,
            profile_ids: base
                .profile_ids
                .iter()
                .flat_map(|id| std::iter::repeat(*id).take(k))
                .collect(),
            fleet_size: FLEET,
        };
        let obj = run_bev(&island, ChargingStrategy::Smart, Some(cloned), Some(pool))?
            .objective;
        if !close_rel(base_obj, obj, 1e-9) {
            return Err(format!("k={k}: {base_obj} vs {obj}"));
        }
    }
    Ok(())
}

fn desk_sweep(pool: &ProfilePool) -> Result<(ResultTable, f64), String> {
    let start = Instant::now();
    let cfg = SweepConfig {
        setting: "island".into(),
        system: load_system("island.toml"),
        base_dir: configs_dir(),
        node: None,
        fleet_size: FLEET,
        profile_counts: vec![2, 5, 10, 20],
        samples_per_count: 10,
        master_seed: 42,
        strategies: vec![Strategy::Smart, Strategy::Bidirectional],
        options: SimplexOptions::default(),
    };
    let table = sweep(&cfg, pool).map_err(|e| e.to_string())?;
    Ok((table, start.elapsed().as_secs_f64()))
}

/// The weekly sweep converges: per-BEV cost deltas of small samples are
/// biased high and noisy, large samples settle down and stay nonnegative.
/// The whole grid (80 solves) finishes inside 30 minutes.
fn check_sweep_convergence(table: &ResultTable, elapsed: f64) -> Result<(), String> {
    if !table.warnings.is_empty() {
        return Err(format!("sweep warnings: {:?}", table.warnings));
    }
    if table.rows.len() != 80 {
        return Err(format!("expected 80 rows, got {}", table.rows.len()));
    }
    let (mean2, std2) = table.delta_stats(Strategy::Smart, 2);
    let (mean20, std20) = table.delta_stats(Strategy::Smart, 20);
    if mean2 < mean20 {
        return Err(format!("mean delta size 2 ({mean2:.3}) < size 20 ({mean20:.3})"));
    }
    if std20 > std2 {
        return Err(format!("std at size 20 ({std20:.3}) > size 2 ({std2:.3})"));
    }
    for row in table.rows_for(Strategy::Smart, 20) {
        if row.cost_delta_eur_per_bev_yr < -1e-6 {
            return Err(format!(
                "sample {}: smart delta {} negative at size 20",
                row.sample_id, row.cost_delta_eur_per_bev_yr
            ));
        }
    }
    if elapsed >= 1800.0 {
        return Err(format!("sweep took {elapsed:.0}s, budget 1800s"));
    }
    Ok(())
}

/// Small samples spike: across 50 nested draws the 5-profile aggregate
/// peaks above the 20-profile aggregate at least 80% of the time, and the
/// 5-profile peak is at least 4x its own mean.
fn check_spikes(pool: &ProfilePool) -> Result<(), String> {
    let mut taller = 0;
    let mut peak5_sum = 0.0;
    let mut mean5_sum = 0.0;
    for draw in 0..50u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        rng.set_stream(draw);
        let samples = draw_nested_samples(pool, &[5, 20], FLEET, &mut rng).unwrap();
        let s5 = spike_statistics(&samples[0], pool, 100.0).unwrap();
        let s20 = spike_statistics(&samples[1], pool, 100.0).unwrap();
        if s5.peak_gw > s20.peak_gw {
            taller += 1;
        }
        peak5_sum += s5.peak_gw;
        mean5_sum += s5.mean_gw;
    }
    if taller < 40 {
        return Err(format!("5-profile peak taller in only {taller}/50 draws"));
    }
    if peak5_sum < 4.0 * mean5_sum {
        return Err(format!(
            "mean 5-profile peak {:.2} GW < 4x mean level {:.2} GW",
            peak5_sum / 50.0,
            mean5_sum / 50.0
        ));
    }
    Ok(())
}

/// Vehicles-per-profile is the exact quotient and lands in the results
/// table and its CSV header.
fn check_scale_factor(table: &ResultTable) -> Result<(), String> {
    if scale_factor(15e6, 60).unwrap() != 250_000.0 {
        return Err("15e6 / 60 != 250000".into());
    }
    if scale_factor(15e6, 75).unwrap() != 200_000.0 {
        return Err("15e6 / 75 != 200000".into());
    }
    for row in &table.rows {
        if row.bevs_per_profile != FLEET / row.n_profiles as f64 {
            return Err(format!(
                "row ({}, {}): bevs_per_profile {}",
                row.n_profiles, row.sample_id, row.bevs_per_profile
            ));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("results.csv");
    write_results_csv(table, &csv).map_err(|e| e.to_string())?;
    let header = std::fs::read_to_string(&csv)
        .map_err(|e| e.to_string())?
        .lines()
        .next()
        .unwrap_or_default()
        .to_string();
    if !header.split(',').any(|c| c == "bevs_per_profile") {
        return Err(format!("no bevs_per_profile column in '{header}'"));
    }
    Ok(())
}

/// MPS export/import is the identity on 20 random problems, and a
/// corrupted solution file fails validation.
fn check_mps_roundtrip() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha12Rng::seed_from_u64(31337);
    for i in 0..20 {
        let p = common::random_general_lp(&mut rng, i);
        let a = dir.path().join(format!("a{i}.mps"));
        let b = dir.path().join(format!("b{i}.mps"));
        write_mps(&p, &a).map_err(|e| e.to_string())?;
        let back = read_mps(&a).map_err(|e| format!("lp {i}: {e}"))?;
        write_mps(&back, &b).map_err(|e| e.to_string())?;
        let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        if ba != bb {
            return Err(format!("lp {i}: round-trip changed the file"));
        }
    }

    let system = load_system("stylized.toml");
    let model = bevpsm::psm::build_reference_model(&system, &configs_dir())
        .map_err(|e| e.to_string())?;
    let sol = solve_problem(&model.lp, &SimplexOptions::default()).map_err(|e| e.to_string())?;
    let mps = dir.path().join("model.mps");
    let sol_path = dir.path().join("solution.txt");
    write_mps(&model.lp, &mps).map_err(|e| e.to_string())?;
    write_solution(&model.lp, &sol, &sol_path).map_err(|e| e.to_string())?;

    // corrupt the first generator dispatch value by 1000 MWh
    let text = std::fs::read_to_string(&sol_path).unwrap();
    let mut corrupted = String::new();
    let mut done = false;
    for line in text.lines() {
        if !done && line.starts_with("gen[") {
            let (name, value) = line.rsplit_once(' ').unwrap();
            let v: f64 = value.parse().unwrap();
            corrupted.push_str(&format!("{name} {}\n", v + 1000.0));
            done = true;
        } else {
            corrupted.push_str(line);
            corrupted.push('\n');
        }
    }
    if !done {
        return Err("no gen[...] line to corrupt".into());
    }
    std::fs::write(&sol_path, corrupted).unwrap();
    let problem = read_mps(&mps).map_err(|e| e.to_string())?;
    let loaded = read_external_solution(&sol_path, &problem).map_err(|e| e.to_string())?;
    let report = validate_solution(&problem, &loaded, 1e-6).map_err(|e| e.to_string())?;
    if report.pass {
        return Err("corrupted solution validated cleanly".into());
    }
    Ok(())
}

/// Median solve time over 3 repeats does not decrease as the sample grows.
fn check_runtime_scaling(pool: &ProfilePool) -> Result<(), String> {
    let island = load_system("island.toml");
    let mut medians = Vec::new();
    for size in [2usize, 5, 10, 20] {
        let sample = draw_sample_set(pool, size, 1, FLEET, 1234).unwrap().remove(0);
        let mut times: Vec<f64> = (0..3)
            .map(|_| {
                run_bev(&island, ChargingStrategy::Bidirectional, Some(sample.clone()), Some(pool))
                    .map(|r| r.runtime_s)
            })
            .collect::<Result<_, _>>()?;
        times.sort_by(f64::total_cmp);
        medians.push((size, times[1]));
    }
    for pair in medians.windows(2) {
        if pair[1].1 < pair[0].1 {
            return Err(format!(
                "median runtime fell from {:.2}s at {} profiles to {:.2}s at {}",
                pair[0].1, pair[0].0, pair[1].1, pair[1].0
            ));
        }
    }
    Ok(())
}

/// Trimming at 5% drops a sample whose aggregates were inflated by 10%
/// and keeps the at-mean samples.
fn check_trimming(pool: &ProfilePool) -> Result<(), String> {
    let base: Vec<u32> = pool.profiles[..5].iter().map(|p| p.id).collect();
    let mut pool = pool.clone();

    // clone the 5th profile with aggregates inflated so that swapping it in
    // lifts the sample's battery capacity and consumption by exactly 10%
    let cap_sum: f64 = base
        .iter()
        .map(|id| pool.get(*id).unwrap().vehicle.battery_capacity)
        .sum();
    let cons_sum: f64 = base
        .iter()
        .map(|id| pool.get(*id).unwrap().annual_consumption_kwh())
        .sum();
    let mut outlier_profile: BevProfile = pool.get(base[4]).unwrap().clone();
    outlier_profile.id = 9_999;
    outlier_profile.vehicle.battery_capacity += 0.10 * cap_sum;
    let f_cons = 1.0 + 0.10 * cons_sum / outlier_profile.annual_consumption_kwh();
    for v in outlier_profile.consumption.values.iter_mut() {
        *v *= f_cons;
    }
    pool.profiles.push(outlier_profile);

    let mut samples: Vec<Sample> = (0..9)
        .map(|i| Sample { sample_id: i, profile_ids: base.clone(), fleet_size: FLEET })
        .collect();
    let mut outlier_ids = base[..4].to_vec();
    outlier_ids.push(9_999);
    samples.push(Sample { sample_id: 9, profile_ids: outlier_ids, fleet_size: FLEET });

    let kept = trim_samples(&samples, &pool, 0.05).map_err(|e| e.to_string())?;
    if kept.len() != 9 {
        return Err(format!("kept {} of 10 samples, expected 9", kept.len()));
    }
    if kept.iter().any(|s| s.profile_ids.contains(&9_999)) {
        return Err("the inflated sample survived trimming".into());
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let pool = desk_pool();
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, outcome: Result<(), String>| match outcome {
        Ok(()) => println!("acceptance {name}: PASS"),
        Err(e) => {
            println!("acceptance {name}: FAIL - {e}");
            failures.push(format!("{name}: {e}"));
        }
    };

    check("01 simplex matches vertex enumeration", check_simplex_vs_enumeration());
    check("02 bundled systems validate at 1e-6", check_bundled_systems_validate(&pool));
    check("03 zero-fleet block is the identity", check_zero_fleet_identity(&pool));
    check("05 cloned profiles leave the objective unchanged", check_clone_invariance(&pool));
    check("07 small samples spike", check_spikes(&pool));
    check("09 mps round-trip and corruption detection", check_mps_roundtrip());
    check("11 trimming drops the planted outlier", check_trimming(&pool));

    match desk_sweep(&pool) {
        Ok((table, elapsed)) => {
            check("04 bidirectional never costs more than smart", check_bidirectional_dominates(&table));
            check("06 sweep converges within budget", check_sweep_convergence(&table, elapsed));
            check("08 vehicles per profile is the exact quotient", check_scale_factor(&table));
        }
        Err(e) => {
            for name in [
                "04 bidirectional never costs more than smart",
                "06 sweep converges within budget",
                "08 vehicles per profile is the exact quotient",
            ] {
                check(name, Err(format!("sweep failed: {e}")));
            }
        }
    }

    check("10 runtime grows with sample size", check_runtime_scaling(&pool));

    assert!(failures.is_empty(), "failed checks:\n{}", failures.join("\n"));
}
