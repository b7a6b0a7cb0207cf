//! Python bindings: profile pools, sampling, spike statistics and scenario
//! runs, mirroring the CLI's vocabulary.
//!
//! Build with `cargo build -p bevpsm-py`; the produced `cdylib` imports as
//! `bevpsm_py` (see `python/smoke_test.py` for a loader).

use std::path::PathBuf;

use pyo3::exceptions::PyRuntimeError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bevpsm::harness::{run_scenario, spike_statistics, ChargingStrategy, ScenarioConfig};
use bevpsm::lp::SimplexOptions;
use bevpsm::profile::{build_pool, load_pool, save_pool, PoolConfig, ProfilePool, STEPS_PER_DAY};
use bevpsm::psm::SystemConfig;

fn err(e: bevpsm::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A pool of synthetic BEV profiles.
#[pyclass(module = "bevpsm_py")]
struct Pool {
    inner: ProfilePool,
}

#[pymethods]
impl Pool {
    /// Generate `n_profiles` profiles of `days` days from `seed`.
    #[staticmethod]
    #[pyo3(signature = (n_profiles=200, seed=42, days=365))]
    fn generate(n_profiles: usize, seed: u64, days: usize) -> PyResult<Self> {
        let cfg = PoolConfig {
            n_profiles,
            base_seed: seed,
            horizon_steps: days * STEPS_PER_DAY,
            ..PoolConfig::default()
        };
        Ok(Pool { inner: build_pool(&cfg).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Pool { inner: load_pool(&path).map_err(err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_pool(&self.inner, &path).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn profile_ids(&self) -> Vec<u32> {
        self.inner.profiles.iter().map(|p| p.id).collect()
    }

    fn mean_battery_capacity(&self) -> f64 {
        self.inner.mean_battery_capacity()
    }
}

/// A draw of distinct profile ids representing a fleet.
#[pyclass(module = "bevpsm_py")]
#[derive(Clone)]
struct Sample {
    inner: bevpsm::sampling::Sample,
}

#[pymethods]
impl Sample {
    #[getter]
    fn sample_id(&self) -> u32 {
        self.inner.sample_id
    }

    #[getter]
    fn profile_ids(&self) -> Vec<u32> {
        self.inner.profile_ids.clone()
    }

    #[getter]
    fn fleet_size(&self) -> f64 {
        self.inner.fleet_size
    }

    /// Vehicles represented by each profile.
    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale()
    }

    fn __repr__(&self) -> String {
        format!(
            "Sample(sample_id={}, n_profiles={}, fleet_size={})",
            self.inner.sample_id,
            self.inner.profile_ids.len(),
            self.inner.fleet_size
        )
    }
}

/// Draw `n_samples` independent without-replacement samples.
#[pyfunction]
#[pyo3(signature = (pool, n_profiles, n_samples=10, fleet_size=15e6, seed=42))]
fn draw_samples(
    pool: &Pool,
    n_profiles: usize,
    n_samples: usize,
    fleet_size: f64,
    seed: u64,
) -> PyResult<Vec<Sample>> {
    let samples =
        bevpsm::sampling::draw_sample_set(&pool.inner, n_profiles, n_samples, fleet_size, seed)
            .map_err(err)?;
    Ok(samples.into_iter().map(|inner| Sample { inner }).collect())
}

/// Keep samples whose aggregate battery capacity and annual consumption
/// both stay within `threshold` (relative) of the cross-sample mean.
#[pyfunction]
#[pyo3(signature = (samples, pool, threshold=0.05))]
fn trim_samples(samples: Vec<Sample>, pool: &Pool, threshold: f64) -> PyResult<Vec<Sample>> {
    let inner: Vec<_> = samples.into_iter().map(|s| s.inner).collect();
    let kept = bevpsm::sampling::trim_samples(&inner, &pool.inner, threshold).map_err(err)?;
    Ok(kept.into_iter().map(|inner| Sample { inner }).collect())
}

/// Peak, mean and threshold exceedance of the scaled aggregate driving
/// consumption of `sample`.
#[pyfunction]
#[pyo3(name = "spike_statistics", signature = (sample, pool, threshold_gw=100.0))]
fn spike_statistics_py<'py>(
    py: Python<'py>,
    sample: &Sample,
    pool: &Pool,
    threshold_gw: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = spike_statistics(&sample.inner, &pool.inner, threshold_gw).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("peak_gw", s.peak_gw)?;
    d.set_item("mean_gw", s.mean_gw)?;
    d.set_item("threshold_gw", s.threshold_gw)?;
    d.set_item("hours_above_threshold", s.hours_above_threshold)?;
    Ok(d)
}

/// A system configuration plus the directory its series paths resolve
/// against.
#[pyclass(module = "bevpsm_py")]
struct System {
    config: SystemConfig,
    base_dir: PathBuf,
}

#[pymethods]
impl System {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let config = SystemConfig::load(&path).map_err(err)?;
        let base_dir = path.parent().unwrap_or(std::path::Path::new(".")).to_path_buf();
        Ok(System { config, base_dir })
    }

    #[getter]
    fn name(&self) -> String {
        self.config.name.clone()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.config.horizon
    }
}

/// Build and solve one scenario; returns objective, status, capacities,
/// generation totals and timings as a dict.
#[pyfunction]
#[pyo3(signature = (system, strategy="reference", sample=None, pool=None, node=None))]
fn run<'py>(
    py: Python<'py>,
    system: &System,
    strategy: &str,
    sample: Option<Sample>,
    pool: Option<&Pool>,
    node: Option<String>,
) -> PyResult<Bound<'py, PyDict>> {
    let strategy: ChargingStrategy = strategy
        .parse()
        .map_err(|e: bevpsm::Error| err(e))?;
    let cfg = ScenarioConfig {
        setting: system.config.name.clone(),
        system: system.config.clone(),
        base_dir: system.base_dir.clone(),
        strategy,
        sample: sample.map(|s| s.inner),
        node,
        options: SimplexOptions::default(),
    };
    let r = run_scenario(&cfg, pool.map(|p| &p.inner)).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("setting", r.name)?;
    d.set_item("status", r.status.as_str())?;
    d.set_item("objective_eur", r.objective)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("solve_time_s", r.solve_time_s)?;
    d.set_item("runtime_s", r.runtime_s)?;
    d.set_item("capacities", r.capacities)?;
    d.set_item("generation_totals_mwh", r.generation_totals)?;
    d.set_item("bev_charge_total_mwh", r.bev_charge.iter().sum::<f64>())?;
    d.set_item("bev_discharge_total_mwh", r.bev_discharge.iter().sum::<f64>())?;
    Ok(d)
}

#[pymodule]
fn bevpsm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pool>()?;
    m.add_class::<Sample>()?;
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(draw_samples, m)?)?;
    m.add_function(wrap_pyfunction!(trim_samples, m)?)?;
    m.add_function(wrap_pyfunction!(spike_statistics_py, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
