//! Command-line dispatcher: wires configuration files to pool generation,
//! sampling, single runs, sweeps, report emission and solution validation.
//!
//! Every run writes a `manifest.toml` (config hash, seeds, version, outputs)
//! so any output directory is reproducible from its manifest alone.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::harness::{
    emit_outputs, read_results_csv, run_scenario, sweep, ChargingStrategy, ResultTable, RunManifest,
    ScenarioConfig, SweepConfig,
};
use crate::lp::{
    read_external_solution, read_mps, validate_solution, write_mps, write_solution, SimplexOptions,
    SolveStatus,
};
use crate::profile::{build_pool, load_pool, save_pool, PoolConfig};
use crate::psm::{Strategy, SystemConfig};
use crate::sampling::{
    draw_sample_set, load_samples_csv, save_samples_csv, trim_samples, Sample,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "bevpsm",
    version,
    about = "Power-sector capacity expansion with scaled individual BEV profiles"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a reproducible pool of BEV profiles
    GenPool(GenPoolArgs),
    /// Draw profile samples from a pool
    #[command(name = "sample")]
    SampleCmd(SampleArgs),
    /// Build and solve a single scenario
    Run(RunArgs),
    /// Run a (profile count × sample × strategy) grid
    Sweep(SweepArgs),
    /// Re-emit figures from a stored results CSV
    Report(ReportArgs),
    /// Re-check a stored solution against a stored model without re-solving
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct GenPoolArgs {
    /// Pool configuration (TOML); defaults apply if omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of profiles (overrides the config)
    #[arg(long)]
    n: Option<usize>,
    /// Base seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Days per profile (overrides the config's horizon)
    #[arg(long)]
    days: Option<usize>,
    /// Output pool directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Pool directory
    #[arg(long)]
    pool: PathBuf,
    #[arg(long)]
    n_profiles: usize,
    #[arg(long, default_value_t = 10)]
    n_samples: usize,
    /// Total vehicles the sample represents
    #[arg(long, default_value_t = 15e6)]
    fleet: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Drop samples whose aggregate battery capacity or annual consumption
    /// deviates more than 5% from the cross-sample mean
    #[arg(long)]
    trim: bool,
    /// Output directory (writes samples.csv)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// System configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// reference | smart | bidirectional
    #[arg(long, default_value = "reference")]
    strategy: ChargingStrategy,
    /// Pool directory (required unless strategy is reference)
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Sample set CSV; if omitted, draws `--profiles` ids ad hoc
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Which sample of the set to run
    #[arg(long, default_value_t = 0)]
    sample_id: u32,
    /// Ad-hoc sample size when no sample file is given (0 = reference)
    #[arg(long, default_value_t = 0)]
    profiles: usize,
    #[arg(long, default_value_t = 15e6)]
    fleet: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Node receiving the BEV block (defaults to the first node)
    #[arg(long)]
    node: Option<String>,
    /// Also export the model as MPS
    #[arg(long)]
    export_mps: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// key=value overrides applied to the config (dotted keys allowed)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// results.csv from a sweep
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Model in MPS format
    #[arg(long)]
    model: PathBuf,
    /// Solution file, one `name value` per line
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

/// On-disk sweep configuration; paths resolve relative to the file.
#[derive(Debug, Deserialize)]
struct SweepFile {
    setting: String,
    /// path to the system TOML
    system: PathBuf,
    /// path to the pool directory
    pool: PathBuf,
    node: Option<String>,
    fleet_size: f64,
    profile_counts: Vec<usize>,
    samples_per_count: usize,
    master_seed: u64,
    strategies: Vec<Strategy>,
    /// record wall-clock runtimes (true) or zeros for byte-stable outputs
    #[serde(default = "default_true")]
    timing: bool,
    max_iterations: Option<usize>,
}

fn default_true() -> bool {
    true
}

pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on its own; exit code 0 for those.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenPool(a) => cmd_gen_pool(a),
        Command::SampleCmd(a) => cmd_sample(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Report(a) => cmd_report(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn read_config_bytes(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).map_err(|e| Error::io(p, e)),
        None => Ok(Vec::new()),
    }
}

fn cmd_gen_pool(a: GenPoolArgs) -> Result<()> {
    let mut cfg: PoolConfig = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => PoolConfig::default(),
    };
    if let Some(n) = a.n {
        cfg.n_profiles = n;
    }
    if let Some(seed) = a.seed {
        cfg.base_seed = seed;
    }
    if let Some(days) = a.days {
        cfg.horizon_steps = days * crate::profile::STEPS_PER_DAY;
    }
    let pool = build_pool(&cfg)?;
    save_pool(&pool, &a.out)?;
    let resolved = toml::to_string(&cfg).unwrap_or_default();
    let mut manifest = RunManifest::new("gen-pool", resolved.as_bytes());
    manifest.master_seed = Some(cfg.base_seed);
    manifest.outputs.push(format!("{} profiles", pool.len()));
    manifest.write(&a.out)?;
    println!("wrote pool of {} profiles to {}", pool.len(), a.out.display());
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let pool = load_pool(&a.pool)?;
    let mut samples = draw_sample_set(&pool, a.n_profiles, a.n_samples, a.fleet, a.seed)?;
    let drawn = samples.len();
    if a.trim {
        samples = trim_samples(&samples, &pool, 0.05)?;
        if samples.is_empty() {
            println!("all {drawn} samples trimmed away at 5%");
        }
    }
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let csv_path = a.out.join("samples.csv");
    save_samples_csv(&samples, &csv_path)?;
    let mut manifest = RunManifest::new("sample", format!("{a:?}").as_bytes());
    manifest.master_seed = Some(a.seed);
    manifest.inputs.push(a.pool.display().to_string());
    manifest.outputs.push("samples.csv".into());
    if a.trim && samples.len() < drawn {
        manifest
            .warnings
            .push(format!("trimmed {} of {drawn} samples", drawn - samples.len()));
    }
    manifest.write(&a.out)?;
    println!("wrote {} samples to {}", samples.len(), csv_path.display());
    Ok(())
}

fn resolve_sample(a: &RunArgs, pool: Option<&crate::profile::ProfilePool>) -> Result<Option<Sample>> {
    if a.strategy == ChargingStrategy::Reference {
        return Ok(None);
    }
    if let Some(path) = &a.samples {
        let samples = load_samples_csv(path, a.fleet)?;
        return samples
            .into_iter()
            .find(|s| s.sample_id == a.sample_id)
            .map(Some)
            .ok_or_else(|| Error::Input(format!("sample id {} not in {}", a.sample_id, path.display())));
    }
    if a.profiles == 0 {
        return Err(Error::Input(
            "a BEV strategy needs --samples or --profiles > 0".into(),
        ));
    }
    let pool = pool.ok_or_else(|| Error::Input("--pool is required for BEV runs".into()))?;
    Ok(Some(
        draw_sample_set(pool, a.profiles, 1, a.fleet, a.seed)?.remove(0),
    ))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let system = SystemConfig::load(&a.config)?;
    let base_dir = a.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let pool = match &a.pool {
        Some(dir) => Some(load_pool(dir)?),
        None => None,
    };
    let sample = resolve_sample(&a, pool.as_ref())?;
    let cfg = ScenarioConfig {
        setting: system.name.clone(),
        system,
        base_dir,
        strategy: a.strategy,
        sample,
        node: a.node.clone(),
        options: SimplexOptions::default(),
    };
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let result = run_scenario(&cfg, pool.as_ref())?;
    let mut outputs = vec!["result.toml".to_string()];

    if a.export_mps {
        // Rebuild the same model for export; construction is deterministic.
        let mut model = crate::psm::build_reference_model(&cfg.system, &cfg.base_dir)?;
        if let (Some(strategy), Some(sample)) = (cfg.strategy.to_bev_strategy(), &cfg.sample) {
            let node = cfg
                .node
                .clone()
                .unwrap_or_else(|| cfg.system.nodes[0].id.clone());
            crate::psm::attach_bev_block(&mut model, sample, pool.as_ref().unwrap(), strategy, &node)?;
        }
        write_mps(&model.lp, &a.out.join("model.mps"))?;
        let raw = crate::lp::solve_problem(&model.lp, &cfg.options)?;
        write_solution(&model.lp, &raw, &a.out.join("solution.txt"))?;
        outputs.push("model.mps".into());
        outputs.push("solution.txt".into());
    }

    let summary = toml::to_string_pretty(&result)
        .map_err(|e| Error::Internal(format!("result serialization: {e}")))?;
    fs::write(a.out.join("result.toml"), summary).map_err(|e| Error::io(&a.out, e))?;

    let mut manifest = RunManifest::new("run", &read_config_bytes(Some(&a.config))?);
    manifest.master_seed = Some(a.seed);
    manifest.inputs.push(a.config.display().to_string());
    manifest.outputs = outputs;
    manifest.write(&a.out)?;
    println!(
        "{}: status {} objective {:.6e} € runtime {:.3}s",
        cfg.setting,
        result.status.as_str(),
        result.objective,
        result.runtime_s
    );
    if result.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!("status {}", result.status.as_str())));
    }
    Ok(())
}

/// Apply `key=value` (dotted keys allowed) onto a parsed TOML document.
fn apply_override(doc: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw_value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Input(format!("override '{assignment}' is not KEY=VALUE")))?;
    // Borrow TOML's own literal syntax to type the value.
    let parsed: toml::Value = format!("v = {raw_value}")
        .parse::<toml::Table>()
        .map(|t| t["v"].clone())
        .unwrap_or_else(|_| toml::Value::String(raw_value.to_string()));
    let mut cursor = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        cursor = cursor
            .get_mut(part)
            .ok_or_else(|| Error::Input(format!("override references unknown key '{key}'")))?;
    }
    let table = cursor
        .as_table_mut()
        .ok_or_else(|| Error::Input(format!("override key '{key}' does not address a table")))?;
    let last = parts[parts.len() - 1];
    if !table.contains_key(last) {
        return Err(Error::Input(format!("override references unknown key '{key}'")));
    }
    table.insert(last.to_string(), parsed);
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config).map_err(|e| Error::io(&a.config, e))?;
    let mut doc: toml::Value = text
        .parse()
        .map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;
    for assignment in &a.overrides {
        apply_override(&mut doc, assignment)?;
    }
    let resolved = toml::to_string(&doc).unwrap_or_default();
    let file: SweepFile = doc
        .try_into()
        .map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;

    let base = a.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let system_path = base.join(&file.system);
    let system = SystemConfig::load(&system_path)?;
    let pool = load_pool(&base.join(&file.pool))?;
    let mut options = SimplexOptions::default();
    if let Some(n) = file.max_iterations {
        options.max_iter = n;
    }
    let cfg = SweepConfig {
        setting: file.setting,
        system,
        base_dir: system_path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        node: file.node,
        fleet_size: file.fleet_size,
        profile_counts: file.profile_counts,
        samples_per_count: file.samples_per_count,
        master_seed: file.master_seed,
        strategies: file.strategies,
        options,
    };
    let mut table = sweep(&cfg, &pool)?;
    if !file.timing {
        for row in &mut table.rows {
            row.runtime_s = 0.0;
        }
    }
    let (files, warnings) = emit_outputs(&table, &a.out)?;

    let mut manifest = RunManifest::new("sweep", resolved.as_bytes());
    manifest.master_seed = Some(cfg.master_seed);
    manifest.inputs.push(a.config.display().to_string());
    manifest.outputs = files;
    manifest.warnings = table.warnings.clone();
    manifest.warnings.extend(warnings);
    manifest.write(&a.out)?;
    println!(
        "sweep: {} rows, {} warnings, reference objective {:.6e} €",
        table.rows.len(),
        manifest.warnings.len(),
        table.reference_objective
    );
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let rows = read_results_csv(&a.results)?;
    let reference_objective = rows
        .first()
        .map(|r| r.objective_eur - r.cost_delta_eur)
        .unwrap_or(f64::NAN);
    let table = ResultTable { reference_objective, rows, warnings: vec![] };
    let (files, warnings) = emit_outputs(&table, &a.out)?;
    let mut manifest = RunManifest::new("report", &fs::read(&a.results).map_err(|e| Error::io(&a.results, e))?);
    manifest.inputs.push(a.results.display().to_string());
    manifest.outputs = files;
    manifest.warnings = warnings;
    manifest.write(&a.out)?;
    println!("report: {} rows re-rendered to {}", table.rows.len(), a.out.display());
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let problem = read_mps(&a.model)?;
    let sol = read_external_solution(&a.solution, &problem)?;
    let report = validate_solution(&problem, &sol, a.tol)?;
    println!(
        "max bound violation {:.3e}  max row residual {:.3e}  relative {:.3e}  objective {:.9e}",
        report.max_bound_violation,
        report.max_row_residual,
        report.max_relative_residual,
        report.objective_recomputed
    );
    if report.pass {
        println!("PASS at tol {:.1e}", a.tol);
        Ok(())
    } else {
        Err(Error::Solver(format!(
            "solution violates the model at tol {:.1e}",
            a.tol
        )))
    }
}
