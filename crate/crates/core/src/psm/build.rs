//! Translate a `SystemConfig` plus optional BEV blocks into an `LpProblem`.
//!
//! Variable/constraint layout per node:
//!   cap[n,g]            generation capacity, MW
//!   gen[n,g,t]          dispatch, MWh/h; gen ≤ availability × cap
//!   spill[n,t]          free curtailment so the balance can stay an equality
//!   pcap/ecap[n,s]      storage power (MW) and energy (MWh) capacity
//!   sc/sd/soc[n,s,t]    storage charge, discharge (both grid-side), level
//!   ely/h2t/h2soc[n,t]  electrolyzer input (MWh_el), turbine input (MWh_H₂),
//!                       cavern level, plus elycap/cavcap/h2tcap
//!   flow[a,b,t]         directed NTC-bounded interconnection flow
//!   bc/bv/bs[i,t]       per-sampled-profile BEV charge, discharge, SOC
//!
//! Storage and BEV state recursions wrap cyclically (hour 0 links to H−1) so
//! no free energy enters at the horizon boundary. Annualized capacity costs
//! are prorated by horizon/8760 so short test horizons trade investment
//! against dispatch at the same relative prices as a full year.

use std::collections::BTreeMap;

use crate::lp::{ConstraintId, LpProblem, Sense, VarId};
use crate::profile::ProfilePool;
use crate::psm::config::{NodeConfig, SystemConfig};
use crate::sampling::Sample;
use crate::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Smart,
    Bidirectional,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Smart => "smart",
            Strategy::Bidirectional => "bidirectional",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smart" => Ok(Strategy::Smart),
            "bidirectional" => Ok(Strategy::Bidirectional),
            other => Err(Error::Input(format!(
                "unknown strategy '{other}' (smart | bidirectional)"
            ))),
        }
    }
}

/// Hydrogen-chain bookkeeping for one node.
#[derive(Debug, Clone)]
pub struct H2Vars {
    pub ely_cap: VarId,
    pub cavern_cap: VarId,
    pub turbine_cap: VarId,
    pub ely: Vec<VarId>,
    pub turbine: Vec<VarId>,
    pub soc: Vec<VarId>,
    pub cavern_balance: Vec<ConstraintId>,
}

#[derive(Debug, Clone)]
pub struct BevVars {
    pub profile_id: u32,
    pub scale: f64,
    pub battery_mwh: f64,
    pub charge: Vec<VarId>,
    pub discharge: Option<Vec<VarId>>,
    pub soc: Vec<VarId>,
}

/// Maps model dimensions back to LP variables and rows so solutions can be
/// extracted and later blocks can join the energy balances.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub gen_cap: BTreeMap<(String, String), VarId>,
    pub gen: BTreeMap<(String, String), Vec<VarId>>,
    pub spill: BTreeMap<String, Vec<VarId>>,
    pub stor_power_cap: BTreeMap<(String, String), VarId>,
    pub stor_energy_cap: BTreeMap<(String, String), VarId>,
    pub stor_charge: BTreeMap<(String, String), Vec<VarId>>,
    pub stor_discharge: BTreeMap<(String, String), Vec<VarId>>,
    pub stor_soc: BTreeMap<(String, String), Vec<VarId>>,
    pub balance: BTreeMap<String, Vec<ConstraintId>>,
    pub h2: BTreeMap<String, H2Vars>,
    pub flow: BTreeMap<(String, String), Vec<VarId>>,
    pub bev: Vec<BevVars>,
}

/// An LP plus the registry and configuration it was built from.
#[derive(Debug, Clone)]
pub struct PsmModel {
    pub lp: LpProblem,
    pub horizon: usize,
    pub config: SystemConfig,
    pub registry: Registry,
}

const INF: f64 = f64::INFINITY;

/// Build the system without BEVs: generation, storage, hydrogen chain,
/// interconnections, hourly energy balances, annualized-cost objective.
pub fn build_reference_model(sys: &SystemConfig, base_dir: &std::path::Path) -> Result<PsmModel> {
    sys.validate()?;
    let h = sys.horizon;
    let year_frac = h as f64 / HOURS_PER_YEAR;
    let mut lp = LpProblem::new(sys.name.clone());
    let mut reg = Registry::default();

    for node in &sys.nodes {
        build_node(&mut lp, &mut reg, node, sys, h, year_frac, base_dir)?;
    }

    for link in &sys.ntc {
        let vars: Vec<VarId> = (0..h)
            .map(|t| lp.add_var(format!("flow[{},{},{t}]", link.from, link.to), 0.0, link.capacity, 0.0))
            .collect::<Result<_>>()?;
        for t in 0..h {
            lp.add_term(reg.balance[&link.from][t], vars[t], -1.0)?;
            lp.add_term(reg.balance[&link.to][t], vars[t], 1.0)?;
        }
        reg.flow.insert((link.from.clone(), link.to.clone()), vars);
    }

    let mut model = PsmModel { lp, horizon: h, config: sys.clone(), registry: reg };
    for node in &sys.nodes {
        if let Some(chain) = &node.hydrogen {
            if chain.annual_demand_twh > 0.0 {
                attach_hydrogen_demand(&mut model, &node.id, chain.annual_demand_twh)?;
            }
        }
    }
    Ok(model)
}

fn build_node(
    lp: &mut LpProblem,
    reg: &mut Registry,
    node: &NodeConfig,
    sys: &SystemConfig,
    h: usize,
    year_frac: f64,
    base_dir: &std::path::Path,
) -> Result<()> {
    let n = &node.id;
    let load = node.load.resolve(h, base_dir)?;
    if load.iter().any(|v| *v < 0.0) {
        return Err(Error::Config(format!("{n}: load must be ≥ 0")));
    }

    // Balance rows are created first so every later block can join them.
    let spill: Vec<VarId> = (0..h)
        .map(|t| lp.add_var(format!("spill[{n},{t}]"), 0.0, INF, 0.0))
        .collect::<Result<_>>()?;
    let balance: Vec<ConstraintId> = (0..h)
        .map(|t| lp.add_con(format!("bal[{n},{t}]"), vec![(spill[t], -1.0)], Sense::Eq, load[t]))
        .collect::<Result<_>>()?;
    reg.spill.insert(n.clone(), spill);

    for g in &node.generation {
        let avail = g.availability.resolve(h, base_dir)?;
        if avail.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config(format!("{n}/{}: availability outside [0,1]", g.name)));
        }
        let cap = lp.add_var(
            format!("cap[{n},{}]", g.name),
            g.capacity_min,
            g.capacity_max.unwrap_or(INF),
            (g.investment_cost + g.fixed_om) * year_frac,
        )?;
        let marginal = g.variable_cost + sys.carbon_price * g.co2_intensity;
        let mut gen = Vec::with_capacity(h);
        for t in 0..h {
            let v = lp.add_var(format!("gen[{n},{},{t}]", g.name), 0.0, INF, marginal)?;
            lp.add_con(
                format!("avl[{n},{},{t}]", g.name),
                vec![(v, 1.0), (cap, -avail[t])],
                Sense::Le,
                0.0,
            )?;
            lp.add_term(balance[t], v, 1.0)?;
            gen.push(v);
        }
        reg.gen_cap.insert((n.clone(), g.name.clone()), cap);
        reg.gen.insert((n.clone(), g.name.clone()), gen);
    }

    for s in &node.storage {
        let inflow = match &s.inflow {
            Some(spec) => spec.resolve(h, base_dir)?,
            None => vec![0.0; h],
        };
        let pcap = lp.add_var(
            format!("pcap[{n},{}]", s.name),
            0.0,
            s.power_max.unwrap_or(INF),
            s.power_cost * year_frac,
        )?;
        let ecap = lp.add_var(
            format!("ecap[{n},{}]", s.name),
            0.0,
            s.energy_max.unwrap_or(INF),
            s.energy_cost * year_frac,
        )?;
        let mut sc = Vec::with_capacity(h);
        let mut sd = Vec::with_capacity(h);
        let mut soc = Vec::with_capacity(h);
        for t in 0..h {
            sc.push(lp.add_var(format!("sc[{n},{},{t}]", s.name), 0.0, INF, 0.0)?);
            sd.push(lp.add_var(format!("sd[{n},{},{t}]", s.name), 0.0, INF, 0.0)?);
            soc.push(lp.add_var(format!("soc[{n},{},{t}]", s.name), 0.0, INF, 0.0)?);
        }
        for t in 0..h {
            let prev = soc[(t + h - 1) % h];
            lp.add_con(
                format!("sb[{n},{},{t}]", s.name),
                vec![
                    (soc[t], 1.0),
                    (prev, -1.0),
                    (sc[t], -s.charge_efficiency),
                    (sd[t], 1.0 / s.discharge_efficiency),
                ],
                Sense::Eq,
                inflow[t],
            )?;
            lp.add_con(
                format!("se[{n},{},{t}]", s.name),
                vec![(soc[t], 1.0), (ecap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            lp.add_con(
                format!("spc[{n},{},{t}]", s.name),
                vec![(sc[t], 1.0), (pcap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            lp.add_con(
                format!("spd[{n},{},{t}]", s.name),
                vec![(sd[t], 1.0), (pcap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            lp.add_term(balance[t], sc[t], -1.0)?;
            lp.add_term(balance[t], sd[t], 1.0)?;
        }
        let key = (n.clone(), s.name.clone());
        reg.stor_power_cap.insert(key.clone(), pcap);
        reg.stor_energy_cap.insert(key.clone(), ecap);
        reg.stor_charge.insert(key.clone(), sc);
        reg.stor_discharge.insert(key.clone(), sd);
        reg.stor_soc.insert(key, soc);
    }

    if let Some(chain) = &node.hydrogen {
        let ely_cap = lp.add_var(format!("elycap[{n}]"), 0.0, INF, chain.electrolyzer_cost * year_frac)?;
        let cavern_cap = lp.add_var(format!("cavcap[{n}]"), 0.0, INF, chain.cavern_cost * year_frac)?;
        let turbine_cap = lp.add_var(format!("h2tcap[{n}]"), 0.0, INF, chain.turbine_cost * year_frac)?;
        let mut ely = Vec::with_capacity(h);
        let mut turbine = Vec::with_capacity(h);
        let mut soc = Vec::with_capacity(h);
        for t in 0..h {
            ely.push(lp.add_var(format!("ely[{n},{t}]"), 0.0, INF, 0.0)?);
            turbine.push(lp.add_var(format!("h2t[{n},{t}]"), 0.0, INF, 0.0)?);
            soc.push(lp.add_var(format!("h2soc[{n},{t}]"), 0.0, INF, 0.0)?);
        }
        let mut cavern_balance = Vec::with_capacity(h);
        for t in 0..h {
            let prev = soc[(t + h - 1) % h];
            // Cavern balance in MWh_H₂; exogenous demand lands on the rhs.
            cavern_balance.push(lp.add_con(
                format!("hb[{n},{t}]"),
                vec![
                    (soc[t], 1.0),
                    (prev, -(1.0 - chain.cavern_loss)),
                    (ely[t], -chain.electrolyzer_efficiency),
                    (turbine[t], 1.0),
                ],
                Sense::Eq,
                0.0,
            )?);
            lp.add_con(
                format!("hsoc[{n},{t}]"),
                vec![(soc[t], 1.0), (cavern_cap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            lp.add_con(
                format!("hec[{n},{t}]"),
                vec![(ely[t], 1.0), (ely_cap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            // Turbine capacity caps electrical output.
            lp.add_con(
                format!("htc[{n},{t}]"),
                vec![(turbine[t], chain.turbine_efficiency), (turbine_cap, -1.0)],
                Sense::Le,
                0.0,
            )?;
            lp.add_term(balance[t], ely[t], -1.0)?;
            lp.add_term(balance[t], turbine[t], chain.turbine_efficiency)?;
        }
        reg.h2.insert(
            n.clone(),
            H2Vars { ely_cap, cavern_cap, turbine_cap, ely, turbine, soc, cavern_balance },
        );
    }

    reg.balance.insert(n.clone(), balance);
    Ok(())
}

/// Uniform hourly withdrawal implied by an annual hydrogen demand.
pub fn hourly_h2_demand(annual_twh: f64, horizon: usize) -> f64 {
    annual_twh * 1e6 / horizon as f64
}

/// Set the exogenous cavern withdrawal on `node` to `annual_twh` spread
/// uniformly over the horizon. Passing 0 restores the reference balances.
pub fn attach_hydrogen_demand(m: &mut PsmModel, node: &str, annual_twh: f64) -> Result<()> {
    let h2 = m
        .registry
        .h2
        .get(node)
        .ok_or_else(|| Error::Config(format!("node {node} has no hydrogen chain configured")))?
        .clone();
    let demand = hourly_h2_demand(annual_twh, m.horizon);
    for row in &h2.cavern_balance {
        m.lp.set_rhs(*row, -demand)?;
    }
    Ok(())
}

/// Add one charge/SOC (and for bidirectional, discharge) block per sampled
/// profile, scaled to `sample.fleet_size / n_profiles` vehicles each, joined
/// into `node`'s energy balance. Objective is untouched: BEV hardware is
/// exogenous and charging costs arise only through the system dispatch.
pub fn attach_bev_block(
    m: &mut PsmModel,
    sample: &Sample,
    pool: &ProfilePool,
    strategy: Strategy,
    node: &str,
) -> Result<()> {
    let h = m.horizon;
    let balance = m
        .registry
        .balance
        .get(node)
        .ok_or_else(|| Error::Input(format!("unknown node '{node}'")))?
        .clone();
    let eta_c = m.config.bev.charge_efficiency;
    let eta_d = m.config.bev.discharge_efficiency;
    let scale = if sample.fleet_size == 0.0 { 0.0 } else { sample.scale() };

    for (i, pid) in sample.profile_ids.iter().enumerate() {
        let profile = pool.get(*pid)?;
        let cons = profile.hourly_consumption().values;
        let avail = profile.hourly_availability().values;
        if cons.len() < h {
            return Err(Error::Input(format!(
                "profile {pid} covers {} hours, model needs {h}",
                cons.len()
            )));
        }
        // kWh/kW per vehicle → MWh/MW for `scale` vehicles.
        let to_mw = scale / 1000.0;
        let battery_mwh = profile.vehicle.battery_capacity * to_mw;
        let mut charge = Vec::with_capacity(h);
        let mut soc = Vec::with_capacity(h);
        let mut discharge = Vec::with_capacity(h);
        for t in 0..h {
            let a = avail[t] * to_mw;
            charge.push(m.lp.add_var(format!("bc[{i},{t}]"), 0.0, a, 0.0)?);
            soc.push(m.lp.add_var(format!("bs[{i},{t}]"), 0.0, battery_mwh, 0.0)?);
            if strategy == Strategy::Bidirectional {
                discharge.push(m.lp.add_var(format!("bv[{i},{t}]"), 0.0, a, 0.0)?);
            }
        }
        for t in 0..h {
            let prev = soc[(t + h - 1) % h];
            let mut terms = vec![(soc[t], 1.0), (prev, -1.0), (charge[t], -eta_c)];
            if strategy == Strategy::Bidirectional {
                terms.push((discharge[t], 1.0 / eta_d));
            }
            m.lp.add_con(format!("bb[{i},{t}]"), terms, Sense::Eq, -cons[t] * to_mw)?;
            m.lp.add_term(balance[t], charge[t], -1.0)?;
            if strategy == Strategy::Bidirectional {
                m.lp.add_term(balance[t], discharge[t], 1.0)?;
            }
        }
        m.registry.bev.push(BevVars {
            profile_id: *pid,
            scale,
            battery_mwh,
            charge,
            soc,
            discharge: if strategy == Strategy::Bidirectional { Some(discharge) } else { None },
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_problem, SimplexOptions, SolveStatus};
    use crate::profile::{build_pool, PoolConfig};
    use crate::psm::config::{GenerationTech, HydrogenChain, NtcLink, SeriesSpec, StorageTech};
    use std::path::Path;

    fn gen_tech(name: &str, var_cost: f64) -> GenerationTech {
        GenerationTech {
            name: name.into(),
            investment_cost: 0.0,
            fixed_om: 0.0,
            variable_cost: var_cost,
            co2_intensity: 0.0,
            capacity_min: 0.0,
            capacity_max: None,
            availability: SeriesSpec::Scalar(1.0),
        }
    }

    fn single_node_sys(h: usize) -> SystemConfig {
        SystemConfig {
            name: "toy".into(),
            horizon: h,
            carbon_price: 0.0,
            nodes: vec![NodeConfig {
                id: "A".into(),
                load: SeriesSpec::Scalar(1.0),
                generation: vec![gen_tech("ccgt", 10.0)],
                storage: vec![],
                hydrogen: None,
            }],
            ntc: vec![],
            bev: Default::default(),
        }
    }

    fn solve(m: &PsmModel) -> crate::lp::RawSolution {
        solve_problem(&m.lp, &SimplexOptions::default()).unwrap()
    }

    fn objective(m: &PsmModel) -> f64 {
        let sol = solve(m);
        assert_eq!(sol.status, SolveStatus::Optimal, "{}", m.lp.name);
        sol.objective
    }

    #[test]
    fn flat_load_toy_costs_240() {
        let m = build_reference_model(&single_node_sys(24), Path::new(".")).unwrap();
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 240.0).abs() < 1e-9, "objective {}", sol.objective);
    }

    #[test]
    fn capacity_bound_lands_in_lp() {
        let mut sys = single_node_sys(4);
        sys.nodes[0].generation[0].capacity_max = Some(30_000.0);
        let m = build_reference_model(&sys, Path::new(".")).unwrap();
        let cap = m.registry.gen_cap[&("A".to_string(), "ccgt".to_string())];
        assert_eq!(m.lp.var_bounds(cap), (0.0, 30_000.0));
    }

    #[test]
    fn carbon_price_enters_marginal_cost() {
        let mut sys = single_node_sys(4);
        sys.carbon_price = 130.0;
        sys.nodes[0].generation[0].co2_intensity = 0.37;
        let m = build_reference_model(&sys, Path::new(".")).unwrap();
        let gen0 = m.registry.gen[&("A".to_string(), "ccgt".to_string())][0];
        assert!((m.lp.obj_coef(gen0) - 58.1).abs() < 1e-12);
    }

    #[test]
    fn hydrogen_demand_sets_cavern_rhs() {
        let mut sys = single_node_sys(24);
        sys.nodes[0].hydrogen = Some(HydrogenChain {
            electrolyzer_cost: 0.0,
            electrolyzer_efficiency: 0.7,
            cavern_cost: 0.0,
            cavern_loss: 0.0,
            turbine_cost: 0.0,
            turbine_efficiency: 0.4,
            annual_demand_twh: 0.0,
        });
        let mut m = build_reference_model(&sys, Path::new(".")).unwrap();
        let base = objective(&m);
        assert!((base - 240.0).abs() < 1e-6, "idle chain must be free, got {base}");

        assert!((hourly_h2_demand(30.0, 8760) - 3424.657534246575).abs() < 1e-9);
        // 720 MWh_H₂ annual → 30 MWh_H₂ withdrawn every hour of the 24.
        attach_hydrogen_demand(&mut m, "A", 720.0 / 1e6).unwrap();
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        // 720 MWh_H₂ total needs 720/0.7 MWh_el at 10 €/MWh extra.
        assert!(
            (sol.objective - (240.0 + 10.0 * 720.0 / 0.7)).abs() < 1e-6,
            "objective {}",
            sol.objective
        );

        let h2 = &m.registry.h2["A"];
        let ely_in: f64 = h2.ely.iter().map(|v| sol.x[v.0]).sum();
        assert!(ely_in >= 720.0 / 0.7 - 1e-6, "electrolyzer input {ely_in}");
    }

    #[test]
    fn missing_chain_is_a_config_error() {
        let sys = single_node_sys(4);
        let mut m = build_reference_model(&sys, Path::new(".")).unwrap();
        assert!(matches!(
            attach_hydrogen_demand(&mut m, "A", 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_ntc_decouples_nodes() {
        let mut sys = single_node_sys(12);
        sys.nodes.push(NodeConfig {
            id: "B".into(),
            load: SeriesSpec::Scalar(2.0),
            generation: vec![gen_tech("oil", 55.0)],
            storage: vec![],
            hydrogen: None,
        });
        sys.ntc = vec![NtcLink { from: "A".into(), to: "B".into(), capacity: 0.0 }];
        let coupled = objective(&build_reference_model(&sys, Path::new(".")).unwrap());

        let mut only_a = sys.clone();
        only_a.nodes.truncate(1);
        only_a.ntc.clear();
        let mut only_b = sys.clone();
        only_b.nodes.remove(0);
        only_b.ntc.clear();
        let split = objective(&build_reference_model(&only_a, Path::new(".")).unwrap())
            + objective(&build_reference_model(&only_b, Path::new(".")).unwrap());
        assert!((coupled - split).abs() < 1e-9 * split.abs().max(1.0));
    }

    #[test]
    fn ample_ntc_moves_load_to_the_cheap_node() {
        let mut sys = single_node_sys(6);
        sys.nodes[0].generation[0].variable_cost = 5.0;
        sys.nodes.push(NodeConfig {
            id: "B".into(),
            load: SeriesSpec::Scalar(3.0),
            generation: vec![gen_tech("oil", 80.0)],
            storage: vec![],
            hydrogen: None,
        });
        sys.ntc = vec![NtcLink { from: "A".into(), to: "B".into(), capacity: 10.0 }];
        let m = build_reference_model(&sys, Path::new(".")).unwrap();
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        // A serves both loads: (1 + 3) MWh/h × 6 h × 5 €.
        assert!((sol.objective - 120.0).abs() < 1e-9, "objective {}", sol.objective);
        for v in &m.registry.flow[&("A".to_string(), "B".to_string())] {
            assert!(sol.x[v.0] <= 10.0 + 1e-9);
        }
    }

    #[test]
    fn storage_shifts_cheap_energy() {
        // Generator available only in even hours; storage must bridge.
        let dir = tempfile::tempdir().unwrap();
        let avail: Vec<f64> = (0..24).map(|t| if t % 2 == 0 { 1.0 } else { 0.0 }).collect();
        crate::psm::config::write_series_csv(&dir.path().join("a.csv"), &avail).unwrap();
        let mut sys = single_node_sys(24);
        sys.nodes[0].generation[0].availability =
            SeriesSpec::Csv { csv: "a.csv".into() };
        sys.nodes[0].storage.push(StorageTech {
            name: "liion".into(),
            power_cost: 0.0,
            energy_cost: 0.0,
            charge_efficiency: 1.0,
            discharge_efficiency: 1.0,
            power_max: None,
            energy_max: None,
            inflow: None,
        });
        let m = build_reference_model(&sys, dir.path()).unwrap();
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        // Lossless storage: total generation still 24 MWh at 10 €.
        assert!((sol.objective - 240.0).abs() < 1e-6, "objective {}", sol.objective);
    }

    fn tiny_pool(n: usize) -> ProfilePool {
        build_pool(&PoolConfig {
            n_profiles: n,
            base_seed: 7,
            horizon_steps: 96,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn zero_fleet_is_the_identity() {
        let pool = tiny_pool(2);
        let sys = single_node_sys(24);
        let reference = objective(&build_reference_model(&sys, Path::new(".")).unwrap());
        let mut m = build_reference_model(&sys, Path::new(".")).unwrap();
        let sample = Sample { sample_id: 0, profile_ids: vec![0, 1], fleet_size: 0.0 };
        attach_bev_block(&mut m, &sample, &pool, Strategy::Smart, "A").unwrap();
        let with_bev = objective(&m);
        assert!((with_bev - reference).abs() <= 1e-9 * reference.abs());
    }

    #[test]
    fn bidirectional_never_costs_more_than_smart() {
        let pool = tiny_pool(3);
        let sys = single_node_sys(24);
        let sample = Sample { sample_id: 0, profile_ids: vec![0, 1, 2], fleet_size: 3000.0 };
        let mut smart = build_reference_model(&sys, Path::new(".")).unwrap();
        attach_bev_block(&mut smart, &sample, &pool, Strategy::Smart, "A").unwrap();
        let mut bidi = build_reference_model(&sys, Path::new(".")).unwrap();
        attach_bev_block(&mut bidi, &sample, &pool, Strategy::Bidirectional, "A").unwrap();
        let obj_smart = objective(&smart);
        let obj_bidi = objective(&bidi);
        assert!(
            obj_bidi <= obj_smart + 1e-9 * obj_smart.abs().max(1.0),
            "bidirectional {obj_bidi} > smart {obj_smart}"
        );
    }

    #[test]
    fn clones_match_the_single_profile() {
        let pool = tiny_pool(1);
        let sys = single_node_sys(24);
        let fleet = 5000.0;
        let mut single = build_reference_model(&sys, Path::new(".")).unwrap();
        attach_bev_block(
            &mut single,
            &Sample { sample_id: 0, profile_ids: vec![0], fleet_size: fleet },
            &pool,
            Strategy::Smart,
            "A",
        )
        .unwrap();
        let base = objective(&single);
        for k in [2usize, 3] {
            let mut cloned = build_reference_model(&sys, Path::new(".")).unwrap();
            let sample = Sample { sample_id: 0, profile_ids: vec![0; k], fleet_size: fleet };
            attach_bev_block(&mut cloned, &sample, &pool, Strategy::Smart, "A").unwrap();
            let obj = objective(&cloned);
            assert!(
                (obj - base).abs() <= 1e-9 * base.abs().max(1.0),
                "k={k}: {obj} vs {base}"
            );
        }
    }

    #[test]
    fn horizon_mismatch_is_reported() {
        let pool = tiny_pool(1);
        let sys = single_node_sys(48);
        let mut m = build_reference_model(&sys, Path::new(".")).unwrap();
        let sample = Sample { sample_id: 0, profile_ids: vec![0], fleet_size: 100.0 };
        let err = attach_bev_block(&mut m, &sample, &pool, Strategy::Smart, "A").unwrap_err();
        assert!(err.to_string().contains("48"), "{err}");
    }
}
