//! Result emission: a flat CSV with one row per scenario and self-contained
//! SVG scatter plots of the figure types the experiments need (cost delta,
//! capacity delta, runtime, delta against vehicles-per-profile).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::harness::sweep::{ResultTable, SweepRow};
use crate::{Error, Result};

/// Fixed leading columns; capacity columns (`cap:` / `dcap:` prefixes) are
/// the union of the table's technology keys in sorted order.
const FIXED_COLUMNS: [&str; 11] = [
    "setting",
    "strategy",
    "fleet_size",
    "n_profiles",
    "sample_id",
    "bevs_per_profile",
    "objective_eur",
    "cost_delta_eur",
    "cost_delta_eur_per_bev_yr",
    "runtime_s",
    "status",
];

fn tech_keys(rows: &[SweepRow]) -> Vec<String> {
    let mut keys: Vec<String> = rows
        .iter()
        .flat_map(|r| r.capacities.keys().cloned())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

pub fn write_results_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let techs = tech_keys(&table.rows);
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Input(e.to_string()))?;
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(techs.iter().map(|t| format!("cap:{t}")));
    header.extend(techs.iter().map(|t| format!("dcap:{t}")));
    header.push("profile_ids".into());
    wtr.write_record(&header).map_err(|e| Error::Input(e.to_string()))?;
    for row in &table.rows {
        let mut rec: Vec<String> = vec![
            row.setting.clone(),
            row.strategy.clone(),
            row.fleet_size.to_string(),
            row.n_profiles.to_string(),
            row.sample_id.to_string(),
            row.bevs_per_profile.to_string(),
            row.objective_eur.to_string(),
            row.cost_delta_eur.to_string(),
            row.cost_delta_eur_per_bev_yr.to_string(),
            row.runtime_s.to_string(),
            row.status.clone(),
        ];
        for t in &techs {
            rec.push(row.capacities.get(t).copied().unwrap_or(0.0).to_string());
        }
        for t in &techs {
            rec.push(row.capacity_deltas.get(t).copied().unwrap_or(0.0).to_string());
        }
        rec.push(
            row.profile_ids
                .iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        );
        wtr.write_record(&rec).map_err(|e| Error::Input(e.to_string()))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Input(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line: i + 2,
            msg: e.to_string(),
        })?;
        let field = |name: &str| -> Result<&str> {
            header
                .iter()
                .position(|h| h == name)
                .and_then(|j| rec.get(j))
                .ok_or_else(|| Error::Parse {
                    path: path.into(),
                    line: i + 2,
                    msg: format!("missing column {name}"),
                })
        };
        let parse_f64 = |name: &str| -> Result<f64> {
            field(name)?.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: i + 2,
                msg: format!("bad number in {name}"),
            })
        };
        let mut capacities = BTreeMap::new();
        let mut capacity_deltas = BTreeMap::new();
        for (j, h) in header.iter().enumerate() {
            let value = rec.get(j).unwrap_or("");
            if let Some(t) = h.strip_prefix("cap:") {
                capacities.insert(t.to_string(), value.parse().unwrap_or(f64::NAN));
            } else if let Some(t) = h.strip_prefix("dcap:") {
                capacity_deltas.insert(t.to_string(), value.parse().unwrap_or(f64::NAN));
            }
        }
        let profile_ids = field("profile_ids")?
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: i + 2,
                    msg: format!("bad profile id '{s}'"),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        rows.push(SweepRow {
            setting: field("setting")?.to_string(),
            strategy: field("strategy")?.to_string(),
            fleet_size: parse_f64("fleet_size")?,
            n_profiles: parse_f64("n_profiles")? as usize,
            sample_id: parse_f64("sample_id")? as u32,
            bevs_per_profile: parse_f64("bevs_per_profile")?,
            objective_eur: parse_f64("objective_eur")?,
            cost_delta_eur: parse_f64("cost_delta_eur")?,
            cost_delta_eur_per_bev_yr: parse_f64("cost_delta_eur_per_bev_yr")?,
            runtime_s: parse_f64("runtime_s")?,
            status: field("status")?.to_string(),
            capacities,
            capacity_deltas,
            profile_ids,
        });
    }
    Ok(rows)
}

/// One scatter series: a label and its (x, y) points.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const W: f64 = 640.0;
const H: f64 = 440.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

/// Hand-rolled static scatter plot; no external assets, deterministic
/// output for identical input.
pub fn write_scatter_svg(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[Series],
) -> Result<()> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() {
        return Err(Error::Input(format!("plot '{title}' has no points")));
    }
    let (mut x0, mut x1) = all.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) = all.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if x0 == x1 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if y0 == y1 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad_x = 0.05 * (x1 - x0);
    let pad_y = 0.08 * (y1 - y0);
    let (x0, x1, y0, y1) = (x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y);
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        W / 2.0,
        xml_escape(title)
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        H - MB,
        W - MR
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB
    );
    // ticks: 5 per axis
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/><text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>",
            sx(fx),
            H - MB,
            H - MB + 5.0,
            H - MB + 20.0,
            tick_label(fx)
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/><text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>",
            ML - 5.0,
            sy(fy),
            ML,
            ML - 8.0,
            sy(fy) + 4.0,
            tick_label(fy)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        (ML + W - MR) / 2.0,
        H - 12.0,
        xml_escape(xlabel)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        xml_escape(ylabel)
    );
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>",
                sx(x),
                sy(y)
            );
        }
        let ly = MT + 16.0 * si as f64;
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/><text x=\"{}\" y=\"{}\">{}</text>",
            W - MR - 140.0,
            ly,
            W - MR - 130.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn strategy_series(rows: &[SweepRow], y: impl Fn(&SweepRow) -> f64, x: impl Fn(&SweepRow) -> f64) -> Vec<Series> {
    let mut strategies: Vec<String> = rows.iter().map(|r| r.strategy.clone()).collect();
    strategies.sort_unstable();
    strategies.dedup();
    strategies
        .into_iter()
        .map(|strat| Series {
            points: rows
                .iter()
                .filter(|r| r.strategy == strat)
                .map(|r| (x(r), y(r)))
                .collect(),
            label: strat,
        })
        .collect()
}

/// Write `results.csv` plus the four figure types. Returns the file names
/// written and a warning per omitted plot (empty data is not an error).
pub fn emit_outputs(table: &ResultTable, out_dir: &Path) -> Result<(Vec<String>, Vec<String>)> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();

    write_results_csv(table, &out_dir.join("results.csv"))?;
    files.push("results.csv".to_string());

    let figures: [(&str, &str, &str, Vec<Series>); 4] = [
        (
            "cost_delta.svg",
            "Cost difference to the reference",
            "cost delta (€/BEV/yr)",
            strategy_series(&table.rows, |r| r.cost_delta_eur_per_bev_yr, |r| r.n_profiles as f64),
        ),
        (
            "runtime.svg",
            "End-to-end runtime",
            "runtime (s)",
            strategy_series(&table.rows, |r| r.runtime_s, |r| r.n_profiles as f64),
        ),
        (
            "capacity_delta.svg",
            "Capacity difference to the reference",
            "capacity delta (MW / MWh)",
            capacity_series(&table.rows),
        ),
        (
            "delta_vs_bevs_per_profile.svg",
            "Cost difference vs vehicles per profile",
            "cost delta (€/BEV/yr)",
            strategy_series(&table.rows, |r| r.cost_delta_eur_per_bev_yr, |r| r.bevs_per_profile),
        ),
    ];
    for (name, title, ylabel, series) in figures {
        if series.iter().all(|s| s.points.is_empty()) {
            warnings.push(format!("plot {name} omitted: no data"));
            continue;
        }
        let xlabel = if name == "delta_vs_bevs_per_profile.svg" {
            "BEVs per profile"
        } else {
            "number of BEV profiles"
        };
        write_scatter_svg(&out_dir.join(name), title, xlabel, ylabel, &series)?;
        files.push(name.to_string());
    }
    Ok((files, warnings))
}

fn capacity_series(rows: &[SweepRow]) -> Vec<Series> {
    let mut techs: Vec<String> = rows
        .iter()
        .flat_map(|r| r.capacity_deltas.keys().cloned())
        .collect();
    techs.sort_unstable();
    techs.dedup();
    techs
        .into_iter()
        .map(|tech| Series {
            points: rows
                .iter()
                .filter_map(|r| {
                    r.capacity_deltas
                        .get(&tech)
                        .map(|d| (r.n_profiles as f64, *d))
                })
                .collect(),
            label: tech,
        })
        .collect()
}
