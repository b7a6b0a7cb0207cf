//! Fixed-format MPS writer and reader for the supported subset:
//! NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA. RANGES is not used.
//!
//! Rows and columns appear in dimension-registry (insertion) order and
//! floats print in shortest round-trip form, so two writes of the same
//! problem are byte-identical and write → read is the identity on the
//! coefficient data.

use std::fs;
use std::path::Path;

use super::problem::{LpProblem, Sense, VarId};
use crate::{Error, Result};

const OBJ_ROW: &str = "COST";

pub fn write_mps(p: &LpProblem, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("NAME          {}\n", p.name));
    out.push_str("ROWS\n");
    out.push_str(&format!(" N  {OBJ_ROW}\n"));
    for con in &p.cons {
        out.push_str(&format!(" {}  {}\n", con.sense.as_str(), con.name));
    }

    out.push_str("COLUMNS\n");
    for (j, var) in p.vars.iter().enumerate() {
        if var.obj != 0.0 {
            out.push_str(&format!("    {:<10}  {:<10}  {}\n", var.name, OBJ_ROW, var.obj));
        }
        for con in &p.cons {
            if let Ok(pos) = con.terms.binary_search_by_key(&j, |(v, _)| *v) {
                out.push_str(&format!(
                    "    {:<10}  {:<10}  {}\n",
                    var.name, con.name, con.terms[pos].1
                ));
            }
        }
    }

    out.push_str("RHS\n");
    for con in &p.cons {
        if con.rhs != 0.0 {
            out.push_str(&format!("    RHS         {:<10}  {}\n", con.name, con.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for var in &p.vars {
        let (lb, ub) = (var.lb, var.ub);
        if lb == ub {
            out.push_str(&format!(" FX BND         {:<10}  {}\n", var.name, lb));
            continue;
        }
        if lb.is_infinite() && ub.is_infinite() {
            out.push_str(&format!(" FR BND         {:<10}\n", var.name));
            continue;
        }
        if lb.is_infinite() {
            out.push_str(&format!(" MI BND         {:<10}\n", var.name));
        } else if lb != 0.0 {
            out.push_str(&format!(" LO BND         {:<10}  {}\n", var.name, lb));
        }
        if ub.is_finite() {
            out.push_str(&format!(" UP BND         {:<10}  {}\n", var.name, ub));
        }
    }
    out.push_str("ENDATA\n");
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        path: path.into(),
        line,
        msg: format!("bad number '{s}'"),
    })
}

pub fn read_mps(path: &Path) -> Result<LpProblem> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Done,
    }

    struct PendingVar {
        name: String,
        obj: f64,
        lb: f64,
        ub: f64,
        lb_set: bool,
        terms: Vec<(String, f64)>,
    }

    let mut name = String::new();
    let mut section = Section::None;
    let mut row_order: Vec<(String, Sense)> = Vec::new();
    let mut vars: Vec<PendingVar> = Vec::new();
    let mut rhs: Vec<(String, f64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let err = |msg: String| Error::Parse { path: path.into(), line, msg };
        if !raw.starts_with(' ') {
            let mut parts = raw.split_whitespace();
            match parts.next() {
                Some("NAME") => name = parts.next().unwrap_or("").to_string(),
                Some("ROWS") => section = Section::Rows,
                Some("COLUMNS") => section = Section::Columns,
                Some("RHS") => section = Section::Rhs,
                Some("RANGES") => {
                    return Err(err("RANGES section is not supported".into()));
                }
                Some("BOUNDS") => section = Section::Bounds,
                Some("ENDATA") => {
                    section = Section::Done;
                    break;
                }
                other => return Err(err(format!("unknown section header {other:?}"))),
            }
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match section {
            Section::Rows => {
                let [sense, row] = fields[..] else {
                    return Err(err("expected 'SENSE row_name'".into()));
                };
                let sense = match sense {
                    "N" => {
                        if row != OBJ_ROW {
                            return Err(err(format!("objective row must be {OBJ_ROW}")));
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => return Err(err(format!("unknown row sense '{other}'"))),
                };
                row_order.push((row.to_string(), sense));
            }
            Section::Columns => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(err("expected 'column row value [row value]'".into()));
                }
                let col = fields[0];
                if vars.last().map(|v| v.name.as_str()) != Some(col) {
                    if vars.iter().any(|v| v.name == col) {
                        return Err(err(format!("column '{col}' appears non-contiguously")));
                    }
                    vars.push(PendingVar {
                        name: col.to_string(),
                        obj: 0.0,
                        lb: 0.0,
                        ub: f64::INFINITY,
                        lb_set: false,
                        terms: Vec::new(),
                    });
                }
                let var = vars.last_mut().unwrap();
                for pair in fields[1..].chunks(2) {
                    let value = parse_f64(path, line, pair[1])?;
                    if pair[0] == OBJ_ROW {
                        var.obj = value;
                    } else {
                        var.terms.push((pair[0].to_string(), value));
                    }
                }
            }
            Section::Rhs => {
                let [_rhs_name, row, value] = fields[..] else {
                    return Err(err("expected 'RHS row value'".into()));
                };
                rhs.push((row.to_string(), parse_f64(path, line, value)?));
            }
            Section::Bounds => {
                let (kind, rest) = fields
                    .split_first()
                    .ok_or_else(|| err("empty bound line".into()))?;
                let (col, value) = match *kind {
                    "FR" | "MI" | "PL" => {
                        let [_bnd, col] = rest else {
                            return Err(err("expected 'KIND BND column'".into()));
                        };
                        (*col, f64::NAN)
                    }
                    _ => {
                        let [_bnd, col, value] = rest else {
                            return Err(err("expected 'KIND BND column value'".into()));
                        };
                        (*col, parse_f64(path, line, value)?)
                    }
                };
                let var = vars
                    .iter_mut()
                    .find(|v| v.name == col)
                    .ok_or_else(|| Error::Parse {
                        path: path.into(),
                        line,
                        msg: format!("bound references unknown column '{col}'"),
                    })?;
                match *kind {
                    "LO" => {
                        var.lb = value;
                        var.lb_set = true;
                    }
                    "UP" => var.ub = value,
                    "FX" => {
                        var.lb = value;
                        var.ub = value;
                        var.lb_set = true;
                    }
                    "FR" => {
                        var.lb = f64::NEG_INFINITY;
                        var.ub = f64::INFINITY;
                        var.lb_set = true;
                    }
                    "MI" => {
                        var.lb = f64::NEG_INFINITY;
                        var.lb_set = true;
                    }
                    "PL" => var.ub = f64::INFINITY,
                    other => {
                        return Err(Error::Parse {
                            path: path.into(),
                            line,
                            msg: format!("unsupported bound kind '{other}'"),
                        })
                    }
                }
            }
            Section::None | Section::Done => {
                return Err(err("data line outside any section".into()));
            }
        }
    }
    if section != Section::Done {
        return Err(Error::Parse {
            path: path.into(),
            line: text.lines().count(),
            msg: "missing ENDATA".into(),
        });
    }

    let mut p = LpProblem::new(name);
    let ids: Vec<VarId> = vars
        .iter()
        .map(|v| p.add_var(v.name.clone(), v.lb, v.ub, v.obj))
        .collect::<Result<_>>()?;
    for (row, sense) in &row_order {
        let mut terms = Vec::new();
        for (v, pending) in vars.iter().enumerate() {
            for (r, value) in &pending.terms {
                if r == row {
                    terms.push((ids[v], *value));
                }
            }
        }
        let rhs_value = rhs
            .iter()
            .find(|(r, _)| r == row)
            .map(|(_, v)| *v)
            .unwrap_or(0.0);
        p.add_con(row.clone(), terms, *sense, rhs_value)?;
    }
    Ok(p)
}
