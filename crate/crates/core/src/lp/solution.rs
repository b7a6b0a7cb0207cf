use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::{LpProblem, Sense};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration_limit",
        }
    }
}

/// Raw solver output in standard-form column order (structural variables
/// first, then slacks).
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub solve_time_s: f64,
}

/// Primal feasibility check of an assignment against the original problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_bound_violation: f64,
    pub max_row_residual: f64,
    /// worst residual scaled by max(1, |rhs|) of its row
    pub max_relative_residual: f64,
    pub objective_recomputed: f64,
    pub pass: bool,
}

/// Report bound violations and row residuals of `sol` against `p`,
/// recomputing the objective independently from `p`'s coefficients.
/// Passes iff the relative residual and bound violation are within `tol`.
pub fn validate_solution(p: &LpProblem, sol: &RawSolution, tol: f64) -> Result<FeasibilityReport> {
    if sol.x.len() < p.n_vars() {
        return Err(Error::Input(format!(
            "solution has {} values, problem has {} variables",
            sol.x.len(),
            p.n_vars()
        )));
    }
    let x = &sol.x[..p.n_vars()];

    let mut max_bound = 0.0f64;
    for (v, xi) in p.vars.iter().zip(x) {
        if v.lb.is_finite() {
            max_bound = max_bound.max(v.lb - xi);
        }
        if v.ub.is_finite() {
            max_bound = max_bound.max(xi - v.ub);
        }
    }

    let mut max_residual = 0.0f64;
    let mut max_relative = 0.0f64;
    for con in &p.cons {
        let lhs: f64 = con.terms.iter().map(|&(v, c)| c * x[v]).sum();
        let viol = match con.sense {
            Sense::Le => (lhs - con.rhs).max(0.0),
            Sense::Ge => (con.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - con.rhs).abs(),
        };
        max_residual = max_residual.max(viol);
        max_relative = max_relative.max(viol / con.rhs.abs().max(1.0));
    }

    let objective_recomputed = p.objective_value(x);
    Ok(FeasibilityReport {
        max_bound_violation: max_bound,
        max_row_residual: max_residual,
        max_relative_residual: max_relative,
        objective_recomputed,
        pass: max_relative <= tol && max_bound <= tol,
    })
}

/// Write a solution as one `variable_name value` line per structural
/// variable; `#` starts a comment.
pub fn write_solution(p: &LpProblem, sol: &RawSolution, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# status {}\n", sol.status.as_str()));
    out.push_str(&format!("# objective {}\n", sol.objective));
    for (name, xi) in p.var_names().zip(&sol.x) {
        out.push_str(&format!("{name} {xi}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Parse a `variable_name value` per-line solution file against `p`'s
/// dimension registry. Unknown names are rejected; missing names are
/// reported.
pub fn read_external_solution(path: &Path, p: &LpProblem) -> Result<RawSolution> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut x = vec![f64::NAN; p.n_vars()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                path: path.into(),
                line: lineno + 1,
                msg: "expected 'variable_name value'".into(),
            });
        };
        let id = p.var_id(name).ok_or_else(|| Error::Parse {
            path: path.into(),
            line: lineno + 1,
            msg: format!("unknown variable '{name}'"),
        })?;
        x[id.0] = value.parse().map_err(|_| Error::Parse {
            path: path.into(),
            line: lineno + 1,
            msg: format!("bad value '{value}'"),
        })?;
    }
    if let Some(missing) = x.iter().position(|v| v.is_nan()) {
        return Err(Error::Input(format!(
            "solution file is missing variable '{}'",
            p.var_name(super::problem::VarId(missing))
        )));
    }
    let objective = p.objective_value(&x);
    Ok(RawSolution {
        x,
        objective,
        status: SolveStatus::Optimal,
        iterations: 0,
        solve_time_s: 0.0,
    })
}
