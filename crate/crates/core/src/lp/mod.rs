//! Linear program representation, a bundled bounded-variable revised
//! simplex with sparse LU basis factorization, MPS export/import and
//! solution validation.
//!
//! The bundled solver targets desk-scale instances (a few thousand rows);
//! full-year instances go through MPS export to an external solver and come
//! back as plain `name value` solution files.

mod lu;
mod mps;
mod problem;
mod simplex;
mod solution;
mod standard;

pub use mps::{read_mps, write_mps};
pub use problem::{ConstraintId, LpProblem, Sense, VarId};
pub use simplex::{solve_simplex, SimplexOptions};
pub use solution::{
    read_external_solution, validate_solution, write_solution, FeasibilityReport, RawSolution,
    SolveStatus,
};
pub use standard::{to_standard_form, StandardLp};

use crate::Result;

/// Convert to standard form, solve, and drop the slack values so the
/// returned `x` lines up with the problem's own variables.
pub fn solve_problem(p: &LpProblem, opts: &SimplexOptions) -> Result<RawSolution> {
    let std_form = to_standard_form(p)?;
    let mut sol = solve_simplex(&std_form, opts)?;
    sol.x.truncate(std_form.n_structural);
    Ok(sol)
}
