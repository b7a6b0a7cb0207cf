use super::problem::{LpProblem, Sense};
use crate::{Error, Result};

/// Column-major sparse matrix.
#[derive(Debug, Clone, Default)]
pub struct CscMatrix {
    pub n_rows: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn n_cols(&self) -> usize {
        self.col_ptr.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }
}

/// `min c'x  s.t.  Ax = b,  l <= x <= u`, with slack bookkeeping mapping
/// each inequality row to its slack column.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub a: CscMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    /// Number of original (structural) variables; slacks follow.
    pub n_structural: usize,
    /// Slack column index per row, `None` for equality rows.
    pub slack_of_row: Vec<Option<usize>>,
}

impl StandardLp {
    pub fn n_rows(&self) -> usize {
        self.b.len()
    }

    pub fn n_cols(&self) -> usize {
        self.c.len()
    }
}

/// Inequality rows gain a slack (`Ax + s = b`; `s >= 0` for `<=` rows,
/// `s <= 0` for `>=` rows). Bounds and coefficients carry over unchanged.
pub fn to_standard_form(p: &LpProblem) -> Result<StandardLp> {
    let n = p.n_vars();
    let m = p.n_cons();

    for v in &p.vars {
        if v.lb.is_infinite() && v.lb > 0.0 || v.ub.is_infinite() && v.ub < 0.0 {
            return Err(Error::Input(format!("variable {}: infinite bound of wrong sign", v.name)));
        }
    }

    // transpose row-wise constraints into column-major order
    let n_slacks = p.cons.iter().filter(|c| c.sense != Sense::Eq).count();
    let mut col_counts = vec![0usize; n + n_slacks];
    for con in &p.cons {
        for &(v, _) in &con.terms {
            col_counts[v] += 1;
        }
    }
    let mut slack_of_row = vec![None; m];
    let mut next_slack = n;
    for (i, con) in p.cons.iter().enumerate() {
        if con.sense != Sense::Eq {
            slack_of_row[i] = Some(next_slack);
            col_counts[next_slack] = 1;
            next_slack += 1;
        }
    }

    let mut col_ptr = vec![0usize; n + n_slacks + 1];
    for j in 0..n + n_slacks {
        col_ptr[j + 1] = col_ptr[j] + col_counts[j];
    }
    let nnz = col_ptr[n + n_slacks];
    let mut row_idx = vec![0usize; nnz];
    let mut values = vec![0.0f64; nnz];
    let mut fill = col_ptr.clone();
    for (i, con) in p.cons.iter().enumerate() {
        for &(v, coef) in &con.terms {
            row_idx[fill[v]] = i;
            values[fill[v]] = coef;
            fill[v] += 1;
        }
        if let Some(s) = slack_of_row[i] {
            row_idx[fill[s]] = i;
            values[fill[s]] = 1.0;
            fill[s] += 1;
        }
    }

    let mut c = vec![0.0; n + n_slacks];
    let mut lb = vec![0.0; n + n_slacks];
    let mut ub = vec![0.0; n + n_slacks];
    for (j, v) in p.vars.iter().enumerate() {
        c[j] = v.obj;
        lb[j] = v.lb;
        ub[j] = v.ub;
    }
    for (i, con) in p.cons.iter().enumerate() {
        if let Some(s) = slack_of_row[i] {
            match con.sense {
                Sense::Le => {
                    lb[s] = 0.0;
                    ub[s] = f64::INFINITY;
                }
                Sense::Ge => {
                    lb[s] = f64::NEG_INFINITY;
                    ub[s] = 0.0;
                }
                Sense::Eq => unreachable!(),
            }
        }
    }

    Ok(StandardLp {
        a: CscMatrix {
            n_rows: m,
            col_ptr,
            row_idx,
            values,
        },
        b: p.cons.iter().map(|c| c.rhs).collect(),
        c,
        lb,
        ub,
        n_structural: n,
        slack_of_row,
    })
}
