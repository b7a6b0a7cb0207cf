//! Sparse LU factorization of a simplex basis, left-looking
//! (Gilbert–Peierls) with partial pivoting by magnitude.

use crate::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;

/// LU factors of a basis matrix given by sparse columns.
///
/// Columns are processed in natural order, so pivot step `k` corresponds to
/// basis column `k`. `perm[k]` is the original row pivoted at step `k`.
pub struct SparseLu {
    n: usize,
    perm: Vec<usize>,
    /// Per pivot step: (original_row, multiplier) entries below the pivot.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Per column: (pivot_step, value) entries strictly above the diagonal.
    u_cols: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl SparseLu {
    pub fn factorize(n: usize, cols: &[Vec<(usize, f64)>]) -> Result<SparseLu> {
        assert_eq!(cols.len(), n);
        let mut pinv = vec![usize::MAX; n]; // original row -> pivot step
        let mut perm = vec![usize::MAX; n];
        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut diag = vec![0.0f64; n];

        // dense workspaces reused across columns
        let mut work = vec![0.0f64; n]; // indexed by original row
        let mut in_pattern = vec![false; n];
        let mut pattern: Vec<usize> = Vec::with_capacity(n); // rows touched in this column
        let mut visited = vec![false; n]; // symbolic DFS marks (by pivot step)
        let mut topo: Vec<usize> = Vec::with_capacity(n); // post-order of reached pivot steps
        let mut dfs_stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            // scatter column k
            pattern.clear();
            for &(r, v) in &cols[k] {
                if !in_pattern[r] {
                    in_pattern[r] = true;
                    pattern.push(r);
                }
                work[r] += v;
            }

            // symbolic: pivot steps reachable through L's pattern, post-order
            topo.clear();
            for idx in 0..pattern.len() {
                let j0 = pinv[pattern[idx]];
                if j0 == usize::MAX || visited[j0] {
                    continue;
                }
                visited[j0] = true;
                dfs_stack.push((j0, 0));
                while let Some((j, pos)) = dfs_stack.last().copied() {
                    if pos < l_cols[j].len() {
                        dfs_stack.last_mut().unwrap().1 += 1;
                        let jj = pinv[l_cols[j][pos].0];
                        if jj != usize::MAX && !visited[jj] {
                            visited[jj] = true;
                            dfs_stack.push((jj, 0));
                        }
                    } else {
                        dfs_stack.pop();
                        topo.push(j);
                    }
                }
            }

            // numeric: eliminate ancestors before descendants, i.e. in
            // reverse post-order
            for &j in topo.iter().rev() {
                visited[j] = false;
                let xj = work[perm[j]];
                if xj == 0.0 {
                    continue;
                }
                for &(r, m) in &l_cols[j] {
                    if !in_pattern[r] {
                        in_pattern[r] = true;
                        pattern.push(r);
                    }
                    work[r] -= m * xj;
                }
            }

            // collect U entries (rows already pivoted) and pick the pivot
            // among unpivoted rows by magnitude
            let mut ucol: Vec<(usize, f64)> = Vec::new();
            let mut best_row = usize::MAX;
            let mut best_val = 0.0f64;
            for &r in &pattern {
                let v = work[r];
                if v == 0.0 {
                    continue;
                }
                let j = pinv[r];
                if j != usize::MAX {
                    ucol.push((j, v));
                } else if v.abs() > best_val.abs() {
                    best_val = v;
                    best_row = r;
                }
            }
            if best_row == usize::MAX || best_val.abs() < PIVOT_EPS {
                for &r in &pattern {
                    work[r] = 0.0;
                    in_pattern[r] = false;
                }
                return Err(Error::Internal(format!(
                    "singular basis at column {k} (pivot {best_val:.3e})"
                )));
            }
            ucol.sort_unstable_by_key(|&(j, _)| j);

            let mut lcol: Vec<(usize, f64)> = Vec::new();
            for &r in &pattern {
                let v = work[r];
                work[r] = 0.0;
                in_pattern[r] = false;
                if v == 0.0 || r == best_row {
                    continue;
                }
                if pinv[r] == usize::MAX {
                    lcol.push((r, v / best_val));
                }
            }

            pinv[best_row] = k;
            perm[k] = best_row;
            diag[k] = best_val;
            l_cols.push(lcol);
            u_cols.push(ucol);
        }

        Ok(SparseLu {
            n,
            perm,
            l_cols,
            u_cols,
            diag,
        })
    }

    /// Solve `B x = v`. `v` is indexed by original row on input; the result
    /// is indexed by basis column.
    pub fn solve(&self, v: &mut Vec<f64>) {
        let n = self.n;
        let mut y = vec![0.0f64; n];
        for k in 0..n {
            let t = v[self.perm[k]];
            y[k] = t;
            if t != 0.0 {
                for &(r, m) in &self.l_cols[k] {
                    v[r] -= m * t;
                }
            }
        }
        for k in (0..n).rev() {
            let xk = y[k] / self.diag[k];
            y[k] = xk;
            if xk != 0.0 {
                for &(j, u) in &self.u_cols[k] {
                    y[j] -= u * xk;
                }
            }
        }
        *v = y;
    }

    /// Solve `B^T y = c`. `c` is indexed by basis column on input; the
    /// result is indexed by original row.
    pub fn solve_transpose(&self, c: &mut Vec<f64>) {
        let n = self.n;
        // U^T z = c (forward)
        let mut z = vec![0.0f64; n];
        for k in 0..n {
            let mut t = c[k];
            for &(j, u) in &self.u_cols[k] {
                t -= u * z[j];
            }
            z[k] = t / self.diag[k];
        }
        // L^T back-substitution into original-row coordinates
        let mut out = vec![0.0f64; n];
        for k in (0..n).rev() {
            let mut t = z[k];
            for &(r, m) in &self.l_cols[k] {
                t -= m * out[r];
            }
            out[self.perm[k]] = t;
        }
        *c = out;
    }
}
