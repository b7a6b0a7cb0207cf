//! Bounded-variable primal revised simplex with a sparse LU basis,
//! product-form updates and Bland's rule after a degeneracy threshold.

use std::time::Instant;

use super::lu::SparseLu;
use super::solution::{RawSolution, SolveStatus};
use super::standard::StandardLp;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Pivot magnitude below which a ratio-test entry is ignored.
    pub pivot_tol: f64,
    /// Reduced-cost tolerance for entering candidates.
    pub dual_tol: f64,
    /// Primal feasibility tolerance (phase-1 objective cutoff).
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Basis refactorization interval.
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_tol: 1e-9,
            dual_tol: 1e-9,
            feas_tol: 1e-7,
            max_iter: 200_000,
            refactor_every: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VStat {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable parked at zero.
    Free,
}

struct Eta {
    pivot_pos: usize,
    pivot_val: f64,
    /// nonzeros of `w = B^{-1} a_q`, excluding the pivot position
    w: Vec<(usize, f64)>,
}

struct Worker<'a> {
    s: &'a StandardLp,
    opts: SimplexOptions,
    m: usize,
    /// structural + slack columns
    n: usize,
    /// per-column cost for the current phase (length n + m artificials)
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// row of each artificial column and its coefficient sign
    art_sign: Vec<f64>,
    stat: Vec<VStat>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    lu: Option<SparseLu>,
    etas: Vec<Eta>,
    bland: bool,
    degenerate_pivots: usize,
    iterations: usize,
    phase_one: bool,
}

impl<'a> Worker<'a> {
    fn new(s: &'a StandardLp, opts: SimplexOptions) -> Worker<'a> {
        let m = s.n_rows();
        let n = s.n_cols();
        let mut lb = s.lb.clone();
        let mut ub = s.ub.clone();
        lb.extend(std::iter::repeat(0.0).take(m));
        ub.extend(std::iter::repeat(f64::INFINITY).take(m));

        let mut stat = Vec::with_capacity(n + m);
        for j in 0..n {
            stat.push(if lb[j].is_finite() {
                VStat::Lower
            } else if ub[j].is_finite() {
                VStat::Upper
            } else {
                VStat::Free
            });
        }

        // residual of the nonbasic assignment decides artificial signs
        let mut r = s.b.clone();
        for j in 0..n {
            let v = nb_value(stat[j], lb[j], ub[j]);
            if v != 0.0 {
                for (row, coef) in s.a.col(j) {
                    r[row] -= coef * v;
                }
            }
        }
        let mut art_sign = vec![1.0f64; m];
        let mut basis = Vec::with_capacity(m);
        let mut xb = Vec::with_capacity(m);
        for (i, ri) in r.iter().enumerate() {
            if *ri < 0.0 {
                art_sign[i] = -1.0;
            }
            basis.push(n + i);
            xb.push(ri.abs());
            stat.push(VStat::Basic);
        }

        let mut cost = vec![0.0; n + m];
        for c in cost.iter_mut().skip(n) {
            *c = 1.0;
        }

        Worker {
            s,
            opts,
            m,
            n,
            cost,
            lb,
            ub,
            art_sign,
            stat,
            basis,
            xb,
            lu: None,
            etas: Vec::new(),
            bland: false,
            degenerate_pivots: 0,
            iterations: 0,
            phase_one: true,
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.s.a.col(j).collect()
        } else {
            vec![(j - self.n, self.art_sign[j - self.n])]
        }
    }

    fn nb_value(&self, j: usize) -> f64 {
        nb_value(self.stat[j], self.lb[j], self.ub[j])
    }

    fn refactorize(&mut self) -> Result<()> {
        let cols: Vec<Vec<(usize, f64)>> =
            self.basis.iter().map(|&j| self.column(j)).collect();
        self.lu = Some(SparseLu::factorize(self.m, &cols)?);
        self.etas.clear();
        // recompute basic values from scratch for accuracy
        let mut r = self.s.b.clone();
        for j in 0..self.n {
            if self.stat[j] == VStat::Basic {
                continue;
            }
            let v = self.nb_value(j);
            if v != 0.0 {
                for (row, coef) in self.s.a.col(j) {
                    r[row] -= coef * v;
                }
            }
        }
        self.ftran(&mut r);
        self.xb = r;
        Ok(())
    }

    fn ftran(&self, v: &mut Vec<f64>) {
        self.lu.as_ref().expect("factorized").solve(v);
        for eta in &self.etas {
            let t = v[eta.pivot_pos] / eta.pivot_val;
            if t != 0.0 {
                for &(r, w) in &eta.w {
                    v[r] -= w * t;
                }
            }
            v[eta.pivot_pos] = t;
        }
    }

    fn btran(&self, y: &mut Vec<f64>) {
        for eta in self.etas.iter().rev() {
            let mut t = y[eta.pivot_pos];
            for &(r, w) in &eta.w {
                t -= w * y[r];
            }
            y[eta.pivot_pos] = t / eta.pivot_val;
        }
        self.lu.as_ref().expect("factorized").solve_transpose(y);
    }

    /// Reduced-cost pricing. Returns (col, direction) of the entering
    /// variable, or None at phase optimality.
    fn price(&self) -> Option<(usize, f64)> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        self.btran(&mut y);

        let limit = if self.phase_one { self.n + self.m } else { self.n };
        let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
        for j in 0..limit {
            let stat = self.stat[j];
            if stat == VStat::Basic {
                continue;
            }
            if self.lb[j] == self.ub[j] {
                continue; // fixed, cannot move
            }
            let mut d = self.cost[j];
            for (row, coef) in self.column(j) {
                d -= y[row] * coef;
            }
            let dir = match stat {
                VStat::Lower if d < -self.opts.dual_tol => 1.0,
                VStat::Upper if d > self.opts.dual_tol => -1.0,
                VStat::Free if d.abs() > self.opts.dual_tol => -d.signum(),
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            let score = d.abs();
            if best.map_or(true, |(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// One pivot (or bound flip). Returns false on unboundedness.
    fn step(&mut self, q: usize, dir: f64) -> Result<bool> {
        let mut w: Vec<f64> = vec![0.0; self.m];
        for (row, coef) in self.column(q) {
            w[row] = coef;
        }
        self.ftran(&mut w);

        // own-bound limit (bound flip)
        let span = self.ub[q] - self.lb[q];
        let mut t_best = if span.is_finite() { span } else { f64::INFINITY };
        let mut leaving: Option<(usize, f64, VStat)> = None; // (basis pos, |w|, bound hit)

        for (i, &wi) in w.iter().enumerate() {
            if wi.abs() <= self.opts.pivot_tol {
                continue;
            }
            let bj = self.basis[i];
            let delta = -dir * wi; // change of xb[i] per unit step
            let (limit, hit) = if delta < 0.0 {
                if self.lb[bj].is_finite() {
                    ((self.xb[i] - self.lb[bj]) / -delta, VStat::Lower)
                } else {
                    continue;
                }
            } else if self.ub[bj].is_finite() {
                ((self.ub[bj] - self.xb[i]) / delta, VStat::Upper)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let replace = match leaving {
                _ if limit < t_best - 1e-12 => true,
                Some((pos, wmag, _)) if (limit - t_best).abs() <= 1e-12 => {
                    if self.bland {
                        self.basis[i] < self.basis[pos]
                    } else {
                        wi.abs() > wmag
                    }
                }
                None if limit <= t_best => true,
                _ => false,
            };
            if replace {
                t_best = limit.min(t_best);
                leaving = Some((i, wi.abs(), hit));
            }
        }

        if t_best.is_infinite() {
            return Ok(false);
        }

        if t_best <= 1e-10 {
            self.degenerate_pivots += 1;
            if !self.bland && self.degenerate_pivots > 3 * self.m {
                self.bland = true;
            }
        }

        match leaving {
            None => {
                // bound flip: q moves across its whole span
                for (i, &wi) in w.iter().enumerate() {
                    if wi != 0.0 {
                        self.xb[i] -= dir * t_best * wi;
                    }
                }
                self.stat[q] = match self.stat[q] {
                    VStat::Lower => VStat::Upper,
                    VStat::Upper => VStat::Lower,
                    other => other,
                };
            }
            Some((p, _, hit)) => {
                let entering_value = self.nb_value(q) + dir * t_best;
                for (i, &wi) in w.iter().enumerate() {
                    if wi != 0.0 {
                        self.xb[i] -= dir * t_best * wi;
                    }
                }
                let leaving_col = self.basis[p];
                self.stat[leaving_col] = hit;
                // snap the leaving variable's stored bound exactly
                self.basis[p] = q;
                self.stat[q] = VStat::Basic;
                self.xb[p] = entering_value;

                let pivot_val = w[p];
                if pivot_val.abs() <= self.opts.pivot_tol {
                    return Err(Error::Solver(format!(
                        "numerically zero pivot {pivot_val:.3e}"
                    )));
                }
                let nz: Vec<(usize, f64)> = w
                    .iter()
                    .enumerate()
                    .filter(|&(i, &v)| i != p && v != 0.0)
                    .map(|(i, &v)| (i, v))
                    .collect();
                self.etas.push(Eta {
                    pivot_pos: p,
                    pivot_val,
                    w: nz,
                });
            }
        }
        Ok(true)
    }

    /// Runs one phase to optimality. Returns false on unboundedness.
    fn run_phase(&mut self) -> Result<bool> {
        loop {
            if self.iterations >= self.opts.max_iter {
                return Ok(true);
            }
            if self.lu.is_none() || self.etas.len() >= self.opts.refactor_every {
                self.refactorize()?;
            }
            let Some((q, dir)) = self.price() else {
                return Ok(true);
            };
            if !self.step(q, dir)? {
                return Ok(false);
            }
            self.iterations += 1;
        }
    }

    fn current_x(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for j in 0..self.n {
            if self.stat[j] != VStat::Basic {
                x[j] = self.nb_value(j);
            }
        }
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.xb[i];
            }
        }
        x
    }

    fn phase_one_objective(&self) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= self.n)
            .map(|(i, _)| self.xb[i])
            .sum()
    }
}

fn nb_value(stat: VStat, lb: f64, ub: f64) -> f64 {
    match stat {
        VStat::Lower => lb,
        VStat::Upper => ub,
        VStat::Free => 0.0,
        VStat::Basic => 0.0,
    }
}

/// Two-phase solve of a standard-form LP.
pub fn solve_simplex(s: &StandardLp, opts: &SimplexOptions) -> Result<RawSolution> {
    let start = Instant::now();
    for v in s.c.iter().chain(s.b.iter()).chain(s.a.values.iter()) {
        if !v.is_finite() {
            return Err(Error::Input("non-finite coefficient in LP data".into()));
        }
    }
    for (l, u) in s.lb.iter().zip(&s.ub) {
        if l > u {
            return Err(Error::Input(format!("bound pair {l} > {u}")));
        }
    }

    let mut w = Worker::new(s, opts.clone());

    // phase 1: minimize the sum of artificial values
    w.run_phase()?;
    let b_scale = s.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if w.iterations >= w.opts.max_iter {
        return Ok(finishing(w, SolveStatus::IterationLimit, start));
    }
    if w.phase_one_objective() > w.opts.feas_tol * b_scale {
        return Ok(finishing(w, SolveStatus::Infeasible, start));
    }

    // phase 2: real costs, artificials pinned at zero
    w.phase_one = false;
    for j in 0..w.n {
        w.cost[j] = s.c[j];
    }
    for j in w.n..w.n + w.m {
        w.cost[j] = 0.0;
        w.ub[j] = 0.0;
    }
    w.lu = None; // force refactorization with fresh values
    let bounded = w.run_phase()?;
    if !bounded {
        return Ok(finishing(w, SolveStatus::Unbounded, start));
    }
    let status = if w.iterations >= w.opts.max_iter {
        SolveStatus::IterationLimit
    } else {
        SolveStatus::Optimal
    };
    // final refactorization sharpens the reported solution
    w.refactorize()?;
    Ok(finishing(w, status, start))
}

fn finishing(w: Worker<'_>, status: SolveStatus, start: Instant) -> RawSolution {
    let x = w.current_x();
    let objective = w.s.c.iter().zip(&x).map(|(c, xi)| c * xi).sum();
    RawSolution {
        x,
        objective,
        status,
        iterations: w.iterations,
        solve_time_s: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::problem::{LpProblem, Sense};
    use crate::lp::standard::to_standard_form;

    fn solve(p: &LpProblem) -> RawSolution {
        let s = to_standard_form(p).unwrap();
        solve_simplex(&s, &SimplexOptions::default()).unwrap()
    }

    #[test]
    fn two_variable_vertex() {
        // min -x-y s.t. x+2y <= 4, x <= 3, y <= 2 -> x=3, y=0.5, obj -3.5
        let mut p = LpProblem::new("toy");
        let x = p.add_var("x", 0.0, 3.0, -1.0).unwrap();
        let y = p.add_var("y", 0.0, 2.0, -1.0).unwrap();
        p.add_con("c", vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - -3.5).abs() < 1e-9, "obj {}", sol.objective);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = LpProblem::new("inf");
        let x = p.add_var("x", 0.0, f64::INFINITY, 0.0).unwrap();
        p.add_con("le", vec![(x, 1.0)], Sense::Le, 1.0).unwrap();
        p.add_con("ge", vec![(x, 1.0)], Sense::Ge, 2.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = LpProblem::new("unb");
        let x = p.add_var("x", 0.0, f64::INFINITY, -1.0).unwrap();
        p.add_con("c", vec![(x, -1.0)], Sense::Le, 1.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y s.t. x + y = 2, x - y = 0, y free -> x = y = 1
        let mut p = LpProblem::new("eqfree");
        let x = p.add_var("x", 0.0, f64::INFINITY, 1.0).unwrap();
        let y = p.add_var("y", f64::NEG_INFINITY, f64::INFINITY, 1.0).unwrap();
        p.add_con("sum", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 2.0).unwrap();
        p.add_con("diff", vec![(x, 1.0), (y, -1.0)], Sense::Eq, 0.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounded_variables_flip() {
        // max x1 + 2 x2 with x in [0,1]^2, x1 + x2 <= 1.5
        let mut p = LpProblem::new("flip");
        let x1 = p.add_var("x1", 0.0, 1.0, -1.0).unwrap();
        let x2 = p.add_var("x2", 0.0, 1.0, -2.0).unwrap();
        p.add_con("c", vec![(x1, 1.0), (x2, 1.0)], Sense::Le, 1.5).unwrap();
        let sol = solve(&p);
        assert!((sol.objective - -2.5).abs() < 1e-9);
        assert!((sol.x[0] - 0.5).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn determinism_of_iterate_sequence() {
        let mut p = LpProblem::new("det");
        let vars: Vec<_> = (0..6)
            .map(|j| p.add_var(format!("x{j}"), 0.0, 10.0, -((j + 1) as f64)).unwrap())
            .collect();
        for i in 0..4 {
            let terms: Vec<_> = vars.iter().map(|v| (*v, ((i + v.0) % 3) as f64 + 0.5)).collect();
            p.add_con(format!("c{i}"), terms, Sense::Le, 10.0 + i as f64).unwrap();
        }
        let a = solve(&p);
        let b = solve(&p);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn negative_rhs_equalities() {
        // min x s.t. -x <= -3  (x >= 3)
        let mut p = LpProblem::new("neg");
        let x = p.add_var("x", 0.0, f64::INFINITY, 1.0).unwrap();
        p.add_con("c", vec![(x, -1.0)], Sense::Le, -3.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }
}
