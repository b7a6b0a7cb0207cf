//! Helpers for the acceptance suite: random LP generators and an
//! exhaustive vertex-enumeration optimum that shares no code with the
//! simplex implementation.
#![allow(dead_code)] // shared by several test targets with different needs

use bevpsm::lp::{LpProblem, Sense};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Dense copy of a small inequality-constrained LP, kept alongside the
/// `LpProblem` so the oracle needs no access to solver internals.
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub sense: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

/// Round to a 0.1 grid so vertex systems stay well conditioned.
fn grid(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// Random bounded, feasible LP with at most 8 variables and 8 inequality
/// rows. Feasible at the origin (Le rows get nonnegative rhs, Ge rows
/// nonpositive), bounded by finite box bounds.
pub fn random_boxed_lp(rng: &mut ChaCha12Rng, tag: usize) -> (LpProblem, DenseLp) {
    let n = rng.gen_range(2..=8);
    let m = rng.gen_range(1..=8);
    let mut dense = DenseLp {
        c: (0..n).map(|_| grid(rng.gen_range(-5.0..5.0))).collect(),
        a: Vec::new(),
        sense: Vec::new(),
        rhs: Vec::new(),
        lb: vec![0.0; n],
        ub: (0..n).map(|_| grid(rng.gen_range(0.5..8.0))).collect(),
    };
    for _ in 0..m {
        let mut row = vec![0.0; n];
        for v in row.iter_mut() {
            if rng.gen_bool(0.7) {
                *v = grid(rng.gen_range(-4.0..4.0));
            }
        }
        let (sense, rhs) = if rng.gen_bool(0.5) {
            (Sense::Le, grid(rng.gen_range(0.1..8.0)))
        } else {
            (Sense::Ge, -grid(rng.gen_range(0.1..8.0)))
        };
        dense.a.push(row);
        dense.sense.push(sense);
        dense.rhs.push(rhs);
    }
    let mut p = LpProblem::new(format!("rand{tag}"));
    let ids: Vec<_> = (0..n)
        .map(|j| {
            p.add_var(format!("x{j}"), dense.lb[j], dense.ub[j], dense.c[j])
                .unwrap()
        })
        .collect();
    for (i, row) in dense.a.iter().enumerate() {
        let terms: Vec<_> = ids
            .iter()
            .zip(row)
            .filter(|(_, c)| **c != 0.0)
            .map(|(id, c)| (*id, *c))
            .collect();
        p.add_con(format!("r{i}"), terms, dense.sense[i], dense.rhs[i])
            .unwrap();
    }
    (p, dense)
}

/// Random LP with every bound flavor and row sense, for format round-trips.
pub fn random_general_lp(rng: &mut ChaCha12Rng, tag: usize) -> LpProblem {
    let n = rng.gen_range(1..=10);
    let m = rng.gen_range(1..=10);
    let mut p = LpProblem::new(format!("gen{tag}"));
    let mut ids = Vec::new();
    for j in 0..n {
        let (lb, ub) = match rng.gen_range(0..5) {
            0 => (0.0, f64::INFINITY),
            1 => (grid(rng.gen_range(-5.0..0.0)), grid(rng.gen_range(0.0..5.0))),
            2 => (f64::NEG_INFINITY, f64::INFINITY),
            3 => (f64::NEG_INFINITY, grid(rng.gen_range(-2.0..2.0))),
            _ => {
                let v = grid(rng.gen_range(-3.0..3.0));
                (v, v)
            }
        };
        ids.push(
            p.add_var(format!("x{j}"), lb, ub, grid(rng.gen_range(-5.0..5.0)))
                .unwrap(),
        );
    }
    for i in 0..m {
        let mut terms = Vec::new();
        for id in &ids {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let coef = grid(rng.gen_range(-4.0..4.0));
            if coef != 0.0 {
                terms.push((*id, coef));
            }
        }
        let sense = match rng.gen_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        p.add_con(format!("r{i}"), terms, sense, grid(rng.gen_range(-5.0..5.0)))
            .unwrap();
    }
    p
}

/// Gaussian elimination with partial pivoting; `None` if near singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let mut s = b[col];
        for c in col + 1..k {
            s -= a[col][c] * x[c];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

fn feasible(lp: &DenseLp, x: &[f64], tol: f64) -> bool {
    for (j, v) in x.iter().enumerate() {
        if *v < lp.lb[j] - tol || *v > lp.ub[j] + tol {
            return false;
        }
    }
    for (i, row) in lp.a.iter().enumerate() {
        let ax: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum();
        let ok = match lp.sense[i] {
            Sense::Le => ax <= lp.rhs[i] + tol,
            Sense::Ge => ax >= lp.rhs[i] - tol,
            Sense::Eq => (ax - lp.rhs[i]).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Minimum objective over all vertices of the feasible polytope, found by
/// brute force: fix each variable at a bound or leave it free, make as many
/// rows active as there are free variables, solve the square system, keep
/// the best feasible point. Requires finite box bounds (boundedness) and
/// only inequality rows.
pub fn enumerate_optimum(lp: &DenseLp) -> Option<f64> {
    let n = lp.c.len();
    let m = lp.rhs.len();
    let mut best: Option<f64> = None;
    // var state: 0 = at lower bound, 1 = at upper bound, 2 = free
    let mut state = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&j| state[j] == 2).collect();
        let k = free.len();
        if k <= m || k == 0 {
            let fixed: Vec<f64> = (0..n)
                .map(|j| if state[j] == 1 { lp.ub[j] } else { lp.lb[j] })
                .collect();
            for_each_combination(m, k, &mut |rows| {
                let a: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|&r| free.iter().map(|&j| lp.a[r][j]).collect())
                    .collect();
                let b: Vec<f64> = rows
                    .iter()
                    .map(|&r| {
                        lp.rhs[r]
                            - (0..n)
                                .filter(|j| state[*j] != 2)
                                .map(|j| lp.a[r][j] * fixed[j])
                                .sum::<f64>()
                    })
                    .collect();
                let Some(xf) = solve_dense(a, b) else { return };
                let mut x = fixed.clone();
                for (idx, &j) in free.iter().enumerate() {
                    x[j] = xf[idx];
                }
                if feasible(lp, &x, 1e-9) {
                    let obj: f64 = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
                    if best.map_or(true, |b| obj < b) {
                        best = Some(obj);
                    }
                }
            });
        }
        // next ternary assignment
        let mut j = 0;
        loop {
            if j == n {
                return best;
            }
            state[j] += 1;
            if state[j] <= 2 {
                break;
            }
            state[j] = 0;
            j += 1;
        }
    }
}

/// Calls `f` with every size-`k` subset of `0..m` (ascending order).
fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if left == 0 {
            f(cur);
            return;
        }
        for i in start..=m.saturating_sub(left) {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, f);
            cur.pop();
        }
    }
    if k > m {
        return;
    }
    rec(0, m, k, &mut Vec::new(), f);
}
