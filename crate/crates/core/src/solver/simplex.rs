//! Bounded-variable revised primal simplex on a dense basis inverse.
//!
//! Every row gets a slack so the constraint system becomes `A z + s = b`.
//! Rows whose slack cannot absorb the initial residual get an artificial
//! variable, and phase 1 drives those to zero. Pricing is Dantzig's rule;
//! after a run of degenerate pivots it switches to Bland's rule until the
//! objective moves again.

use serde::{Deserialize, Serialize};

/// Relation of a linear row to its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `sum terms (<=|=|>=) rhs`, with `terms` as `(variable, coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective . z` subject to `rows` and `lower <= z <= upper`.
/// Bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LinearRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-8;
const DEGENERATE_STEP: f64 = 1e-12;
const DEGENERACY_STREAK: usize = 50;
const REINVERT_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    Lower,
    Upper,
    /// Free variable parked at zero.
    Zero,
    Basic,
}

struct Tableau {
    m: usize,
    columns: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    value: Vec<f64>,
    state: Vec<NonBasic>,
    basis: Vec<usize>,
    /// Row-major `m x m` basis inverse.
    binv: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Solves `p` to optimality, or reports infeasibility/unboundedness.
pub fn lp_solve(p: &LpProblem) -> LpSolution {
    let n = p.objective.len();
    debug_assert_eq!(p.lower.len(), n);
    debug_assert_eq!(p.upper.len(), n);
    if p.lower.iter().zip(&p.upper).any(|(l, u)| l > u) {
        return infeasible(n, 0);
    }

    let m = p.rows.len();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in p.rows.iter().enumerate() {
        for &(j, a) in &row.terms {
            if a != 0.0 {
                columns[j].push((i, a));
            }
        }
    }
    let mut lower = p.lower.clone();
    let mut upper = p.upper.clone();
    let mut value: Vec<f64> = (0..n).map(|j| initial_value(lower[j], upper[j])).collect();
    let mut state: Vec<NonBasic> = (0..n).map(|j| initial_state(lower[j], upper[j])).collect();

    let mut residual: Vec<f64> = p.rows.iter().map(|r| r.rhs).collect();
    for (j, col) in columns.iter().enumerate() {
        for &(i, a) in col {
            residual[i] -= a * value[j];
        }
    }

    let mut basis = Vec::with_capacity(m);
    let mut binv = vec![0.0; m * m];
    let mut artificials = Vec::new();
    // slacks first, then artificials, so indices stay stable
    for (i, row) in p.rows.iter().enumerate() {
        let (lo, hi) = match row.relation {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Eq => (0.0, 0.0),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
        };
        columns.push(vec![(i, 1.0)]);
        lower.push(lo);
        upper.push(hi);
        let r = residual[i];
        if r >= lo - PIVOT_TOL && r <= hi + PIVOT_TOL {
            value.push(r);
            state.push(NonBasic::Basic);
            basis.push(n + i);
            binv[i * m + i] = 1.0;
        } else {
            let parked = r.clamp(lo, hi);
            value.push(parked);
            state.push(if parked == lo {
                NonBasic::Lower
            } else {
                NonBasic::Upper
            });
            basis.push(usize::MAX);
            artificials.push((i, r - parked));
        }
    }
    for &(i, gap) in &artificials {
        let sign = gap.signum();
        let j = columns.len();
        columns.push(vec![(i, sign)]);
        lower.push(0.0);
        upper.push(f64::INFINITY);
        value.push(gap.abs());
        state.push(NonBasic::Basic);
        basis[i] = j;
        binv[i * m + i] = sign;
    }

    let total = columns.len();
    let mut t = Tableau {
        m,
        columns,
        lower,
        upper,
        cost: vec![0.0; total],
        rhs: p.rows.iter().map(|r| r.rhs).collect(),
        value,
        state,
        basis,
        binv,
        iterations: 0,
        max_iterations: 50_000 + 50 * (total + m),
    };

    if !artificials.is_empty() {
        for j in n + m..total {
            t.cost[j] = 1.0;
        }
        match t.run() {
            Outcome::IterationLimit => return t.finish(n, &p.objective, LpStatus::IterationLimit),
            Outcome::Unbounded | Outcome::Optimal => {}
        }
        let infeasibility: f64 = (n + m..total).map(|j| t.value[j]).sum();
        if infeasibility > PHASE1_TOL {
            return infeasible(n, t.iterations);
        }
        for j in n + m..total {
            t.cost[j] = 0.0;
            t.upper[j] = 0.0;
            if t.state[j] == NonBasic::Basic {
                t.value[j] = t.value[j].max(0.0);
            } else {
                t.value[j] = 0.0;
                t.state[j] = NonBasic::Lower;
            }
        }
    }

    t.cost[..n].copy_from_slice(&p.objective);
    let status = match t.run() {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    t.finish(n, &p.objective, status)
}

fn infeasible(n: usize, iterations: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        values: vec![0.0; n],
        objective: f64::INFINITY,
        iterations,
    }
}

fn initial_value(lo: f64, hi: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    }
}

fn initial_state(lo: f64, hi: f64) -> NonBasic {
    if lo.is_finite() {
        NonBasic::Lower
    } else if hi.is_finite() {
        NonBasic::Upper
    } else {
        NonBasic::Zero
    }
}

impl Tableau {
    fn finish(&self, n: usize, objective: &[f64], status: LpStatus) -> LpSolution {
        let values: Vec<f64> = self.value[..n].to_vec();
        let obj = values.iter().zip(objective).map(|(x, c)| x * c).sum();
        LpSolution {
            status,
            values,
            objective: obj,
            iterations: self.iterations,
        }
    }

    fn run(&mut self) -> Outcome {
        let m = self.m;
        let mut bland = false;
        let mut streak = 0;
        let mut since_reinvert = 0;
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        loop {
            if self.iterations >= self.max_iterations {
                return Outcome::IterationLimit;
            }

            // duals y = c_B^T B^-1
            y.iter_mut().for_each(|v| *v = 0.0);
            for (i, &b) in self.basis.iter().enumerate() {
                let c = self.cost[b];
                if c != 0.0 {
                    let row = &self.binv[i * m..(i + 1) * m];
                    for (yk, &bk) in y.iter_mut().zip(row) {
                        *yk += c * bk;
                    }
                }
            }

            let Some((q, dir)) = self.price(&y, bland) else {
                return Outcome::Optimal;
            };

            // w = B^-1 a_q
            w.iter_mut().for_each(|v| *v = 0.0);
            for &(r, a) in &self.columns[q] {
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi += self.binv[i * m + r] * a;
                }
            }

            let mut theta = f64::INFINITY;
            let mut leave: Option<usize> = None;
            let mut leave_mag = 0.0;
            for (i, &wi) in w.iter().enumerate() {
                let delta = -dir * wi;
                let b = self.basis[i];
                let limit = if delta < -PIVOT_TOL && self.lower[b].is_finite() {
                    ((self.value[b] - self.lower[b]) / -delta).max(0.0)
                } else if delta > PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.value[b]) / delta).max(0.0)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        if limit < theta - DEGENERATE_STEP {
                            true
                        } else if limit <= theta + DEGENERATE_STEP {
                            if bland {
                                b < self.basis[cur]
                            } else {
                                delta.abs() > leave_mag
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = limit;
                    leave = Some(i);
                    leave_mag = delta.abs();
                }
            }

            let span = self.upper[q] - self.lower[q];
            let flip = span.is_finite() && span <= theta;
            if !flip && leave.is_none() {
                return Outcome::Unbounded;
            }
            let step = if flip { span } else { theta };
            self.iterations += 1;

            if step <= DEGENERATE_STEP {
                streak += 1;
                if streak >= DEGENERACY_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }

            self.value[q] += dir * step;
            for (i, &wi) in w.iter().enumerate() {
                let b = self.basis[i];
                self.value[b] -= dir * step * wi;
            }

            if flip {
                self.state[q] = if dir > 0.0 {
                    NonBasic::Upper
                } else {
                    NonBasic::Lower
                };
                self.value[q] = if dir > 0.0 {
                    self.upper[q]
                } else {
                    self.lower[q]
                };
                continue;
            }

            let p = leave.expect("checked above");
            let out = self.basis[p];
            if -dir * w[p] < 0.0 {
                self.value[out] = self.lower[out];
                self.state[out] = NonBasic::Lower;
            } else {
                self.value[out] = self.upper[out];
                self.state[out] = NonBasic::Upper;
            }
            self.basis[p] = q;
            self.state[q] = NonBasic::Basic;

            let pivot = w[p];
            {
                let row_p = &mut self.binv[p * m..(p + 1) * m];
                row_p.iter_mut().for_each(|v| *v /= pivot);
            }
            let row_p: Vec<f64> = self.binv[p * m..(p + 1) * m].to_vec();
            for (i, &wi) in w.iter().enumerate() {
                if i != p && wi != 0.0 {
                    let row_i = &mut self.binv[i * m..(i + 1) * m];
                    for (a, &b) in row_i.iter_mut().zip(&row_p) {
                        *a -= wi * b;
                    }
                }
            }

            since_reinvert += 1;
            if since_reinvert >= REINVERT_EVERY {
                since_reinvert = 0;
                self.reinvert();
            }
        }
    }

    /// Entering variable and its direction of motion (+1 up, -1 down).
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_mag = 0.0;
        for (j, col) in self.columns.iter().enumerate() {
            let st = self.state[j];
            if st == NonBasic::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.cost[j] - col.iter().map(|&(r, a)| y[r] * a).sum::<f64>();
            let dir = match st {
                NonBasic::Lower if d < -DUAL_TOL => 1.0,
                NonBasic::Upper if d > DUAL_TOL => -1.0,
                NonBasic::Zero if d.abs() > DUAL_TOL => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_mag {
                best_mag = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    /// Recomputes `B^-1` from scratch and the basic values from the nonbasic
    /// ones, discarding accumulated round-off.
    fn reinvert(&mut self) {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (k, &b) in self.basis.iter().enumerate() {
            for &(r, v) in &self.columns[b] {
                a[r * m + k] = v;
            }
        }
        let Some(inv) = invert(a, m) else {
            // keep the product-form inverse if the explicit one is singular
            return;
        };
        self.binv = inv;

        let mut r = self.rhs.clone();
        for (j, col) in self.columns.iter().enumerate() {
            if self.state[j] != NonBasic::Basic {
                for &(i, v) in col {
                    r[i] -= v * self.value[j];
                }
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            self.value[b] = (0..m).map(|k| self.binv[i * m + k] * r[k]).sum();
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `m x m` matrix.
fn invert(mut a: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for col in 0..m {
        let piv =
            (col..m).max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))?;
        if a[piv * m + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let d = a[col * m + col];
        for k in 0..m {
            a[col * m + k] /= d;
            inv[col * m + k] /= d;
        }
        for r in 0..m {
            if r != col {
                let f = a[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
    }
    Some(inv)
}
