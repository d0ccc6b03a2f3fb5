//! The min-max-rank integer program.
//!
//! Variables are laid out as `[alpha_0 .. alpha_{J-1}, x_0 .. x_{|C|-1}]`,
//! where `x_k` belongs to candidate `inst.candidates()[k]`. Row 0 is the
//! normalization `sum alpha = 1`; every other row is one big-M constraint
//!
//! ```text
//! sum_j alpha_j * (d_j(s) - d_j(v)) - M * x_v <= 0      for (s, v) in S x C
//! ```
//!
//! so `x_v = 0` forces `v` to sit at or behind every element of `S` under the
//! fused dissimilarity. Ties therefore favour `S`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::ranker_for_weights;
use crate::solver::{
    branch_and_bound_traced, lp_solve, LinearRow, LpProblem, LpStatus, NodeTrace, Relation,
    SolverConfig, SolverStats,
};
use crate::types::{
    NominationList, PersonalDissimilarityMatrix, SupervisionInstance, WeightVector,
};

/// Tolerance within which a candidate tying the worst element of `S` is
/// treated as ranked behind it.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    num_alpha: usize,
    num_binary: usize,
    big_m: f64,
    objective: Vec<f64>,
    rows: Vec<LinearRow>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    integer: Vec<bool>,
    /// `(s_row, candidate_position)` for constraint row `1 + k`.
    pairs: Vec<(usize, usize)>,
    s_rows: Vec<usize>,
    candidate_rows: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::IterationLimit => "IterationLimit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    pub alpha: WeightVector,
    /// `x[k]` for candidate position `k`.
    pub x: Vec<bool>,
    pub objective_value: usize,
    pub status: SolveStatus,
    pub stats: SolverStats,
}

/// Builds the program for `(matrix, inst)`. `M` is the largest matrix entry.
pub fn build_model(
    matrix: &PersonalDissimilarityMatrix,
    inst: &SupervisionInstance,
) -> Result<IlpModel> {
    if inst.rows() != matrix.rows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.rows(),
            found: inst.rows(),
        });
    }
    let candidates = inst.candidates();
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let j_count = matrix.cols();
    let c_count = candidates.len();
    let big_m = matrix.max_entry();

    let mut rows = Vec::with_capacity(1 + inst.s_set().len() * c_count);
    rows.push(LinearRow {
        terms: (0..j_count).map(|j| (j, 1.0)).collect(),
        relation: Relation::Eq,
        rhs: 1.0,
    });
    let mut pairs = Vec::with_capacity(inst.s_set().len() * c_count);
    for (k, &v) in candidates.iter().enumerate() {
        for &s in inst.s_set() {
            let mut terms: Vec<(usize, f64)> = (0..j_count)
                .map(|j| (j, matrix.get(s, j) - matrix.get(v, j)))
                .collect();
            terms.push((j_count + k, -big_m));
            rows.push(LinearRow {
                terms,
                relation: Relation::Le,
                rhs: 0.0,
            });
            pairs.push((s, k));
        }
    }

    let n_vars = j_count + c_count;
    let mut objective = vec![0.0; n_vars];
    objective[j_count..].iter_mut().for_each(|c| *c = 1.0);
    let mut upper = vec![f64::INFINITY; n_vars];
    upper[j_count..].iter_mut().for_each(|u| *u = 1.0);
    let mut integer = vec![false; n_vars];
    integer[j_count..].iter_mut().for_each(|i| *i = true);

    Ok(IlpModel {
        num_alpha: j_count,
        num_binary: c_count,
        big_m,
        objective,
        rows,
        lower: vec![0.0; n_vars],
        upper,
        integer,
        pairs,
        s_rows: inst.s_set().to_vec(),
        candidate_rows: candidates.to_vec(),
    })
}

impl IlpModel {
    pub fn num_alpha(&self) -> usize {
        self.num_alpha
    }

    pub fn num_binary(&self) -> usize {
        self.num_binary
    }

    pub fn num_vars(&self) -> usize {
        self.num_alpha + self.num_binary
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// All rows; row 0 is the normalization.
    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn integer(&self) -> &[bool] {
        &self.integer
    }

    /// `(s_row, candidate_position)` for each big-M row, in row order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn s_rows(&self) -> &[usize] {
        &self.s_rows
    }

    pub fn candidate_rows(&self) -> &[usize] {
        &self.candidate_rows
    }

    /// The continuous relaxation exactly as modelled (`0 <= x <= 1`).
    pub fn relaxation(&self) -> LpProblem {
        LpProblem {
            objective: self.objective.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            rows: self.rows.clone(),
        }
    }

    /// A relaxation with the same integer solutions and a tighter bound.
    ///
    /// Over the simplex, `fused(s) - fused(v)` ranges between the smallest and
    /// largest coefficient of its row. A row whose largest coefficient is at
    /// most [`TIE_TOL`] never binds and is dropped. A row whose smallest
    /// coefficient exceeds it forces `x_v = 1`. Every other row gets its
    /// largest coefficient as its own big-M. Candidates left without rows are
    /// fixed to 0.
    pub fn strengthened_relaxation(&self) -> LpProblem {
        let j_count = self.num_alpha;
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        let mut forced = vec![false; self.num_binary];
        let mut kept: Vec<(usize, f64)> = Vec::new();
        for (i, (row, &(_, k))) in self.rows[1..].iter().zip(&self.pairs).enumerate() {
            let coeffs = row.terms[..j_count].iter().map(|&(_, c)| c);
            let hi = coeffs.clone().fold(f64::NEG_INFINITY, f64::max);
            let lo = coeffs.fold(f64::INFINITY, f64::min);
            if lo > TIE_TOL {
                forced[k] = true;
            } else if hi > TIE_TOL {
                kept.push((i + 1, hi));
            }
        }
        let mut has_row = vec![false; self.num_binary];
        let mut rows = vec![self.rows[0].clone()];
        for (i, hi) in kept {
            let k = self.pairs[i - 1].1;
            if forced[k] {
                continue;
            }
            has_row[k] = true;
            let mut terms = self.rows[i].terms[..j_count].to_vec();
            terms.push((j_count + k, -hi));
            rows.push(LinearRow {
                terms,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
        for k in 0..self.num_binary {
            if forced[k] {
                lower[j_count + k] = 1.0;
            } else if !has_row[k] {
                upper[j_count + k] = 0.0;
            }
        }
        LpProblem {
            objective: self.objective.clone(),
            lower,
            upper,
            rows,
        }
    }

    /// Left-hand side of a big-M row without the `M x_v` term, i.e.
    /// `fused(s) - fused(v)`.
    fn gap(&self, row: &LinearRow, alpha: &[f64]) -> f64 {
        row.terms[..self.num_alpha]
            .iter()
            .map(|&(j, c)| c * alpha[j])
            .sum()
    }

    /// Cheapest feasible `x` for a fixed `alpha`: `x_v = 1` exactly when `v`
    /// beats the worst element of `S` by more than `tol`.
    pub fn cheapest_assignment(&self, alpha: &[f64], tol: f64) -> Vec<bool> {
        let mut x = vec![false; self.num_binary];
        for (row, &(_, k)) in self.rows[1..].iter().zip(&self.pairs) {
            if !x[k] && self.gap(row, alpha) > tol {
                x[k] = true;
            }
        }
        x
    }

    /// Checks every row and bound within `tol`.
    pub fn is_feasible(&self, alpha: &[f64], x: &[bool], tol: f64) -> bool {
        if alpha.len() != self.num_alpha || x.len() != self.num_binary {
            return false;
        }
        if alpha.iter().any(|&a| a < -tol) {
            return false;
        }
        if (alpha.iter().sum::<f64>() - 1.0).abs() > tol {
            return false;
        }
        self.rows[1..]
            .iter()
            .zip(&self.pairs)
            .all(|(row, &(_, k))| {
                let lhs = self.gap(row, alpha) - if x[k] { self.big_m } else { 0.0 };
                lhs <= tol
            })
    }

    /// Writes the model in CPLEX LP format.
    ///
    /// Variables are named `a<j>` for weights and `x<k>` for candidate
    /// indicators; row 0 is named `norm` and big-M rows `r<s>_<v>` after the
    /// `S` row and candidate row they compare.
    pub fn to_lp_format(&self) -> String {
        let name = |var: usize| {
            if var < self.num_alpha {
                format!("a{var}")
            } else {
                format!("x{}", var - self.num_alpha)
            }
        };
        let expr = |terms: &[(usize, f64)]| {
            let mut out = String::new();
            for (i, &(var, c)) in terms.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let sign = if c < 0.0 { "-" } else { "+" };
                if i == 0 && c > 0.0 {
                    let _ = write!(out, "{} {}", c, name(var));
                } else {
                    let _ = write!(out, " {} {} {}", sign, c.abs(), name(var));
                }
            }
            if out.is_empty() {
                out.push_str("0 a0");
            }
            out.trim_start().to_string()
        };

        let mut out = String::new();
        out.push_str("\\ min-max-rank nomination program\n");
        out.push_str("Minimize\n");
        let obj_terms: Vec<(usize, f64)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        let _ = writeln!(out, " obj: {}", expr(&obj_terms));
        out.push_str("Subject To\n");
        let _ = writeln!(out, " norm: {} = 1", expr(&self.rows[0].terms));
        for (row, &(s, k)) in self.rows[1..].iter().zip(&self.pairs) {
            let _ = writeln!(
                out,
                " r{}_{}: {} <= 0",
                s,
                self.candidate_rows[k],
                expr(&row.terms)
            );
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_alpha {
            let _ = writeln!(out, " a{j} >= 0");
        }
        for k in 0..self.num_binary {
            let _ = writeln!(out, " 0 <= x{k} <= 1");
        }
        out.push_str("General\n");
        for k in 0..self.num_binary {
            let _ = writeln!(out, " x{k}");
        }
        out.push_str("End\n");
        out
    }
}

/// Solves the program by branch and bound, then moves `alpha` to the point of
/// its optimal region with the largest separation between the candidates kept
/// out and `S`, so the strict ranking realizes the objective wherever that
/// region has interior.
pub fn solve(model: &IlpModel, cfg: &SolverConfig) -> Result<IlpSolution> {
    solve_traced(model, cfg, &mut |_| {})
}

/// As [`solve`], reporting every branch-and-bound node to `trace`.
pub fn solve_traced(
    model: &IlpModel,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&NodeTrace),
) -> Result<IlpSolution> {
    let raw = branch_and_bound_traced(model, cfg, trace)?;
    if raw.status == SolveStatus::Infeasible {
        return Ok(raw);
    }
    Ok(center_alpha(model, raw))
}

/// Maximizes the margin `t` with `fused(v) - fused(s) >= t` for every kept-out
/// candidate `v`. Falls back to `sol` when the margin is not positive.
fn center_alpha(model: &IlpModel, sol: IlpSolution) -> IlpSolution {
    let j_count = model.num_alpha;
    let t = j_count;
    let mut rows = vec![LinearRow {
        terms: (0..j_count).map(|j| (j, 1.0)).collect(),
        relation: Relation::Eq,
        rhs: 1.0,
    }];
    for (row, &(_, k)) in model.rows[1..].iter().zip(&model.pairs) {
        if !sol.x[k] {
            let mut terms = row.terms[..j_count].to_vec();
            terms.push((t, 1.0));
            rows.push(LinearRow {
                terms,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    if rows.len() == 1 {
        return sol;
    }
    let mut objective = vec![0.0; j_count + 1];
    objective[t] = -1.0;
    let mut lower = vec![0.0; j_count + 1];
    let mut upper = vec![f64::INFINITY; j_count + 1];
    let scale = model.big_m.max(1.0);
    lower[t] = -scale;
    upper[t] = scale;
    let lp = lp_solve(&LpProblem {
        objective,
        lower,
        upper,
        rows,
    });
    if lp.status != LpStatus::Optimal || lp.values[t] <= TIE_TOL {
        return sol;
    }
    let Ok(alpha) = WeightVector::normalized(&lp.values[..j_count]) else {
        return sol;
    };
    let x = model.cheapest_assignment(alpha.as_slice(), 0.0);
    let objective_value = x.iter().filter(|&&b| b).count();
    if objective_value > sol.objective_value {
        return sol;
    }
    IlpSolution {
        alpha,
        x,
        objective_value,
        ..sol
    }
}

/// The nomination list induced by the solution's weights.
pub fn solution_to_ranker(
    matrix: &PersonalDissimilarityMatrix,
    solution: &IlpSolution,
) -> Result<NominationList> {
    ranker_for_weights(matrix, &solution.alpha)
}

/// Worst rank of an `S` element implied by an objective value under the
/// rank identity `max rank = |S| + objective`.
pub fn implied_max_rank(inst: &SupervisionInstance, objective_value: usize) -> usize {
    inst.s_set().len() + objective_value
}
