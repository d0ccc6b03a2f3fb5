//! Best-bound branch and bound over the candidate indicators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::simplex::{lp_solve, LinearRow, LpProblem, LpSolution, LpStatus};
use crate::error::{Error, Result};
use crate::ilp::{IlpModel, IlpSolution, SolveStatus, TIE_TOL};
use crate::types::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branching {
    MostFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeOrder {
    BestBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub node_limit: usize,
    pub time_budget: Duration,
    pub feas_tol: f64,
    pub int_tol: f64,
    pub branching: Branching,
    pub node_order: NodeOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            node_limit: 100_000,
            time_budget: Duration::from_secs(600),
            feas_tol: 1e-6,
            int_tol: 1e-6,
            branching: Branching::MostFractional,
            node_order: NodeOrder::BestBound,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_limit == 0 || self.time_budget.is_zero() {
            return Err(Error::InvalidConfig(
                "solver limits must be positive".into(),
            ));
        }
        if !(self.feas_tol > 0.0 && self.int_tol > 0.0 && self.int_tol < 0.5) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    pub max_depth: usize,
}

/// One line of the optional node trace.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTrace {
    pub node: usize,
    pub depth: usize,
    /// LP bound at this node; infinite when the node is infeasible.
    pub bound: f64,
    pub incumbent: Option<usize>,
}

impl std::fmt::Display for NodeTrace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let inc = self
            .incumbent
            .map_or_else(|| "-".to_string(), |v| v.to_string());
        write!(
            f,
            "node={} depth={} bound={} incumbent={}",
            self.node, self.depth, self.bound, inc
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    Zero,
    One,
}

struct Node {
    bound: usize,
    lp_bound: f64,
    depth: usize,
    seq: usize,
    fixes: Vec<Fix>,
}

impl Node {
    fn key(&self, other: &Self) -> Ordering {
        // smaller bound first, then deeper, then older
        self.bound
            .cmp(&other.bound)
            .then(self.lp_bound.total_cmp(&other.lp_bound))
            .then(other.depth.cmp(&self.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap
        other.key(self)
    }
}

struct Incumbent {
    alpha: WeightVector,
    x: Vec<bool>,
    objective: usize,
}

/// Lazily grown set of big-M rows shared by every node.
///
/// Node LPs carry only the active rows; after each solve the inactive rows
/// are checked and any violated ones join the pool before re-solving. The
/// final LP of a node therefore has the optimum of the full relaxation.
struct RowPool {
    /// Relaxation with no big-M rows.
    skeleton: LpProblem,
    rows: Vec<LinearRow>,
    active: Vec<bool>,
}

impl RowPool {
    fn new(full: LpProblem, j_count: usize) -> Self {
        let mut rows = full.rows;
        let norm = rows.remove(0);
        let skeleton = LpProblem {
            rows: vec![norm],
            ..full
        };
        // seed each candidate with its row that is tightest at uniform weights
        let mut best: Vec<Option<(usize, f64)>> = vec![None; skeleton.objective.len()];
        for (i, row) in rows.iter().enumerate() {
            let (x_var, _) = row.terms[j_count];
            let gap: f64 = row.terms[..j_count].iter().map(|&(_, c)| c).sum();
            if best[x_var].is_none_or(|(_, g)| gap > g) {
                best[x_var] = Some((i, gap));
            }
        }
        let mut active = vec![false; rows.len()];
        for (i, _) in best.into_iter().flatten() {
            active[i] = true;
        }
        RowPool {
            skeleton,
            rows,
            active,
        }
    }

    fn violated(&self, lp: &LpProblem, values: &[f64], tol: f64) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| !self.active[i])
            .filter(|&i| {
                let row = &self.rows[i];
                let (x_var, _) = *row.terms.last().expect("big-M row has terms");
                // a candidate held at 1 satisfies its rows whatever the weights
                if lp.lower[x_var] >= 1.0 {
                    return false;
                }
                let lhs: f64 = row.terms.iter().map(|&(j, c)| c * values[j]).sum();
                lhs > row.rhs + tol
            })
            .collect()
    }

    /// Solves the node LP with bounds `lower`/`upper`.
    fn solve(&mut self, lower: &[f64], upper: &[f64], tol: f64) -> LpSolution {
        let mut iterations = 0;
        loop {
            let mut lp = self.skeleton.clone();
            lp.lower.copy_from_slice(lower);
            lp.upper.copy_from_slice(upper);
            lp.rows.extend(
                self.rows
                    .iter()
                    .zip(&self.active)
                    .filter(|(_, &a)| a)
                    .map(|(r, _)| r.clone()),
            );
            let mut sol = lp_solve(&lp);
            iterations += sol.iterations;
            sol.iterations = iterations;
            if sol.status != LpStatus::Optimal {
                return sol;
            }
            let add = self.violated(&lp, &sol.values, tol);
            if add.is_empty() {
                return sol;
            }
            for i in add {
                self.active[i] = true;
            }
        }
    }
}

/// Solves `model` to proven optimality unless a limit is hit first.
pub fn branch_and_bound(model: &IlpModel, cfg: &SolverConfig) -> Result<IlpSolution> {
    branch_and_bound_traced(model, cfg, &mut |_| {})
}

/// As [`branch_and_bound`], calling `trace` once per processed node.
pub fn branch_and_bound_traced(
    model: &IlpModel,
    cfg: &SolverConfig,
    trace: &mut dyn FnMut(&NodeTrace),
) -> Result<IlpSolution> {
    cfg.validate()?;
    let start = Instant::now();
    let j_count = model.num_alpha();
    let c_count = model.num_binary();
    let mut stats = SolverStats::default();

    let mut incumbent: Option<Incumbent> = None;
    let offer = |alpha: WeightVector, x: Vec<bool>, incumbent: &mut Option<Incumbent>| {
        let objective = x.iter().filter(|&&b| b).count();
        if incumbent
            .as_ref()
            .is_none_or(|inc| objective < inc.objective)
            && model.is_feasible(alpha.as_slice(), &x, cfg.feas_tol)
        {
            *incumbent = Some(Incumbent {
                alpha,
                x,
                objective,
            });
        }
    };

    // Seed with the simplex corners and its barycentre.
    for j in 0..j_count {
        let alpha = WeightVector::basis(j_count, j);
        let x = model.cheapest_assignment(alpha.as_slice(), TIE_TOL);
        offer(alpha, x, &mut incumbent);
    }
    let alpha = WeightVector::uniform(j_count);
    let x = model.cheapest_assignment(alpha.as_slice(), TIE_TOL);
    offer(alpha, x, &mut incumbent);

    let base = model.strengthened_relaxation();
    let mut pool = RowPool::new(base.clone(), j_count);
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Node {
        bound: 0,
        lp_bound: f64::NEG_INFINITY,
        depth: 0,
        seq,
        fixes: vec![Fix::Free; c_count],
    });
    let mut exhausted = true;

    while let Some(node) = heap.pop() {
        if let Some(inc) = &incumbent {
            if node.bound >= inc.objective {
                // best-bound order: nothing left can improve
                heap.clear();
                break;
            }
        }
        if stats.nodes >= cfg.node_limit || start.elapsed() > cfg.time_budget {
            exhausted = false;
            break;
        }
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(node.depth);

        let mut lower = base.lower.clone();
        let mut upper = base.upper.clone();
        for (k, fix) in node.fixes.iter().enumerate() {
            match fix {
                Fix::Free => {}
                Fix::Zero => upper[j_count + k] = 0.0,
                Fix::One => lower[j_count + k] = 1.0,
            }
        }
        let sol = pool.solve(&lower, &upper, cfg.feas_tol);
        stats.lp_iterations += sol.iterations;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                trace(&NodeTrace {
                    node: stats.nodes,
                    depth: node.depth,
                    bound: f64::INFINITY,
                    incumbent: incumbent.as_ref().map(|i| i.objective),
                });
                continue;
            }
            LpStatus::Unbounded => {
                return Err(Error::Solver("unbounded relaxation".into()));
            }
            LpStatus::IterationLimit => {
                exhausted = false;
                continue;
            }
        }

        let lp_bound = sol.objective;
        let bound = node
            .bound
            .max((lp_bound - cfg.int_tol).ceil().max(0.0) as usize);

        // rounding heuristic: the node's weights, scored by the true ranking
        if let Ok(alpha) = WeightVector::normalized(&sol.values[..j_count]) {
            let x = model.cheapest_assignment(alpha.as_slice(), TIE_TOL);
            offer(alpha, x, &mut incumbent);
        }

        let xs = &sol.values[j_count..];
        let integral = xs
            .iter()
            .all(|&v| v.abs() <= cfg.int_tol || (1.0 - v).abs() <= cfg.int_tol);
        if integral {
            if let Ok(alpha) = WeightVector::normalized(&sol.values[..j_count]) {
                let x = xs.iter().map(|&v| v > 0.5).collect();
                offer(alpha, x, &mut incumbent);
            }
        }

        trace(&NodeTrace {
            node: stats.nodes,
            depth: node.depth,
            bound: lp_bound,
            incumbent: incumbent.as_ref().map(|i| i.objective),
        });

        if integral || incumbent.as_ref().is_some_and(|inc| bound >= inc.objective) {
            continue;
        }

        let branch = match cfg.branching {
            Branching::MostFractional => most_fractional(xs, &node.fixes, cfg.int_tol),
        };
        let Some(k) = branch else {
            continue;
        };
        for fix in [Fix::Zero, Fix::One] {
            let mut fixes = node.fixes.clone();
            fixes[k] = fix;
            seq += 1;
            heap.push(Node {
                bound,
                lp_bound,
                depth: node.depth + 1,
                seq,
                fixes,
            });
        }
    }
    if !heap.is_empty() {
        exhausted = false;
    }

    match incumbent {
        Some(inc) => Ok(IlpSolution {
            alpha: inc.alpha,
            x: inc.x,
            objective_value: inc.objective,
            status: if exhausted {
                SolveStatus::Optimal
            } else {
                SolveStatus::IterationLimit
            },
            stats,
        }),
        None => Ok(IlpSolution {
            alpha: WeightVector::uniform(j_count),
            x: vec![true; c_count],
            objective_value: c_count,
            status: if exhausted {
                SolveStatus::Infeasible
            } else {
                SolveStatus::IterationLimit
            },
            stats,
        }),
    }
}

/// Free variable whose value is closest to 1/2; ties go to the lowest index.
fn most_fractional(xs: &[f64], fixes: &[Fix], int_tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, (&v, &fix)) in xs.iter().zip(fixes).enumerate() {
        if fix != Fix::Free {
            continue;
        }
        let frac = v.min(1.0 - v);
        if frac <= int_tol {
            continue;
        }
        if best.is_none_or(|(_, b)| frac > b) {
            best = Some((k, frac));
        }
    }
    best.map(|(k, _)| k)
}
