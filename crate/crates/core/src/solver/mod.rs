//! Self-contained LP and 0/1 branch-and-bound solvers.

mod bnb;
mod simplex;

pub use bnb::{
    branch_and_bound, branch_and_bound_traced, Branching, NodeOrder, NodeTrace, SolverConfig,
    SolverStats,
};
pub use simplex::{lp_solve, LinearRow, LpProblem, LpSolution, LpStatus, Relation};
