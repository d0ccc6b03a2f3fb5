//! The JSON result document written by `nominate`.
//!
//! Top-level keys, in order: `alpha`, `objective`, `status`, `max_rank`,
//! `ranking`, `singleton`, `evaluation` (only with a hold-out file) and
//! `provenance`.

use nomilp::ilp::SolveStatus;
use nomilp::solver::{Branching, NodeOrder, SolverStats};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominationDocument {
    /// Learned weight per dissimilarity column.
    pub alpha: Vec<f64>,
    /// Candidates ranked ahead of the worst supervised item.
    pub objective: usize,
    pub status: SolveStatus,
    /// Worst rank of a supervised item under `alpha`.
    pub max_rank: usize,
    /// Every item in rank order.
    pub ranking: Vec<RankedItem>,
    pub singleton: SingletonSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Evaluation>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub id: String,
    pub rank: usize,
    /// Fused dissimilarity after the per-column shift.
    pub fused: f64,
    pub supervised: bool,
}

/// The best single column under the same objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingletonSummary {
    pub column: String,
    pub objective: usize,
    pub max_rank: usize,
    /// Every column attaining the best objective.
    pub tied: Vec<String>,
}

/// Mean reciprocal rank of the hold-out items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub holdout: Vec<String>,
    pub ilp_mrr: f64,
    pub singleton_mrr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub generator: String,
    pub inputs: Vec<InputDigest>,
    pub config: RunConfig,
    pub columns: Vec<String>,
    /// Constant added to each column to make it nonnegative.
    pub column_shift: Vec<f64>,
    pub big_m: f64,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub node_limit: usize,
    pub time_budget_s: f64,
    pub feas_tol: f64,
    pub int_tol: f64,
    pub branching: Branching,
    pub node_order: NodeOrder,
    pub tie_break: String,
    pub seed: u64,
    pub restrict_mrr: String,
}
