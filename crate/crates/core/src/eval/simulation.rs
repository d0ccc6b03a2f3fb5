//! Monte Carlo harness for the two-truths RDPG experiment.
//!
//! Each replicate draws latent positions, forms `P`, and embeds it with ASE
//! and LSE to define the ground truth. For every `alpha_truth` on the grid,
//! the items nearest the query under `alpha d_ASE + (1 - alpha) d_LSE` give
//! `S*`; its first `s_size` members are the supervision set `S` and the rest
//! are held out. Each scheme ranks the observed dissimilarities (from `P` or
//! from an averaged adjacency) and is scored by the reciprocal rank of the
//! held-out items among the candidates.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilp::{build_model, solution_to_ranker, solve, SolveStatus};
use crate::ranking::{max_rank_of, mrr_with_mode, natural_ranker, ranker_for_weights, MrrMode};
use crate::solver::SolverConfig;
use crate::spectral::{
    ase, lse, personal_dissimilarity, probability_matrix, sample_average_adjacency, sample_latents,
};
use crate::types::{ItemId, PersonalDissimilarityMatrix, SupervisionInstance, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimulationMode {
    /// Schemes see the embeddings of `P` itself.
    NoiselessP,
    /// Schemes see the embeddings of an average of `k` sampled graphs.
    NoisyAbar,
}

impl fmt::Display for SimulationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimulationMode::NoiselessP => "NoiselessP",
            SimulationMode::NoisyAbar => "NoisyAbar",
        })
    }
}

impl FromStr for SimulationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NoiselessP" => Ok(SimulationMode::NoiselessP),
            "NoisyAbar" => Ok(SimulationMode::NoisyAbar),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Ilp,
    Ase,
    Lse,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ilp, Scheme::Ase, Scheme::Lse];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Ilp => "ILP",
            Scheme::Ase => "ASE",
            Scheme::Lse => "LSE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub alpha_truth_grid: Vec<f64>,
    pub s_size: usize,
    pub star_size: usize,
    pub monte_carlo_reps: usize,
    pub seed: u64,
    pub m_embed: usize,
    pub mode: SimulationMode,
    pub node_limit: usize,
    /// Drop replicates whose ILP hit the node limit from the means.
    pub exclude_limit_hits: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 51,
            k: 1000,
            alpha_truth_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            s_size: 5,
            star_size: 6,
            monte_carlo_reps: 100,
            seed: 1,
            m_embed: 2,
            mode: SimulationMode::NoiselessP,
            node_limit: 100_000,
            exclude_limit_hits: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 3 {
            return bad(format!("n = {} is too small", self.n));
        }
        if self.s_size == 0 || self.s_size >= self.star_size || self.star_size > self.n - 1 {
            return bad(format!(
                "need 0 < s_size < star_size <= n - 1, got s_size = {}, star_size = {}, n = {}",
                self.s_size, self.star_size, self.n
            ));
        }
        if self.alpha_truth_grid.is_empty()
            || self
                .alpha_truth_grid
                .iter()
                .any(|a| !(0.0..=1.0).contains(a))
        {
            return bad("alpha_truth_grid must be non-empty and inside [0, 1]".into());
        }
        if self.monte_carlo_reps == 0 || self.k == 0 || self.m_embed == 0 || self.node_limit == 0 {
            return bad("monte_carlo_reps, k, m_embed and node_limit must be positive".into());
        }
        if self.m_embed > self.n {
            return bad(format!("m_embed = {} exceeds n", self.m_embed));
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            node_limit: self.node_limit,
            // no wall-clock limit, so results never depend on timing
            time_budget: Duration::from_secs(u64::MAX / 4),
            ..SolverConfig::default()
        }
    }
}

/// Scores of one replicate at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub alpha_truth: f64,
    pub replicate: usize,
    /// Candidate-restricted MRR of the held-out items, per scheme.
    pub rr: [f64; 3],
    /// Worst rank of an `S` element, per scheme.
    pub max_rank: [usize; 3],
    pub ilp_objective: usize,
    pub ilp_status: SolveStatus,
    pub ilp_alpha: Vec<f64>,
}

impl ReplicateRecord {
    pub fn rr_of(&self, scheme: Scheme) -> f64 {
        self.rr[scheme as usize]
    }

    pub fn max_rank_of(&self, scheme: Scheme) -> usize {
        self.max_rank[scheme as usize]
    }

    pub fn limit_hit(&self) -> bool {
        self.ilp_status != SolveStatus::Optimal
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub alpha_truth: f64,
    pub scheme: Scheme,
    pub mean_rr: f64,
    pub ci_halfwidth: f64,
    pub mean_max_rank: f64,
    pub reps_used: usize,
    pub limit_hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub rows: Vec<SimulationRow>,
    /// Ordered by grid point, then replicate.
    pub replicates: Vec<ReplicateRecord>,
}

/// Mean and the half-width of its normal-approximation 95% interval.
pub fn mean_and_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Runs every replicate (in parallel) and summarizes per grid point and
/// scheme. Output is independent of thread scheduling.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let per_rep: Vec<Vec<ReplicateRecord>> = (0..cfg.monte_carlo_reps)
        .into_par_iter()
        .map(|rep| run_replicate(cfg, rep))
        .collect::<Result<_>>()?;

    let mut replicates = Vec::with_capacity(cfg.alpha_truth_grid.len() * cfg.monte_carlo_reps);
    for g in 0..cfg.alpha_truth_grid.len() {
        for rep in &per_rep {
            replicates.push(rep[g].clone());
        }
    }

    let mut rows = Vec::new();
    for (g, &alpha_truth) in cfg.alpha_truth_grid.iter().enumerate() {
        let block = &replicates[g * cfg.monte_carlo_reps..(g + 1) * cfg.monte_carlo_reps];
        let limit_hits = block.iter().filter(|r| r.limit_hit()).count();
        let used: Vec<&ReplicateRecord> = block
            .iter()
            .filter(|r| !(cfg.exclude_limit_hits && r.limit_hit()))
            .collect();
        for scheme in Scheme::ALL {
            let rr: Vec<f64> = used.iter().map(|r| r.rr_of(scheme)).collect();
            let (mean_rr, ci_halfwidth) = mean_and_ci(&rr);
            let mean_max_rank = used
                .iter()
                .map(|r| r.max_rank_of(scheme) as f64)
                .sum::<f64>()
                / used.len().max(1) as f64;
            rows.push(SimulationRow {
                alpha_truth,
                scheme,
                mean_rr,
                ci_halfwidth,
                mean_max_rank,
                reps_used: used.len(),
                limit_hits,
            });
        }
    }
    Ok(SimulationOutcome { rows, replicates })
}

/// The generator for replicate `rep`: stream `rep` of the configured seed.
pub fn replicate_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// All grid points of one replicate, sharing the same sampled graph.
pub fn run_replicate(cfg: &ExperimentConfig, rep: usize) -> Result<Vec<ReplicateRecord>> {
    let mut rng = replicate_rng(cfg.seed, rep);
    let latents = sample_latents(cfg.n, &mut rng)?;
    let p = probability_matrix(&latents);
    let truth = personal_dissimilarity(
        &[ase(p.matrix(), cfg.m_embed)?, lse(p.matrix(), cfg.m_embed)?],
        0,
    )?;
    let observed = match cfg.mode {
        SimulationMode::NoiselessP => truth.clone(),
        SimulationMode::NoisyAbar => {
            let a = sample_average_adjacency(&p, cfg.k, &mut rng)?;
            personal_dissimilarity(
                &[ase(&a.a_bar, cfg.m_embed)?, lse(&a.a_bar, cfg.m_embed)?],
                0,
            )?
        }
    };
    let solver = cfg.solver();

    cfg.alpha_truth_grid
        .iter()
        .map(|&alpha_truth| score_grid_point(cfg, &solver, &truth, &observed, alpha_truth, rep))
        .collect()
}

fn score_grid_point(
    cfg: &ExperimentConfig,
    solver: &SolverConfig,
    truth: &PersonalDissimilarityMatrix,
    observed: &PersonalDissimilarityMatrix,
    alpha_truth: f64,
    rep: usize,
) -> Result<ReplicateRecord> {
    let weights = WeightVector::normalized(&[alpha_truth, 1.0 - alpha_truth])?;
    let order = ranker_for_weights(truth, &weights)?.ordering();
    let s_rows = &order[..cfg.s_size];
    let held_out = &order[cfg.s_size..cfg.star_size];
    let inst = SupervisionInstance::new(ItemId::new(0), truth.rows(), s_rows)?;

    let model = build_model(observed, &inst)?;
    let sol = solve(&model, solver)?;
    let ilp_list = solution_to_ranker(observed, &sol)?;
    let ase_list = natural_ranker(&observed.column(0));
    let lse_list = natural_ranker(&observed.column(1));

    let lists = [&ilp_list, &ase_list, &lse_list];
    let mut rr = [0.0; 3];
    let mut max_rank = [0; 3];
    for (i, list) in lists.iter().enumerate() {
        rr[i] = mrr_with_mode(list, held_out, &inst, MrrMode::Candidate)?;
        max_rank[i] = max_rank_of(list, inst.s_set());
    }

    if sol.status == SolveStatus::Optimal {
        let best_single = max_rank[1].min(max_rank[2]) - cfg.s_size;
        if sol.objective_value > best_single {
            return Err(Error::Solver(format!(
                "ILP objective {} exceeds singleton objective {best_single} (alpha_truth {alpha_truth}, replicate {rep})",
                sol.objective_value
            )));
        }
    }

    Ok(ReplicateRecord {
        alpha_truth,
        replicate: rep,
        rr,
        max_rank,
        ilp_objective: sol.objective_value,
        ilp_status: sol.status,
        ilp_alpha: sol.alpha.as_slice().to_vec(),
    })
}
