//! Supervised vertex nomination by learning a query-specific weighting of
//! several dissimilarities.
//!
//! Given the dissimilarities from a query item to every other item under `J`
//! representations and a small set `S` of items known to resemble the query,
//! [`ilp::solve`] finds simplex weights that push the worst-ranked element of
//! `S` as close to the top of the fused ranking as possible. The weights
//! induce a nomination list over all items.
//!
//! ```
//! use nomilp::{ilp, ItemId, PersonalDissimilarityMatrix, SolverConfig, SupervisionInstance};
//!
//! let matrix = PersonalDissimilarityMatrix::from_columns(&[
//!     vec![0.5, 0.4, 0.9, 0.9],
//!     vec![0.5, 0.9, 0.4, 0.9],
//! ])?;
//! let inst = SupervisionInstance::new(ItemId::new(0), 4, &[0])?;
//! let model = ilp::build_model(&matrix, &inst)?;
//! let solution = ilp::solve(&model, &SolverConfig::default())?;
//! assert_eq!(solution.objective_value, 0);
//! assert_eq!(ilp::solution_to_ranker(&matrix, &solution)?.rank(0), 1);
//! # Ok::<(), nomilp::Error>(())
//! ```

pub mod error;
pub mod eval;
pub mod ilp;
pub mod oracle;
pub mod ranking;
pub mod solver;
pub mod spectral;
pub mod types;

pub use error::{Error, Result};
pub use ilp::{IlpModel, IlpSolution, SolveStatus};
pub use ranking::MrrMode;
pub use solver::SolverConfig;
pub use types::{
    ingest_matrix, restrict_to_candidates, ItemId, NominationList, PersonalDissimilarityMatrix,
    SupervisionInstance, WeightVector,
};
