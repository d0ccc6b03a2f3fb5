//! Baselines, paired comparisons, and the simulation harness.

mod baseline;
mod simulation;
mod wilcoxon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use baseline::{singleton_baseline, SingletonResult, TieBreak};
pub use simulation::{
    mean_and_ci, replicate_rng, run_replicate, run_simulation, ExperimentConfig, ReplicateRecord,
    Scheme, SimulationMode, SimulationOutcome, SimulationRow,
};
pub use wilcoxon::{signed_ranks, wilcoxon_signed_rank, WilcoxonResult, EXACT_MAX, MIN_NONZERO};

/// Paired scores of two schemes and the signed-rank test of `a - b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label_a: String,
    pub label_b: String,
    pub cases: Vec<String>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub differences: Vec<f64>,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_difference: f64,
    pub ci_halfwidth_difference: f64,
    pub wilcoxon: WilcoxonResult,
    /// Plain-language reading of the one-sided test.
    pub direction: String,
}

/// Tests `H0: b is as good or better than a` on paired scores.
pub fn compare_paired(
    label_a: &str,
    label_b: &str,
    cases: Vec<String>,
    a: Vec<f64>,
    b: Vec<f64>,
) -> Result<ComparisonReport> {
    if a.len() != b.len() || cases.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let differences: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let wilcoxon = wilcoxon_signed_rank(&differences)?;
    let (mean_a, _) = mean_and_ci(&a);
    let (mean_b, _) = mean_and_ci(&b);
    let (mean_difference, ci_halfwidth_difference) = mean_and_ci(&differences);
    let direction = format!(
        "H0: {label_b} is as good or better than {label_a}; one-sided p = {:.6} for {label_a} > {label_b} (mean difference {mean_difference:+.6})",
        wilcoxon.p_value
    );
    Ok(ComparisonReport {
        label_a: label_a.into(),
        label_b: label_b.into(),
        cases,
        a,
        b,
        differences,
        mean_a,
        mean_b,
        mean_difference,
        ci_halfwidth_difference,
        wilcoxon,
        direction,
    })
}
