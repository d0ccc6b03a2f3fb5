//! Natural nomination from a dissimilarity, fused rankers, and mean
//! reciprocal rank.

use crate::error::{Error, Result};
use crate::types::{
    restrict_to_candidates, NominationList, PersonalDissimilarityMatrix, SupervisionInstance,
    WeightVector,
};

/// Which ranks reciprocal-rank scores are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MrrMode {
    /// Ranks over every non-query row.
    #[default]
    Full,
    /// Ranks among the candidates only, with `S` removed from the list.
    Candidate,
}

/// Rank 1 goes to the smallest value; ties go to the lower row index.
pub fn natural_ranker(column: &[f64]) -> NominationList {
    NominationList::from_values(column.to_vec())
}

/// `sum_j alpha_j * matrix[i][j]` for every row `i`.
pub fn fuse(matrix: &PersonalDissimilarityMatrix, alpha: &WeightVector) -> Result<Vec<f64>> {
    if alpha.len() != matrix.cols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.cols(),
            found: alpha.len(),
        });
    }
    let w = alpha.as_slice();
    Ok((0..matrix.rows())
        .map(|i| matrix.row(i).iter().zip(w).map(|(d, a)| d * a).sum())
        .collect())
}

/// The ranker `h^alpha` induced by the fused dissimilarity.
pub fn ranker_for_weights(
    matrix: &PersonalDissimilarityMatrix,
    alpha: &WeightVector,
) -> Result<NominationList> {
    Ok(NominationList::from_values(fuse(matrix, alpha)?))
}

/// `(1/|subset|) * sum 1/rank(s)`.
pub fn mean_reciprocal_rank(list: &NominationList, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut total = 0.0;
    for &s in subset {
        if s >= list.len() {
            return Err(Error::IndexOutOfRange {
                index: s,
                rows: list.len(),
            });
        }
        total += 1.0 / list.rank(s) as f64;
    }
    Ok(total / subset.len() as f64)
}

/// MRR of `subset` (rows of the full list) under the chosen rank convention.
///
/// In [`MrrMode::Candidate`] every member of `subset` must be a candidate.
pub fn mrr_with_mode(
    list: &NominationList,
    subset: &[usize],
    inst: &SupervisionInstance,
    mode: MrrMode,
) -> Result<f64> {
    match mode {
        MrrMode::Full => mean_reciprocal_rank(list, subset),
        MrrMode::Candidate => {
            let restricted = restrict_to_candidates(list, inst)?;
            let positions = subset
                .iter()
                .map(|&row| {
                    inst.candidate_position(row).ok_or(Error::IndexOutOfRange {
                        index: row,
                        rows: inst.rows(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            mean_reciprocal_rank(&restricted, &positions)
        }
    }
}

/// `true` iff `h` is strictly preferred to `h'`, given their MRRs on the same
/// subset.
pub fn prefers(mrr_h: f64, mrr_other: f64) -> bool {
    mrr_h > mrr_other
}

/// Worst (largest) rank of any row of `S`.
pub fn max_rank_of(list: &NominationList, rows: &[usize]) -> usize {
    rows.iter().map(|&s| list.rank(s)).max().unwrap_or(0)
}
