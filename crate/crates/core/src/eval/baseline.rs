use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ranking::{max_rank_of, natural_ranker};
use crate::types::{NominationList, PersonalDissimilarityMatrix, SupervisionInstance};

/// How the Singleton baseline picks among equally good columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Lowest column index.
    #[default]
    Index,
    /// Uniformly at random from the argmin set, seeded.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingletonResult {
    pub column: usize,
    pub list: NominationList,
    /// Worst rank of an element of `S` under the chosen column.
    pub max_rank: usize,
    /// Every column attaining `max_rank`.
    pub argmin: Vec<usize>,
}

impl SingletonResult {
    /// Candidates ranked ahead of the worst `S` element.
    pub fn objective(&self, inst: &SupervisionInstance) -> usize {
        self.max_rank - inst.s_set().len()
    }
}

/// The single representation whose natural ranker minimizes the worst rank
/// of `S`.
pub fn singleton_baseline(
    matrix: &PersonalDissimilarityMatrix,
    inst: &SupervisionInstance,
    tie_break: TieBreak,
) -> Result<SingletonResult> {
    let lists: Vec<NominationList> = (0..matrix.cols())
        .map(|j| natural_ranker(&matrix.column(j)))
        .collect();
    let scores: Vec<usize> = lists.iter().map(|l| max_rank_of(l, inst.s_set())).collect();
    let best = *scores.iter().min().expect("matrix has at least one column");
    let argmin: Vec<usize> = (0..scores.len()).filter(|&j| scores[j] == best).collect();
    let column = match tie_break {
        TieBreak::Index => argmin[0],
        TieBreak::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            *argmin.choose(&mut rng).expect("non-empty argmin")
        }
    };
    Ok(SingletonResult {
        column,
        list: lists[column].clone(),
        max_rank: best,
        argmin,
    })
}
