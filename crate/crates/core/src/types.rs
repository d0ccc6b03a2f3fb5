//! Domain types shared across the crate.
//!
//! The query item is never a row of any matrix here: a
//! [`PersonalDissimilarityMatrix`] holds one row per *other* item, and every
//! row index in this crate refers to that numbering.

use crate::error::{Error, Result};

/// Tolerance on `sum(alpha) == 1` for a [`WeightVector`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A non-query item: its row in the personal dissimilarity matrix and an
/// optional external label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ItemId {
    pub index: usize,
    pub label: Option<String>,
}

impl ItemId {
    pub fn new(index: usize) -> Self {
        Self { index, label: None }
    }

    pub fn labeled(index: usize, label: impl Into<String>) -> Self {
        Self {
            index,
            label: Some(label.into()),
        }
    }
}

/// Dissimilarities from the query to every other item under each of `J`
/// representations, stored row-major as `(n-1) x J`.
///
/// Entries are nonnegative after [`ingest_matrix`]; the shift applied to each
/// column to get there is kept in `column_shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonalDissimilarityMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    column_shift: Vec<f64>,
}

impl PersonalDissimilarityMatrix {
    /// Builds a matrix from row-major data, shifting columns to be
    /// nonnegative. Equivalent to [`ingest_matrix`] on the nested form.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        if rows < 2 {
            return Err(Error::TooSmall { rows, cols });
        }
        let mut entries = data;
        let mut column_shift = vec![0.0; cols];
        for (j, shift) in column_shift.iter_mut().enumerate() {
            let min = (0..rows)
                .map(|i| entries[i * cols + j])
                .fold(f64::INFINITY, f64::min);
            *shift = (-min).max(0.0);
            if *shift > 0.0 {
                for i in 0..rows {
                    entries[i * cols + j] += *shift;
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
            column_shift,
        })
    }

    /// Builds a matrix from columns (one `Vec` per representation).
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if cols == 0 || rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = vec![0.0; rows * cols];
        for (j, column) in columns.iter().enumerate() {
            if column.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: column.len(),
                });
            }
            for (i, &v) in column.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    /// Number of non-query items (`n - 1`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of representations (`J`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn column_shift(&self) -> &[f64] {
        &self.column_shift
    }

    /// Largest entry of the (shifted) matrix.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Validates `raw` and shifts every column by `max(0, -min)` so all entries
/// are nonnegative.
pub fn ingest_matrix(raw: &[Vec<f64>]) -> Result<PersonalDissimilarityMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, r) in raw.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::Ragged {
                row: i,
                expected: cols,
                found: r.len(),
            });
        }
        data.extend_from_slice(r);
    }
    PersonalDissimilarityMatrix::from_row_major(rows, cols, data)
}

/// The known-similar set `S` and its complement, the candidate set `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisionInstance {
    query: ItemId,
    rows: usize,
    s_set: Vec<usize>,
    candidates: Vec<usize>,
    /// `position[row]` is the index of `row` within `candidates`, if any.
    position: Vec<Option<usize>>,
}

impl SupervisionInstance {
    /// `s_rows` may be given in any order and with duplicates.
    pub fn new(query: ItemId, rows: usize, s_rows: &[usize]) -> Result<Self> {
        let mut in_s = vec![false; rows];
        for &r in s_rows {
            if r >= rows {
                return Err(Error::IndexOutOfRange { index: r, rows });
            }
            in_s[r] = true;
        }
        let s_set: Vec<usize> = (0..rows).filter(|&r| in_s[r]).collect();
        if s_set.is_empty() {
            return Err(Error::EmptySupervision);
        }
        let candidates: Vec<usize> = (0..rows).filter(|&r| !in_s[r]).collect();
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let mut position = vec![None; rows];
        for (k, &c) in candidates.iter().enumerate() {
            position[c] = Some(k);
        }
        Ok(Self {
            query,
            rows,
            s_set,
            candidates,
            position,
        })
    }

    pub fn query(&self) -> &ItemId {
        &self.query
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Rows in `S`, ascending.
    pub fn s_set(&self) -> &[usize] {
        &self.s_set
    }

    /// Rows in `C`, ascending.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn in_s(&self, row: usize) -> bool {
        row < self.rows && self.position[row].is_none()
    }

    /// Index of `row` within [`Self::candidates`].
    pub fn candidate_position(&self, row: usize) -> Option<usize> {
        self.position.get(row).copied().flatten()
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidWeights("empty".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidWeights(format!("component {a} is not >= 0")));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidWeights(format!("components sum to {sum}")));
        }
        Ok(Self(alpha))
    }

    /// Clamps negatives to zero and rescales onto the simplex. Used to clean
    /// up solver output carrying round-off.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        let clamped: Vec<f64> = raw.iter().map(|&a| a.max(0.0)).collect();
        let sum: f64 = clamped.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidWeights(format!("cannot normalize {raw:?}")));
        }
        Self::new(clamped.into_iter().map(|a| a / sum).collect())
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// The corner `e_index` of the simplex.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut alpha = vec![0.0; len];
        alpha[index] = 1.0;
        Self(alpha)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A total ranking of rows, 1-based, together with the values that induced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NominationList {
    ranks: Vec<usize>,
    fused_values: Vec<f64>,
}

impl NominationList {
    /// Ranks `values` ascending, breaking ties by ascending index.
    pub fn from_values(values: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut ranks = vec![0; values.len()];
        for (pos, &row) in order.iter().enumerate() {
            ranks[row] = pos + 1;
        }
        Self {
            ranks,
            fused_values: values,
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// 1-based rank of `row`.
    pub fn rank(&self, row: usize) -> usize {
        self.ranks[row]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn fused_values(&self) -> &[f64] {
        &self.fused_values
    }

    /// Rows ordered from rank 1 downwards.
    pub fn ordering(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (row, &r) in self.ranks.iter().enumerate() {
            order[r - 1] = row;
        }
        order
    }
}

/// Ranks of the candidates only: `h_C(v) = h(v) - #{s in S ranked above v}`.
///
/// Entry `k` of the returned list corresponds to row `inst.candidates()[k]`.
pub fn restrict_to_candidates(
    list: &NominationList,
    inst: &SupervisionInstance,
) -> Result<NominationList> {
    if list.len() != inst.rows() {
        return Err(Error::DimensionMismatch {
            expected: inst.rows(),
            found: list.len(),
        });
    }
    let mut s_ranks: Vec<usize> = inst.s_set().iter().map(|&s| list.rank(s)).collect();
    s_ranks.sort_unstable();
    let ranks = inst
        .candidates()
        .iter()
        .map(|&v| {
            let r = list.rank(v);
            r - s_ranks.partition_point(|&sr| sr < r)
        })
        .collect();
    let fused_values = inst
        .candidates()
        .iter()
        .map(|&v| list.fused_values()[v])
        .collect();
    Ok(NominationList {
        ranks,
        fused_values,
    })
}
