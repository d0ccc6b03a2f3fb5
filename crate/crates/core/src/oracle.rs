//! Exact and brute-force reference solvers for the min-max-rank program.
//!
//! These never touch the LP or branch-and-bound code and exist to check it.

use crate::error::{Error, Result};
use crate::types::{PersonalDissimilarityMatrix, SupervisionInstance};

/// Tie tolerance when scoring a weight vector: a candidate within this of the
/// worst `S` element counts as behind it.
const EVAL_TOL: f64 = 1e-12;

/// Number of candidates strictly ahead of the worst element of `S` under the
/// weights `alpha`.
pub fn objective_at(
    matrix: &PersonalDissimilarityMatrix,
    inst: &SupervisionInstance,
    alpha: &[f64],
) -> usize {
    let fused = |row: usize| -> f64 { matrix.row(row).iter().zip(alpha).map(|(d, a)| d * a).sum() };
    let worst = inst
        .s_set()
        .iter()
        .map(|&s| fused(s))
        .fold(f64::NEG_INFINITY, f64::max);
    inst.candidates()
        .iter()
        .filter(|&&v| fused(v) < worst - EVAL_TOL)
        .count()
}

/// Exact optimum for two representations.
///
/// With `alpha` the weight on column 0, each item's fused value is affine in
/// `alpha`, so the ranking only changes where two lines cross. Evaluating at
/// both ends, at every crossing, and at midpoints between consecutive
/// crossings covers every piece.
pub fn breakpoint_oracle_j2(
    matrix: &PersonalDissimilarityMatrix,
    inst: &SupervisionInstance,
) -> Result<usize> {
    if matrix.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: matrix.cols(),
        });
    }
    let mut points = breakpoints(matrix);
    points.push(0.0);
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mids: Vec<f64> = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    points.extend(mids);

    Ok(points
        .iter()
        .map(|&a| objective_at(matrix, inst, &[a, 1.0 - a]))
        .min()
        .expect("at least the endpoints"))
}

/// Every `alpha` in `[0, 1]` at which two rows' fused values cross.
pub fn breakpoints(matrix: &PersonalDissimilarityMatrix) -> Vec<f64> {
    let n = matrix.rows();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let (d1u, d2u) = (matrix.get(u, 0), matrix.get(u, 1));
            let (d1v, d2v) = (matrix.get(v, 0), matrix.get(v, 1));
            let denom = (d1u - d1v) - (d2u - d2v);
            if denom == 0.0 {
                continue;
            }
            let a = (d2v - d2u) / denom;
            if (0.0..=1.0).contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

/// Best objective over the simplex lattice `{k / resolution}`; an upper bound
/// on the optimum.
pub fn grid_oracle(
    matrix: &PersonalDissimilarityMatrix,
    inst: &SupervisionInstance,
    resolution: usize,
) -> Result<usize> {
    if resolution < 2 {
        return Err(Error::InvalidConfig("grid resolution must be >= 2".into()));
    }
    let mut best = usize::MAX;
    for_each_lattice_point(matrix.cols(), resolution, &mut |alpha| {
        best = best.min(objective_at(matrix, inst, alpha));
    });
    Ok(best)
}

/// Calls `f` on every point of the simplex lattice with the given resolution.
pub fn for_each_lattice_point(dims: usize, resolution: usize, f: &mut dyn FnMut(&[f64])) {
    fn recurse(
        counts: &mut Vec<usize>,
        dims: usize,
        left: usize,
        resolution: usize,
        f: &mut dyn FnMut(&[f64]),
    ) {
        if counts.len() + 1 == dims {
            counts.push(left);
            let alpha: Vec<f64> = counts
                .iter()
                .map(|&c| c as f64 / resolution as f64)
                .collect();
            f(&alpha);
            counts.pop();
            return;
        }
        for c in 0..=left {
            counts.push(c);
            recurse(counts, dims, left - c, resolution, f);
            counts.pop();
        }
    }
    if dims == 0 {
        return;
    }
    recurse(
        &mut Vec::with_capacity(dims),
        dims,
        resolution,
        resolution,
        f,
    );
}
