//! One-sided Wilcoxon signed-rank test for paired differences.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest number of nonzero differences handled by the exact null
/// distribution; beyond this a normal approximation is used.
pub const EXACT_MAX: usize = 20;

/// Minimum number of nonzero differences accepted.
pub const MIN_NONZERO: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of the positive differences.
    pub statistic: f64,
    /// `P(W >= statistic)` under the symmetric null.
    pub p_value: f64,
    pub n_nonzero: usize,
    pub exact: bool,
}

/// Ranks of `|d|` over the nonzero differences, ties averaged.
pub fn signed_ranks(differences: &[f64]) -> Vec<(f64, bool)> {
    let mut nz: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut out = Vec::with_capacity(nz.len());
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // positions i..=j share the average of ranks i+1..=j+1
        let rank = (i + j + 2) as f64 / 2.0;
        for d in &nz[i..=j] {
            out.push((rank, *d > 0.0));
        }
        i = j + 1;
    }
    out
}

/// Tests `H0: differences symmetric about 0` against a positive shift.
///
/// Zero differences are dropped. With at most [`EXACT_MAX`] remaining the
/// p-value comes from the exact null over all sign assignments; otherwise
/// from a normal approximation with tie-corrected variance and continuity
/// correction.
pub fn wilcoxon_signed_rank(differences: &[f64]) -> Result<WilcoxonResult> {
    if differences.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidConfig("non-finite difference".into()));
    }
    let ranked = signed_ranks(differences);
    let n = ranked.len();
    if n == 0 {
        return Err(Error::NoNonzeroDifferences);
    }
    if n < MIN_NONZERO {
        return Err(Error::TooFewDifferences {
            min: MIN_NONZERO,
            found: n,
        });
    }
    let statistic: f64 = ranked.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    if n <= EXACT_MAX {
        let ranks: Vec<f64> = ranked.iter().map(|(r, _)| *r).collect();
        Ok(WilcoxonResult {
            statistic,
            p_value: exact_upper_tail(&ranks, statistic),
            n_nonzero: n,
            exact: true,
        })
    } else {
        let mean: f64 = ranked.iter().map(|(r, _)| r).sum::<f64>() / 2.0;
        let var: f64 = ranked.iter().map(|(r, _)| r * r).sum::<f64>() / 4.0;
        let z = (statistic - mean - 0.5) / var.sqrt();
        let normal = Normal::standard();
        Ok(WilcoxonResult {
            statistic,
            p_value: normal.sf(z),
            n_nonzero: n,
            exact: false,
        })
    }
}

/// `P(W >= w)` when each rank enters `W` independently with probability 1/2.
///
/// Averaged ranks are multiples of 1/2, so the distribution is tabulated on
/// doubled ranks by dynamic programming.
fn exact_upper_tail(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let target = (w * 2.0).round() as usize;
    let tail: f64 = counts[target.min(total + 1)..].iter().sum();
    tail / 2f64.powi(ranks.len() as i32)
}
