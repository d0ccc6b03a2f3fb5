//! Random dot product graphs and their adjacency / Laplacian spectral
//! embeddings.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::PersonalDissimilarityMatrix;

/// Name of the generator used for every seeded draw in this crate.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

/// Latent positions, one row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPositions(DMatrix<f64>);

impl LatentPositions {
    /// Checks `0 <= <x_i, x_j> <= 1` for every pair.
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let gram = &x * x.transpose();
        for i in 0..gram.nrows() {
            for j in i..gram.ncols() {
                let v = gram[(i, j)];
                if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(Error::InvalidLatents { i, j, value: v });
                }
            }
        }
        Ok(Self(x))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Symmetric edge-probability matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix(DMatrix<f64>);

impl ProbabilityMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Mean of `k` independent symmetric, hollow Bernoulli adjacency matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedAdjacency {
    pub a_bar: DMatrix<f64>,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingKind {
    Ase,
    Lse,
}

/// `n` points in `R^dim`, columns ordered by decreasing `|eigenvalue|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub y: DMatrix<f64>,
    pub kind: EmbeddingKind,
    pub eigenvalues: Vec<f64>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.y.ncols()
    }
}

/// First row is `(0.5, 0.5)`; the rest are uniform on the nonnegative quarter
/// of the unit disk, by rejection from the unit square.
pub fn sample_latents<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LatentPositions> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    let mut x = DMatrix::zeros(n, 2);
    x[(0, 0)] = 0.5;
    x[(0, 1)] = 0.5;
    for i in 1..n {
        loop {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            if a * a + b * b <= 1.0 {
                x[(i, 0)] = a;
                x[(i, 1)] = b;
                break;
            }
        }
    }
    Ok(LatentPositions(x))
}

/// `P = X X^T`.
pub fn probability_matrix(latents: &LatentPositions) -> ProbabilityMatrix {
    let x = latents.matrix();
    ProbabilityMatrix(x * x.transpose())
}

/// Draws `k` graphs with `A_ij ~ Bernoulli(P_ij)` for `i < j`, mirrored, zero
/// diagonal, and averages them.
pub fn sample_average_adjacency<R: Rng + ?Sized>(
    p: &ProbabilityMatrix,
    k: usize,
    rng: &mut R,
) -> Result<AveragedAdjacency> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let n = p.0.nrows();
    let mut counts = DMatrix::<f64>::zeros(n, n);
    for _ in 0..k {
        for i in 0..n {
            for j in i + 1..n {
                let u: f64 = rng.random();
                if u < p.0[(i, j)] {
                    counts[(i, j)] += 1.0;
                }
            }
        }
    }
    let mut a_bar = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = counts[(i, j)] / k as f64;
            a_bar[(i, j)] = v;
            a_bar[(j, i)] = v;
        }
    }
    Ok(AveragedAdjacency { a_bar, k })
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in decreasing order and the matching orthonormal
/// eigenvectors as columns. Meant for `n` up to a couple of thousand.
pub fn symmetric_eigh(mx: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mx.nrows();
    if mx.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mx.ncols(),
        });
    }
    let scale = mx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (mx[(i, j)] - mx[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }

    // row-major working copies
    let mut a: Vec<f64> = (0..n * n).map(|k| mx[(k / n, k % n)]).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob2: f64 = a.iter().map(|x| x * x).sum();
    let tiny = f64::EPSILON * f64::EPSILON * frob2.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y * n + y].total_cmp(&a[x * n + x]).then(x.cmp(&y)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok((values, vectors))
}

/// Top `m_embed` eigenpairs by magnitude, scaled: `U |Lambda|^{1/2} * factor`.
fn scaled_top(
    mx: &DMatrix<f64>,
    m_embed: usize,
    factor: f64,
    kind: EmbeddingKind,
) -> Result<Embedding> {
    let n = mx.nrows();
    if m_embed == 0 || m_embed > n {
        return Err(Error::InvalidConfig(format!(
            "embedding dimension {m_embed} not in 1..={n}"
        )));
    }
    let (values, vectors) = symmetric_eigh(mx)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[y].abs().total_cmp(&values[x].abs()).then(x.cmp(&y)));
    order.truncate(m_embed);
    let y = DMatrix::from_fn(n, m_embed, |r, c| {
        let i = order[c];
        vectors[(r, i)] * values[i].abs().sqrt() * factor
    });
    Ok(Embedding {
        y,
        kind,
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
    })
}

/// Adjacency spectral embedding `U |Lambda|^{1/2}`.
pub fn ase(mx: &DMatrix<f64>, m_embed: usize) -> Result<Embedding> {
    scaled_top(mx, m_embed, 1.0, EmbeddingKind::Ase)
}

/// The normalized matrix `D^{-1/2} M D^{-1/2}`, `D` the row sums.
pub fn normalized_laplacian(mx: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = mx.nrows();
    let mut inv_sqrt = Vec::with_capacity(n);
    for i in 0..n {
        let d: f64 = mx.row(i).iter().sum();
        if d <= 0.0 {
            return Err(Error::ZeroRowSum { vertex: i });
        }
        inv_sqrt.push(1.0 / d.sqrt());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        mx[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
    }))
}

/// Laplacian spectral embedding `sqrt(n) U_L |Lambda_L|^{1/2}` of
/// `L = D^{-1/2} M D^{-1/2}`.
pub fn lse(mx: &DMatrix<f64>, m_embed: usize) -> Result<Embedding> {
    let l = normalized_laplacian(mx)?;
    let factor = (mx.nrows() as f64).sqrt();
    scaled_top(&l, m_embed, factor, EmbeddingKind::Lse)
}

/// Column `j`, row `i`: Euclidean distance from `query_row` to vertex `i`
/// in embedding `j`, skipping the query's own row.
pub fn personal_dissimilarity(
    embeddings: &[Embedding],
    query_row: usize,
) -> Result<PersonalDissimilarityMatrix> {
    let Some(first) = embeddings.first() else {
        return Err(Error::EmptyMatrix);
    };
    let n = first.y.nrows();
    if query_row >= n {
        return Err(Error::IndexOutOfRange {
            index: query_row,
            rows: n,
        });
    }
    let columns = embeddings
        .iter()
        .map(|e| {
            if e.y.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.y.nrows(),
                });
            }
            let q = e.y.row(query_row);
            Ok((0..n)
                .filter(|&i| i != query_row)
                .map(|i| (e.y.row(i) - q).norm())
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    PersonalDissimilarityMatrix::from_columns(&columns)
}
