//! Pairwise distances between `(word, slice)` points and classical
//! (Torgerson) multidimensional scaling into a low-dimensional plane.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::linalg::{symmetric_top_eigen, EigenError};

/// A `(word, slice)` point of a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointKey {
    pub word_index: usize,
    pub slice_index: usize,
}

impl PointKey {
    pub fn new(word_index: usize, slice_index: usize) -> Self {
        PointKey { word_index, slice_index }
    }

    /// Word-major flat position: `word_index * slice_count + slice_index`.
    pub fn flat(&self, slice_count: usize) -> usize {
        self.word_index * slice_count + self.slice_index
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MdsError {
    #[error("no points")]
    Empty,
    #[error("vector of length {found} does not match length {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinates and distance matrix disagree on point keys")]
    KeyMismatch,
    #[error("target dimension must be positive")]
    InvalidTargetDim,
    #[error("non-finite input")]
    NonFinite,
    #[error("eigensolver failure: {0}")]
    NumericalFailure(EigenError),
}

/// Symmetric matrix of Euclidean distances between present points.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    keys: Vec<PointKey>,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[PointKey] {
        &self.keys
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.keys.len() + j]
    }

    /// Row-major `m x m` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.keys.len();
        &self.data[i * m..(i + 1) * m]
    }
}

/// `A[i][j] = ||v_i - v_j||_2`, each unordered pair computed once.
pub fn distance_matrix<V: AsRef<[f64]>>(points: &[(PointKey, V)]) -> Result<DistanceMatrix, MdsError> {
    let first = points.first().ok_or(MdsError::Empty)?;
    let len = first.1.as_ref().len();
    for (_, v) in points {
        let v = v.as_ref();
        if v.len() != len {
            return Err(MdsError::DimensionMismatch { expected: len, found: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(MdsError::NonFinite);
        }
    }
    let m = points.len();
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        let vi = points[i].1.as_ref();
        for j in i + 1..m {
            let vj = points[j].1.as_ref();
            let sq: f64 = vi.iter().zip(vj).map(|(a, b)| (a - b) * (a - b)).sum();
            let d = sqrt(sq);
            data[i * m + j] = d;
            data[j * m + i] = d;
        }
    }
    Ok(DistanceMatrix { keys: points.iter().map(|(k, _)| *k).collect(), data })
}

/// Output of [`classical_mds`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProjectionResult {
    pub target_dim: usize,
    /// Same order as the distance matrix keys.
    pub keys: Vec<PointKey>,
    /// Row-major `keys.len() x target_dim`.
    pub coords: Vec<f64>,
    /// Leading eigenvalues of the double-centred matrix before clamping,
    /// descending, at most `target_dim` of them.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue of the double-centred matrix before clamping.
    pub smallest_eigenvalue: f64,
    /// Points left out upstream for lack of data.
    pub missing: Vec<PointKey>,
    /// Squared distance error summed over ordered pairs.
    pub stress: f64,
}

impl ProjectionResult {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.target_dim..(i + 1) * self.target_dim]
    }

    pub fn coords_of(&self, key: PointKey) -> Option<&[f64]> {
        self.keys.iter().position(|k| *k == key).map(|i| self.point(i))
    }

    /// Stress summed over unordered pairs (half the canonical value).
    pub fn stress_unordered(&self) -> f64 {
        self.stress / 2.0
    }
}

/// `B = -1/2 J A^(2) J` with `J = I - 11^T/m`.
pub fn double_center(a: &DistanceMatrix) -> Vec<f64> {
    let m = a.size();
    let mut b: Vec<f64> = a.as_slice().iter().map(|d| d * d).collect();
    let row_means: Vec<f64> = (0..m).map(|i| b[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64).collect();
    let grand = row_means.iter().sum::<f64>() / m as f64;
    for i in 0..m {
        for j in 0..m {
            b[i * m + j] = -0.5 * (b[i * m + j] - row_means[i] - row_means[j] + grand);
        }
    }
    // symmetric by construction up to summation order; enforce it exactly
    for i in 0..m {
        for j in 0..i {
            let avg = 0.5 * (b[i * m + j] + b[j * m + i]);
            b[i * m + j] = avg;
            b[j * m + i] = avg;
        }
    }
    b
}

/// Classical MDS: double-centre the squared distances, take the top
/// `target_dim` eigenpairs, clamp negative eigenvalues to zero and scale
/// eigenvectors by the square root of their eigenvalue. Each output axis is
/// oriented so its first non-negligible loading is positive.
pub fn classical_mds(a: &DistanceMatrix, target_dim: usize) -> Result<ProjectionResult, MdsError> {
    if target_dim == 0 {
        return Err(MdsError::InvalidTargetDim);
    }
    let m = a.size();
    if m == 0 {
        return Err(MdsError::Empty);
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(MdsError::NonFinite);
    }
    let b = double_center(a);
    let eig = symmetric_top_eigen(&b, m, target_dim).map_err(MdsError::NumericalFailure)?;

    let mut coords = vec![0.0; m * target_dim];
    for (axis, (lambda, vector)) in eig.values.iter().zip(&eig.vectors).enumerate() {
        if *lambda <= 0.0 {
            continue;
        }
        let scale = sqrt(*lambda);
        let peak = vector.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let sign = match vector.iter().find(|x| x.abs() > 1e-9 * peak) {
            Some(x) if *x < 0.0 => -1.0,
            _ => 1.0,
        };
        for (i, v) in vector.iter().enumerate() {
            coords[i * target_dim + axis] = sign * scale * v;
        }
    }

    let stress = stress_of(&coords, target_dim, a);
    Ok(ProjectionResult {
        target_dim,
        keys: a.keys().to_vec(),
        coords,
        eigenvalues: eig.values.iter().take(target_dim).copied().collect(),
        smallest_eigenvalue: eig.values.last().copied().unwrap_or(0.0),
        missing: Vec::new(),
        stress,
    })
}

fn stress_of(coords: &[f64], dim: usize, a: &DistanceMatrix) -> f64 {
    let m = a.size();
    let mut total = 0.0;
    for i in 0..m {
        let xi = &coords[i * dim..(i + 1) * dim];
        for j in 0..m {
            if i == j {
                continue;
            }
            let xj = &coords[j * dim..(j + 1) * dim];
            let d = sqrt(xi.iter().zip(xj).map(|(p, q)| (p - q) * (p - q)).sum());
            let r = d - a.get(i, j);
            total += r * r;
        }
    }
    total
}

/// Sum over ordered pairs `i != j` of `(||x_i - x_j|| - A_ij)^2`.
///
/// `coords` is row-major `keys.len() x dim` and `keys` must equal the
/// matrix keys in order.
pub fn evaluate_stress(keys: &[PointKey], coords: &[f64], dim: usize, a: &DistanceMatrix) -> Result<f64, MdsError> {
    if keys != a.keys() || dim == 0 || coords.len() != keys.len() * dim {
        return Err(MdsError::KeyMismatch);
    }
    Ok(stress_of(coords, dim, a))
}
