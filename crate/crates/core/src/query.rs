//! End-to-end query: temporal vectors for every `(word, slice)`, distance
//! matrix, classical MDS, grid quantization and trajectories.

use alloc::string::String;
use alloc::vec::Vec;
use libm::sqrt;

use crate::mds::{classical_mds, distance_matrix, DistanceMatrix, MdsError, PointKey, ProjectionResult};
use crate::temporal::TemporalIndex;
use crate::trajectory::{build_trajectories, quantize, TrajectoryError};

/// Upper bound on query words; the eigensolve is cubic in `k * slices`.
pub const MAX_QUERY_WORDS: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("query has no words")]
    EmptyQuery,
    #[error("query has {0} words, at most {MAX_QUERY_WORDS} allowed")]
    TooManyWords(usize),
    #[error("query contains a blank word")]
    BlankWord,
    #[error("word {0:?} appears more than once")]
    DuplicateWord(String),
    #[error("none of the query words has data in any slice")]
    AllPointsMissing,
    #[error("invalid grid: {0}")]
    InvalidGrid(TrajectoryError),
    #[error("projection failed: {0}")]
    Projection(MdsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryRequest {
    pub words: Vec<String>,
    /// `(width, height)`; [`QueryOptions::grid`] when absent.
    pub grid: Option<(u32, u32)>,
    pub include_frames: bool,
}

impl QueryRequest {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        QueryRequest { words: words.into_iter().map(Into::into).collect(), grid: None, include_frames: false }
    }

    pub fn with_frames(mut self, include: bool) -> Self {
        self.include_frames = include;
        self
    }

    pub fn with_grid(mut self, width: u32, height: u32) -> Self {
        self.grid = Some((width, height));
        self
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        if self.words.is_empty() {
            return Err(QueryError::EmptyQuery);
        }
        if self.words.len() > MAX_QUERY_WORDS {
            return Err(QueryError::TooManyWords(self.words.len()));
        }
        for (i, word) in self.words.iter().enumerate() {
            if word.trim().is_empty() {
                return Err(QueryError::BlankWord);
            }
            if self.words[..i].contains(word) {
                return Err(QueryError::DuplicateWord(word.clone()));
            }
        }
        Ok(())
    }
}

/// Engine-side settings that are not part of a request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOptions {
    pub grid: (u32, u32),
    pub margin: f64,
    /// Scale temporal vectors to unit length before measuring distances.
    pub normalize: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions { grid: (1000, 1000), margin: 0.05, normalize: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrajectoryView {
    pub word: String,
    pub empty: bool,
    pub keyframe_slices: Vec<usize>,
    pub frames: Vec<[i32; 2]>,
    pub segment_offsets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostics {
    pub eigenvalues: Vec<f64>,
    pub stress: f64,
    pub stress_unordered: f64,
    pub excluded_points: usize,
}

/// `points[word][slice]` is a grid position or `None` for a slice without
/// data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QueryResponse {
    pub slice_labels: Vec<String>,
    pub points: Vec<Vec<Option<[i32; 2]>>>,
    pub trajectories: Option<Vec<TrajectoryView>>,
    pub diagnostics: Diagnostics,
}

/// Present `(key, vector)` pairs in word-major order, plus the keys with
/// no data.
pub fn gather_points(
    index: &TemporalIndex,
    words: &[String],
    normalize: bool,
) -> (Vec<(PointKey, Vec<f64>)>, Vec<PointKey>) {
    let mut present = Vec::new();
    let mut missing = Vec::new();
    for (i, word) in words.iter().enumerate() {
        for t in 0..index.slice_count() {
            let key = PointKey::new(i, t);
            match index.temporal_vector(t, word).ok().flatten() {
                Some(v) => {
                    let mut v: Vec<f64> = v.iter().map(|&x| x as f64).collect();
                    if normalize {
                        let norm = sqrt(v.iter().map(|x| x * x).sum());
                        if norm > 0.0 {
                            v.iter_mut().for_each(|x| *x /= norm);
                        }
                    }
                    present.push((key, v));
                }
                None => missing.push(key),
            }
        }
    }
    (present, missing)
}

/// Distance matrix and projection for a validated request.
pub fn project(
    index: &TemporalIndex,
    request: &QueryRequest,
    options: &QueryOptions,
) -> Result<(DistanceMatrix, ProjectionResult), QueryError> {
    request.validate()?;
    let (present, missing) = gather_points(index, &request.words, options.normalize);
    if present.is_empty() {
        return Err(QueryError::AllPointsMissing);
    }
    let a = distance_matrix(&present).map_err(QueryError::Projection)?;
    let mut projection = classical_mds(&a, 2).map_err(QueryError::Projection)?;
    projection.missing = missing;
    Ok((a, projection))
}

/// Runs the whole pipeline. Deterministic for a fixed index and request.
pub fn run_query(index: &TemporalIndex, request: &QueryRequest, options: &QueryOptions) -> Result<QueryResponse, QueryError> {
    let (width, height) = request.grid.unwrap_or(options.grid);
    let (_, projection) = project(index, request, options)?;
    let plane = projection.keys.iter().enumerate().map(|(i, key)| {
        let p = projection.point(i);
        (*key, [p[0], p[1]])
    });
    let grid = quantize(plane, width, height, options.margin).map_err(QueryError::InvalidGrid)?;

    let slice_count = index.slice_count();
    let k = request.words.len();
    let mut points = alloc::vec![alloc::vec![None; slice_count]; k];
    for (key, p) in &grid {
        points[key.word_index][key.slice_index] = Some([p.x, p.y]);
    }
    let trajectories = request.include_frames.then(|| {
        build_trajectories(&grid, k, slice_count)
            .into_iter()
            .map(|t| TrajectoryView {
                word: request.words[t.word_index].clone(),
                empty: t.is_empty(),
                keyframe_slices: t.keyframes.iter().map(|(s, _)| *s).collect(),
                frames: t.frames.iter().map(|p| [p.x, p.y]).collect(),
                segment_offsets: t.segment_offsets,
            })
            .collect()
    });
    Ok(QueryResponse {
        slice_labels: index.config().labels(),
        points,
        trajectories,
        diagnostics: Diagnostics {
            eigenvalues: projection.eigenvalues.clone(),
            stress: projection.stress,
            stress_unordered: projection.stress_unordered(),
            excluded_points: projection.missing.len(),
        },
    })
}
