//! Allocation-only core of chronolex.
//!
//! Turns a static word-embedding table and a timestamped n-gram corpus into
//! per-time-slice word vectors, projects query words into the plane with
//! classical (Torgerson) multidimensional scaling, and rasterizes the
//! resulting per-word paths into integer frame sequences.
//!
//! Everything in this crate is pure computation over in-memory values. File
//! formats, persistence, the CLI and the HTTP service live in the `chronolex`
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod embedding;
pub mod linalg;
pub mod mds;
pub mod query;
pub mod temporal;
pub mod trajectory;

pub use corpus::{NgramRecord, ParseError, SliceError, TimeSliceConfig};
pub use embedding::{EmbeddingError, StaticEmbeddingTable};
pub use mds::{classical_mds, distance_matrix, evaluate_stress, DistanceMatrix, MdsError, PointKey, ProjectionResult};
pub use query::{run_query, QueryError, QueryOptions, QueryRequest, QueryResponse};
pub use temporal::{
    build_temporal_index, combine_context, ContextOperator, IndexEntry, TemporalError, TemporalIndex, TemporalIndexBuilder,
};
pub use trajectory::{bresenham, build_trajectories, quantize, GridPoint, Trajectory};
