//! File formats, persistence, CLI and HTTP service around `chronolex-core`.

pub mod cli;
pub mod corpus;
pub mod embeddings;
pub mod render;
pub mod server;
pub mod store;

mod io_util;

pub use chronolex_core as core;
pub use corpus::{stream_corpus, CorpusError, CorpusStream, ErrorPolicy, IngestSummary};
pub use embeddings::{load_static_embeddings, load_static_embeddings_path, LoadError};
pub use store::{load_index, save_index, Manifest, StoreError};
