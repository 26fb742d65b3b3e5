#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use chronolex::corpus::{CorpusStream, ErrorPolicy};
use chronolex::embeddings::load_static_embeddings_path;
use chronolex::server::{router, AppState};
use chronolex_core::query::QueryOptions;
use chronolex_core::{ContextOperator, NgramRecord, StaticEmbeddingTable, TemporalIndex, TemporalIndexBuilder, TimeSliceConfig};
use http_body_util::BodyExt;
use rand::Rng;
use tower::ServiceExt;

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

/// The bundled toy corpus under the default 1800-2008 / 5-year slicing.
pub fn toy_index() -> TemporalIndex {
    let table = load_static_embeddings_path(&testdata("toy.vec"), Some("<unk>")).unwrap();
    let config = TimeSliceConfig::default();
    let stream = CorpusStream::open(&[testdata("toy.tsv")], 5, config, ErrorPolicy::Skip).unwrap();
    let mut builder = TemporalIndexBuilder::new(&table, ContextOperator::Sum, config, 5).unwrap();
    for item in stream {
        let (slice, record) = item.unwrap();
        builder.push(slice, &record).unwrap();
    }
    builder.finish()
}

pub fn app(index: TemporalIndex) -> axum::Router {
    router(Arc::new(AppState::new(index, QueryOptions::default(), None)))
}

pub async fn get(app: &axum::Router, uri: &str) -> (StatusCode, String) {
    let response = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

/// A random corpus: table of `dim` over part of a `vocab`-word vocabulary,
/// `records` 5-grams with years across the default slice range.
pub struct RandomCorpus {
    pub table: StaticEmbeddingTable,
    pub records: Vec<(usize, NgramRecord)>,
    pub config: TimeSliceConfig,
}

pub fn random_corpus<R: Rng>(rng: &mut R, records: usize, vocab: usize, dim: usize, max_count: u64) -> RandomCorpus {
    let config = TimeSliceConfig::default();
    // roughly one word in ten is left out of the table to exercise the fallback
    let entries: Vec<(String, Vec<f32>)> = (0..vocab)
        .filter(|i| i % 10 != 7)
        .map(|i| (format!("v{i}"), (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()))
        .collect();
    let table = StaticEmbeddingTable::from_entries(dim, entries, None).unwrap();
    let records = (0..records)
        .map(|_| {
            let words = (0..5).map(|_| format!("v{}", rng.random_range(0..vocab))).collect();
            let year = rng.random_range(config.start_year..=config.end_year);
            let record = NgramRecord { words, year, count: rng.random_range(1..=max_count) };
            (config.time_slice(year).unwrap(), record)
        })
        .collect();
    RandomCorpus { table, records, config }
}
