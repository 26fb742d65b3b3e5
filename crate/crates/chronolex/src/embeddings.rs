//! Loader for whitespace-separated text embedding files.

use std::io::{self, BufRead};
use std::path::Path;

use chronolex_core::embedding::TableParser;
use chronolex_core::{EmbeddingError, StaticEmbeddingTable};

use crate::io_util::open_text;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Format(#[from] EmbeddingError),
}

/// Reads `word v1 .. vd` lines (optionally preceded by a `COUNT DIM`
/// header). See [`StaticEmbeddingTable::parse_lines`] for the rules.
pub fn load_static_embeddings<R: BufRead>(mut reader: R, unknown_token: Option<&str>) -> Result<StaticEmbeddingTable, LoadError> {
    let mut parser = TableParser::new();
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        parser.push_line(line_no, &line)?;
    }
    Ok(parser.finish(unknown_token)?)
}

/// Like [`load_static_embeddings`], reading a plain or gzip-compressed file.
pub fn load_static_embeddings_path(path: &Path, unknown_token: Option<&str>) -> Result<StaticEmbeddingTable, LoadError> {
    load_static_embeddings(open_text(path)?, unknown_token)
}
