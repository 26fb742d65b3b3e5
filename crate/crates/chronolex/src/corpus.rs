//! Streaming reader for TSV n-gram corpus shards.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, BufRead};
use std::path::Path;

use chronolex_core::corpus::parse_ngram_line;
use chronolex_core::{NgramRecord, ParseError, TimeSliceConfig};

use crate::io_util::{maybe_gunzip, open_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorPolicy {
    /// Count bad or out-of-range lines and keep going.
    #[default]
    Skip,
    /// Stop at the first bad or out-of-range line.
    Abort,
}

impl std::str::FromStr for ErrorPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip" => Ok(ErrorPolicy::Skip),
            "abort" => Ok(ErrorPolicy::Abort),
            other => Err(format!("unknown error policy {other:?} (expected skip or abort)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestSummary {
    pub lines: u64,
    pub records: u64,
    pub malformed: u64,
    pub out_of_range: u64,
}

impl IngestSummary {
    pub fn skipped(&self) -> u64 {
        self.malformed + self.out_of_range
    }
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lines, {} records, {} malformed, {} out of range",
            self.lines, self.records, self.malformed, self.out_of_range
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{source_name}: {error}")]
    Io { source_name: String, error: io::Error },
    #[error("{source_name}:{line}: {error}")]
    Parse { source_name: String, line: u64, error: ParseError },
    #[error("{source_name}:{line}: year {year} outside the slice range")]
    OutOfRange { source_name: String, line: u64, year: i32 },
}

struct Source {
    name: String,
    reader: Box<dyn BufRead + Send>,
    line: u64,
}

/// Iterator over `(slice, record)` pairs from a list of sources, read one
/// after another. Records of a single source keep their file order.
pub struct CorpusStream {
    sources: VecDeque<Source>,
    n: usize,
    config: TimeSliceConfig,
    policy: ErrorPolicy,
    summary: IngestSummary,
    buf: String,
    done: bool,
}

impl CorpusStream {
    pub fn new<I, R>(sources: I, n: usize, config: TimeSliceConfig, policy: ErrorPolicy) -> Self
    where
        I: IntoIterator<Item = (String, R)>,
        R: BufRead + Send + 'static,
    {
        let sources = sources
            .into_iter()
            .map(|(name, reader)| Source { name, reader: Box::new(reader), line: 0 })
            .collect();
        CorpusStream { sources, n, config, policy, summary: IngestSummary::default(), buf: String::new(), done: false }
    }

    /// Opens every path (plain or gzip) up front, so a missing file fails
    /// before any ingestion work.
    pub fn open<P: AsRef<Path>>(paths: &[P], n: usize, config: TimeSliceConfig, policy: ErrorPolicy) -> Result<Self, CorpusError> {
        let mut sources = Vec::with_capacity(paths.len());
        for path in paths {
            let path = path.as_ref();
            let name = path.display().to_string();
            let reader = open_text(path).map_err(|error| CorpusError::Io { source_name: name.clone(), error })?;
            sources.push((name, reader));
        }
        Ok(Self::new(sources, n, config, policy))
    }

    /// Same as [`CorpusStream::new`] but detects gzip on each reader.
    pub fn from_readers<I, R>(sources: I, n: usize, config: TimeSliceConfig, policy: ErrorPolicy) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (String, R)>,
        R: BufRead + Send + 'static,
    {
        let mut opened = Vec::new();
        for (name, reader) in sources {
            let reader = maybe_gunzip(reader).map_err(|error| CorpusError::Io { source_name: name.clone(), error })?;
            opened.push((name, reader));
        }
        Ok(Self::new(opened, n, config, policy))
    }

    pub fn summary(&self) -> IngestSummary {
        self.summary
    }

    fn fail(&mut self, err: CorpusError) -> Option<Result<(usize, NgramRecord), CorpusError>> {
        self.done = true;
        Some(Err(err))
    }
}

impl Iterator for CorpusStream {
    type Item = Result<(usize, NgramRecord), CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let source = self.sources.front_mut()?;
            self.buf.clear();
            match source.reader.read_line(&mut self.buf) {
                Ok(0) => {
                    self.sources.pop_front();
                    continue;
                }
                Ok(_) => {}
                Err(error) => {
                    let source_name = source.name.clone();
                    return self.fail(CorpusError::Io { source_name, error });
                }
            }
            source.line += 1;
            let line = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            if line.is_empty() {
                continue;
            }
            self.summary.lines += 1;
            let record = match parse_ngram_line(line, self.n) {
                Ok(r) => r,
                Err(error) => {
                    self.summary.malformed += 1;
                    if self.policy == ErrorPolicy::Abort {
                        let err = CorpusError::Parse { source_name: source.name.clone(), line: source.line, error };
                        return self.fail(err);
                    }
                    continue;
                }
            };
            match self.config.time_slice(record.year) {
                Ok(slice) => {
                    self.summary.records += 1;
                    return Some(Ok((slice, record)));
                }
                Err(_) => {
                    self.summary.out_of_range += 1;
                    if self.policy == ErrorPolicy::Abort {
                        let err =
                            CorpusError::OutOfRange { source_name: source.name.clone(), line: source.line, year: record.year };
                        return self.fail(err);
                    }
                }
            }
        }
        None
    }
}

/// Opens `paths` and returns the record stream.
pub fn stream_corpus<P: AsRef<Path>>(
    paths: &[P],
    n: usize,
    config: TimeSliceConfig,
    policy: ErrorPolicy,
) -> Result<CorpusStream, CorpusError> {
    CorpusStream::open(paths, n, config, policy)
}
