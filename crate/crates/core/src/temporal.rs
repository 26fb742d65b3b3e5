//! The temporal embedding `g(t, w)`: for every slice `t` and middle word `w`,
//! the count-weighted mean of the combined context vectors of all n-grams
//! centred on `w` in slice `t`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::{NgramRecord, TimeSliceConfig};
use crate::embedding::StaticEmbeddingTable;

/// How the context words of an n-gram are combined into one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ContextOperator {
    /// Element-wise sum; output length `d`.
    Sum,
    /// Left-to-right concatenation of the `n - 1` context vectors; output
    /// length `(n - 1) * d`.
    Concat,
}

impl ContextOperator {
    pub fn output_dim(self, static_dim: usize, n: usize) -> usize {
        match self {
            ContextOperator::Sum => static_dim,
            ContextOperator::Concat => (n - 1) * static_dim,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContextOperator::Sum => "sum",
            ContextOperator::Concat => "concat",
        }
    }
}

impl fmt::Display for ContextOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContextOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(ContextOperator::Sum),
            "concat" => Ok(ContextOperator::Concat),
            other => Err(alloc::format!("unknown context operator {other:?} (expected sum or concat)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemporalError {
    #[error("record has {found} words, index expects {expected}")]
    MixedArity { expected: usize, found: usize },
    #[error("slice {slice} out of range (slice count {slice_count})")]
    SliceOutOfRange { slice: usize, slice_count: usize },
    #[error("year {0} outside the configured slice range")]
    YearOutOfRange(i32),
    #[error("invalid index: {0}")]
    Invalid(String),
}

/// Adds `weight * (combined context of record)` into `acc`.
fn accumulate_context(
    record: &NgramRecord,
    table: &StaticEmbeddingTable,
    op: ContextOperator,
    weight: f64,
    acc: &mut [f64],
) {
    let middle = record.middle_index();
    let dim = table.dim();
    let contexts = record.words.iter().enumerate().filter(|&(i, _)| i != middle);
    match op {
        ContextOperator::Sum => {
            for (_, word) in contexts {
                for (a, &v) in acc.iter_mut().zip(table.lookup(word)) {
                    *a += weight * v as f64;
                }
            }
        }
        ContextOperator::Concat => {
            for (slot, (_, word)) in contexts.enumerate() {
                let block = &mut acc[slot * dim..(slot + 1) * dim];
                for (a, &v) in block.iter_mut().zip(table.lookup(word)) {
                    *a += weight * v as f64;
                }
            }
        }
    }
}

/// Applies the context operator over every non-middle word of `record`,
/// with out-of-vocabulary words mapped to the unknown vector.
pub fn combine_context(record: &NgramRecord, table: &StaticEmbeddingTable, op: ContextOperator) -> Vec<f64> {
    let mut out = vec![0.0; op.output_dim(table.dim(), record.arity())];
    accumulate_context(record, table, op, 1.0, &mut out);
    out
}

/// One materialized `(slice, word)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    /// Total count of contributing n-grams.
    pub normalizer: u64,
    pub vector: Vec<f32>,
}

/// Immutable temporal embedding index.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalIndex {
    config: TimeSliceConfig,
    operator: ContextOperator,
    n: usize,
    static_dim: usize,
    dim_out: usize,
    slices: Vec<BTreeMap<String, IndexEntry>>,
}

impl TemporalIndex {
    /// Reassembles an index from its parts, checking every invariant.
    /// `entries` may come in any order.
    pub fn from_parts<I>(
        config: TimeSliceConfig,
        operator: ContextOperator,
        n: usize,
        static_dim: usize,
        entries: I,
    ) -> Result<Self, TemporalError>
    where
        I: IntoIterator<Item = (usize, String, IndexEntry)>,
    {
        config.validate().map_err(|e| TemporalError::Invalid(alloc::format!("{e}")))?;
        if n == 0 || n.is_multiple_of(2) || static_dim == 0 {
            return Err(TemporalError::Invalid(alloc::format!("n = {n}, d = {static_dim}")));
        }
        let dim_out = operator.output_dim(static_dim, n);
        if dim_out == 0 {
            return Err(TemporalError::Invalid("zero output dimension".into()));
        }
        let slice_count = config.slice_count();
        let mut slices = vec![BTreeMap::new(); slice_count];
        for (slice, word, entry) in entries {
            if slice >= slice_count {
                return Err(TemporalError::SliceOutOfRange { slice, slice_count });
            }
            if entry.normalizer == 0 || entry.vector.len() != dim_out || word.is_empty() {
                return Err(TemporalError::Invalid(alloc::format!("bad entry ({slice}, {word:?})")));
            }
            if slices[slice].insert(word, entry).is_some() {
                return Err(TemporalError::Invalid(alloc::format!("duplicate entry in slice {slice}")));
            }
        }
        Ok(TemporalIndex { config, operator, n, static_dim, dim_out, slices })
    }

    pub fn config(&self) -> &TimeSliceConfig {
        &self.config
    }

    pub fn operator(&self) -> ContextOperator {
        self.operator
    }

    /// N-gram order the index was built from.
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn static_dim(&self) -> usize {
        self.static_dim
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    pub fn entry(&self, slice: usize, word: &str) -> Result<Option<&IndexEntry>, TemporalError> {
        let slice_count = self.slices.len();
        let cells = self.slices.get(slice).ok_or(TemporalError::SliceOutOfRange { slice, slice_count })?;
        Ok(cells.get(word))
    }

    /// `g(slice, word)`, or `None` when the word never occurs as a middle
    /// word in that slice.
    pub fn temporal_vector(&self, slice: usize, word: &str) -> Result<Option<&[f32]>, TemporalError> {
        Ok(self.entry(slice, word)?.map(|e| e.vector.as_slice()))
    }

    /// All entries ordered by `(slice, word bytes)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &str, &IndexEntry)> {
        self.slices
            .iter()
            .enumerate()
            .flat_map(|(s, cells)| cells.iter().map(move |(w, e)| (s, w.as_str(), e)))
    }

    pub fn entry_count(&self) -> usize {
        self.slices.iter().map(BTreeMap::len).sum()
    }

    /// Number of distinct words with data in at least one slice.
    pub fn vocabulary_size(&self) -> usize {
        let mut words: Vec<&str> = self.slices.iter().flat_map(|c| c.keys().map(String::as_str)).collect();
        words.sort_unstable();
        words.dedup();
        words.len()
    }
}

struct Accumulator {
    count: u64,
    weighted: Vec<f64>,
}

/// Single-pass builder: accumulates `count * context` per `(slice, word)`
/// in `f64` and divides by the total count when finished.
pub struct TemporalIndexBuilder<'a> {
    table: &'a StaticEmbeddingTable,
    operator: ContextOperator,
    config: TimeSliceConfig,
    n: usize,
    dim_out: usize,
    cells: Vec<BTreeMap<String, Accumulator>>,
}

impl<'a> TemporalIndexBuilder<'a> {
    pub fn new(
        table: &'a StaticEmbeddingTable,
        operator: ContextOperator,
        config: TimeSliceConfig,
        n: usize,
    ) -> Result<Self, TemporalError> {
        config.validate().map_err(|e| TemporalError::Invalid(alloc::format!("{e}")))?;
        if n.is_multiple_of(2) {
            return Err(TemporalError::Invalid(alloc::format!("n-gram order {n} is not odd")));
        }
        let dim_out = operator.output_dim(table.dim(), n);
        if dim_out == 0 {
            return Err(TemporalError::Invalid("concat over unigrams has no context".into()));
        }
        let mut cells = Vec::new();
        cells.resize_with(config.slice_count(), BTreeMap::new);
        Ok(TemporalIndexBuilder { table, operator, config, n, dim_out, cells })
    }

    /// Adds a record already assigned to `slice`.
    pub fn push(&mut self, slice: usize, record: &NgramRecord) -> Result<(), TemporalError> {
        if record.arity() != self.n {
            return Err(TemporalError::MixedArity { expected: self.n, found: record.arity() });
        }
        let slice_count = self.cells.len();
        let cells = self.cells.get_mut(slice).ok_or(TemporalError::SliceOutOfRange { slice, slice_count })?;
        let middle = record.middle_word();
        let acc = match cells.get_mut(middle) {
            Some(acc) => acc,
            None => cells
                .entry(String::from(middle))
                .or_insert(Accumulator { count: 0, weighted: vec![0.0; self.dim_out] }),
        };
        acc.count += record.count;
        accumulate_context(record, self.table, self.operator, record.count as f64, &mut acc.weighted);
        Ok(())
    }

    /// Adds a record, deriving its slice from its year.
    pub fn push_record(&mut self, record: &NgramRecord) -> Result<(), TemporalError> {
        let slice = self.config.time_slice(record.year).map_err(|_| TemporalError::YearOutOfRange(record.year))?;
        self.push(slice, record)
    }

    pub fn extend<'r, I>(&mut self, records: I) -> Result<(), TemporalError>
    where
        I: IntoIterator<Item = (usize, &'r NgramRecord)>,
    {
        for (slice, record) in records {
            self.push(slice, record)?;
        }
        Ok(())
    }

    pub fn finish(self) -> TemporalIndex {
        let slices = self
            .cells
            .into_iter()
            .map(|cells| {
                cells
                    .into_iter()
                    .map(|(word, acc)| {
                        let total = acc.count as f64;
                        let vector = acc.weighted.iter().map(|&x| (x / total) as f32).collect();
                        (word, IndexEntry { normalizer: acc.count, vector })
                    })
                    .collect()
            })
            .collect();
        TemporalIndex {
            config: self.config,
            operator: self.operator,
            n: self.n,
            static_dim: self.table.dim(),
            dim_out: self.dim_out,
            slices,
        }
    }
}

/// Builds an index from `(slice, record)` pairs in one pass.
pub fn build_temporal_index<'r, I>(
    records: I,
    table: &StaticEmbeddingTable,
    operator: ContextOperator,
    config: TimeSliceConfig,
    n: usize,
) -> Result<TemporalIndex, TemporalError>
where
    I: IntoIterator<Item = (usize, &'r NgramRecord)>,
{
    let mut builder = TemporalIndexBuilder::new(table, operator, config, n)?;
    builder.extend(records)?;
    Ok(builder.finish())
}
