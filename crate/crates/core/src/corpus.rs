//! N-gram records and the year -> time-slice mapping.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Default n-gram order.
pub const DEFAULT_ARITY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("year {year} outside [{start}, {end}]")]
    YearOutOfRange { year: i32, start: i32, end: i32 },
    #[error("invalid slice configuration: start {start}, end {end}, width {width}")]
    InvalidConfig { start: i32, end: i32, width: u32 },
}

/// Partition of `[start_year, end_year]` into consecutive buckets of
/// `width_years` years. The last bucket is truncated at `end_year`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeSliceConfig {
    pub start_year: i32,
    pub end_year: i32,
    pub width_years: u32,
}

impl Default for TimeSliceConfig {
    fn default() -> Self {
        TimeSliceConfig { start_year: 1800, end_year: 2008, width_years: 5 }
    }
}

impl TimeSliceConfig {
    pub fn new(start_year: i32, end_year: i32, width_years: u32) -> Result<Self, SliceError> {
        let config = TimeSliceConfig { start_year, end_year, width_years };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SliceError> {
        let span = self.end_year as i64 - self.start_year as i64 + 1;
        // entries.bin stores slices as u16
        let slices = if self.width_years == 0 || span < 1 { 0 } else { (span + self.width_years as i64 - 1) / self.width_years as i64 };
        if slices == 0 || slices > u16::MAX as i64 + 1 {
            return Err(SliceError::InvalidConfig {
                start: self.start_year,
                end: self.end_year,
                width: self.width_years,
            });
        }
        Ok(())
    }

    /// `ceil((end - start + 1) / width)`.
    pub fn slice_count(&self) -> usize {
        let span = (self.end_year as i64 - self.start_year as i64 + 1) as usize;
        span.div_ceil(self.width_years as usize)
    }

    /// Index of the slice containing `year`.
    pub fn time_slice(&self, year: i32) -> Result<usize, SliceError> {
        if year < self.start_year || year > self.end_year {
            return Err(SliceError::YearOutOfRange { year, start: self.start_year, end: self.end_year });
        }
        Ok(((year as i64 - self.start_year as i64) / self.width_years as i64) as usize)
    }

    /// Inclusive `(first, last)` years covered by `slice`.
    pub fn slice_bounds(&self, slice: usize) -> Option<(i32, i32)> {
        if slice >= self.slice_count() {
            return None;
        }
        let first = self.start_year as i64 + slice as i64 * self.width_years as i64;
        let last = (first + self.width_years as i64 - 1).min(self.end_year as i64);
        Some((first as i32, last as i32))
    }

    /// Human-readable label such as `1800-1804`.
    pub fn slice_label(&self, slice: usize) -> Option<String> {
        self.slice_bounds(slice).map(|(a, b)| if a == b { a.to_string() } else { format!("{a}-{b}") })
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.slice_count()).filter_map(|s| self.slice_label(s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("n-gram order must be odd and positive, got {0}")]
    EvenArity(usize),
    #[error("expected {expected} words, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("malformed year {0:?}")]
    MalformedYear(String),
    #[error("malformed count {0:?}")]
    MalformedCount(String),
}

/// One corpus datum: `n` words, the year they were observed, and a count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramRecord {
    pub words: Vec<String>,
    pub year: i32,
    pub count: u64,
}

impl NgramRecord {
    pub fn arity(&self) -> usize {
        self.words.len()
    }

    /// Position of the middle word (0-based).
    pub fn middle_index(&self) -> usize {
        self.words.len() / 2
    }

    pub fn middle_word(&self) -> &str {
        &self.words[self.middle_index()]
    }

    /// Canonical TSV form: `w1 w2 .. wn<TAB>year<TAB>count`.
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.words.join(" "), self.year, self.count)
    }
}

/// Parses one TSV corpus line. Fields past the third are ignored.
pub fn parse_ngram_line(line: &str, n: usize) -> Result<NgramRecord, ParseError> {
    if n.is_multiple_of(2) {
        return Err(ParseError::EvenArity(n));
    }
    let line = line.strip_suffix('\n').unwrap_or(line);
    let mut fields = line.split('\t');
    let gram = fields.next().unwrap_or_default();
    let words: Vec<&str> = gram.split(' ').collect();
    if words.len() != n || words.iter().any(|w| w.is_empty()) {
        let found = words.iter().filter(|w| !w.is_empty()).count();
        return Err(ParseError::WrongArity { expected: n, found });
    }
    let year_field = fields.next().unwrap_or_default();
    let year = parse_digits(year_field)
        .and_then(|y| i32::try_from(y).ok())
        .ok_or_else(|| ParseError::MalformedYear(year_field.to_string()))?;
    let count_field = fields.next().unwrap_or_default();
    let count = parse_digits(count_field)
        .filter(|&c| c >= 1)
        .ok_or_else(|| ParseError::MalformedCount(count_field.to_string()))?;
    Ok(NgramRecord { words: words.into_iter().map(String::from).collect(), year, count })
}

fn parse_digits(field: &str) -> Option<u64> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    field.parse().ok()
}
