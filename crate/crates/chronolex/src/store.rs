//! On-disk index: a directory with `manifest.json` and `entries.bin`.
//!
//! `entries.bin` holds the entries sorted by `(slice, word bytes)`:
//!
//! ```text
//! varint   word length (LEB128)
//! [u8]     word, UTF-8
//! u16 LE   slice
//! u64 LE   normalizer
//! [f32 LE] dim_out components
//! ```
//!
//! followed by a little-endian CRC-32 (IEEE) over every preceding byte.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use chronolex_core::{ContextOperator, IndexEntry, TemporalIndex, TimeSliceConfig};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;
pub const CHECKSUM_ALGORITHM: &str = "crc32-ieee";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ENTRIES_FILE: &str = "entries.bin";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported index format version {found} (expected {FORMAT_VERSION})")]
    FormatVersionMismatch { found: u32 },
    #[error("entries checksum mismatch")]
    ChecksumMismatch,
    #[error("malformed manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub n: usize,
    pub operator: ContextOperator,
    pub dim: usize,
    pub dim_out: usize,
    pub slices: TimeSliceConfig,
    pub entry_count: usize,
    pub checksum: String,
}

impl Manifest {
    pub fn for_index(index: &TemporalIndex) -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            n: index.arity(),
            operator: index.operator(),
            dim: index.static_dim(),
            dim_out: index.dim_out(),
            slices: *index.config(),
            entry_count: index.entry_count(),
            checksum: CHECKSUM_ALGORITHM.to_string(),
        }
    }
}

fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    while value >= 0x80 {
        out.push((value as u8) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Option<u64> {
    let mut value = 0u64;
    for shift in (0..64).step_by(7) {
        let b = *bytes.get(*pos)?;
        *pos += 1;
        value |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return Some(value);
        }
    }
    None
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, len: usize) -> Option<&'a [u8]> {
    let end = pos.checked_add(len)?;
    let out = bytes.get(*pos..end)?;
    *pos = end;
    Some(out)
}

/// Serializes the entries section, checksum included.
pub fn encode_entries(index: &TemporalIndex) -> Vec<u8> {
    let mut out = Vec::new();
    for (slice, word, entry) in index.entries() {
        write_varint(&mut out, word.len() as u64);
        out.extend_from_slice(word.as_bytes());
        out.extend_from_slice(&(slice as u16).to_le_bytes());
        out.extend_from_slice(&entry.normalizer.to_le_bytes());
        for x in &entry.vector {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Parses an entries section against `manifest`.
pub fn decode_entries(manifest: &Manifest, bytes: &[u8]) -> Result<TemporalIndex, StoreError> {
    if bytes.len() < 4 {
        return Err(StoreError::ChecksumMismatch);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4-byte tail"));
    if crc32fast::hash(body) != stored {
        return Err(StoreError::ChecksumMismatch);
    }

    let corrupt = |what: &str| StoreError::Corrupt(what.to_string());
    let mut entries = Vec::with_capacity(manifest.entry_count);
    let mut pos = 0;
    let mut previous: Option<(u16, &[u8])> = None;
    while pos < body.len() {
        let len = read_varint(body, &mut pos).ok_or_else(|| corrupt("bad word length"))?;
        let word = take(body, &mut pos, usize::try_from(len).map_err(|_| corrupt("word too long"))?)
            .ok_or_else(|| corrupt("truncated word"))?;
        let slice = u16::from_le_bytes(take(body, &mut pos, 2).ok_or_else(|| corrupt("truncated slice"))?.try_into().unwrap());
        let normalizer =
            u64::from_le_bytes(take(body, &mut pos, 8).ok_or_else(|| corrupt("truncated normalizer"))?.try_into().unwrap());
        let raw = take(body, &mut pos, manifest.dim_out * 4).ok_or_else(|| corrupt("truncated vector"))?;
        let vector = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        if previous.is_some_and(|prev| prev >= (slice, word)) {
            return Err(corrupt("entries out of order"));
        }
        previous = Some((slice, word));
        let word = std::str::from_utf8(word).map_err(|_| corrupt("word is not UTF-8"))?.to_string();
        entries.push((slice as usize, word, IndexEntry { normalizer, vector }));
    }
    if entries.len() != manifest.entry_count {
        return Err(StoreError::Corrupt(format!(
            "manifest lists {} entries, file holds {}",
            manifest.entry_count,
            entries.len()
        )));
    }
    let index = TemporalIndex::from_parts(manifest.slices, manifest.operator, manifest.n, manifest.dim, entries)
        .map_err(|e| StoreError::Corrupt(e.to_string()))?;
    if index.dim_out() != manifest.dim_out {
        return Err(corrupt("dim_out disagrees with operator and dim"));
    }
    Ok(index)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Writes `index` into `dir`, creating the directory if needed.
pub fn save_index(index: &TemporalIndex, dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir)?;
    write_atomically(&dir.join(ENTRIES_FILE), &encode_entries(index))?;
    let mut manifest = serde_json::to_vec_pretty(&Manifest::for_index(index))?;
    manifest.push(b'\n');
    write_atomically(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(())
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, StoreError> {
    let raw = fs::read(dir.join(MANIFEST_FILE))?;
    let value: serde_json::Value = serde_json::from_slice(&raw)?;
    if let Some(found) = value.get("format_version").and_then(|v| v.as_u64()) {
        if found != FORMAT_VERSION as u64 {
            return Err(StoreError::FormatVersionMismatch { found: found.min(u32::MAX as u64) as u32 });
        }
    }
    let manifest: Manifest = serde_json::from_value(value)?;
    if manifest.checksum != CHECKSUM_ALGORITHM {
        return Err(StoreError::Corrupt(format!("unknown checksum algorithm {:?}", manifest.checksum)));
    }
    Ok(manifest)
}

/// Reads an index written by [`save_index`].
pub fn load_index(dir: &Path) -> Result<TemporalIndex, StoreError> {
    let manifest = load_manifest(dir)?;
    let bytes = fs::read(dir.join(ENTRIES_FILE))?;
    decode_entries(&manifest, &bytes)
}
