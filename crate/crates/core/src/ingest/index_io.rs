//! Binary index file.
//!
//! Layout, all integers little-endian:
//!
//! | field            | encoding                                            |
//! |------------------|-----------------------------------------------------|
//! | magic            | `b"LSIM"`                                           |
//! | version          | u16                                                 |
//! | vocabulary       | u64 byte length, then UTF-8 terms each ending `\n`  |
//! | row count        | u64                                                 |
//! | row pointers     | (rows + 1) x u64                                    |
//! | column indices   | nnz x u32                                           |
//! | values           | nnz x f64                                           |
//! | idf              | vocabulary length x f64                             |
//! | registry         | u64 byte length, then a JSON array of entries       |
//! | checksum         | u32 CRC32 of every preceding byte                   |

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use super::store::DocEntry;
use crate::vectorizer::{CsrMatrix, TfidfIndex, VectorizeError, Vocabulary};

pub const MAGIC: &[u8; 4] = b"LSIM";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum IndexIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not an index file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported index format version {found} (expected {FORMAT_VERSION})")]
    UnsupportedVersion { found: u16 },
    #[error("index file truncated at byte {offset}: needed {needed} more byte(s)")]
    Truncated { offset: usize, needed: usize },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

impl From<VectorizeError> for IndexIoError {
    fn from(e: VectorizeError) -> Self {
        IndexIoError::Corrupt(e.to_string())
    }
}

/// Serializes the index into the binary layout.
pub fn encode_index(index: &TfidfIndex) -> Result<Vec<u8>, IndexIoError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());

    let mut vocab_block = Vec::new();
    for term in index.vocab().terms() {
        if term.contains('\n') {
            return Err(IndexIoError::Corrupt(format!("term {term:?} contains a newline")));
        }
        vocab_block.extend_from_slice(term.as_bytes());
        vocab_block.push(b'\n');
    }
    buf.extend_from_slice(&(vocab_block.len() as u64).to_le_bytes());
    buf.extend_from_slice(&vocab_block);

    let rows = index.rows();
    buf.extend_from_slice(&(rows.n_rows() as u64).to_le_bytes());
    for p in rows.row_ptr() {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    for c in rows.col_idx() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    for v in rows.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in index.idf() {
        buf.extend_from_slice(&v.to_le_bytes());
    }

    let registry = serde_json::to_vec(index.docs()).map_err(|e| IndexIoError::Corrupt(e.to_string()))?;
    buf.extend_from_slice(&(registry.len() as u64).to_le_bytes());
    buf.extend_from_slice(&registry);

    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    Ok(buf)
}

pub fn save_index(index: &TfidfIndex, path: &Path) -> Result<(), IndexIoError> {
    let bytes = encode_index(index)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    file.sync_all()?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<TfidfIndex, IndexIoError> {
    let bytes = std::fs::read(path)?;
    decode_index(&bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexIoError> {
        let available = self.bytes.len() - self.pos;
        if n > available {
            return Err(IndexIoError::Truncated {
                offset: self.bytes.len(),
                needed: n - available,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16, IndexIoError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, IndexIoError> {
        usize::try_from(self.u64()?).map_err(|_| IndexIoError::Corrupt("length overflows usize".into()))
    }

    /// Takes `count` fixed-width items, checking the byte length without overflow.
    fn array(&mut self, count: usize, width: usize) -> Result<&'a [u8], IndexIoError> {
        let n = count
            .checked_mul(width)
            .ok_or_else(|| IndexIoError::Corrupt("array length overflows".into()))?;
        self.take(n)
    }
}

/// Parses bytes produced by [`encode_index`]. Structural reads come first, so
/// a short file reports [`IndexIoError::Truncated`] rather than a checksum error.
pub fn decode_index(bytes: &[u8]) -> Result<TfidfIndex, IndexIoError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(MAGIC.len()).map_err(|_| IndexIoError::BadMagic)?;
    if magic != MAGIC {
        return Err(IndexIoError::BadMagic);
    }
    let version = cur.u16()?;
    if version != FORMAT_VERSION {
        return Err(IndexIoError::UnsupportedVersion { found: version });
    }

    let vocab_len = cur.len()?;
    let vocab_block = cur.take(vocab_len)?;
    let vocab_text =
        std::str::from_utf8(vocab_block).map_err(|e| IndexIoError::Corrupt(format!("vocabulary is not UTF-8: {e}")))?;
    let terms: Vec<&str> = match vocab_text.strip_suffix('\n') {
        Some(body) => body.split('\n').collect(),
        None if vocab_text.is_empty() => Vec::new(),
        None => return Err(IndexIoError::Corrupt("vocabulary block not newline-terminated".into())),
    };
    let vocab = Vocabulary::from_terms(terms.iter().copied());
    if vocab.len() != terms.len() || vocab.terms().iter().zip(&terms).any(|(a, b)| a != b) {
        return Err(IndexIoError::Corrupt("vocabulary not sorted and unique".into()));
    }

    let n_rows = cur.len()?;
    let row_count = n_rows
        .checked_add(1)
        .ok_or_else(|| IndexIoError::Corrupt("row count overflows".into()))?;
    let row_ptr: Vec<u64> = cur
        .array(row_count, 8)?
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let nnz =
        usize::try_from(*row_ptr.last().unwrap()).map_err(|_| IndexIoError::Corrupt("nnz overflows usize".into()))?;
    let col_idx: Vec<u32> = cur
        .array(nnz, 4)?
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let values: Vec<f64> = cur
        .array(nnz, 8)?
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let idf: Vec<f64> = cur
        .array(vocab.len(), 8)?
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();

    let registry_len = cur.len()?;
    let registry = cur.take(registry_len)?;
    let body_end = cur.pos;
    let stored = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
    if cur.pos != bytes.len() {
        return Err(IndexIoError::Corrupt(format!(
            "{} trailing byte(s) after checksum",
            bytes.len() - cur.pos
        )));
    }
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(IndexIoError::ChecksumMismatch { stored, computed });
    }

    let docs: Vec<DocEntry> =
        serde_json::from_slice(registry).map_err(|e| IndexIoError::Corrupt(format!("registry: {e}")))?;
    let matrix = CsrMatrix::from_parts(vocab.len(), row_ptr, col_idx, values)?;
    Ok(TfidfIndex::from_parts(matrix, idf, vocab, docs)?)
}
