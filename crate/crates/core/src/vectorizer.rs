//! Vocabulary construction and the L2-normalized TF-IDF matrix.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{DocEntry, Document};
use crate::nlp::TokenBag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VectorizeError {
    #[error("corpus has no terms; vocabulary would be empty")]
    EmptyVocabulary,
    #[error("document frequency {df} of column {column} exceeds document count {n_docs}")]
    InvariantViolation { column: usize, df: u64, n_docs: u64 },
    #[error("document count must be at least 1")]
    NoDocuments,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{bags} token bags but {docs} registry entries")]
    RegistryMismatch { bags: usize, docs: usize },
    #[error("invalid sparse vector: {0}")]
    InvalidVector(&'static str),
}

/// Sorted list of unique terms with the reverse term -> column map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds from arbitrary terms; duplicates are merged and order sorted.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = set.into_iter().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn column(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, column: u32) -> Option<&str> {
        self.terms.get(column as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Union of all bag keys, sorted.
pub fn build_vocabulary(corpus: &[TokenBag]) -> Result<Vocabulary, VectorizeError> {
    let vocab = Vocabulary::from_terms(corpus.iter().flat_map(|bag| bag.counts().keys().cloned()));
    if vocab.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }
    Ok(vocab)
}

/// Sparse row over a fixed number of columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Validates strictly increasing in-range indices and positive values.
    pub fn new(dim: usize, indices: Vec<u32>, values: Vec<f64>) -> Result<Self, VectorizeError> {
        if indices.len() != values.len() {
            return Err(VectorizeError::InvalidVector("index/value length mismatch"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VectorizeError::InvalidVector("indices not strictly increasing"));
        }
        if indices.last().is_some_and(|&i| i as usize >= dim) {
            return Err(VectorizeError::InvalidVector("index out of range"));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(VectorizeError::InvalidVector("values must be finite and positive"));
        }
        Ok(Self { dim, indices, values })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, column: u32) -> f64 {
        match self.indices.binary_search(&column) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Divides by the euclidean norm. Empty vectors stay empty.
    pub fn normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            for v in &mut self.values {
                *v /= norm;
            }
        }
        self
    }
}

fn bag_to_sparse(bag: &TokenBag, vocab: &Vocabulary, weight: impl Fn(u32, u64) -> f64) -> SparseVector {
    let mut pairs: Vec<(u32, f64)> = bag
        .iter()
        .filter_map(|(t, n)| vocab.column(t).map(|c| (c, weight(c, n))))
        .filter(|&(_, v)| v > 0.0)
        .collect();
    pairs.sort_unstable_by_key(|&(c, _)| c);
    let (indices, values) = pairs.into_iter().unzip();
    SparseVector {
        dim: vocab.len(),
        indices,
        values,
    }
}

/// Raw term counts; out-of-vocabulary terms are ignored.
pub fn vectorize_counts(bag: &TokenBag, vocab: &Vocabulary) -> SparseVector {
    bag_to_sparse(bag, vocab, |_, n| n as f64)
}

/// 1.0 for every present in-vocabulary term.
pub fn vectorize_binary(bag: &TokenBag, vocab: &Vocabulary) -> SparseVector {
    bag_to_sparse(bag, vocab, |_, _| 1.0)
}

/// `idf_t = ln((1 + n_docs) / (1 + df_t))`, plus one when `plus_one` is set.
pub fn compute_idf(df: &[u64], n_docs: u64, plus_one: bool) -> Result<Vec<f64>, VectorizeError> {
    if n_docs == 0 {
        return Err(VectorizeError::NoDocuments);
    }
    let offset = if plus_one { 1.0 } else { 0.0 };
    df.iter()
        .enumerate()
        .map(|(column, &d)| {
            if d > n_docs {
                return Err(VectorizeError::InvariantViolation { column, df: d, n_docs });
            }
            if d == n_docs {
                // Exact zero rather than ln(x/x) rounding.
                return Ok(offset);
            }
            Ok(((1.0 + n_docs as f64) / (1.0 + d as f64)).ln() + offset)
        })
        .collect()
}

/// Number of bags containing each vocabulary term.
pub fn document_frequencies(corpus: &[TokenBag], vocab: &Vocabulary) -> Vec<u64> {
    let mut df = vec![0u64; vocab.len()];
    for bag in corpus {
        for (term, _) in bag.iter() {
            if let Some(c) = vocab.column(term) {
                df[c as usize] += 1;
            }
        }
    }
    df
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TfidfConfig {
    /// Adds 1 to every idf value, as some libraries do.
    pub idf_plus_one: bool,
}

/// Weights a bag by `(count / total) * idf` and L2-normalizes.
///
/// Terms with zero idf drop out; a bag with nothing left yields an empty vector.
pub fn tfidf_row(bag: &TokenBag, vocab: &Vocabulary, idf: &[f64]) -> SparseVector {
    let total = bag.total();
    if total == 0 {
        return SparseVector::empty(vocab.len());
    }
    let total = total as f64;
    bag_to_sparse(bag, vocab, |c, n| (n as f64 / total) * idf[c as usize]).normalized()
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsrMatrix {
    n_cols: usize,
    row_ptr: Vec<u64>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(n_cols: usize, rows: &[SparseVector]) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0u64);
        let nnz: usize = rows.iter().map(SparseVector::nnz).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in rows {
            col_idx.extend_from_slice(&row.indices);
            values.extend_from_slice(&row.values);
            row_ptr.push(col_idx.len() as u64);
        }
        Self {
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles raw parts, checking structural consistency.
    pub fn from_parts(
        n_cols: usize,
        row_ptr: Vec<u64>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self, VectorizeError> {
        if row_ptr.first() != Some(&0) {
            return Err(VectorizeError::InvalidVector("row pointer must start at 0"));
        }
        if row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(VectorizeError::InvalidVector("row pointer not monotone"));
        }
        if *row_ptr.last().unwrap() as usize != col_idx.len() || col_idx.len() != values.len() {
            return Err(VectorizeError::InvalidVector("row pointer does not match nnz"));
        }
        if col_idx.iter().any(|&c| c as usize >= n_cols) {
            return Err(VectorizeError::InvalidVector("column index out of range"));
        }
        Ok(Self {
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ptr.len().saturating_sub(1)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let start = self.row_ptr[i] as usize;
        let end = self.row_ptr[i + 1] as usize;
        (&self.col_idx[start..end], &self.values[start..end])
    }

    pub fn row_vector(&self, i: usize) -> SparseVector {
        let (idx, vals) = self.row(i);
        SparseVector {
            dim: self.n_cols,
            indices: idx.to_vec(),
            values: vals.to_vec(),
        }
    }

    pub fn row_ptr(&self) -> &[u64] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Immutable TF-IDF index: one unit-norm row per document.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfIndex {
    rows: CsrMatrix,
    idf: Vec<f64>,
    vocab: Vocabulary,
    docs: Vec<DocEntry>,
    by_id: HashMap<String, usize>,
}

impl TfidfIndex {
    pub fn from_parts(
        rows: CsrMatrix,
        idf: Vec<f64>,
        vocab: Vocabulary,
        docs: Vec<DocEntry>,
    ) -> Result<Self, VectorizeError> {
        if rows.n_cols() != vocab.len() {
            return Err(VectorizeError::DimensionMismatch {
                expected: vocab.len(),
                got: rows.n_cols(),
            });
        }
        if idf.len() != vocab.len() {
            return Err(VectorizeError::DimensionMismatch {
                expected: vocab.len(),
                got: idf.len(),
            });
        }
        if rows.n_rows() != docs.len() {
            return Err(VectorizeError::RegistryMismatch {
                bags: rows.n_rows(),
                docs: docs.len(),
            });
        }
        let mut by_id = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            by_id.entry(d.meta.id.clone()).or_insert(i);
        }
        Ok(Self {
            rows,
            idf,
            vocab,
            docs,
            by_id,
        })
    }

    /// Builds an index from processed documents, vocabulary included.
    pub fn from_documents(docs: &[Document], cfg: TfidfConfig) -> Result<Self, VectorizeError> {
        let bags: Vec<TokenBag> = docs.iter().map(|d| d.tokens.clone()).collect();
        let vocab = build_vocabulary(&bags)?;
        let entries = docs.iter().map(DocEntry::from).collect();
        build_tfidf_index(&bags, vocab, entries, cfg)
    }

    pub fn rows(&self) -> &CsrMatrix {
        &self.rows
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Ordinal of the document with this id.
    pub fn ordinal(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// True when the row had no non-zero weight (e.g. only ubiquitous terms).
    pub fn is_empty_row(&self, ordinal: usize) -> bool {
        self.rows.row(ordinal).0.is_empty()
    }

    pub fn row_vector(&self, ordinal: usize) -> SparseVector {
        self.rows.row_vector(ordinal)
    }

    /// Fold-in: weights a new bag with the frozen corpus idf.
    pub fn vectorize(&self, bag: &TokenBag) -> SparseVector {
        tfidf_row(bag, &self.vocab, &self.idf)
    }
}

/// Two passes: document frequencies, then normalized rows in parallel.
pub fn build_tfidf_index(
    corpus: &[TokenBag],
    vocab: Vocabulary,
    docs: Vec<DocEntry>,
    cfg: TfidfConfig,
) -> Result<TfidfIndex, VectorizeError> {
    if corpus.len() != docs.len() {
        return Err(VectorizeError::RegistryMismatch {
            bags: corpus.len(),
            docs: docs.len(),
        });
    }
    let df = document_frequencies(corpus, &vocab);
    let idf = compute_idf(&df, corpus.len() as u64, cfg.idf_plus_one)?;
    let rows: Vec<SparseVector> = corpus.par_iter().map(|bag| tfidf_row(bag, &vocab, &idf)).collect();
    let empty = rows.iter().filter(|r| r.is_empty()).count();
    if empty > 0 {
        log::warn!("{empty} document(s) have an all-zero tf-idf row");
    }
    let matrix = CsrMatrix::from_rows(vocab.len(), &rows);
    TfidfIndex::from_parts(matrix, idf, vocab, docs)
}
