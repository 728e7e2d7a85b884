//! Text-similarity search over LaTeX-sourced paper corpora.
//!
//! Papers go through [`latex`] (source tree to plain text), [`nlp`] (text to a
//! bag of dictionary lemmas), and [`vectorizer`] (bags to an L2-normalized
//! TF-IDF matrix). [`similarity`] answers "papers like this one" queries on
//! the matrix, [`stats`] summarizes the corpus per year, and [`ingest`] ties
//! metadata to documents and persists the index.

pub mod ingest;
pub mod latex;
pub mod nlp;
pub mod similarity;
pub mod stats;
pub mod vectorizer;

pub use ingest::{CorpusStore, DocEntry, Document, PaperMeta};
pub use nlp::{Lexicon, Pipeline, StopList, TokenBag};
pub use similarity::{GroupComparison, SimilarityResult, WordImportance};
pub use vectorizer::{SparseVector, TfidfConfig, TfidfIndex, Vocabulary};
