//! Query handlers over a loaded index, independent of the HTTP layer.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use lsim_core::similarity::{self, compare_group, important_words, similarity_vector, top_k, SimilarityError};
use lsim_core::stats::{yearly_summary, YearlyAuthorStats, YearlyWordStats};
use lsim_core::{GroupComparison, Pipeline, SparseVector, TfidfIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_K: usize = 30;
pub const DEFAULT_WORDS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown document id {0:?}")]
    UnknownDocument(String),
    #[error("{0}")]
    Unprocessable(String),
    #[error("unknown document ids in group {group:?}: {ids:?}")]
    UnresolvableGroup { group: String, ids: Vec<String> },
    #[error(transparent)]
    Engine(#[from] SimilarityError),
}

impl ServiceError {
    /// HTTP status code for this error.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::BadRequest(_) => 400,
            ServiceError::UnknownDocument(_) => 404,
            ServiceError::Unprocessable(_) | ServiceError::UnresolvableGroup { .. } => 422,
            ServiceError::Engine(_) => 500,
        }
    }
}

fn default_k() -> usize {
    DEFAULT_K
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryRequest {
    #[serde(default)]
    pub doc_id: Option<String>,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub exclude: Vec<String>,
    #[serde(default)]
    pub important_words: bool,
}

impl QueryRequest {
    pub fn by_id(id: impl Into<String>, k: usize) -> Self {
        Self {
            doc_id: Some(id.into()),
            k,
            ..Default::default()
        }
    }

    pub fn by_text(text: impl Into<String>, k: usize) -> Self {
        Self {
            text: Some(text.into()),
            k,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub doc_id: String,
    pub title: String,
    pub year: i32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub results: Vec<ResultRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub important_words: Option<Vec<TermWeight>>,
    pub timing_ms: f64,
    /// Ids from `exclude` that are not in the index.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub unknown_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRequest {
    pub doc_id: String,
    pub groups: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    #[serde(flatten)]
    pub comparison: GroupComparison,
    pub size: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub unknown_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResponse {
    pub doc_id: String,
    pub groups: Vec<GroupResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocInfo {
    pub doc_id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub subjects: Vec<String>,
    pub word_count: u64,
    pub empty_row: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub corpus_size: usize,
    pub vocab_size: usize,
}

/// Immutable query service; share it behind an `Arc`.
#[derive(Debug)]
pub struct Service {
    index: TfidfIndex,
    pipeline: Pipeline,
    authors: Vec<YearlyAuthorStats>,
    words: Vec<YearlyWordStats>,
}

impl Service {
    pub fn new(index: TfidfIndex, pipeline: Pipeline) -> Self {
        let (authors, words) = yearly_summary(index.docs()).into_iter().unzip();
        Self {
            index,
            pipeline,
            authors,
            words,
        }
    }

    pub fn index(&self) -> &TfidfIndex {
        &self.index
    }

    fn ordinal(&self, id: &str) -> Result<usize, ServiceError> {
        self.index
            .ordinal(id)
            .ok_or_else(|| ServiceError::UnknownDocument(id.to_string()))
    }

    /// Query vector for a free text, folded in with the corpus idf.
    pub fn fold_in(&self, text: &str) -> Result<SparseVector, ServiceError> {
        let bag = self.pipeline.process(text).bag;
        let vector = self.index.vectorize(&bag);
        if vector.is_empty() {
            return Err(ServiceError::Unprocessable(
                "no dictionary terms survived processing of the query text".into(),
            ));
        }
        Ok(vector)
    }

    pub fn handle_similar(&self, req: &QueryRequest) -> Result<QueryResponse, ServiceError> {
        let start = Instant::now();
        if req.k == 0 {
            return Err(ServiceError::BadRequest("k must be at least 1".into()));
        }
        let mut exclude = HashSet::new();
        let query = match (&req.doc_id, &req.text) {
            (Some(id), None) => {
                let ordinal = self.ordinal(id)?;
                exclude.insert(ordinal);
                self.index.row_vector(ordinal)
            }
            (None, Some(text)) => self.fold_in(text)?,
            _ => return Err(ServiceError::BadRequest("give exactly one of doc_id and text".into())),
        };
        let mut unknown_ids = Vec::new();
        for id in &req.exclude {
            match self.index.ordinal(id) {
                Some(o) => {
                    exclude.insert(o);
                }
                None => unknown_ids.push(id.clone()),
            }
        }
        let scores = similarity_vector(&self.index, &query)?;
        let results = top_k(&scores, req.k, &exclude)
            .into_iter()
            .map(|(o, score)| self.row(o, score))
            .collect();
        let important_words = if req.important_words {
            Some(self.term_weights(&query, similarity::DEFAULT_MATCHES, DEFAULT_WORDS, &exclude)?)
        } else {
            None
        };
        Ok(QueryResponse {
            results,
            important_words,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
            unknown_ids,
        })
    }

    fn row(&self, ordinal: usize, score: f64) -> ResultRow {
        let meta = &self.index.docs()[ordinal].meta;
        ResultRow {
            doc_id: meta.id.clone(),
            title: meta.title.clone(),
            year: meta.year,
            score,
        }
    }

    fn term_weights(
        &self,
        query: &SparseVector,
        matches: usize,
        words: usize,
        exclude: &HashSet<usize>,
    ) -> Result<Vec<TermWeight>, ServiceError> {
        Ok(important_words(&self.index, query, matches, words, exclude)?
            .entries
            .into_iter()
            .map(|(term, weight)| TermWeight { term, weight })
            .collect())
    }

    /// Important words of a stored document against its own match set.
    pub fn document_important_words(
        &self,
        id: &str,
        matches: usize,
        words: usize,
    ) -> Result<Vec<TermWeight>, ServiceError> {
        let ordinal = self.ordinal(id)?;
        self.term_weights(
            &self.index.row_vector(ordinal),
            matches,
            words,
            &HashSet::from([ordinal]),
        )
    }

    /// Median similarity and more-similar fraction of each named group
    /// relative to `doc_id`. Unknown ids are dropped and reported; a group
    /// with no known ids is an error.
    pub fn handle_group_comparison(&self, req: &GroupRequest) -> Result<GroupResponse, ServiceError> {
        let ordinal = self.ordinal(&req.doc_id)?;
        let scores = similarity_vector(&self.index, &self.index.row_vector(ordinal))?;
        let mut groups = Vec::with_capacity(req.groups.len());
        for (label, ids) in &req.groups {
            let (known, unknown): (Vec<_>, Vec<_>) = ids.iter().partition(|id| self.index.ordinal(id).is_some());
            let unknown_ids: Vec<String> = unknown.into_iter().cloned().collect();
            if known.is_empty() {
                return Err(ServiceError::UnresolvableGroup {
                    group: label.clone(),
                    ids: unknown_ids,
                });
            }
            let members: Vec<usize> = known.iter().filter_map(|id| self.index.ordinal(id)).collect();
            groups.push(GroupResult {
                comparison: compare_group(&scores, label, &members)?,
                size: members.len(),
                unknown_ids,
            });
        }
        Ok(GroupResponse {
            doc_id: req.doc_id.clone(),
            groups,
        })
    }

    pub fn document(&self, id: &str) -> Result<DocInfo, ServiceError> {
        let ordinal = self.ordinal(id)?;
        let entry = &self.index.docs()[ordinal];
        Ok(DocInfo {
            doc_id: entry.meta.id.clone(),
            title: entry.meta.title.clone(),
            authors: entry.meta.authors.clone(),
            year: entry.meta.year,
            subjects: entry.meta.subjects.clone(),
            word_count: entry.raw_word_count,
            empty_row: self.index.is_empty_row(ordinal),
        })
    }

    pub fn author_stats(&self) -> &[YearlyAuthorStats] {
        &self.authors
    }

    pub fn word_stats(&self) -> &[YearlyWordStats] {
        &self.words
    }

    pub fn health(&self) -> Health {
        Health {
            status: "ok".into(),
            corpus_size: self.index.len(),
            vocab_size: self.index.vocab().len(),
        }
    }
}
