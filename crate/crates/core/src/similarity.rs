//! Cosine-similarity queries over a [`TfidfIndex`] and the group statistics
//! built on the resulting score vectors.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vectorizer::{SparseVector, TfidfIndex};

/// Default size of the match set used for important-word attribution.
pub const DEFAULT_MATCHES: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("query has dimension {got}, index vocabulary has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group is empty")]
    EmptyGroup,
    #[error("group ordinal {ordinal} out of range for {len} scores")]
    OrdinalOutOfRange { ordinal: usize, len: usize },
    #[error("score vector is empty")]
    EmptyScores,
}

/// Where a query vector came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryProvenance {
    Document(String),
    FreeText,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityResult {
    /// `(document ordinal, cosine score)`, best first.
    pub entries: Vec<(usize, f64)>,
    pub query_provenance: QueryProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordImportance {
    /// `(term, weight)`, heaviest first.
    pub entries: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub group_label: String,
    pub median_similarity: f64,
    pub more_similar_fraction: f64,
}

/// Cosine similarity of every row with a unit-norm query (`A * q`).
/// Empty rows score 0.
pub fn similarity_vector(index: &TfidfIndex, query: &SparseVector) -> Result<Vec<f64>, SimilarityError> {
    let dim = index.vocab().len();
    if query.dim() != dim {
        return Err(SimilarityError::DimensionMismatch {
            expected: dim,
            got: query.dim(),
        });
    }
    let mut dense = vec![0.0f64; dim];
    for (c, v) in query.iter() {
        dense[c as usize] = v;
    }
    let rows = index.rows();
    Ok((0..rows.n_rows())
        .into_par_iter()
        .map(|i| {
            let (cols, vals) = rows.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| v * dense[c as usize]).sum()
        })
        .collect())
}

/// Best-first ordering: higher score, then lower ordinal.
fn rank_order(scores: &[f64]) -> impl Fn(&usize, &usize) -> std::cmp::Ordering + '_ {
    move |&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b))
}

/// The `k` best ordinals not in `exclude`; ties go to the lower ordinal.
pub fn top_k(scores: &[f64], k: usize, exclude: &HashSet<usize>) -> Vec<(usize, f64)> {
    let mut candidates: Vec<usize> = (0..scores.len()).filter(|i| !exclude.contains(i)).collect();
    let order = rank_order(scores);
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k, &order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(&order);
    candidates.into_iter().map(|i| (i, scores[i])).collect()
}

/// Ranks the corpus against `query`.
pub fn query(
    index: &TfidfIndex,
    query: &SparseVector,
    k: usize,
    exclude: &HashSet<usize>,
    provenance: QueryProvenance,
) -> Result<SimilarityResult, SimilarityError> {
    let scores = similarity_vector(index, query)?;
    Ok(SimilarityResult {
        entries: top_k(&scores, k, exclude),
        query_provenance: provenance,
    })
}

/// Terms that drive a match set: `weight(t) = query[t] * sum of row[t]` over
/// the `n_matches` best documents (minus `exclude`). Only positive weights are
/// returned, heaviest first, ties by column.
pub fn important_words(
    index: &TfidfIndex,
    query: &SparseVector,
    n_matches: usize,
    n_words: usize,
    exclude: &HashSet<usize>,
) -> Result<WordImportance, SimilarityError> {
    let scores = similarity_vector(index, query)?;
    let matches = top_k(&scores, n_matches, exclude);
    let mut support = vec![0.0f64; query.nnz()];
    let rows = index.rows();
    for &(ordinal, _) in &matches {
        let (cols, vals) = rows.row(ordinal);
        // Both index lists are sorted; merge.
        let (mut i, mut j) = (0, 0);
        let q = query.indices();
        while i < q.len() && j < cols.len() {
            match q[i].cmp(&cols[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    support[i] += vals[j];
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    let mut weighted: Vec<(u32, f64)> = query
        .iter()
        .zip(&support)
        .map(|((c, qv), &s)| (c, qv * s))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    weighted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    weighted.truncate(n_words);
    Ok(WordImportance {
        entries: weighted
            .into_iter()
            .map(|(c, w)| {
                (
                    index.vocab().term(c).expect("query column in vocabulary").to_string(),
                    w,
                )
            })
            .collect(),
    })
}

/// Median with the mean-of-middle-pair convention for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Median score over the ordinals in `group`.
pub fn group_median_similarity(scores: &[f64], group: &[usize]) -> Result<f64, SimilarityError> {
    let values = group
        .iter()
        .map(|&o| {
            scores.get(o).copied().ok_or(SimilarityError::OrdinalOutOfRange {
                ordinal: o,
                len: scores.len(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    median(&values).ok_or(SimilarityError::EmptyGroup)
}

/// Fraction of scores strictly above `threshold`.
pub fn more_similar_fraction(scores: &[f64], threshold: f64) -> Result<f64, SimilarityError> {
    if scores.is_empty() {
        return Err(SimilarityError::EmptyScores);
    }
    let above = scores.iter().filter(|&&s| s > threshold).count();
    Ok(above as f64 / scores.len() as f64)
}

/// [`more_similar_fraction`] at each threshold of an ascending grid.
///
/// Uses one sort plus a binary search per threshold.
pub fn cumulative_similarity_curve(scores: &[f64], grid: &[f64]) -> Result<Vec<(f64, f64)>, SimilarityError> {
    if scores.is_empty() {
        return Err(SimilarityError::EmptyScores);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&s| s <= t);
            (t, (sorted.len() - at_or_below) as f64 / n)
        })
        .collect())
}

/// Median similarity of a labelled group and the share of the corpus that
/// beats it.
pub fn compare_group(scores: &[f64], label: &str, group: &[usize]) -> Result<GroupComparison, SimilarityError> {
    let median_similarity = group_median_similarity(scores, group)?;
    Ok(GroupComparison {
        group_label: label.to_string(),
        median_similarity,
        more_similar_fraction: more_similar_fraction(scores, median_similarity)?,
    })
}
