//! Independent reference computations for tests. Everything here is dense and
//! deliberately naive; none of it calls into the library's numeric paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

/// `ln(x)` for `x > 0` via `2 * atanh((x - 1) / (x + 1))` summed to convergence.
pub fn ln_series(x: f64) -> f64 {
    let y = (x - 1.0) / (x + 1.0);
    let y2 = y * y;
    let mut term = y;
    let mut sum = 0.0;
    let mut k = 1.0;
    for _ in 0..10_000 {
        let add = term / k;
        sum += add;
        if add.abs() < 1e-300 {
            break;
        }
        term *= y2;
        k += 2.0;
    }
    2.0 * sum
}

/// Dense TF-IDF reference: sorted terms, `ln((1+n)/(1+df))` idf,
/// `count / doc_length` tf, then each row divided by its euclidean norm.
pub struct DenseTfidf {
    pub terms: Vec<String>,
    pub idf: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

pub fn dense_tfidf(corpus: &[BTreeMap<String, u64>], plus_one: bool) -> DenseTfidf {
    let terms: Vec<String> = corpus
        .iter()
        .flat_map(|d| d.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = corpus.len() as f64;
    let idf: Vec<f64> = terms
        .iter()
        .map(|t| {
            let df = corpus.iter().filter(|d| d.get(t).copied().unwrap_or(0) > 0).count() as f64;
            let base = ((1.0 + n) / (1.0 + df)).ln();
            if plus_one {
                base + 1.0
            } else {
                base
            }
        })
        .collect();
    let rows = corpus
        .iter()
        .map(|doc| {
            let len: u64 = doc.values().sum();
            let mut row: Vec<f64> = terms
                .iter()
                .zip(&idf)
                .map(|(t, w)| {
                    let c = doc.get(t).copied().unwrap_or(0) as f64;
                    if len == 0 {
                        0.0
                    } else {
                        c / len as f64 * w
                    }
                })
                .collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in &mut row {
                    *v /= norm;
                }
            }
            row
        })
        .collect();
    DenseTfidf { terms, idf, rows }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full sort (score desc, ordinal asc), then drop excluded, then take k.
pub fn top_k_oracle(scores: &[f64], k: usize, exclude: &[usize]) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    all.into_iter().filter(|(i, _)| !exclude.contains(i)).take(k).collect()
}

pub fn median_oracle(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn fraction_oracle(scores: &[f64], threshold: f64) -> f64 {
    let mut count = 0usize;
    for &s in scores {
        if s > threshold {
            count += 1;
        }
    }
    count as f64 / scores.len() as f64
}

/// Dense important-word weights: `query[t] * sum_{i in matches} rows[i][t]`.
pub fn important_words_oracle(rows: &[Vec<f64>], query: &[f64], matches: &[usize]) -> Vec<f64> {
    (0..query.len())
        .map(|t| query[t] * matches.iter().map(|&i| rows[i][t]).sum::<f64>())
        .collect()
}

/// Random bag-of-words corpus over terms `t00..t{n_terms-1}`.
pub fn random_corpus(rng: &mut impl Rng, max_docs: usize, max_terms: usize) -> Vec<BTreeMap<String, u64>> {
    let n_docs = rng.gen_range(1..=max_docs);
    let n_terms = rng.gen_range(1..=max_terms);
    (0..n_docs)
        .map(|_| {
            let mut doc = BTreeMap::new();
            let distinct = rng.gen_range(0..=n_terms.min(12));
            for _ in 0..distinct {
                let t = format!("t{:02}", rng.gen_range(0..n_terms));
                *doc.entry(t).or_insert(0) += rng.gen_range(1..=6u64);
            }
            doc
        })
        .collect()
}
