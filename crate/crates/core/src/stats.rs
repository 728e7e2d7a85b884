//! Per-year publication statistics: author-count distributions and word counts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DocEntry, PaperMeta};
use crate::similarity::median;

pub const KDE_BANDWIDTH: f64 = 0.3;
pub const KDE_GRID_STEP: f64 = 0.05;
/// Papers with more authors than this count as extreme.
pub const EXTREME_AUTHORS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("no papers in year {0}")]
    EmptyYear(i32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyAuthorStats {
    pub year: i32,
    pub paper_count: usize,
    pub author_counts: Vec<usize>,
    pub median: f64,
    /// `(grid point, density)` pairs.
    pub kde: Vec<(f64, f64)>,
    pub extreme_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyWordStats {
    pub year: i32,
    pub paper_count: usize,
    pub median_words: f64,
    pub total_words: u64,
}

/// Evaluation grid `0, step, 2*step, ...` up to and including `max`.
pub fn kde_grid(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Gaussian kernel density of `samples` on `grid`, rescaled so the trapezoid
/// integral over the grid is exactly one. Mass the kernels put outside the
/// grid is redistributed by that rescaling.
pub fn gaussian_kde(samples: &[f64], bandwidth: f64, grid: &[f64]) -> Vec<f64> {
    let norm = 1.0 / (samples.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let raw: Vec<f64> = grid
        .iter()
        .map(|&x| {
            norm * samples
                .iter()
                .map(|&s| {
                    let z = (x - s) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect();
    let area = trapezoid(grid, &raw);
    if area > 0.0 {
        raw.into_iter().map(|d| d / area).collect()
    } else {
        raw
    }
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

/// Author statistics for the papers of one year.
pub fn author_stats(metas: &[PaperMeta], year: i32) -> Result<YearlyAuthorStats, StatsError> {
    let counts: Vec<usize> = metas
        .iter()
        .filter(|m| m.year == year)
        .map(|m| m.authors.len())
        .collect();
    author_stats_from_counts(year, counts)
}

pub fn author_stats_from_counts(year: i32, author_counts: Vec<usize>) -> Result<YearlyAuthorStats, StatsError> {
    if author_counts.is_empty() {
        return Err(StatsError::EmptyYear(year));
    }
    let samples: Vec<f64> = author_counts.iter().map(|&c| c as f64).collect();
    let max = author_counts.iter().copied().max().unwrap_or(0);
    let grid = kde_grid(max as f64 + 1.0, KDE_GRID_STEP);
    let density = gaussian_kde(&samples, KDE_BANDWIDTH, &grid);
    let extreme = author_counts.iter().filter(|&&c| c > EXTREME_AUTHORS).count();
    Ok(YearlyAuthorStats {
        year,
        paper_count: author_counts.len(),
        median: median(&samples).expect("non-empty"),
        kde: grid.into_iter().zip(density).collect(),
        extreme_fraction: extreme as f64 / author_counts.len() as f64,
        author_counts,
    })
}

/// Median and total word count (stop words removed) for one year.
pub fn word_stats(docs: &[DocEntry], year: i32) -> Result<YearlyWordStats, StatsError> {
    let counts: Vec<u64> = docs
        .iter()
        .filter(|d| d.meta.year == year)
        .map(|d| d.raw_word_count)
        .collect();
    if counts.is_empty() {
        return Err(StatsError::EmptyYear(year));
    }
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    Ok(YearlyWordStats {
        year,
        paper_count: counts.len(),
        median_words: median(&as_f64).expect("non-empty"),
        total_words: counts.iter().sum(),
    })
}

/// Distinct years present, ascending.
pub fn years<'a>(metas: impl IntoIterator<Item = &'a PaperMeta>) -> Vec<i32> {
    let set: BTreeSet<i32> = metas.into_iter().map(|m| m.year).collect();
    set.into_iter().collect()
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearSummary {
    pub year: i32,
    pub median_authors: f64,
    pub median_words: f64,
    pub total_words: u64,
    pub extreme_fraction: f64,
}

/// Author and word statistics for every year in the registry.
pub fn yearly_summary(docs: &[DocEntry]) -> Vec<(YearlyAuthorStats, YearlyWordStats)> {
    let metas: Vec<PaperMeta> = docs.iter().map(|d| d.meta.clone()).collect();
    years(&metas)
        .into_iter()
        .map(|y| {
            (
                author_stats(&metas, y).expect("year taken from the data"),
                word_stats(docs, y).expect("year taken from the data"),
            )
        })
        .collect()
}

impl From<&(YearlyAuthorStats, YearlyWordStats)> for YearSummary {
    fn from((a, w): &(YearlyAuthorStats, YearlyWordStats)) -> Self {
        Self {
            year: a.year,
            median_authors: a.median,
            median_words: w.median_words,
            total_words: w.total_words,
            extreme_fraction: a.extreme_fraction,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn author_medians() {
        assert_eq!(author_stats_from_counts(2010, vec![3, 3, 4]).unwrap().median, 3.0);
        assert_eq!(author_stats_from_counts(2010, vec![3, 4]).unwrap().median, 3.5);
    }

    #[test]
    fn extreme_fraction_one_in_two_hundred() {
        let mut counts = vec![1; 199];
        counts.push(150);
        let s = author_stats_from_counts(2016, counts).unwrap();
        assert_eq!(s.extreme_fraction, 0.005);
        let s = author_stats_from_counts(2016, vec![100, 101]).unwrap();
        assert_eq!(s.extreme_fraction, 0.5);
    }

    #[test]
    fn kde_normalized_and_non_negative() {
        let s = author_stats_from_counts(2001, vec![0, 1, 3, 3, 4, 12]).unwrap();
        let (xs, ys): (Vec<f64>, Vec<f64>) = s.kde.iter().copied().unzip();
        assert!(ys.iter().all(|&d| d >= 0.0));
        assert!((trapezoid(&xs, &ys) - 1.0).abs() < 1e-6);
        assert_eq!(xs[0], 0.0);
        assert!((xs.last().unwrap() - 13.0).abs() < 1e-12);
        assert!((xs[1] - xs[0] - KDE_GRID_STEP).abs() < 1e-12);
    }

    #[test]
    fn empty_year() {
        assert_eq!(author_stats(&[], 2000), Err(StatsError::EmptyYear(2000)));
        assert_eq!(word_stats(&[], 2000), Err(StatsError::EmptyYear(2000)));
    }

    #[test]
    fn word_medians_and_totals() {
        let docs: Vec<DocEntry> = [100, 300]
            .iter()
            .map(|&n| DocEntry::new(PaperMeta::new("x", 2012), n))
            .collect();
        let w = word_stats(&docs, 2012).unwrap();
        assert_eq!((w.median_words, w.total_words), (200.0, 400));
        let single = [DocEntry::new(PaperMeta::new("y", 2013), 500)];
        let w = word_stats(&single, 2013).unwrap();
        assert_eq!((w.median_words, w.total_words), (500.0, 500));
    }
}
