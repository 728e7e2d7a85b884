//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero on any failure.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use common::oracle::{self, dense_tfidf, ln_series};
use lsim_cli::service::{QueryRequest, Service};
use lsim_core::ingest::{decode_index, encode_index, load_index, save_index, IndexIoError};
use lsim_core::latex::{extract_tree, strip_environments, DiscardReason, StripConfig};
use lsim_core::similarity::{
    cumulative_similarity_curve, group_median_similarity, important_words, median, more_similar_fraction,
    similarity_vector, top_k,
};
use lsim_core::stats::{author_stats_from_counts, trapezoid, yearly_summary};
use lsim_core::vectorizer::{build_tfidf_index, build_vocabulary, compute_idf, vectorize_counts};
use lsim_core::{DocEntry, Lexicon, PaperMeta, Pipeline, TfidfConfig, TfidfIndex, TokenBag};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

type Corpus = Vec<BTreeMap<String, u64>>;

fn index_for(corpus: &Corpus) -> TfidfIndex {
    let bags: Vec<TokenBag> = corpus
        .iter()
        .map(|d| d.iter().map(|(t, &c)| (t.clone(), c)).collect())
        .collect();
    let vocab = build_vocabulary(&bags).unwrap();
    let docs = (0..bags.len())
        .map(|i| DocEntry::new(PaperMeta::new(format!("d{i}"), 2010), 0))
        .collect();
    build_tfidf_index(&bags, vocab, docs, TfidfConfig::default()).unwrap()
}

fn dense_rows(index: &TfidfIndex) -> Vec<Vec<f64>> {
    (0..index.len())
        .map(|i| {
            let mut row = vec![0.0; index.vocab().len()];
            for (c, v) in index.row_vector(i).iter() {
                row[c as usize] = v;
            }
            row
        })
        .collect()
}

fn random_corpora(seed: u64, n: usize) -> Vec<Corpus> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let c = oracle::random_corpus(&mut rng, 30, 50);
        if c.iter().any(|d| !d.is_empty()) {
            out.push(c);
        }
    }
    out
}

fn lemmatizer_examples() -> Check {
    let lex = Lexicon::builtin();
    for (token, expected) in [
        ("galaxies", Some("galaxy")),
        ("expanding", Some("expand")),
        ("roche", None),
        ("hd25161", None),
    ] {
        let start = Instant::now();
        let got = lex.lemmatize(token);
        let took = start.elapsed();
        ensure!(got.as_deref() == expected, "{token} -> {got:?}, expected {expected:?}");
        ensure!(took < Duration::from_millis(1), "{token} took {took:?}");
    }
    Ok(())
}

fn latex_cascade() -> Check {
    let root = common::fixture_corpus();
    let start = Instant::now();
    let records = extract_tree(&root.join("src"), &StripConfig::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(records.len() == 10, "{} records", records.len());
    for rec in &records {
        let actual = match (&rec.text, rec.discard_reason) {
            (Some(t), None) => format!("{t}\n"),
            (None, Some(r)) => format!("DISCARD {}\n", serde_json::to_string(&r).unwrap()),
            _ => return Err(format!("{}: inconsistent record", rec.id)),
        };
        let golden = std::fs::read_to_string(root.join("golden").join(format!("{}.txt", rec.id)))
            .map_err(|e| format!("{}: {e}", rec.id))?;
        ensure!(actual == golden, "{} differs from golden text", rec.id);
    }
    let reason = |id: &str| records.iter().find(|r| r.id == id).and_then(|r| r.discard_reason);
    ensure!(
        reason("1001.0003") == Some(DiscardReason::AmbiguousMainFile),
        "ambiguous case"
    );
    ensure!(reason("1001.0004") == Some(DiscardReason::NoMainFile), "no-main case");
    ensure!(
        reason("1001.0002") == Some(DiscardReason::NeitherMarker),
        "discard rule"
    );
    ensure!(
        reason("1001.0001").is_none() && reason("astro-ph_0601001").is_none(),
        "section/end-abstract rules"
    );
    let cfg = StripConfig::default();
    ensure!(
        cfg.environments.len() == 8,
        "{} default environments",
        cfg.environments.len()
    );
    for env in &cfg.environments {
        for name in [env.clone(), format!("{env}*")] {
            let tex = format!("a\\begin{{{name}}}b\\end{{{name}}}c");
            ensure!(strip_environments(&tex, &cfg).text == "ac", "{name} not removed");
        }
    }
    ensure!(took < Duration::from_secs(1), "cascade took {took:?}");
    Ok(())
}

fn tfidf_oracle() -> Check {
    let corpora = random_corpora(0x7f1d, 200);
    let start = Instant::now();
    for (n, corpus) in corpora.iter().enumerate() {
        let index = index_for(corpus);
        let reference = dense_tfidf(corpus, false);
        ensure!(
            index.vocab().terms() == reference.terms.as_slice(),
            "corpus {n}: vocabulary differs"
        );
        for (a, b) in dense_rows(&index).iter().zip(&reference.rows) {
            for (x, y) in a.iter().zip(b) {
                ensure!((x - y).abs() <= 1e-10, "corpus {n}: {x} vs {y}");
            }
        }
    }
    let took = start.elapsed();
    let idf = compute_idf(&[2, 1, 3], 3, false).map_err(|e| e.to_string())?;
    let expected = [ln_series(4.0 / 3.0), ln_series(2.0), 0.0];
    for (got, want) in idf.iter().zip(expected) {
        ensure!((got - want).abs() < 1e-15, "idf {got} vs {want}");
    }
    ensure!(idf[2] == 0.0, "idf at df = n_d must be exactly 0");
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(())
}

fn scaling_invariance() -> Check {
    for (n, corpus) in random_corpora(42, 50).iter().enumerate() {
        let base = index_for(corpus);
        let rows = dense_rows(&base);
        let target = n % corpus.len();
        for k in [2u64, 5, 10] {
            let mut scaled = corpus.clone();
            scaled[target].values_mut().for_each(|c| *c *= k);
            let other = index_for(&scaled);
            let b = base.row_vector(target);
            let o = other.row_vector(target);
            ensure!(b.indices() == o.indices(), "corpus {n} k={k}: support changed");
            for (x, y) in b.values().iter().zip(o.values()) {
                ensure!((x - y).abs() <= 1e-9, "corpus {n} k={k}: {x} vs {y}");
            }
            // Rounded so that float noise cannot reorder exact ties.
            let ranking = |index: &TfidfIndex, q| -> Vec<usize> {
                let scores: Vec<f64> = similarity_vector(index, q)
                    .unwrap()
                    .iter()
                    .map(|s| (s * 1e9).round() / 1e9)
                    .collect();
                top_k(&scores, usize::MAX, &HashSet::new())
                    .into_iter()
                    .map(|e| e.0)
                    .collect()
            };
            let (r1, r2) = (ranking(&base, &b), ranking(&other, &o));
            ensure!(r1 == r2, "corpus {n} k={k}: ranking changed");
        }
        // Raw-count tf: count * idf, then normalize.
        for (i, doc) in corpus.iter().enumerate() {
            let bag: TokenBag = doc.iter().map(|(t, &c)| (t.clone(), c)).collect();
            let counts = vectorize_counts(&bag, base.vocab());
            let mut raw = vec![0.0; base.vocab().len()];
            for (c, v) in counts.iter() {
                raw[c as usize] = v * base.idf()[c as usize];
            }
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                raw.iter_mut().for_each(|v| *v /= norm);
            }
            for (x, y) in raw.iter().zip(&rows[i]) {
                ensure!((x - y).abs() <= 1e-12, "corpus {n} doc {i}: raw-count row differs");
            }
        }
    }
    Ok(())
}

fn self_similarity() -> Check {
    let toy: Corpus = ["star star model", "galaxy star", "model"]
        .iter()
        .map(|d| {
            let mut m = BTreeMap::new();
            d.split(' ').for_each(|t| *m.entry(t.to_string()).or_insert(0) += 1);
            m
        })
        .collect();
    for (name, index) in [("fixture", common::fixture_index()), ("toy", index_for(&toy))] {
        for i in 0..index.len() {
            if index.is_empty_row(i) {
                continue;
            }
            let scores = similarity_vector(&index, &index.row_vector(i)).unwrap();
            let best = top_k(&scores, 1, &HashSet::new())[0];
            ensure!(
                (scores[i] - 1.0).abs() <= 1e-9,
                "{name} doc {i}: self score {}",
                scores[i]
            );
            ensure!(
                best.0 == i || (best.1 - scores[i]).abs() <= 1e-12,
                "{name} doc {i}: not at rank 1"
            );
        }
    }
    Ok(())
}

fn score_statistics() -> Check {
    let mut rng = StdRng::seed_from_u64(500);
    let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    for v in 0..500 {
        let n = rng.gen_range(1..300);
        let scores: Vec<f64> = (0..n).map(|_| (rng.gen_range(0..1000) as f64) / 1000.0).collect();
        let k = rng.gen_range(1..n + 3);
        let excluded: Vec<usize> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..n)).collect();
        let got = top_k(&scores, k, &excluded.iter().copied().collect());
        ensure!(got == oracle::top_k_oracle(&scores, k, &excluded), "vector {v}: top_k");

        let group: Vec<usize> = (0..rng.gen_range(1..=n.min(12))).map(|_| rng.gen_range(0..n)).collect();
        let values: Vec<f64> = group.iter().map(|&i| scores[i]).collect();
        let m = group_median_similarity(&scores, &group).map_err(|e| e.to_string())?;
        ensure!(
            m == oracle::median_oracle(&values) && median(&values) == Some(m),
            "vector {v}: median"
        );
        let f = more_similar_fraction(&scores, m).map_err(|e| e.to_string())?;
        ensure!(f == oracle::fraction_oracle(&scores, m), "vector {v}: fraction");

        let curve = cumulative_similarity_curve(&scores, &grid).map_err(|e| e.to_string())?;
        for (t, frac) in &curve {
            ensure!(
                *frac == oracle::fraction_oracle(&scores, *t),
                "vector {v}: curve at {t}"
            );
        }
        ensure!(
            curve.windows(2).all(|w| w[1].1 <= w[0].1),
            "vector {v}: curve not monotone"
        );
    }
    Ok(())
}

fn important_word_oracle() -> Check {
    for (n, corpus) in random_corpora(77, 60).iter().enumerate() {
        let index = index_for(corpus);
        let rows = dense_rows(&index);
        let q = n % index.len();
        let exclude = HashSet::from([q]);
        let scores = similarity_vector(&index, &index.row_vector(q)).unwrap();
        let matches: Vec<usize> = top_k(&scores, 5, &exclude).into_iter().map(|e| e.0).collect();
        let expected = oracle::important_words_oracle(&rows, &rows[q], &matches);
        let got = important_words(&index, &index.row_vector(q), 5, usize::MAX, &exclude).map_err(|e| e.to_string())?;
        let mut seen = vec![false; expected.len()];
        for (term, w) in &got.entries {
            let c = index.vocab().column(term).unwrap() as usize;
            ensure!(
                (w - expected[c]).abs() <= 1e-12,
                "corpus {n}: {term} {w} vs {}",
                expected[c]
            );
            ensure!(rows[q][c] != 0.0, "corpus {n}: {term} is absent from the query");
            seen[c] = true;
        }
        for (c, w) in expected.iter().enumerate() {
            ensure!(seen[c] || *w <= 1e-15, "corpus {n}: column {c} with weight {w} missing");
            if rows[q][c] == 0.0 {
                ensure!(*w == 0.0, "corpus {n}: absent term has weight {w}");
            }
        }
    }
    Ok(())
}

fn index_round_trip() -> Check {
    let index = common::fixture_index();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("index.lsim");
    save_index(&index, &path).map_err(|e| e.to_string())?;
    let loaded = load_index(&path).map_err(|e| e.to_string())?;
    ensure!(loaded == index, "loaded index differs");
    let bits = |i: &TfidfIndex| {
        i.rows()
            .values()
            .iter()
            .chain(i.idf())
            .map(|v| v.to_bits())
            .collect::<Vec<_>>()
    };
    ensure!(bits(&loaded) == bits(&index), "values not bit-exact");
    let bytes = encode_index(&index).map_err(|e| e.to_string())?;

    let mut header = bytes.clone();
    header[0] = b'X';
    ensure!(
        matches!(decode_index(&header), Err(IndexIoError::BadMagic)),
        "corrupt header not BadMagic"
    );
    let mut version = bytes.clone();
    version[4] = 7;
    ensure!(
        matches!(decode_index(&version), Err(IndexIoError::UnsupportedVersion { .. })),
        "version mismatch not reported"
    );
    let vocab_bytes: usize = index.vocab().terms().iter().map(|t| t.len() + 1).sum();
    let nnz = index.rows().nnz();
    let mid_matrix = 6 + 8 + vocab_bytes + 8 + (index.len() + 1) * 8 + nnz * 4 + nnz * 4;
    ensure!(
        matches!(decode_index(&bytes[..mid_matrix]), Err(IndexIoError::Truncated { .. })),
        "mid-matrix truncation not Truncated"
    );
    let mut flipped = bytes.clone();
    flipped[mid_matrix] ^= 1;
    ensure!(
        matches!(decode_index(&flipped), Err(IndexIoError::ChecksumMismatch { .. })),
        "flipped byte not ChecksumMismatch"
    );
    Ok(())
}

fn fold_in() -> Check {
    let store = common::fixture_store();
    let svc = Service::new(common::fixture_index(), Pipeline::builtin());
    for doc in &store.documents {
        let text: Vec<&str> = doc
            .tokens
            .iter()
            .flat_map(|(t, c)| std::iter::repeat_n(t, c as usize))
            .collect();
        let resp = svc
            .handle_similar(&QueryRequest::by_text(text.join(" "), 5))
            .map_err(|e| e.to_string())?;
        let top = &resp.results[0];
        ensure!(top.doc_id == doc.meta.id, "{}: rank 1 is {}", doc.meta.id, top.doc_id);
        ensure!((top.score - 1.0).abs() <= 1e-6, "{}: score {}", doc.meta.id, top.score);
    }
    Ok(())
}

fn stats() -> Check {
    let mut counts = vec![1usize; 199];
    counts.push(150);
    let s = author_stats_from_counts(2017, counts).map_err(|e| e.to_string())?;
    ensure!(s.extreme_fraction == 0.005, "extreme fraction {}", s.extreme_fraction);
    let index = common::fixture_index();
    let summary = yearly_summary(index.docs());
    ensure!(summary.len() == 3, "{} fixture years", summary.len());
    for (a, _) in &summary {
        let xs: Vec<f64> = a.kde.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = a.kde.iter().map(|p| p.1).collect();
        let area = trapezoid(&xs, &ys);
        ensure!((area - 1.0).abs() <= 1e-6, "year {}: integral {area}", a.year);
        ensure!(ys.iter().all(|&d| d >= 0.0), "year {}: negative density", a.year);
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("lemmatizer worked examples", lemmatizer_examples),
        ("latex cascade on fixture tree", latex_cascade),
        ("tf-idf dense oracle equivalence", tfidf_oracle),
        ("scaling invariance", scaling_invariance),
        ("self-similarity", self_similarity),
        ("top_k / median / fraction / curve oracles", score_statistics),
        ("important words oracle", important_word_oracle),
        ("index round-trip and damage", index_round_trip),
        ("fold-in consistency", fold_in),
        ("stats extreme fraction and kde", stats),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({ms:.0} ms)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
