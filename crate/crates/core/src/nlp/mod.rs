//! Text to bag-of-lemmas: tokenization, stop-word removal and a
//! dictionary-gated lemmatizer.

mod lexicon;
mod stopwords;
mod tokenize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use lexicon::{Lexicon, LexiconError, Pos};
pub use stopwords::{remove_stopwords, StopList};
pub use tokenize::{tokenize, PERIOD};

/// Lemma counts for one document.
///
/// `BTreeMap` keeps iteration (and serialization) order deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenBag {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: impl Into<String>, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(term.into()).or_insert(0) += n;
        self.total += n;
    }

    pub fn get(&self, term: &str) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: &TokenBag) {
        for (t, n) in other.iter() {
            self.add(t, n);
        }
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for TokenBag {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut bag = TokenBag::new();
        for (t, n) in iter {
            bag.add(t, n);
        }
        bag
    }
}

/// Result of running the full pipeline over one text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessedText {
    pub bag: TokenBag,
    /// Word tokens left after stop-word removal, periods excluded.
    pub word_count: u64,
}

/// Tokenizer, stop list and lexicon bundled together.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub lexicon: Lexicon,
    pub stoplist: StopList,
}

impl Pipeline {
    pub fn new(lexicon: Lexicon, stoplist: StopList) -> Self {
        Self { lexicon, stoplist }
    }

    pub fn builtin() -> Self {
        Self::new(Lexicon::builtin(), StopList::english())
    }

    pub fn process(&self, text: &str) -> ProcessedText {
        let tokens = remove_stopwords(tokenize(text), &self.stoplist);
        let mut bag = TokenBag::new();
        let mut word_count = 0;
        for token in &tokens {
            if token != PERIOD {
                word_count += 1;
            }
            // A period is never a dictionary entry, so the gate drops it.
            if let Some(lemma) = lemma_of(token, &self.lexicon, &self.stoplist) {
                bag.add(lemma, 1);
            }
        }
        ProcessedText { bag, word_count }
    }
}

/// Dictionary lemma of a token. A lemma that is itself a stop word
/// (`"bes"` -> `"be"`) is dropped too.
fn lemma_of(token: &str, lexicon: &Lexicon, stoplist: &StopList) -> Option<String> {
    lexicon.lemmatize(token).filter(|lemma| !stoplist.contains(lemma))
}

/// tokenize, remove stop words, lemmatize, then count.
pub fn process_text(text: &str, lexicon: &Lexicon, stoplist: &StopList) -> TokenBag {
    let tokens = remove_stopwords(tokenize(text), stoplist);
    tokens
        .iter()
        .filter_map(|t| lemma_of(t, lexicon, stoplist))
        .map(|lemma| (lemma, 1))
        .collect()
}
