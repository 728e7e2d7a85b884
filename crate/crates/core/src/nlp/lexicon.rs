//! Dictionary of base forms and the morphy-style lemmatizer built on it.
//!
//! The lexicon text format has one section per part of speech:
//!
//! ```text
//! [noun]
//! galaxy
//! mice<TAB>mouse
//! [verb]
//! expand
//! ```
//!
//! Plain lines are base-form entries; `form<TAB>base` lines are irregular
//! exceptions. Blank lines and lines starting with `#` are ignored.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const BUILTIN: &str = include_str!("../../data/lexicon.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    /// Lookup order used by [`Lexicon::lemmatize`].
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    fn index(self) -> usize {
        self as usize
    }

    /// Suffix detachment rules `(suffix, replacement)` in application order.
    fn substitutions(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Pos::Noun => &[
                ("s", ""),
                ("ses", "s"),
                ("xes", "x"),
                ("zes", "z"),
                ("ches", "ch"),
                ("shes", "sh"),
                ("men", "man"),
                ("ies", "y"),
            ],
            Pos::Verb => &[
                ("s", ""),
                ("ies", "y"),
                ("es", "e"),
                ("es", ""),
                ("ed", "e"),
                ("ed", ""),
                ("ing", "e"),
                ("ing", ""),
            ],
            Pos::Adjective | Pos::Adverb => &[("er", ""), ("er", "e"), ("est", ""), ("est", "e")],
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
        })
    }
}

impl FromStr for Pos {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" | "n" => Ok(Pos::Noun),
            "verb" | "v" => Ok(Pos::Verb),
            "adjective" | "adj" | "a" => Ok(Pos::Adjective),
            "adverb" | "adv" | "r" => Ok(Pos::Adverb),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: unknown part-of-speech section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: entry outside of any section")]
    NoSection { line: usize },
    #[error("line {line}: malformed exception line")]
    MalformedException { line: usize },
    #[error("{pos} exception {form} -> {base}: target is not a {pos} entry")]
    DanglingException { pos: Pos, form: String, base: String },
}

/// Per-part-of-speech base forms plus irregular-form exceptions.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: [HashSet<String>; 4],
    exceptions: [HashMap<String, Vec<String>>; 4],
}

impl Lexicon {
    /// The small lexicon shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("bundled lexicon is valid")
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        let mut section: Option<Pos> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim().to_lowercase();
                section = Some(
                    name.parse()
                        .map_err(|_| LexiconError::UnknownSection { line: line_no, name })?,
                );
                continue;
            }
            let pos = section.ok_or(LexiconError::NoSection { line: line_no })?;
            if let Some((form, base)) = trimmed.split_once('\t') {
                let (form, base) = (form.trim(), base.trim());
                if form.is_empty() || base.is_empty() {
                    return Err(LexiconError::MalformedException { line: line_no });
                }
                lex.add_exception(pos, form, base);
            } else {
                lex.add_entry(pos, trimmed);
            }
        }
        lex.validate()?;
        Ok(lex)
    }

    pub fn add_entry(&mut self, pos: Pos, word: &str) {
        self.entries[pos.index()].insert(word.to_lowercase());
    }

    pub fn add_exception(&mut self, pos: Pos, form: &str, base: &str) {
        self.exceptions[pos.index()]
            .entry(form.to_lowercase())
            .or_default()
            .push(base.to_lowercase());
    }

    /// Checks that every exception target is an entry of the same part of speech.
    pub fn validate(&self) -> Result<(), LexiconError> {
        for pos in Pos::ALL {
            let mut forms: Vec<_> = self.exceptions[pos.index()].iter().collect();
            forms.sort();
            for (form, bases) in forms {
                if let Some(base) = bases.iter().find(|b| !self.is_entry(pos, b)) {
                    return Err(LexiconError::DanglingException {
                        pos,
                        form: form.clone(),
                        base: base.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_entry(&self, pos: Pos, word: &str) -> bool {
        self.entries[pos.index()].contains(word)
    }

    /// True when `word` is a base form under any part of speech.
    pub fn contains(&self, word: &str) -> bool {
        Pos::ALL.iter().any(|&p| self.is_entry(p, word))
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(HashSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(HashSet::is_empty)
    }

    /// Returns the base form of `token`, or `None` when no candidate is in
    /// the dictionary. Parts of speech are tried in [`Pos::ALL`] order and the
    /// first hit wins.
    pub fn lemmatize(&self, token: &str) -> Option<String> {
        Pos::ALL
            .iter()
            .find_map(|&pos| self.morphy(token, pos).into_iter().next())
    }

    /// All dictionary base forms of `form` for one part of speech, in the
    /// order the morphy procedure finds them.
    pub fn morphy(&self, form: &str, pos: Pos) -> Vec<String> {
        let rules = pos.substitutions();
        let apply_rules = |forms: &[String]| -> Vec<String> {
            let mut out = Vec::new();
            for f in forms {
                for (old, new) in rules {
                    if let Some(stem) = f.strip_suffix(old) {
                        out.push(format!("{stem}{new}"));
                    }
                }
            }
            out
        };
        let filter_forms = |forms: &[String]| -> Vec<String> {
            let mut seen = HashSet::new();
            forms
                .iter()
                .filter(|f| self.is_entry(pos, f) && seen.insert(f.as_str()))
                .cloned()
                .collect()
        };

        if let Some(bases) = self.exceptions[pos.index()].get(form) {
            let mut candidates = vec![form.to_string()];
            candidates.extend(bases.iter().cloned());
            return filter_forms(&candidates);
        }

        let mut forms = apply_rules(&[form.to_string()]);
        let mut first = vec![form.to_string()];
        first.extend(forms.iter().cloned());
        let results = filter_forms(&first);
        if !results.is_empty() {
            return results;
        }
        // Keep detaching suffixes. Only "men" -> "man" preserves length and its
        // output matches no rule, so this terminates.
        while !forms.is_empty() {
            forms = apply_rules(&forms);
            let results = filter_forms(&forms);
            if !results.is_empty() {
                return results;
            }
        }
        Vec::new()
    }
}
