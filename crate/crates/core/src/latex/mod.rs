//! Reduction of a LaTeX source tree to plain text.
//!
//! The cascade is: pick the main file, flatten includes, strip the noisy
//! environments, trim front matter, detex. Every failure is a typed discard
//! reason so corpus-wide drop-out can be audited.

mod comments;
mod detex;
mod environments;
mod front_matter;
mod source;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use comments::strip_comments;
pub use detex::{detex_to_text, TEXT_COMMANDS};
pub use environments::{strip_environments, StripConfig, Stripped};
pub use front_matter::trim_front_matter;
pub use source::{Flattened, TexSource, MAX_INCLUDE_DEPTH};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("no file contains an uncommented \\begin{{document}}")]
    NoMainFile,
    #[error("\\begin{{document}} found more than once (in {candidates:?})")]
    AmbiguousMainFile { candidates: Vec<String> },
    #[error("include nesting exceeded depth {depth} at {path}")]
    IncludeCycle { path: String, depth: usize },
    #[error("main file has not been determined")]
    MainNotSet,
    #[error("neither \\section nor \\end{{abstract}} present")]
    NeitherMarker,
    #[error("source unreadable: {0}")]
    Unreadable(String),
}

/// Machine-readable discard reasons, one per failing cascade stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    NoMainFile,
    AmbiguousMainFile,
    IncludeCycle,
    NeitherMarker,
    Unreadable,
}

impl DiscardReason {
    /// Whether the document failed before a main file was in hand.
    pub fn is_main_file_stage(self) -> bool {
        !matches!(self, DiscardReason::NeitherMarker)
    }
}

impl ExtractError {
    pub fn reason(&self) -> DiscardReason {
        match self {
            ExtractError::NoMainFile | ExtractError::MainNotSet => DiscardReason::NoMainFile,
            ExtractError::AmbiguousMainFile { .. } => DiscardReason::AmbiguousMainFile,
            ExtractError::IncludeCycle { .. } => DiscardReason::IncludeCycle,
            ExtractError::NeitherMarker => DiscardReason::NeitherMarker,
            ExtractError::Unreadable(_) => DiscardReason::Unreadable,
        }
    }
}

/// Plain text plus non-fatal warnings from one successful extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub main: String,
    pub text: String,
    pub warnings: Vec<String>,
}

/// Runs the full cascade on one source tree.
pub fn extract(src: &mut TexSource, cfg: &StripConfig) -> Result<Extraction, ExtractError> {
    let main = src.find_main_tex()?;
    let Flattened { text, mut warnings } = src.flatten()?;
    let stripped = strip_environments(&text, cfg);
    if stripped.unmatched > 0 {
        warnings.push(format!("{} unmatched environment delimiter(s)", stripped.unmatched));
    }
    let body = trim_front_matter(&stripped.text)?;
    Ok(Extraction {
        main,
        text: detex_to_text(body),
        warnings,
    })
}

/// One line of `extract` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discard_reason: Option<DiscardReason>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ExtractRecord {
    pub fn from_result(id: impl Into<String>, result: Result<Extraction, ExtractError>) -> Self {
        let id = id.into();
        match result {
            Ok(ex) => Self {
                id,
                text: Some(ex.text),
                discard_reason: None,
                warnings: ex.warnings,
            },
            Err(e) => Self {
                id,
                text: None,
                discard_reason: Some(e.reason()),
                warnings: vec![e.to_string()],
            },
        }
    }
}

/// Extracts every immediate subdirectory of `root`; the directory name is the
/// record id. Records come back sorted by id.
pub fn extract_tree(root: &Path, cfg: &StripConfig) -> std::io::Result<Vec<ExtractRecord>> {
    let mut dirs: Vec<_> = std::fs::read_dir(root)?
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_ok_and(|t| t.is_dir()))
        .map(|e| e.path())
        .collect();
    dirs.sort();
    Ok(dirs
        .par_iter()
        .map(|dir| {
            let id = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let result = TexSource::from_dir(dir)
                .map_err(|e| ExtractError::Unreadable(e.to_string()))
                .and_then(|mut src| extract(&mut src, cfg));
            ExtractRecord::from_result(id, result)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade_end_to_end() {
        let mut src = TexSource::new()
            .with_file(
                "ms.tex",
                "\\documentclass{article}\n\\begin{document}\n\\title{T}\n\\begin{abstract}Abs.\\end{abstract}\n\
                 \\input{body}\n\\end{document}\n",
            )
            .with_file(
                "body.tex",
                "\\section{Intro}\nStars \\cite{a} shine.% note\n\\begin{figure*}\\caption{Cap}\\end{figure*}\nGas $x^2$ cools.\n",
            );
        let ex = extract(&mut src, &StripConfig::default()).unwrap();
        assert_eq!(ex.main, "ms.tex");
        assert_eq!(ex.text, "Intro Stars shine. Gas cools.");
        assert!(ex.warnings.is_empty());
    }

    #[test]
    fn record_carries_discard_reason() {
        let mut src = TexSource::new().with_file("a.tex", "\\begin{document} nothing here");
        let rec = ExtractRecord::from_result("x", extract(&mut src, &StripConfig::default()));
        assert_eq!(rec.discard_reason, Some(DiscardReason::NeitherMarker));
        assert!(rec.text.is_none());
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"discard_reason\":\"neither_marker\""), "{json}");
    }
}
