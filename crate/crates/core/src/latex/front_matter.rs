use std::sync::LazyLock;

use regex::Regex;

use super::ExtractError;

static SECTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\section(?:\*|[^A-Za-z]|$)").expect("valid regex"));
static END_ABSTRACT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\end\s*\{abstract\}").expect("valid regex"));
static BEGIN_DOCUMENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\begin\s*\{document\}").expect("valid regex"));

/// Drops everything before the first `\section`, or failing that everything
/// through `\end{abstract}`. Markers are searched after `\begin{document}`
/// when the text has one, so preamble macro definitions do not count.
pub fn trim_front_matter(tex: &str) -> Result<&str, ExtractError> {
    let body_start = BEGIN_DOCUMENT.find(tex).map_or(0, |m| m.end());
    let body = &tex[body_start..];
    if let Some(m) = SECTION.find(body) {
        return Ok(&body[m.start()..]);
    }
    if let Some(m) = END_ABSTRACT.find(body) {
        return Ok(&body[m.end()..]);
    }
    Err(ExtractError::NeitherMarker)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_rule() {
        assert_eq!(
            trim_front_matter("junk \\section{Intro} body").unwrap(),
            "\\section{Intro} body"
        );
        assert_eq!(
            trim_front_matter("j \\section*{Intro} b").unwrap(),
            "\\section*{Intro} b"
        );
    }

    #[test]
    fn end_abstract_rule() {
        assert_eq!(trim_front_matter("junk \\end{abstract} body").unwrap(), " body");
    }

    #[test]
    fn section_wins_over_abstract() {
        let tex = "\\begin{abstract}a\\end{abstract} x \\section{S} y";
        assert_eq!(trim_front_matter(tex).unwrap(), "\\section{S} y");
    }

    #[test]
    fn neither_marker() {
        assert_eq!(trim_front_matter("no markers at all"), Err(ExtractError::NeitherMarker));
    }

    #[test]
    fn subsection_and_lookalikes_are_not_sections() {
        assert_eq!(
            trim_front_matter("\\subsection{A} \\sectionmark{B}"),
            Err(ExtractError::NeitherMarker)
        );
    }

    #[test]
    fn preamble_section_is_ignored() {
        let tex = "\\renewcommand\\section{x}\\begin{document}front\\section{Real} body";
        assert_eq!(trim_front_matter(tex).unwrap(), "\\section{Real} body");
    }
}
