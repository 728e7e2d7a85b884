use std::collections::HashSet;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

static DELIMITER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\(begin|end)\s*\{([^}]*)\}").expect("valid regex"));

/// Environments removed together with their content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripConfig {
    pub environments: Vec<String>,
}

impl Default for StripConfig {
    fn default() -> Self {
        Self {
            environments: [
                "figure",
                "table",
                "align",
                "equation",
                "thebibliography",
                "deluxetable",
                "picture",
                "subequations",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    /// Number of `\begin`/`\end` delimiters left in place because they had no partner.
    pub unmatched: usize,
}

/// Removes every configured environment (and its starred variant) with its
/// content. Nested blocks go with their enclosing block; unmatched
/// delimiters stay and are counted.
pub fn strip_environments(tex: &str, cfg: &StripConfig) -> Stripped {
    let names: HashSet<&str> = cfg.environments.iter().map(String::as_str).collect();
    let targeted = |name: &str| names.contains(name) || name.strip_suffix('*').is_some_and(|b| names.contains(b));

    // Open delimiters: (environment name, span of the \begin{...}).
    let mut stack: Vec<(String, Range<usize>)> = Vec::new();
    let mut removals: Vec<Range<usize>> = Vec::new();
    let mut unmatched = 0;

    for caps in DELIMITER.captures_iter(tex) {
        let span = caps.get(0).unwrap().range();
        let name = caps[2].trim();
        if !targeted(name) {
            continue;
        }
        if &caps[1] == "begin" {
            stack.push((name.to_string(), span));
            continue;
        }
        match stack.iter().rposition(|(open, _)| open == name) {
            Some(pos) => {
                // Opens above `pos` are enclosed by this block and vanish with it.
                let (_, begin) = stack[pos].clone();
                stack.truncate(pos);
                removals.retain(|r| r.start < begin.start);
                removals.push(begin.start..span.end);
            }
            None => unmatched += 1,
        }
    }
    unmatched += stack.len();

    let mut text = String::with_capacity(tex.len());
    let mut last = 0;
    for r in removals {
        text.push_str(&tex[last..r.start]);
        last = r.end;
    }
    text.push_str(&tex[last..]);
    Stripped { text, unmatched }
}
