//! LaTeX markup to plain prose.
//!
//! Math is removed, control words are removed, arguments of ordinary commands
//! are kept as text, and arguments of reference-like commands are dropped.
//! Whatever remains has no `\`, `{`, `}` or `$`.

/// Commands whose arguments carry prose. Listed for documentation and tests;
/// unknown commands get the same treatment.
pub const TEXT_COMMANDS: &[&str] = &[
    "section",
    "subsection",
    "subsubsection",
    "paragraph",
    "subparagraph",
    "emph",
    "textbf",
    "textit",
    "textrm",
    "footnote",
];

/// Commands whose arguments are dropped along with the command.
const DROP_ARGUMENT: &[&str] = &[
    "ref",
    "eqref",
    "pageref",
    "autoref",
    "cref",
    "Cref",
    "label",
    "url",
    // Only the first group of \href{url}{text} is dropped.
    "href",
    "bibliography",
    "bibliographystyle",
    "begin",
    "end",
    "includegraphics",
    "usepackage",
    "documentclass",
    "hspace",
    "vspace",
];

/// Commands that separate words.
const SPACING: &[&str] = &[
    "item",
    "par",
    "newline",
    "linebreak",
    "quad",
    "qquad",
    "hfill",
    "bigskip",
    "medskip",
    "smallskip",
];

/// Environments whose whole body is math.
const MATH_ENVIRONMENTS: &[&str] = &[
    "equation",
    "eqnarray",
    "align",
    "alignat",
    "flalign",
    "gather",
    "multline",
    "displaymath",
    "math",
];

fn drops_argument(name: &str) -> bool {
    name.starts_with("cite") || DROP_ARGUMENT.contains(&name)
}

fn is_math_environment(name: &str) -> bool {
    let base = name.strip_suffix('*').unwrap_or(name);
    MATH_ENVIRONMENTS.contains(&base)
}

struct Scanner<'a> {
    chars: &'a [char],
    pos: usize,
}

impl Scanner<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    /// Position just after the next unescaped occurrence of `pat`.
    fn find_after(&self, from: usize, pat: &str) -> Option<usize> {
        let pat: Vec<char> = pat.chars().collect();
        let mut i = from;
        while i + pat.len() <= self.chars.len() {
            if self.chars[i] == '\\' && pat[0] != '\\' {
                i += 2;
                continue;
            }
            if self.chars[i..i + pat.len()] == pat[..] {
                return Some(i + pat.len());
            }
            i += 1;
        }
        None
    }

    fn skip_whitespace(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Skips a balanced `open ... close` group starting at the cursor.
    /// Returns the group's inner text, or `None` if the cursor is not at `open`.
    fn skip_group(&mut self, open: char, close: char) -> Option<String> {
        if self.peek() != Some(open) {
            return None;
        }
        let start = self.pos + 1;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            if c == '\\' {
                self.pos += 2;
                continue;
            }
            if c == open {
                depth += 1;
            } else if c == close {
                depth -= 1;
                if depth == 0 {
                    let inner: String = self.chars[start..self.pos].iter().collect();
                    self.pos += 1;
                    return Some(inner);
                }
            }
            self.pos += 1;
        }
        // Unbalanced: consume the rest.
        let end = self.chars.len().min(self.pos);
        self.pos = self.chars.len();
        Some(self.chars[start.min(end)..end].iter().collect())
    }

    fn read_control_word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        if self.peek() == Some('*') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }
}

/// Strips math, commands and braces, then collapses whitespace.
pub fn detex_to_text(tex: &str) -> String {
    let chars: Vec<char> = tex.chars().collect();
    let mut s = Scanner { chars: &chars, pos: 0 };
    let mut out = String::with_capacity(tex.len());

    while let Some(c) = s.peek() {
        match c {
            '$' => {
                let display = s.peek_at(1) == Some('$');
                let (open_len, close) = if display { (2, "$$") } else { (1, "$") };
                match s.find_after(s.pos + open_len, close) {
                    Some(end) => s.pos = end,
                    None => s.pos += open_len,
                }
                out.push(' ');
            }
            '\\' => match s.peek_at(1) {
                None => s.pos += 1,
                Some('(') | Some('[') => {
                    let close = if s.peek_at(1) == Some('(') { "\\)" } else { "\\]" };
                    match s.find_after(s.pos + 2, close) {
                        Some(end) => s.pos = end,
                        None => s.pos += 2,
                    }
                    out.push(' ');
                }
                Some(n) if n.is_ascii_alphabetic() => {
                    s.pos += 1;
                    let name = s.read_control_word();
                    command(&mut s, &name, &mut out);
                }
                Some(sym) => {
                    s.pos += 2;
                    match sym {
                        '%' | '&' | '#' | '_' => out.push(sym),
                        '\\' | ' ' | ',' | ';' | ':' | '!' | '\n' => out.push(' '),
                        _ => {}
                    }
                }
            },
            '{' | '}' => s.pos += 1,
            '~' => {
                out.push(' ');
                s.pos += 1;
            }
            _ => {
                out.push(c);
                s.pos += 1;
            }
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn command(s: &mut Scanner<'_>, name: &str, out: &mut String) {
    let base = name.strip_suffix('*').unwrap_or(name);
    if base == "begin" {
        let save = s.pos;
        s.skip_whitespace();
        if let Some(env) = s.skip_group('{', '}') {
            let env = env.trim();
            if is_math_environment(env) {
                let close = format!("\\end{{{env}}}");
                s.pos = s.find_after(s.pos, &close).unwrap_or(s.chars.len());
                out.push(' ');
            }
        } else {
            s.pos = save;
        }
        return;
    }
    if drops_argument(base) {
        let save = s.pos;
        s.skip_whitespace();
        while s.peek() == Some('[') {
            s.skip_group('[', ']');
            s.skip_whitespace();
        }
        if s.skip_group('{', '}').is_none() {
            s.pos = save;
        }
        out.push(' ');
        return;
    }
    if SPACING.contains(&base) {
        out.push(' ');
    }
    // Optional arguments directly after a command are markup, not prose.
    if s.peek() == Some('[') {
        s.skip_group('[', ']');
    }
}
