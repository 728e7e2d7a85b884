use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use walkdir::WalkDir;

use super::comments::strip_comments;
use super::ExtractError;

/// Maximum `\input` / `\include` nesting before a cycle is assumed.
pub const MAX_INCLUDE_DEPTH: usize = 16;

static BEGIN_DOCUMENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\begin\s*\{document\}").expect("valid regex"));
static INCLUDE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\\(?:input|include)(?:\s*\{([^}]*)\}|\s+([^\s{}\\]+))").expect("valid regex"));

/// A paper's LaTeX files keyed by `/`-separated relative path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TexSource {
    pub files: BTreeMap<String, String>,
    pub main: Option<String>,
}

fn is_tex_path(path: &str) -> bool {
    let lower = path.to_ascii_lowercase();
    lower.ends_with(".tex") || lower.ends_with(".ltx")
}

impl TexSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_file(mut self, path: impl Into<String>, text: impl Into<String>) -> Self {
        self.files.insert(path.into(), text.into());
        self
    }

    /// Loads every `.tex`/`.ltx` file below `dir`, decoding bytes lossily.
    pub fn from_dir(dir: &Path) -> io::Result<Self> {
        let mut files = BTreeMap::new();
        for entry in WalkDir::new(dir).sort_by_file_name() {
            let entry = entry.map_err(io::Error::other)?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(dir)
                .expect("walkdir yields paths below its root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            if !is_tex_path(&rel) {
                continue;
            }
            let bytes = std::fs::read(entry.path())?;
            files.insert(rel, String::from_utf8_lossy(&bytes).into_owned());
        }
        Ok(Self { files, main: None })
    }

    /// Picks the only file with an uncommented `\begin{document}` and records it
    /// as the main file.
    pub fn find_main_tex(&mut self) -> Result<String, ExtractError> {
        let mut candidates = Vec::new();
        let mut occurrences = 0;
        for (path, text) in &self.files {
            if !is_tex_path(path) {
                continue;
            }
            let n = BEGIN_DOCUMENT.find_iter(&strip_comments(text)).count();
            if n > 0 {
                occurrences += n;
                candidates.push(path.clone());
            }
        }
        match occurrences {
            0 => Err(ExtractError::NoMainFile),
            1 => {
                let main = candidates.pop().expect("one occurrence means one candidate");
                self.main = Some(main.clone());
                Ok(main)
            }
            _ => Err(ExtractError::AmbiguousMainFile { candidates }),
        }
    }

    /// Inlines `\input` and `\include` recursively, starting from the main file.
    /// Comments are stripped from every file before expansion.
    pub fn flatten(&self) -> Result<Flattened, ExtractError> {
        let main = self.main.as_deref().ok_or(ExtractError::MainNotSet)?;
        let base_dir = match main.rfind('/') {
            Some(i) => &main[..i],
            None => "",
        };
        let mut warnings = Vec::new();
        let text = self.expand(main, base_dir, 0, &mut warnings)?;
        Ok(Flattened { text, warnings })
    }

    fn resolve(&self, base_dir: &str, target: &str) -> Option<&str> {
        let joined = if base_dir.is_empty() {
            target.to_string()
        } else {
            format!("{base_dir}/{target}")
        };
        let normal = normalize_path(&joined);
        [normal.clone(), format!("{normal}.tex")]
            .into_iter()
            .find_map(|p| self.files.get_key_value(&p).map(|(k, _)| k.as_str()))
    }

    fn expand(
        &self,
        path: &str,
        base_dir: &str,
        depth: usize,
        warnings: &mut Vec<String>,
    ) -> Result<String, ExtractError> {
        let text = strip_comments(&self.files[path]);
        let mut out = String::with_capacity(text.len());
        let mut last = 0;
        for caps in INCLUDE.captures_iter(&text) {
            let whole = caps.get(0).unwrap();
            out.push_str(&text[last..whole.start()]);
            last = whole.end();
            let target = caps
                .get(1)
                .or_else(|| caps.get(2))
                .map(|m| m.as_str().trim())
                .unwrap_or_default();
            match self.resolve(base_dir, target) {
                Some(child) => {
                    if depth + 1 > MAX_INCLUDE_DEPTH {
                        return Err(ExtractError::IncludeCycle {
                            path: child.to_string(),
                            depth: MAX_INCLUDE_DEPTH,
                        });
                    }
                    let inner = self.expand(child, base_dir, depth + 1, warnings)?;
                    out.push_str(&inner);
                }
                None => warnings.push(format!("missing include target {target:?} in {path}")),
            }
        }
        out.push_str(&text[last..]);
        Ok(out)
    }
}

/// Output of [`TexSource::flatten`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub text: String,
    pub warnings: Vec<String>,
}

fn normalize_path(path: &str) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for part in path.split('/') {
        match part {
            "" | "." => {}
            ".." => {
                parts.pop();
            }
            p => parts.push(p),
        }
    }
    parts.join("/")
}
