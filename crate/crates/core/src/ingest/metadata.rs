//! Paper metadata records in JSON-lines or an OAI-PMH Dublin Core subset.
//!
//! The XML subset accepted per `<record>`:
//!
//! ```xml
//! <record>
//!   <header>
//!     <identifier>oai:arXiv.org:1001.0001</identifier>
//!     <datestamp>2010-01-04</datestamp>
//!   </header>
//!   <metadata>
//!     <oai_dc:dc>
//!       <dc:title>...</dc:title>
//!       <dc:creator>Doe, Jane</dc:creator>
//!       <dc:subject>Astrophysics - Solar and Stellar Astrophysics</dc:subject>
//!       <dc:date>2010-01-01</dc:date>
//!     </oai_dc:dc>
//!   </metadata>
//! </record>
//! ```
//!
//! Namespace prefixes are ignored. The year comes from the first `date`
//! element, falling back to the header `datestamp`.

use chrono::Datelike;
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Earliest year accepted in metadata.
pub const FIRST_YEAR: i32 = 1991;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperMeta {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    pub year: i32,
    #[serde(default)]
    pub subjects: Vec<String>,
    /// Set when the source record carried no author information at all.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub authors_missing: bool,
}

impl PaperMeta {
    pub fn new(id: impl Into<String>, year: i32) -> Self {
        Self {
            id: id.into(),
            title: String::new(),
            authors: Vec::new(),
            year,
            subjects: Vec::new(),
            authors_missing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetadataFormat {
    JsonLines,
    OaiXml,
}

impl std::str::FromStr for MetadataFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json-lines" | "jsonl" | "json" => Ok(MetadataFormat::JsonLines),
            "oai-xml" | "xml" => Ok(MetadataFormat::OaiXml),
            other => Err(format!("unknown metadata format {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetadataError {
    #[error("malformed record at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("record at byte {offset} has no id")]
    MissingId { offset: usize },
    #[error("record {id} has no year")]
    MissingYear { id: String },
    #[error("record {id} has year {year} outside [{FIRST_YEAR}, current]")]
    InvalidYear { id: String, year: i32 },
}

/// Parses exactly one record.
pub fn parse_metadata(record: &str, format: MetadataFormat) -> Result<PaperMeta, MetadataError> {
    match format {
        MetadataFormat::JsonLines => parse_json_record(record, 0),
        MetadataFormat::OaiXml => {
            let mut records = parse_oai_xml(record)?;
            match records.len() {
                1 => records.pop().unwrap(),
                n => Err(MetadataError::Parse {
                    offset: 0,
                    message: format!("expected one <record>, found {n}"),
                }),
            }
        }
    }
}

/// Parses a whole metadata file. A structural failure of the file aborts;
/// individual bad records come back as per-record errors.
pub fn parse_metadata_stream(
    text: &str,
    format: MetadataFormat,
) -> Result<Vec<Result<PaperMeta, MetadataError>>, MetadataError> {
    match format {
        MetadataFormat::JsonLines => {
            let mut out = Vec::new();
            let mut offset = 0;
            for line in text.split_inclusive('\n') {
                if !line.trim().is_empty() {
                    out.push(parse_json_record(line, offset));
                }
                offset += line.len();
            }
            Ok(out)
        }
        MetadataFormat::OaiXml => parse_oai_xml(text),
    }
}

/// True for astronomy papers: an `astro-ph` id prefix or a subject
/// containing "astro" in any casing.
pub fn is_astro(meta: &PaperMeta) -> bool {
    meta.id.starts_with("astro-ph") || meta.subjects.iter().any(|s| s.to_lowercase().contains("astro"))
}

fn current_year() -> i32 {
    chrono::Utc::now().year()
}

fn check_year(id: &str, year: i32) -> Result<i32, MetadataError> {
    if (FIRST_YEAR..=current_year()).contains(&year) {
        Ok(year)
    } else {
        Err(MetadataError::InvalidYear {
            id: id.to_string(),
            year,
        })
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    title: Option<String>,
    authors: Option<Vec<String>>,
    year: Option<i32>,
    subjects: Option<Vec<String>>,
}

fn line_col_to_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len();
    }
    offset
}

fn parse_json_record(text: &str, base: usize) -> Result<PaperMeta, MetadataError> {
    let raw: JsonRecord = serde_json::from_str(text).map_err(|e| MetadataError::Parse {
        offset: base + line_col_to_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let id = raw
        .id
        .filter(|s| !s.trim().is_empty())
        .ok_or(MetadataError::MissingId { offset: base })?;
    let year = raw.year.ok_or_else(|| MetadataError::MissingYear { id: id.clone() })?;
    let year = check_year(&id, year)?;
    Ok(PaperMeta {
        authors_missing: raw.authors.is_none(),
        authors: raw.authors.unwrap_or_default(),
        title: raw.title.unwrap_or_default(),
        subjects: raw.subjects.unwrap_or_default(),
        year,
        id,
    })
}

#[derive(Default)]
struct XmlRecord {
    offset: usize,
    header_id: Option<String>,
    datestamp: Option<String>,
    title: Option<String>,
    creators: Vec<String>,
    subjects: Vec<String>,
    date: Option<String>,
}

impl XmlRecord {
    fn finish(self) -> Result<PaperMeta, MetadataError> {
        let id = self
            .header_id
            .map(|h| strip_oai_prefix(&h).to_string())
            .filter(|s| !s.is_empty())
            .ok_or(MetadataError::MissingId { offset: self.offset })?;
        let year_text = self
            .date
            .or(self.datestamp)
            .ok_or_else(|| MetadataError::MissingYear { id: id.clone() })?;
        let year = year_text
            .get(..4)
            .and_then(|y| y.parse::<i32>().ok())
            .ok_or_else(|| MetadataError::MissingYear { id: id.clone() })?;
        let year = check_year(&id, year)?;
        Ok(PaperMeta {
            authors_missing: self.creators.is_empty(),
            authors: self.creators,
            title: self.title.unwrap_or_default(),
            subjects: self.subjects,
            year,
            id,
        })
    }
}

/// `oai:arXiv.org:astro-ph/0601001` -> `astro-ph/0601001`.
fn strip_oai_prefix(identifier: &str) -> &str {
    let identifier = identifier.trim();
    match identifier.strip_prefix("oai:") {
        Some(rest) => rest.split_once(':').map_or(rest, |(_, id)| id),
        None => identifier,
    }
}

fn local_name(qname: &[u8]) -> &[u8] {
    match qname.iter().rposition(|&b| b == b':') {
        Some(i) => &qname[i + 1..],
        None => qname,
    }
}

fn parse_oai_xml(text: &str) -> Result<Vec<Result<PaperMeta, MetadataError>>, MetadataError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut out = Vec::new();
    let mut path: Vec<Vec<u8>> = Vec::new();
    let mut current: Option<XmlRecord> = None;
    let mut buf = String::new();

    let parse_err = |reader: &Reader<&[u8]>, message: String| MetadataError::Parse {
        offset: reader.buffer_position() as usize,
        message,
    };

    loop {
        let start = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|e| MetadataError::Parse {
            offset: reader.error_position() as usize,
            message: e.to_string(),
        })?;
        match event {
            Event::Start(e) => {
                let name = local_name(e.name().as_ref()).to_vec();
                if name == b"record" {
                    if current.is_some() {
                        return Err(parse_err(&reader, "nested <record>".into()));
                    }
                    current = Some(XmlRecord {
                        offset: start,
                        ..Default::default()
                    });
                }
                path.push(name);
                buf.clear();
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| parse_err(&reader, e.to_string()))?;
                buf.push_str(&s);
            }
            Event::CData(t) => {
                buf.push_str(&String::from_utf8_lossy(&t));
            }
            Event::End(e) => {
                let name = local_name(e.name().as_ref()).to_vec();
                if path.last() != Some(&name) {
                    return Err(parse_err(&reader, "mismatched closing tag".into()));
                }
                path.pop();
                let in_header = path.iter().any(|p| p == b"header");
                let in_metadata = path.iter().any(|p| p == b"metadata");
                if name == b"record" {
                    if let Some(rec) = current.take() {
                        out.push(rec.finish());
                    }
                } else if let Some(rec) = current.as_mut() {
                    let value = buf.trim().to_string();
                    match name.as_slice() {
                        b"identifier" if in_header => rec.header_id = Some(value),
                        b"datestamp" if in_header => rec.datestamp = Some(value),
                        b"title" if in_metadata => rec.title = Some(value),
                        b"creator" if in_metadata => rec.creators.push(value),
                        b"subject" if in_metadata => rec.subjects.push(value),
                        b"date" if in_metadata && rec.date.is_none() => rec.date = Some(value),
                        _ => {}
                    }
                }
                buf.clear();
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !path.is_empty() {
        return Err(MetadataError::Parse {
            offset: text.len(),
            message: "unexpected end of document".into(),
        });
    }
    Ok(out)
}
