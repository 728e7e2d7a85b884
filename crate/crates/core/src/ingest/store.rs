use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::metadata::{is_astro, PaperMeta};
use crate::latex::ExtractRecord;
use crate::nlp::{Pipeline, TokenBag};

/// One processed paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub meta: PaperMeta,
    pub tokens: TokenBag,
    /// Word tokens after stop-word removal, before the dictionary gate.
    pub raw_word_count: u64,
}

impl Document {
    pub fn from_text(meta: PaperMeta, text: &str, pipeline: &Pipeline) -> Self {
        let processed = pipeline.process(text);
        Self {
            meta,
            tokens: processed.bag,
            raw_word_count: processed.word_count,
        }
    }
}

/// Registry entry stored alongside each index row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocEntry {
    pub meta: PaperMeta,
    pub raw_word_count: u64,
}

impl DocEntry {
    pub fn new(meta: PaperMeta, raw_word_count: u64) -> Self {
        Self { meta, raw_word_count }
    }
}

impl From<&Document> for DocEntry {
    fn from(doc: &Document) -> Self {
        Self::new(doc.meta.clone(), doc.raw_word_count)
    }
}

/// Surviving document counts after each reduction stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunnelCounts {
    pub submitted: u64,
    pub main_tex_found: u64,
    pub front_matter_ok: u64,
    pub lemmatized: u64,
}

impl FunnelCounts {
    pub fn is_monotone(&self) -> bool {
        self.submitted >= self.main_tex_found
            && self.main_tex_found >= self.front_matter_ok
            && self.front_matter_ok >= self.lemmatized
    }
}

/// Side information collected while pairing metadata with extracted text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub metadata_records: u64,
    pub non_astro: u64,
    pub duplicate_ids: u64,
    pub missing_source: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStore {
    pub documents: Vec<Document>,
    pub provenance: FunnelCounts,
}

/// Directory-name form of a paper id: `astro-ph/0601001` -> `astro-ph_0601001`.
pub fn source_key(id: &str) -> String {
    id.replace('/', "_")
}

impl CorpusStore {
    /// Pairs astronomy metadata with extraction records (matched by id or by
    /// [`source_key`]) and runs the NLP pipeline on surviving texts.
    ///
    /// Documents keep metadata order. Duplicate ids keep their first record.
    pub fn assemble(metas: Vec<PaperMeta>, records: &[ExtractRecord], pipeline: &Pipeline) -> (Self, IngestReport) {
        let by_key: HashMap<String, &ExtractRecord> = records.iter().map(|r| (source_key(&r.id), r)).collect();
        let mut report = IngestReport {
            metadata_records: metas.len() as u64,
            ..Default::default()
        };
        let mut seen = HashSet::new();
        let mut funnel = FunnelCounts::default();
        let mut documents = Vec::new();

        for meta in metas {
            if !is_astro(&meta) {
                report.non_astro += 1;
                continue;
            }
            if !seen.insert(meta.id.clone()) {
                report.duplicate_ids += 1;
                continue;
            }
            let Some(record) = by_key.get(&source_key(&meta.id)) else {
                report.missing_source += 1;
                continue;
            };
            funnel.submitted += 1;
            if let Some(reason) = record.discard_reason {
                if !reason.is_main_file_stage() {
                    funnel.main_tex_found += 1;
                }
                continue;
            }
            let Some(text) = record.text.as_deref() else {
                continue;
            };
            funnel.main_tex_found += 1;
            funnel.front_matter_ok += 1;
            let doc = Document::from_text(meta, text, pipeline);
            if doc.tokens.is_empty() {
                continue;
            }
            funnel.lemmatized += 1;
            documents.push(doc);
        }
        (
            Self {
                documents,
                provenance: funnel,
            },
            report,
        )
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut w, doc)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    /// Reads documents written by [`write_jsonl`](Self::write_jsonl).
    /// Provenance is not stored in the file and comes back zeroed.
    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut documents = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("corpus line {}: {e}", i + 1)))?;
            documents.push(doc);
        }
        Ok(Self {
            documents,
            provenance: FunnelCounts::default(),
        })
    }
}
