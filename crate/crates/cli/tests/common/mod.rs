#![allow(dead_code)]

#[path = "../../../core/tests/common/oracle.rs"]
pub mod oracle;

use std::path::{Path, PathBuf};

use lsim_core::ingest::{parse_metadata_stream, CorpusStore, MetadataFormat};
use lsim_core::latex::{extract_tree, ExtractRecord, StripConfig};
use lsim_core::{Pipeline, TfidfConfig, TfidfIndex};

pub fn fixture_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/corpus")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixture_records() -> Vec<ExtractRecord> {
    extract_tree(&fixture_corpus().join("src"), &StripConfig::default()).unwrap()
}

pub fn fixture_store() -> CorpusStore {
    let text = std::fs::read_to_string(fixture_corpus().join("meta.jsonl")).unwrap();
    let metas = parse_metadata_stream(&text, MetadataFormat::JsonLines)
        .unwrap()
        .into_iter()
        .map(Result::unwrap)
        .collect();
    CorpusStore::assemble(metas, &fixture_records(), &Pipeline::builtin()).0
}

pub fn fixture_index() -> TfidfIndex {
    TfidfIndex::from_documents(&fixture_store().documents, TfidfConfig::default()).unwrap()
}
