//! Metadata parsing, corpus assembly and index persistence.

mod index_io;
mod metadata;
mod store;

pub use index_io::{decode_index, encode_index, load_index, save_index, IndexIoError, FORMAT_VERSION, MAGIC};
pub use metadata::{
    is_astro, parse_metadata, parse_metadata_stream, MetadataError, MetadataFormat, PaperMeta, FIRST_YEAR,
};
pub use store::{source_key, CorpusStore, DocEntry, Document, FunnelCounts, IngestReport};
