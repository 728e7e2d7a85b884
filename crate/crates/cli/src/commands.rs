//! Subcommand implementations. Progress and funnel counts go to stderr as
//! one JSON object per line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lsim_core::ingest::{load_index, parse_metadata_stream, save_index, CorpusStore, MetadataFormat};
use lsim_core::latex::{extract_tree, ExtractRecord, StripConfig};
use lsim_core::stats::{yearly_summary, YearSummary};
use lsim_core::{Lexicon, Pipeline, StopList, TfidfConfig, TfidfIndex};
use serde_json::json;

use crate::service::{QueryRequest, Service, DEFAULT_K};

#[derive(Debug, Parser)]
#[command(name = "lsim", version, about = "TF-IDF similarity search over LaTeX paper corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract plain text from a tree of per-paper LaTeX source directories.
    Extract {
        /// Directory holding one subdirectory per paper.
        #[arg(long)]
        src: PathBuf,
        /// Output JSON-lines file of extraction records.
        #[arg(long)]
        out: PathBuf,
    },
    /// Pair metadata with extracted text and run the NLP pipeline.
    Ingest {
        #[arg(long)]
        meta: PathBuf,
        /// Metadata format: json-lines or oai-xml (guessed from the extension if omitted).
        #[arg(long)]
        format: Option<MetadataFormat>,
        /// Extraction records written by `extract`.
        #[arg(long)]
        extracted: PathBuf,
        /// Output corpus (JSON lines, one document per line).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        nlp: NlpArgs,
    },
    /// Build and save the TF-IDF index.
    BuildIndex {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add 1 to every idf value.
        #[arg(long)]
        idf_plus_one: bool,
    },
    /// Print the best matches as `id<TAB>score` lines.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, conflicts_with = "text", required_unless_present = "text")]
        doc_id: Option<String>,
        #[arg(long)]
        text: Option<String>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Also print the important words (after a blank line).
        #[arg(long)]
        important_words: bool,
        #[command(flatten)]
        nlp: NlpArgs,
    },
    /// Write per-year statistics: `stats.csv` and `kde.json`.
    Stats {
        #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
        index: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the JSON API over HTTP.
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[command(flatten)]
        nlp: NlpArgs,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct NlpArgs {
    /// Lexicon file replacing the bundled one.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Stop-word list replacing the bundled English one.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

impl NlpArgs {
    pub fn pipeline(&self) -> Result<Pipeline> {
        let lexicon = match &self.lexicon {
            Some(p) => {
                let lex = Lexicon::parse(&read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?;
                lex.validate().with_context(|| format!("validating {}", p.display()))?;
                lex
            }
            None => Lexicon::builtin(),
        };
        let stoplist = match &self.stopwords {
            Some(p) => StopList::parse(&read_to_string(p)?),
            None => StopList::english(),
        };
        Ok(Pipeline::new(lexicon, stoplist))
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn progress(value: serde_json::Value) {
    eprintln!("{value}");
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { src, out } => extract(&src, &out),
        Command::Ingest {
            meta,
            format,
            extracted,
            out,
            nlp,
        } => ingest(&meta, format, &extracted, &out, &nlp.pipeline()?),
        Command::BuildIndex {
            corpus,
            out,
            idf_plus_one,
        } => build_index(&corpus, &out, TfidfConfig { idf_plus_one }),
        Command::Query {
            index,
            doc_id,
            text,
            k,
            important_words,
            nlp,
        } => {
            let req = QueryRequest {
                doc_id,
                text,
                k,
                exclude: Vec::new(),
                important_words,
            };
            let svc = Service::new(open_index(&index)?, nlp.pipeline()?);
            query(&svc, &req, &mut std::io::stdout().lock())
        }
        Command::Stats { index, corpus, out } => {
            let index = match (index, corpus) {
                (Some(p), _) => open_index(&p)?,
                (None, Some(c)) => TfidfIndex::from_documents(&read_corpus(&c)?.documents, TfidfConfig::default())?,
                (None, None) => bail!("give --index or --corpus"),
            };
            stats(&index, &out)
        }
        Command::Serve { index, host, port, nlp } => {
            let svc = Service::new(open_index(&index)?, nlp.pipeline()?);
            serve(svc, &host, port)
        }
    }
}

pub fn extract(src: &Path, out: &Path) -> Result<()> {
    let records =
        extract_tree(src, &StripConfig::default()).with_context(|| format!("cannot read {}", src.display()))?;
    let mut w = create(out)?;
    let mut discarded: BTreeMap<String, usize> = BTreeMap::new();
    for rec in &records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
        if let Some(reason) = rec.discard_reason {
            *discarded
                .entry(serde_json::to_value(reason)?.as_str().unwrap_or("").to_string())
                .or_default() += 1;
        }
        for warning in &rec.warnings {
            log::warn!("{}: {warning}", rec.id);
        }
    }
    w.flush()?;
    let kept = records.iter().filter(|r| r.text.is_some()).count();
    progress(json!({ "stage": "extract", "papers": records.len(), "kept": kept, "discarded": discarded }));
    Ok(())
}

fn read_records(path: &Path) -> Result<Vec<ExtractRecord>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
        }
    }
    Ok(out)
}

fn guess_format(path: &Path) -> MetadataFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("xml") => MetadataFormat::OaiXml,
        _ => MetadataFormat::JsonLines,
    }
}

pub fn ingest(
    meta: &Path,
    format: Option<MetadataFormat>,
    extracted: &Path,
    out: &Path,
    pipeline: &Pipeline,
) -> Result<()> {
    let format = format.unwrap_or_else(|| guess_format(meta));
    let parsed = parse_metadata_stream(&read_to_string(meta)?, format)
        .with_context(|| format!("cannot parse {}", meta.display()))?;
    let mut metas = Vec::with_capacity(parsed.len());
    let mut rejected = 0;
    for rec in parsed {
        match rec {
            Ok(m) => metas.push(m),
            Err(e) => {
                log::warn!("{}: {e}", meta.display());
                rejected += 1;
            }
        }
    }
    let records = read_records(extracted)?;
    let (store, report) = CorpusStore::assemble(metas, &records, pipeline);
    store.write_jsonl(create(out)?)?;
    progress(json!({ "stage": "metadata", "rejected_records": rejected, "report": report }));
    progress(json!({ "stage": "funnel", "funnel": store.provenance }));
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<CorpusStore> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    CorpusStore::read_jsonl(BufReader::new(file)).with_context(|| format!("cannot read {}", path.display()))
}

pub fn build_index(corpus: &Path, out: &Path, cfg: TfidfConfig) -> Result<()> {
    let store = read_corpus(corpus)?;
    let index = TfidfIndex::from_documents(&store.documents, cfg)?;
    save_index(&index, out).with_context(|| format!("cannot write {}", out.display()))?;
    let empty = (0..index.len()).filter(|&i| index.is_empty_row(i)).count();
    progress(json!({
        "stage": "index",
        "documents": index.len(),
        "vocabulary": index.vocab().len(),
        "nnz": index.rows().nnz(),
        "empty_rows": empty,
    }));
    Ok(())
}

pub fn open_index(path: &Path) -> Result<TfidfIndex> {
    load_index(path).with_context(|| format!("cannot load index {}", path.display()))
}

pub fn query(svc: &Service, req: &QueryRequest, out: &mut impl Write) -> Result<()> {
    let resp = svc.handle_similar(req)?;
    for row in &resp.results {
        writeln!(out, "{}\t{:.6}", row.doc_id, row.score)?;
    }
    if let Some(words) = &resp.important_words {
        writeln!(out)?;
        for w in words {
            writeln!(out, "{}\t{:.6}", w.term, w.weight)?;
        }
    }
    Ok(())
}

pub fn stats(index: &TfidfIndex, out_dir: &Path) -> Result<()> {
    let summary = yearly_summary(index.docs());
    let mut csv = create(&out_dir.join("stats.csv"))?;
    writeln!(csv, "year,median_authors,median_words,total_words,extreme_fraction")?;
    for pair in &summary {
        let row = YearSummary::from(pair);
        writeln!(
            csv,
            "{},{},{},{},{}",
            row.year, row.median_authors, row.median_words, row.total_words, row.extreme_fraction
        )?;
    }
    csv.flush()?;
    let kde: Vec<_> = summary
        .iter()
        .map(|(a, _)| json!({ "year": a.year, "paper_count": a.paper_count, "kde": a.kde }))
        .collect();
    let mut w = create(&out_dir.join("kde.json"))?;
    serde_json::to_writer(&mut w, &kde)?;
    w.flush()?;
    progress(json!({ "stage": "stats", "years": summary.len() }));
    Ok(())
}

pub fn serve(svc: Service, host: &str, port: u16) -> Result<()> {
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .with_context(|| format!("invalid address {host}:{port}"))?;
    let app = crate::http::router(Arc::new(svc));
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        progress(json!({ "stage": "serve", "address": listener.local_addr()?.to_string() }));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
