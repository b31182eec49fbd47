//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 1 for internal
//! failures such as an unwritable output path.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::baselines::{baseline_expand, BaselineInputs, Method, VectorStore, DEFAULT_HASH_DIM};
use crate::corpus::{ingest_jsonl, write_jsonl, Document};
use crate::error::Error;
use crate::eval::{
    self, ablation_sweep, coverage, map_and_recall, ndcg, pr_curve, term_histogram, timed,
    EvalReport, Judgments, PhraseSet,
};
use crate::index_file::{load_index, save_index};
use crate::retrieval::{expand_query, expand_query_normalized, query_signature};
use crate::signature::{build_index_with_threads, SignatureParams};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "sigexpand",
    version,
    about = "Corpus expansion with truncated sparse document signatures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a signature index from a JSONL corpus.
    Build(BuildArgs),
    /// Stream new documents into an existing index.
    Update(UpdateArgs),
    /// Rank documents against a seed corpus.
    Expand(ExpandArgs),
    /// Score a result list: lexicon coverage and, with judgments, nDCG/recall/MAP.
    Eval(EvalArgs),
    /// Write a synthetic Zipfian corpus with a planted domain.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub k1: u32,
    #[arg(long, default_value_t = 100)]
    pub k2: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// The documents already in the index, in index order.
    #[arg(long)]
    pub corpus: PathBuf,
    /// New documents to add.
    #[arg(long = "doc-jsonl")]
    pub doc_jsonl: PathBuf,
    /// Re-sign every document afterwards so the index matches a fresh build.
    #[arg(long)]
    pub resign: bool,
    /// Where to write the updated index; defaults to overwriting `--index`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub seeds: PathBuf,
    #[arg(long = "top-k", default_value_t = 500_000)]
    pub top_k: usize,
    #[arg(long, value_enum, default_value_t = Method::Signature)]
    pub method: Method,
    /// Corpus JSONL; needed by tfidf, hash and query.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Dense vector store; needed by dense.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Lexicon, one phrase per line; needed by query.
    #[arg(long)]
    pub phrases: Option<PathBuf>,
    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long = "hash-dim", default_value_t = DEFAULT_HASH_DIM)]
    pub hash_dim: usize,
    /// Rank signature matches by binary cosine instead of raw overlap.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub phrases: PathBuf,
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    /// Comma-separated ascending top-k values for the ablation table.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    /// Rank cutoff for nDCG/recall/MAP; defaults to the result length.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Query time of the run being evaluated, copied into the report.
    #[arg(long = "elapsed-ms")]
    pub elapsed_ms: Option<f64>,
    /// Output directory for report.json and the TSV tables.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub docs: usize,
    #[arg(long = "domain-docs", default_value_t = 400)]
    pub domain_docs: usize,
    #[arg(long = "seed-docs", default_value_t = 20)]
    pub seed_docs: usize,
    #[arg(long, default_value_t = 100)]
    pub phrases: usize,
    #[arg(long = "rng-seed", default_value_t = 42)]
    pub rng_seed: u64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

trait Classify<T> {
    /// Bad or missing input: exit 2.
    fn input(self) -> Result<T, CliError>;
    /// Failure producing output: exit 1.
    fn internal(self) -> Result<T, CliError>;
}

impl<T> Classify<T> for Result<T, Error> {
    fn input(self) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            code: 2,
            message: e.to_string(),
        })
    }

    fn internal(self) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn print_json(value: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{value}");
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Update(a) => cmd_update(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn cmd_build(a: BuildArgs) -> Result<(), CliError> {
    let params = SignatureParams::new(a.k1, a.k2).input()?;
    let docs = ingest_jsonl(&a.corpus).input()?;
    let (index, elapsed) = timed(|| build_index_with_threads(&docs, params, a.threads));
    let index = index.input()?;
    save_index(&index, &a.out).internal()?;
    print_json(&json!({
        "n_docs": index.vocab().n_docs(),
        "vocab": index.vocab().len(),
        "dim": index.dim(),
        "k1": params.k1(),
        "k2": params.k2(),
        "elapsed_ms": elapsed.as_secs_f64() * 1e3,
    }));
    Ok(())
}

fn cmd_update(a: UpdateArgs) -> Result<(), CliError> {
    let mut index = load_index(&a.index).input()?;
    let corpus = ingest_jsonl(&a.corpus).input()?;
    index.attach_corpus(&corpus).input()?;
    let new_docs = ingest_jsonl(&a.doc_jsonl).input()?;
    let dim_before = index.dim();
    let mut new_terms = 0;
    for doc in &new_docs {
        new_terms += index.update(doc).input()?.new_terms;
    }
    let stale = index.stale_count();
    if a.resign {
        index.resign_all().input()?;
    }
    let out = a.out.as_deref().unwrap_or(&a.index);
    save_index(&index, out).internal()?;
    print_json(&json!({
        "added": new_docs.len(),
        "n_docs": index.vocab().n_docs(),
        "dim_before": dim_before,
        "dim": index.dim(),
        "new_terms": new_terms,
        "stale": stale,
        "resigned": a.resign,
    }));
    Ok(())
}

fn format_results<S: fmt::Display>(ranked: &[(String, S)]) -> String {
    let mut out = String::from("rank\tdoc_id\tscore\n");
    for (i, (id, score)) in ranked.iter().enumerate() {
        out.push_str(&format!("{}\t{id}\t{score}\n", i + 1));
    }
    out
}

fn cmd_expand(a: ExpandArgs) -> Result<(), CliError> {
    if a.top_k == 0 {
        return Err(CliError::usage("--top-k must be at least 1"));
    }
    let seeds = ingest_jsonl(&a.seeds).input()?;
    let load_corpus = |p: &Option<PathBuf>| -> Result<Option<Vec<Document>>, CliError> {
        p.as_deref().map(ingest_jsonl).transpose().input()
    };

    let (table, query_terms, elapsed) = match a.method {
        Method::Signature => {
            let path = a
                .index
                .as_deref()
                .ok_or_else(|| CliError::usage("method `signature` needs --index"))?;
            let index = load_index(path).input()?;
            let ((table, q), elapsed) = timed(|| {
                let q = query_signature(&seeds, &index);
                let table = if a.normalized {
                    let r = expand_query_normalized(&index, &q, a.top_k, a.threads);
                    format_results(
                        &r.into_iter()
                            .map(|d| (d.doc_id, d.score))
                            .collect::<Vec<_>>(),
                    )
                } else {
                    let r = expand_query(&index, &q, a.top_k, a.threads);
                    format_results(
                        &r.into_iter()
                            .map(|d| (d.doc_id, d.score))
                            .collect::<Vec<_>>(),
                    )
                };
                (table, q)
            });
            (table, Some(q.len()), elapsed)
        }
        method => {
            let corpus = load_corpus(&a.corpus)?;
            let vectors = a
                .vectors
                .as_deref()
                .map(VectorStore::<f64>::load)
                .transpose()
                .input()?;
            let phrases = a
                .phrases
                .as_deref()
                .map(PhraseSet::load)
                .transpose()
                .input()?;
            // random may fall back to the index for its document ids
            let index_ids: Option<Vec<Document>> = match (method, &corpus, &vectors, &a.index) {
                (Method::Random, None, None, Some(p)) => Some(
                    load_index(p)
                        .input()?
                        .signatures()
                        .iter()
                        .map(|s| Document::new(s.doc_id.clone(), ""))
                        .collect(),
                ),
                _ => None,
            };
            let mut inputs = BaselineInputs::new(&seeds, a.top_k);
            inputs.corpus = corpus.as_deref().or(index_ids.as_deref());
            inputs.vectors = vectors.as_ref();
            inputs.phrases = phrases.as_ref();
            inputs.rng_seed = a.rng_seed;
            inputs.hash_dim = a.hash_dim;
            inputs.threads = a.threads;
            let (ranked, elapsed) = timed(|| baseline_expand(method, &inputs));
            let ranked = ranked.input()?;
            let rows: Vec<(String, f64)> =
                ranked.into_iter().map(|d| (d.doc_id, d.score)).collect();
            (format_results(&rows), None, elapsed)
        }
    };
    write_file(&a.out, table.as_bytes())?;
    let mut summary = json!({
        "method": a.method.name(),
        "results": table.lines().count() - 1,
        "elapsed_ms": elapsed.as_secs_f64() * 1e3,
    });
    if let Some(q) = query_terms {
        summary["query_terms"] = json!(q);
    }
    print_json(&summary);
    Ok(())
}

/// Reads the ranked doc ids from a results TSV, skipping the header.
pub fn read_results(path: &Path) -> crate::error::Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("rank\t")) {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next()) {
            (Some(_), Some(id)) => ids.push(id.to_owned()),
            _ => {
                return Err(Error::MalformedLine {
                    line: i + 1,
                    message: "expected rank<TAB>doc_id<TAB>score".into(),
                })
            }
        }
    }
    Ok(ids)
}

fn cmd_eval(a: EvalArgs) -> Result<(), CliError> {
    let ranked = read_results(&a.results).input()?;
    let corpus = ingest_jsonl(&a.corpus).input()?;
    let phrases = PhraseSet::load(&a.phrases).input()?;
    if phrases.is_empty() {
        return Err(CliError::usage("phrase set is empty"));
    }
    let judgments = a
        .judgments
        .as_deref()
        .map(Judgments::load)
        .transpose()
        .input()?;

    let by_id: HashMap<&str, &Document> = corpus.iter().map(|d| (d.id.as_str(), d)).collect();
    let retrieved = ranked
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownId(id.clone()))
        })
        .collect::<Result<Vec<&Document>, Error>>()
        .input()?;
    let cov: eval::Coverage<f64> = coverage(&phrases, &retrieved).input()?;
    let ablation = ablation_sweep(&ranked, &corpus, &phrases, &a.ks).input()?;
    let cutoff = a.cutoff.unwrap_or(ranked.len()).max(1);

    fs::create_dir_all(&a.out).map_err(|e| CliError {
        code: 1,
        message: format!("{}: {e}", a.out.display()),
    })?;
    let mut report = EvalReport {
        coverage: cov.fraction,
        phrases: phrases.len(),
        found: cov.found_count(),
        retrieved: ranked.len(),
        ndcg: None,
        recall: None,
        map: None,
        elapsed_ms: a.elapsed_ms,
        ablation: ablation.clone(),
    };
    if let Some(j) = &judgments {
        report.ndcg = Some(ndcg(&ranked, j, cutoff));
        let (map, recall) = map_and_recall(&ranked, j, cutoff);
        report.map = Some(map);
        report.recall = Some(recall);
        if let Ok(curve) = pr_curve::<f64, _>(&ranked, j) {
            let mut tsv = String::from("rank\trecall\tprecision\n");
            for (i, (r, p)) in curve.iter().enumerate() {
                tsv.push_str(&format!("{}\t{r}\t{p}\n", i + 1));
            }
            write_file(&a.out.join("pr_curve.tsv"), tsv.as_bytes())?;
        }
    }

    let mut hist = String::from("phrase\tfrequency\tfound\n");
    for row in term_histogram(&phrases, &corpus, &retrieved) {
        hist.push_str(&format!(
            "{}\t{}\t{}\n",
            row.phrase,
            row.frequency,
            u8::from(row.found)
        ));
    }
    write_file(&a.out.join("histogram.tsv"), hist.as_bytes())?;
    let mut abl = String::from("top_k\tnot_found\n");
    for row in &ablation {
        abl.push_str(&format!("{}\t{}\n", row.top_k, row.not_found));
    }
    write_file(&a.out.join("ablation.tsv"), abl.as_bytes())?;

    let json = serde_json::to_value(&report).expect("report serializes");
    write_file(
        &a.out.join("report.json"),
        serde_json::to_string_pretty(&json)
            .expect("value serializes")
            .as_bytes(),
    )?;
    print_json(&json);
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let cfg = SynthConfig {
        n_docs: a.docs,
        domain_docs: a.domain_docs,
        seed_docs: a.seed_docs,
        phrases: a.phrases,
        rng_seed: a.rng_seed,
        ..SynthConfig::default()
    };
    let synth = generate(&cfg).input()?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError {
        code: 1,
        message: format!("{}: {e}", a.out_dir.display()),
    })?;
    write_jsonl(&a.out_dir.join("corpus.jsonl"), &synth.corpus).internal()?;
    write_jsonl(&a.out_dir.join("seeds.jsonl"), &synth.seeds).internal()?;
    write_file(
        &a.out_dir.join("phrases.txt"),
        (synth.phrases.phrases().join("\n") + "\n").as_bytes(),
    )?;
    let mut judg = String::new();
    for d in &synth.corpus {
        judg.push_str(&format!(
            "{}\t{}\n",
            d.id,
            u8::from(synth.domain_ids.contains(&d.id))
        ));
    }
    write_file(&a.out_dir.join("judgments.tsv"), judg.as_bytes())?;
    print_json(&json!({
        "docs": synth.corpus.len(),
        "domain_docs": synth.domain_ids.len(),
        "seeds": synth.seeds.len(),
        "phrases": synth.phrases.len(),
    }));
    Ok(())
}
