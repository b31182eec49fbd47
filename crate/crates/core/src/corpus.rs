//! Document ingestion, tokenization and document-count statistics.
//!
//! A corpus is read as JSONL (`{"id": ..., "text": ...}` per line). Each
//! document is reduced to its set of distinct terms, kept in order of first
//! occurrence. Document counts can be gathered sequentially with
//! [`count_documents`] or by partition with [`PartialCounts`], whose merge is
//! associative and commutative so any reduction tree yields the same
//! [`Vocabulary`].

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;

/// Lowercases `text` and splits it into maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Lowercase, collapse whitespace runs to a single space and trim.
///
/// This is the form phrase matching runs against.
pub fn normalize_text(text: &str) -> String {
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    terms: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut seen = HashSet::new();
        let terms = tokenize(&text)
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();
        Document {
            id: id.into(),
            text,
            terms,
        }
    }

    /// Distinct terms in order of first occurrence.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.terms.iter().any(|t| t == term)
    }
}

/// Position of a term's first occurrence in the document stream.
///
/// Ordered by document ordinal, then by position within that document's
/// distinct-term list. Used to break ties between terms of equal document
/// count when assigning ids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FirstSeen {
    pub doc: u64,
    pub pos: u32,
}

/// Term dictionary with per-term document counts.
///
/// Ids are dense (`0..len`). After a batch build they are ordered by
/// decreasing document count with ties in first-seen order; terms added by
/// streaming updates are appended at the end until the index is
/// re-canonicalized.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_to_id: HashMap<String, u32>,
    dc: Vec<u64>,
    first_seen: Vec<FirstSeen>,
    n_docs: u64,
}

impl PartialEq for Vocabulary {
    // first-seen keys are bookkeeping and are not persisted
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.dc == other.dc && self.n_docs == other.n_docs
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.term_to_id.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Document count of `id`.
    pub fn dc(&self, id: u32) -> u64 {
        self.dc[id as usize]
    }

    pub fn first_seen_of(&self, id: u32) -> FirstSeen {
        self.first_seen[id as usize]
    }

    pub fn dcs(&self) -> &[u64] {
        &self.dc
    }

    /// Document count of `term`, zero when the term is unknown.
    pub fn dc_of(&self, term: &str) -> u64 {
        self.id(term).map_or(0, |id| self.dc(id))
    }

    /// Rebuilds a vocabulary from persisted parts. First-seen keys are
    /// approximated by id order.
    pub(crate) fn from_parts(terms: Vec<String>, dc: Vec<u64>, n_docs: u64) -> Result<Self> {
        if terms.len() != dc.len() {
            return Err(Error::Input(
                "term and count arrays differ in length".into(),
            ));
        }
        if let Some((i, &c)) = dc.iter().enumerate().find(|(_, &c)| c > n_docs) {
            return Err(Error::Input(format!(
                "term `{}` has document count {c} above corpus size {n_docs}",
                terms[i]
            )));
        }
        let mut term_to_id = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if term_to_id.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Input(format!("term `{t}` appears twice")));
            }
        }
        let first_seen = (0..terms.len())
            .map(|i| FirstSeen {
                doc: 0,
                pos: i as u32,
            })
            .collect();
        Ok(Vocabulary {
            terms,
            term_to_id,
            dc,
            first_seen,
            n_docs,
        })
    }

    /// Counts one more document. Unseen terms get fresh ids at the end.
    /// Returns `(id, previous dc)` for every distinct term of the document.
    pub(crate) fn observe(&mut self, terms: &[String]) -> Vec<(u32, u64)> {
        let doc = self.n_docs;
        let mut touched = Vec::with_capacity(terms.len());
        for (pos, term) in terms.iter().enumerate() {
            let id = match self.term_to_id.get(term) {
                Some(&id) => id,
                None => {
                    let id = self.terms.len() as u32;
                    self.terms.push(term.clone());
                    self.term_to_id.insert(term.clone(), id);
                    self.dc.push(0);
                    self.first_seen.push(FirstSeen {
                        doc,
                        pos: pos as u32,
                    });
                    id
                }
            };
            touched.push((id, self.dc[id as usize]));
            self.dc[id as usize] += 1;
        }
        self.n_docs += 1;
        touched
    }

    /// Replaces first-seen keys with ones recomputed from the full corpus.
    pub(crate) fn set_first_seen(&mut self, first_seen: Vec<FirstSeen>) {
        debug_assert_eq!(first_seen.len(), self.terms.len());
        self.first_seen = first_seen;
    }

    /// Renumbers ids into canonical order (decreasing dc, then first seen).
    /// Returns the old-id → new-id mapping.
    pub(crate) fn canonicalize(&mut self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.terms.len() as u32).collect();
        order.sort_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            self.dc[b]
                .cmp(&self.dc[a])
                .then(self.first_seen[a].cmp(&self.first_seen[b]))
        });
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let terms = order
            .iter()
            .map(|&o| self.terms[o as usize].clone())
            .collect::<Vec<_>>();
        let dc = order.iter().map(|&o| self.dc[o as usize]).collect();
        let first_seen = order.iter().map(|&o| self.first_seen[o as usize]).collect();
        self.term_to_id = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        self.terms = terms;
        self.dc = dc;
        self.first_seen = first_seen;
        remap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TermStat {
    count: u64,
    first_seen: FirstSeen,
}

/// Document counts over one partition of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialCounts {
    terms: HashMap<String, TermStat>,
    n_docs: u64,
}

impl PartialCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn count(&self, term: &str) -> u64 {
        self.terms.get(term).map_or(0, |s| s.count)
    }

    /// Adds `doc`, which sits at position `ordinal` of the whole corpus.
    pub fn observe(&mut self, ordinal: u64, doc: &Document) {
        for (pos, term) in doc.terms().iter().enumerate() {
            let key = FirstSeen {
                doc: ordinal,
                pos: pos as u32,
            };
            self.terms
                .entry(term.clone())
                .and_modify(|s| {
                    s.count += 1;
                    s.first_seen = s.first_seen.min(key);
                })
                .or_insert(TermStat {
                    count: 1,
                    first_seen: key,
                });
        }
        self.n_docs += 1;
    }

    pub fn merge(mut self, other: PartialCounts) -> PartialCounts {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (std::mem::take(&mut self), other)
        } else {
            (other, self)
        };
        for (term, stat) in small.terms {
            big.terms
                .entry(term)
                .and_modify(|s| {
                    s.count += stat.count;
                    s.first_seen = s.first_seen.min(stat.first_seen);
                })
                .or_insert(stat);
        }
        big.n_docs += small.n_docs;
        big
    }

    pub fn into_vocabulary(self) -> Vocabulary {
        let mut entries: Vec<(String, TermStat)> = self.terms.into_iter().collect();
        entries.sort_by(|a, b| {
            b.1.count
                .cmp(&a.1.count)
                .then(a.1.first_seen.cmp(&b.1.first_seen))
        });
        let mut vocab = Vocabulary {
            n_docs: self.n_docs,
            ..Vocabulary::default()
        };
        for (i, (term, stat)) in entries.into_iter().enumerate() {
            vocab.term_to_id.insert(term.clone(), i as u32);
            vocab.terms.push(term);
            vocab.dc.push(stat.count);
            vocab.first_seen.push(stat.first_seen);
        }
        vocab
    }
}

pub fn merge_counts(a: PartialCounts, b: PartialCounts) -> PartialCounts {
    a.merge(b)
}

/// Sequential document counting over the corpus in iteration order.
pub fn count_documents<'a, I>(docs: I) -> Vocabulary
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut counts = PartialCounts::new();
    for (i, doc) in docs.into_iter().enumerate() {
        counts.observe(i as u64, doc);
    }
    counts.into_vocabulary()
}

/// Partition-parallel document counting; identical result to [`count_documents`].
pub fn count_documents_parallel(docs: &[Document], threads: usize) -> Vocabulary {
    if parallel::is_sequential(threads) {
        return count_documents(docs);
    }
    parallel::run(threads, || {
        docs.par_iter()
            .enumerate()
            .fold(PartialCounts::new, |mut acc, (i, doc)| {
                acc.observe(i as u64, doc);
                acc
            })
            .reduce(PartialCounts::new, merge_counts)
            .into_vocabulary()
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    text: String,
}

/// Streaming JSONL reader. Rejects malformed lines and repeated ids.
pub struct JsonlDocuments<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    seen: HashSet<String>,
}

impl<R: BufRead> JsonlDocuments<R> {
    pub fn new(reader: R) -> Self {
        JsonlDocuments {
            lines: reader.lines(),
            line_no: 0,
            seen: HashSet::new(),
        }
    }
}

impl<R: BufRead> Iterator for JsonlDocuments<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    return Some(Err(Error::MalformedLine {
                        line: self.line_no,
                        message: e.to_string(),
                    }))
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => {
                    return Some(Err(Error::MalformedLine {
                        line: self.line_no,
                        message: e.to_string(),
                    }))
                }
            };
            if !self.seen.insert(rec.id.clone()) {
                return Some(Err(Error::DuplicateId(rec.id)));
            }
            return Some(Ok(Document::new(rec.id, rec.text)));
        }
    }
}

pub fn open_jsonl(path: &Path) -> Result<JsonlDocuments<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(JsonlDocuments::new(BufReader::new(file)))
}

/// Reads a whole JSONL corpus into memory, in file order.
pub fn ingest_jsonl(path: &Path) -> Result<Vec<Document>> {
    open_jsonl(path)?.collect()
}

pub fn write_jsonl<'a, I>(path: &Path, docs: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Document>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for doc in docs {
        let line = serde_json::to_string(&Record {
            id: doc.id.clone(),
            text: doc.text.clone(),
        })
        .expect("string record serializes");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
