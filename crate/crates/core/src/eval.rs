//! Evaluation harness: lexicon coverage, ranked-retrieval metrics,
//! precision-recall curves, term histograms and top-k ablations.
//!
//! A lexicon phrase counts as *found* when it occurs as a contiguous
//! substring of a document's normalized text (see
//! [`normalize_text`](crate::corpus::normalize_text)). Substring rather than
//! token matching keeps entries such as `f - stop` or `579` matchable.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use num_traits::Float;
use serde::Serialize;

use crate::corpus::{normalize_text, Document};
use crate::error::{Error, Result};

/// The domain lexicon used only for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseSet {
    phrases: Vec<String>,
}

impl PhraseSet {
    /// Normalizes each phrase and drops empty ones. Order is kept.
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let phrases = phrases
            .into_iter()
            .map(|p| normalize_text(p.as_ref()))
            .filter(|p| !p.is_empty())
            .collect();
        PhraseSet { phrases }
    }

    /// One phrase per line.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(text.lines()))
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

/// Binary relevance judgments keyed by document id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Judgments {
    relevant: HashMap<String, bool>,
}

impl Judgments {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        Judgments {
            relevant: pairs.into_iter().map(|(d, r)| (d.into(), r)).collect(),
        }
    }

    /// Reads `doc_id<TAB>0|1` lines.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut relevant = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: &str| Error::MalformedLine {
                line: i + 1,
                message: message.to_owned(),
            };
            let (doc, label) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected doc_id<TAB>0|1"))?;
            let rel = match label.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(malformed("relevance must be 0 or 1")),
            };
            relevant.insert(doc.to_owned(), rel);
        }
        Ok(Judgments { relevant })
    }

    pub fn is_relevant(&self, doc_id: &str) -> bool {
        self.relevant.get(doc_id).copied().unwrap_or(false)
    }

    pub fn relevant_count(&self) -> usize {
        self.relevant.values().filter(|&&r| r).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage<T> {
    pub fraction: T,
    pub found: Vec<bool>,
}

impl<T> Coverage<T> {
    pub fn found_count(&self) -> usize {
        self.found.iter().filter(|&&f| f).count()
    }
}

fn cast<T: Float>(x: usize) -> T {
    T::from(x).expect("count fits the float type")
}

fn phrases_found(phrases: &PhraseSet, normalized: &[String]) -> Vec<bool> {
    phrases
        .phrases()
        .iter()
        .map(|p| normalized.iter().any(|t| t.contains(p.as_str())))
        .collect()
}

/// Fraction of lexicon phrases present in at least one retrieved document.
pub fn coverage<T: Float>(phrases: &PhraseSet, retrieved: &[&Document]) -> Result<Coverage<T>> {
    if phrases.is_empty() {
        return Err(Error::Input(
            "coverage of an empty phrase set is undefined".into(),
        ));
    }
    let normalized: Vec<String> = retrieved.iter().map(|d| normalize_text(&d.text)).collect();
    let found = phrases_found(phrases, &normalized);
    let hits = found.iter().filter(|&&f| f).count();
    Ok(Coverage {
        fraction: cast::<T>(hits) / cast::<T>(phrases.len()),
        found,
    })
}

/// nDCG at cutoff `n` with log2 discounts, positions counted from 1.
pub fn ndcg<T: Float, S: AsRef<str>>(ranked: &[S], judgments: &Judgments, n: usize) -> T {
    let two = T::one() + T::one();
    let discount = |i: usize| (cast::<T>(i) + two).log2();
    let dcg = ranked
        .iter()
        .take(n)
        .enumerate()
        .filter(|(_, d)| judgments.is_relevant(d.as_ref()))
        .fold(T::zero(), |acc, (i, _)| acc + T::one() / discount(i));
    let ideal = (0..judgments.relevant_count().min(n))
        .fold(T::zero(), |acc, i| acc + T::one() / discount(i));
    if ideal == T::zero() {
        T::zero()
    } else {
        dcg / ideal
    }
}

/// Average precision over relevant documents retrieved in the top `n`, and
/// recall at `n` against every judged-relevant document.
pub fn map_and_recall<T: Float, S: AsRef<str>>(
    ranked: &[S],
    judgments: &Judgments,
    n: usize,
) -> (T, T) {
    let mut hits = 0usize;
    let mut precision_sum = T::zero();
    for (i, d) in ranked.iter().take(n).enumerate() {
        if judgments.is_relevant(d.as_ref()) {
            hits += 1;
            precision_sum = precision_sum + cast::<T>(hits) / cast::<T>(i + 1);
        }
    }
    let total = judgments.relevant_count();
    let ap = if hits == 0 {
        T::zero()
    } else {
        precision_sum / cast::<T>(hits)
    };
    let recall = if total == 0 {
        T::zero()
    } else {
        cast::<T>(hits) / cast::<T>(total)
    };
    (ap, recall)
}

/// One `(recall, precision)` point per rank position.
pub fn pr_curve<T: Float, S: AsRef<str>>(
    ranked: &[S],
    judgments: &Judgments,
) -> Result<Vec<(T, T)>> {
    let total = judgments.relevant_count();
    if total == 0 {
        return Err(Error::Input(
            "precision-recall needs at least one relevant document".into(),
        ));
    }
    let mut hits = 0usize;
    Ok(ranked
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if judgments.is_relevant(d.as_ref()) {
                hits += 1;
            }
            (
                cast::<T>(hits) / cast::<T>(total),
                cast::<T>(hits) / cast::<T>(i + 1),
            )
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramRow {
    pub phrase: String,
    /// Corpus documents whose normalized text contains the phrase.
    pub frequency: usize,
    pub found: bool,
}

/// Per-phrase corpus frequency and whether retrieval found it, most frequent first.
pub fn term_histogram(
    phrases: &PhraseSet,
    corpus: &[Document],
    retrieved: &[&Document],
) -> Vec<HistogramRow> {
    let corpus_text: Vec<String> = corpus.iter().map(|d| normalize_text(&d.text)).collect();
    let retrieved_text: Vec<String> = retrieved.iter().map(|d| normalize_text(&d.text)).collect();
    let found = phrases_found(phrases, &retrieved_text);
    let mut rows: Vec<HistogramRow> = phrases
        .phrases()
        .iter()
        .zip(found)
        .map(|(p, found)| HistogramRow {
            phrase: p.clone(),
            frequency: corpus_text
                .iter()
                .filter(|t| t.contains(p.as_str()))
                .count(),
            found,
        })
        .collect();
    rows.sort_by_key(|r| std::cmp::Reverse(r.frequency));
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AblationRow {
    pub top_k: usize,
    pub not_found: usize,
}

/// Phrases still missing when only the first `k` of `ranked` are kept,
/// for each `k` in `ks` (ascending).
pub fn ablation_sweep<S: AsRef<str>>(
    ranked: &[S],
    corpus: &[Document],
    phrases: &PhraseSet,
    ks: &[usize],
) -> Result<Vec<AblationRow>> {
    if !ks.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Input("top-k values must be ascending".into()));
    }
    let by_id: HashMap<&str, &Document> = corpus.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut found = vec![false; phrases.len()];
    let mut taken = 0usize;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        while taken < k.min(ranked.len()) {
            let id = ranked[taken].as_ref();
            let doc = by_id
                .get(id)
                .ok_or_else(|| Error::UnknownId(id.to_owned()))?;
            let text = normalize_text(&doc.text);
            for (f, p) in found.iter_mut().zip(phrases.phrases()) {
                *f = *f || text.contains(p.as_str());
            }
            taken += 1;
        }
        rows.push(AblationRow {
            top_k: k,
            not_found: found.iter().filter(|&&f| !f).count(),
        });
    }
    Ok(rows)
}

/// Runs `f` and measures it with a monotonic clock.
pub fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Summary written by `eval`; metric fields are absent without judgments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub coverage: f64,
    pub phrases: usize,
    pub found: usize,
    pub retrieved: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ndcg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    pub ablation: Vec<AblationRow>,
}
