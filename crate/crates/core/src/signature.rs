//! Truncated sparse bit-vector signatures.
//!
//! A term *survives* when it occurs in at least `k1` documents. A document's
//! signature is the set of its `k2` surviving terms with the lowest document
//! count, stored as an ascending list of term ids (the positions of the set
//! bits). Equal counts are broken toward the lower id, so builds are
//! reproducible.
//!
//! [`SignatureIndex`] holds the vocabulary, the signatures and, when built
//! from documents, the full distinct-term id set of every document. The term
//! sets are what streaming updates need to decide which stored signatures
//! may have gone stale.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::corpus::{count_documents, count_documents_parallel, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignatureParams {
    k1: u32,
    k2: u32,
}

impl SignatureParams {
    pub fn new(k1: u32, k2: u32) -> Result<Self> {
        if k1 == 0 {
            return Err(Error::Params("k1 must be at least 1".into()));
        }
        if k2 == 0 {
            return Err(Error::Params("k2 must be at least 1".into()));
        }
        Ok(SignatureParams { k1, k2 })
    }

    /// Minimum document count for a term to take part in signatures.
    pub fn k1(&self) -> u32 {
        self.k1
    }

    /// Maximum number of set bits per signature.
    pub fn k2(&self) -> u32 {
        self.k2
    }
}

impl Default for SignatureParams {
    fn default() -> Self {
        SignatureParams { k1: 1000, k2: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub doc_id: String,
    term_ids: Vec<u32>,
}

impl Signature {
    /// `term_ids` must be strictly ascending.
    pub fn new(doc_id: impl Into<String>, term_ids: Vec<u32>) -> Self {
        debug_assert!(term_ids.windows(2).all(|w| w[0] < w[1]));
        Signature {
            doc_id: doc_id.into(),
            term_ids,
        }
    }

    pub fn term_ids(&self) -> &[u32] {
        &self.term_ids
    }

    pub fn len(&self) -> usize {
        self.term_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.term_ids.is_empty()
    }

    /// The on-disk signature body: each id as 4 little-endian bytes.
    pub fn payload(&self) -> Vec<u8> {
        self.term_ids
            .iter()
            .flat_map(|id| id.to_le_bytes())
            .collect()
    }
}

/// Number of terms with document count at least `k1`.
pub fn surviving_term_count(vocab: &Vocabulary, k1: u32) -> usize {
    vocab
        .dcs()
        .iter()
        .filter(|&&dc| dc >= u64::from(k1))
        .count()
}

/// Selects the signature of a document given the ids of its distinct terms.
pub fn sign_term_ids<I>(term_ids: I, vocab: &Vocabulary, params: SignatureParams) -> Vec<u32>
where
    I: IntoIterator<Item = u32>,
{
    let k1 = u64::from(params.k1);
    let mut surviving: Vec<(u64, u32)> = term_ids
        .into_iter()
        .map(|id| (vocab.dc(id), id))
        .filter(|&(dc, _)| dc >= k1)
        .collect();
    let k2 = params.k2 as usize;
    if surviving.len() > k2 {
        surviving.select_nth_unstable(k2 - 1);
        surviving.truncate(k2);
    }
    let mut ids: Vec<u32> = surviving.into_iter().map(|(_, id)| id).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Signs `doc` against `vocab`. Terms the vocabulary does not know are ignored.
pub fn sign_document(doc: &Document, vocab: &Vocabulary, params: SignatureParams) -> Signature {
    let ids = doc.terms().iter().filter_map(|t| vocab.id(t));
    Signature::new(doc.id.clone(), sign_term_ids(ids, vocab, params))
}

/// Outcome of one streaming update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateReport {
    pub dim_before: usize,
    pub dim_after: usize,
    pub new_terms: usize,
    /// Existing documents newly marked stale by this update.
    pub newly_stale: usize,
    /// Total stale documents awaiting a re-sign.
    pub stale_total: usize,
}

#[derive(Debug, Clone)]
pub struct SignatureIndex {
    params: SignatureParams,
    vocab: Vocabulary,
    dim: usize,
    signatures: Vec<Signature>,
    positions: HashMap<String, usize>,
    /// Ascending distinct-term ids per document; absent on indexes loaded
    /// from disk until a corpus is attached.
    doc_terms: Option<Vec<Vec<u32>>>,
    stale: BTreeSet<usize>,
}

impl PartialEq for SignatureIndex {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.vocab == other.vocab
            && self.dim == other.dim
            && self.signatures == other.signatures
    }
}

fn term_ids_of(doc: &Document, vocab: &Vocabulary) -> Vec<u32> {
    let mut ids: Vec<u32> = doc.terms().iter().filter_map(|t| vocab.id(t)).collect();
    ids.sort_unstable();
    ids
}

fn index_positions(signatures: &[Signature]) -> Result<HashMap<String, usize>> {
    let mut positions = HashMap::with_capacity(signatures.len());
    for (i, s) in signatures.iter().enumerate() {
        if positions.insert(s.doc_id.clone(), i).is_some() {
            return Err(Error::DuplicateId(s.doc_id.clone()));
        }
    }
    Ok(positions)
}

/// Builds an index over `docs` on the current thread.
pub fn build_index(docs: &[Document], params: SignatureParams) -> Result<SignatureIndex> {
    build_index_with_threads(docs, params, 1)
}

/// Builds an index, counting and signing on `threads` workers (0 = all cores).
/// The result does not depend on the thread count.
pub fn build_index_with_threads(
    docs: &[Document],
    params: SignatureParams,
    threads: usize,
) -> Result<SignatureIndex> {
    let vocab = if parallel::is_sequential(threads) {
        count_documents(docs)
    } else {
        count_documents_parallel(docs, threads)
    };
    let sign = |doc: &Document| {
        let ids = term_ids_of(doc, &vocab);
        let sig = Signature::new(
            doc.id.clone(),
            sign_term_ids(ids.iter().copied(), &vocab, params),
        );
        (ids, sig)
    };
    let pairs: Vec<(Vec<u32>, Signature)> = if parallel::is_sequential(threads) {
        docs.iter().map(sign).collect()
    } else {
        parallel::run(threads, || docs.par_iter().map(sign).collect())
    };
    let (doc_terms, signatures): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let positions = index_positions(&signatures)?;
    let dim = surviving_term_count(&vocab, params.k1);
    Ok(SignatureIndex {
        params,
        vocab,
        dim,
        signatures,
        positions,
        doc_terms: Some(doc_terms),
        stale: BTreeSet::new(),
    })
}

impl SignatureIndex {
    /// Assembles an index from persisted parts, checking every signature.
    pub(crate) fn from_parts(
        params: SignatureParams,
        vocab: Vocabulary,
        signatures: Vec<Signature>,
    ) -> Result<Self> {
        let positions = index_positions(&signatures)?;
        let dim = surviving_term_count(&vocab, params.k1);
        let index = SignatureIndex {
            params,
            vocab,
            dim,
            signatures,
            positions,
            doc_terms: None,
            stale: BTreeSet::new(),
        };
        index.check_signatures().map_err(Error::Input)?;
        Ok(index)
    }

    pub fn params(&self) -> SignatureParams {
        self.params
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Number of surviving terms.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    /// Signatures in insertion order.
    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    pub fn signature(&self, doc_id: &str) -> Option<&Signature> {
        self.positions.get(doc_id).map(|&i| &self.signatures[i])
    }

    pub fn has_corpus(&self) -> bool {
        self.doc_terms.is_some()
    }

    /// Ids of documents whose stored signature may differ from a fresh sign.
    pub fn stale(&self) -> impl Iterator<Item = &str> {
        self.stale
            .iter()
            .map(|&i| self.signatures[i].doc_id.as_str())
    }

    pub fn stale_count(&self) -> usize {
        self.stale.len()
    }

    pub fn sign(&self, doc: &Document) -> Signature {
        sign_document(doc, &self.vocab, self.params)
    }

    /// Restores the per-document term sets of an index loaded from disk.
    ///
    /// `docs` must be the indexed documents in index order, and must
    /// reproduce the stored document counts exactly.
    pub fn attach_corpus(&mut self, docs: &[Document]) -> Result<()> {
        if docs.len() != self.signatures.len() {
            return Err(Error::Input(format!(
                "corpus has {} documents but the index holds {}",
                docs.len(),
                self.signatures.len()
            )));
        }
        for (doc, sig) in docs.iter().zip(&self.signatures) {
            if doc.id != sig.doc_id {
                return Err(Error::Input(format!(
                    "corpus document `{}` does not match indexed document `{}`",
                    doc.id, sig.doc_id
                )));
            }
        }
        let counted = count_documents(docs);
        if counted.len() != self.vocab.len() || counted.n_docs() != self.vocab.n_docs() {
            return Err(Error::Input(
                "corpus statistics do not match the index vocabulary".into(),
            ));
        }
        let mut first_seen = vec![Default::default(); self.vocab.len()];
        for (cid, term) in counted.terms().iter().enumerate() {
            let id = self.vocab.id(term).ok_or_else(|| {
                Error::Input(format!("corpus term `{term}` is missing from the index"))
            })?;
            if self.vocab.dc(id) != counted.dc(cid as u32) {
                return Err(Error::Input(format!(
                    "document count of `{term}` differs between corpus and index"
                )));
            }
            first_seen[id as usize] = counted.first_seen_of(cid as u32);
        }
        self.vocab.set_first_seen(first_seen);
        self.doc_terms = Some(docs.iter().map(|d| term_ids_of(d, &self.vocab)).collect());
        Ok(())
    }

    /// Streams one new document into the index.
    ///
    /// Vocabulary, document counts and dimension are updated exactly and the
    /// new document is signed against the updated counts. Existing
    /// signatures are left in place; those that might now select different
    /// terms are recorded as stale. A document is stale when it contains a
    /// term that just reached `k1`, or when it has more than `k2` surviving
    /// terms and one of them had its count raised.
    pub fn update(&mut self, doc: &Document) -> Result<UpdateReport> {
        if self.positions.contains_key(&doc.id) {
            return Err(Error::DuplicateId(doc.id.clone()));
        }
        if self.doc_terms.is_none() {
            return Err(Error::Config(
                "streaming updates need the indexed corpus attached".into(),
            ));
        }
        let k1 = u64::from(self.params.k1);
        let dim_before = self.dim;
        let vocab_before = self.vocab.len();
        let touched = self.vocab.observe(doc.terms());
        let mut crossed = Vec::new();
        let mut raised = Vec::new();
        for &(id, old) in &touched {
            if old + 1 == k1 {
                crossed.push(id);
            } else if old >= k1 {
                raised.push(id);
            }
        }
        self.dim += crossed.len();
        debug_assert_eq!(self.dim, surviving_term_count(&self.vocab, self.params.k1));
        crossed.sort_unstable();
        raised.sort_unstable();

        let k2 = self.params.k2 as usize;
        let doc_terms = self.doc_terms.as_mut().expect("checked above");
        let mut newly_stale = 0;
        if !crossed.is_empty() || !raised.is_empty() {
            for (i, terms) in doc_terms.iter().enumerate() {
                if self.stale.contains(&i) {
                    continue;
                }
                let hits = |set: &[u32]| terms.iter().any(|t| set.binary_search(t).is_ok());
                let stale = hits(&crossed)
                    || (hits(&raised)
                        && terms.iter().filter(|&&t| self.vocab.dc(t) >= k1).count() > k2);
                if stale {
                    self.stale.insert(i);
                    newly_stale += 1;
                }
            }
        }

        let ids = term_ids_of(doc, &self.vocab);
        let sig = Signature::new(
            doc.id.clone(),
            sign_term_ids(ids.iter().copied(), &self.vocab, self.params),
        );
        doc_terms.push(ids);
        self.positions.insert(doc.id.clone(), self.signatures.len());
        self.signatures.push(sig);

        Ok(UpdateReport {
            dim_before,
            dim_after: self.dim,
            new_terms: self.vocab.len() - vocab_before,
            newly_stale,
            stale_total: self.stale.len(),
        })
    }

    /// Re-signs only the stale documents, keeping current term ids.
    pub fn resign_stale(&mut self) -> Result<usize> {
        let doc_terms = self
            .doc_terms
            .as_ref()
            .ok_or_else(|| Error::Config("re-signing needs the indexed corpus attached".into()))?;
        let n = self.stale.len();
        for &i in &self.stale {
            let ids = sign_term_ids(doc_terms[i].iter().copied(), &self.vocab, self.params);
            self.signatures[i].term_ids = ids;
        }
        self.stale.clear();
        Ok(n)
    }

    /// Renumbers the vocabulary into canonical order and re-signs every
    /// document. Afterwards the index equals a batch build over the same
    /// documents in the same order.
    pub fn resign_all(&mut self) -> Result<()> {
        let doc_terms = self
            .doc_terms
            .as_mut()
            .ok_or_else(|| Error::Config("re-signing needs the indexed corpus attached".into()))?;
        let remap = self.vocab.canonicalize();
        for (terms, sig) in doc_terms.iter_mut().zip(self.signatures.iter_mut()) {
            for t in terms.iter_mut() {
                *t = remap[*t as usize];
            }
            terms.sort_unstable();
            sig.term_ids = sign_term_ids(terms.iter().copied(), &self.vocab, self.params);
        }
        self.dim = surviving_term_count(&self.vocab, self.params.k1);
        self.stale.clear();
        Ok(())
    }

    /// Checks the per-signature invariants: ascending ids, at most `k2`
    /// entries, every id a surviving vocabulary term. When term sets are
    /// attached, also that each signature is exactly the `k2` lowest-count
    /// surviving terms of its document (stale documents excepted).
    pub fn check_signatures(&self) -> std::result::Result<(), String> {
        let k1 = u64::from(self.params.k1);
        for (i, sig) in self.signatures.iter().enumerate() {
            let ids = sig.term_ids();
            if !ids.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!(
                    "signature of `{}` is not strictly ascending",
                    sig.doc_id
                ));
            }
            if ids.len() > self.params.k2 as usize {
                return Err(format!("signature of `{}` exceeds k2", sig.doc_id));
            }
            for &id in ids {
                if id as usize >= self.vocab.len() {
                    return Err(format!("signature of `{}` has unknown id {id}", sig.doc_id));
                }
                if self.vocab.dc(id) < k1 {
                    return Err(format!(
                        "signature of `{}` holds non-surviving term `{}`",
                        sig.doc_id,
                        self.vocab.term(id)
                    ));
                }
            }
            if let Some(terms) = &self.doc_terms {
                if !self.stale.contains(&i) {
                    let fresh = sign_term_ids(terms[i].iter().copied(), &self.vocab, self.params);
                    if fresh != ids {
                        return Err(format!("signature of `{}` is out of date", sig.doc_id));
                    }
                }
            }
        }
        Ok(())
    }
}
