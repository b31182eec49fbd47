//! Comparison methods: TF-IDF, signed feature hashing, externally computed
//! dense vectors, random sampling and lexicon phrase search.
//!
//! Hash and dense methods score a document by the cosine between its vector
//! and the mean of the seed vectors.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use num_traits::Float;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh64::xxh64;

use crate::corpus::{count_documents, normalize_text, tokenize, Document, Vocabulary};
use crate::error::{Error, FormatError, Result};
use crate::eval::PhraseSet;
use crate::rank::{select_top_k, RankScore, RankedDoc};

/// Seed for the bucket hash.
pub const BUCKET_SEED: u64 = 0x5157_3a1e_0b5e_d001;
/// Seed for the sign hash.
pub const SIGN_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<T>(Vec<T>);

impl<T: Float> DenseVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        DenseVector(values)
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![T::zero(); dim])
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        DenseVector(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    fn scaled(mut self, by: T) -> Self {
        for v in &mut self.0 {
            *v = *v * by;
        }
        self
    }
}

/// `a·b / (|a||b|)`, clamped to `[-1, 1]`; zero when either vector is zero.
pub fn cosine<T: Float>(a: &DenseVector<T>, b: &DenseVector<T>) -> T {
    debug_assert_eq!(a.dim(), b.dim());
    let denom = a.norm() * b.norm();
    if denom == T::zero() {
        return T::zero();
    }
    (a.dot(b) / denom).max(-T::one()).min(T::one())
}

fn mean<T: Float>(vectors: &[DenseVector<T>], dim: usize) -> DenseVector<T> {
    if vectors.is_empty() {
        return DenseVector::zeros(dim);
    }
    let sum = vectors
        .iter()
        .fold(DenseVector::zeros(dim), |acc, v| acc.add(v));
    sum.scaled(T::one() / T::from(vectors.len()).expect("count fits float"))
}

/// Document vectors keyed by id, all of one dimension, kept in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore<T> {
    dim: usize,
    ids: Vec<String>,
    vectors: Vec<DenseVector<T>>,
    positions: HashMap<String, usize>,
}

impl<T: Float> VectorStore<T> {
    pub fn new(dim: usize) -> Self {
        VectorStore {
            dim,
            ids: Vec::new(),
            vectors: Vec::new(),
            positions: HashMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: DenseVector<T>) -> Result<()> {
        let id = id.into();
        if vector.dim() != self.dim {
            return Err(Error::Input(format!(
                "vector for `{id}` has dimension {} but the store uses {}",
                vector.dim(),
                self.dim
            )));
        }
        if vector.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "vector for `{id}` has non-finite entries"
            )));
        }
        if self.positions.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.positions.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&DenseVector<T>> {
        self.positions.get(id).map(|&i| &self.vectors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DenseVector<T>)> {
        self.ids.iter().map(String::as_str).zip(&self.vectors)
    }

    /// File layout: u32 dim, then per record a u32-length-prefixed UTF-8 id
    /// followed by `dim` little-endian f32 values.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for (id, v) in self.iter() {
            out.extend_from_slice(&(id.len() as u32).to_le_bytes());
            out.extend_from_slice(id.as_bytes());
            for x in v.values() {
                let x = x.to_f32().unwrap_or(f32::NAN);
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut buf = bytes;
        let mut take = |n: usize, what: &'static str| -> Result<&[u8]> {
            if buf.len() < n {
                return Err(FormatError::Truncated(what).into());
            }
            let (head, rest) = buf.split_at(n);
            buf = rest;
            Ok(head)
        };
        let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().expect("4 bytes"));
        let dim = u32_at(take(4, "dimension")?) as usize;
        let mut store = VectorStore::new(dim);
        while let Ok(head) = take(4, "record id length") {
            let len = u32_at(head) as usize;
            let id = String::from_utf8(take(len, "record id")?.to_vec())
                .map_err(|_| FormatError::InvalidUtf8("record id"))?;
            let raw = take(dim * 4, "vector values")?;
            let values = raw
                .chunks_exact(4)
                .map(|c| {
                    T::from(f32::from_le_bytes(c.try_into().expect("4 bytes")))
                        .unwrap_or_else(T::nan)
                })
                .collect();
            store.insert(id, DenseVector::new(values))?;
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        // a 1..3 byte tail would otherwise be dropped silently
        let store = Self::decode(&bytes)?;
        let expected = 4 + store
            .ids
            .iter()
            .map(|id| 4 + id.len() + 4 * store.dim)
            .sum::<usize>();
        if expected != bytes.len() {
            return Err(FormatError::TrailingBytes(bytes.len() - expected).into());
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }
}

/// Sum over shared terms of raw term frequency times `ln(N / dc)`.
pub fn tfidf_score<T: Float>(
    query_terms: &HashSet<String>,
    doc: &Document,
    vocab: &Vocabulary,
) -> T {
    let n = vocab.n_docs();
    if n == 0 {
        return T::zero();
    }
    let mut tf: HashMap<String, usize> = HashMap::new();
    for tok in tokenize(&doc.text) {
        *tf.entry(tok).or_default() += 1;
    }
    // sum in document term order so the float result is reproducible
    doc.terms()
        .iter()
        .filter(|t| query_terms.contains(*t))
        .fold(T::zero(), |acc, t| {
            let dc = vocab.dc_of(t);
            if dc == 0 {
                return acc;
            }
            let idf = (T::from(n).unwrap() / T::from(dc).unwrap()).ln();
            acc + T::from(tf[t]).unwrap() * idf
        })
}

fn hash_bucket(term: &str, dim: usize) -> usize {
    (xxh64(term.as_bytes(), BUCKET_SEED) % dim as u64) as usize
}

fn hash_sign(term: &str) -> bool {
    xxh64(term.as_bytes(), SIGN_SEED) & 1 == 0
}

/// Signed feature hashing of every token occurrence into `dim` buckets
/// (XXH64 with fixed seeds for bucket and sign).
pub fn hash_vector<T: Float>(doc: &Document, dim: usize) -> DenseVector<T> {
    assert!(dim >= 1, "hash dimension must be positive");
    let mut v = DenseVector::zeros(dim);
    for tok in tokenize(&doc.text) {
        let b = hash_bucket(&tok, dim);
        v.0[b] = if hash_sign(&tok) {
            v.0[b] + T::one()
        } else {
            v.0[b] - T::one()
        };
    }
    v
}

/// Mean of the stored vectors of the seed ids.
pub fn dense_query_vector<T: Float, S: AsRef<str>>(
    seeds: &[S],
    store: &VectorStore<T>,
) -> Result<DenseVector<T>> {
    if seeds.is_empty() {
        return Err(Error::Input("dense query needs at least one seed".into()));
    }
    let vectors = seeds
        .iter()
        .map(|s| {
            store
                .get(s.as_ref())
                .cloned()
                .ok_or_else(|| Error::UnknownId(s.as_ref().to_owned()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(&vectors, store.dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Method {
    /// Truncated signature overlap.
    Signature,
    Tfidf,
    Hash,
    Dense,
    Random,
    Query,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Signature => "signature",
            Method::Tfidf => "tfidf",
            Method::Hash => "hash",
            Method::Dense => "dense",
            Method::Random => "random",
            Method::Query => "query",
        }
    }

    /// Methods whose output depends on the RNG seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Random | Method::Query)
    }
}

/// Share of the phrase set sampled as lexicon queries.
pub const QUERY_SAMPLE_FRACTION: f64 = 0.10;
pub const DEFAULT_HASH_DIM: usize = 100;

/// Everything a baseline run may need; unused fields stay `None`.
pub struct BaselineInputs<'a, T> {
    pub corpus: Option<&'a [Document]>,
    pub vocab: Option<&'a Vocabulary>,
    pub seeds: &'a [Document],
    pub vectors: Option<&'a VectorStore<T>>,
    pub phrases: Option<&'a PhraseSet>,
    pub rng_seed: u64,
    pub hash_dim: usize,
    pub top_k: usize,
    pub threads: usize,
}

impl<'a, T> BaselineInputs<'a, T> {
    pub fn new(seeds: &'a [Document], top_k: usize) -> Self {
        BaselineInputs {
            corpus: None,
            vocab: None,
            seeds,
            vectors: None,
            phrases: None,
            rng_seed: 0,
            hash_dim: DEFAULT_HASH_DIM,
            top_k,
            threads: 1,
        }
    }
}

fn need<'b, X: ?Sized>(x: Option<&'b X>, method: Method, what: &str) -> Result<&'b X> {
    x.ok_or_else(|| Error::Config(format!("method `{}` needs {what}", method.name())))
}

/// Indices of the lexicon phrases used as queries for one trial.
pub fn sample_query_phrases(phrases: &PhraseSet, rng_seed: u64) -> Vec<usize> {
    let n = phrases.len();
    if n == 0 {
        return Vec::new();
    }
    let m = ((n as f64 * QUERY_SAMPLE_FRACTION).ceil() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut picked = sample(&mut rng, n, m).into_vec();
    picked.sort_unstable();
    picked
}

/// Ranks documents with one of the comparison methods.
///
/// `Signature` is served by the retrieval module and is rejected here.
pub fn baseline_expand<T>(
    method: Method,
    inputs: &BaselineInputs<'_, T>,
) -> Result<Vec<RankedDoc<T>>>
where
    T: Float + RankScore,
{
    let top_k = inputs.top_k;
    let threads = inputs.threads;
    match method {
        Method::Signature => Err(Error::Config(
            "signature ranking is not a baseline; use the retrieval module".into(),
        )),
        Method::Tfidf => {
            let corpus = need(inputs.corpus, method, "a corpus")?;
            let owned;
            let vocab = match inputs.vocab {
                Some(v) => v,
                None => {
                    owned = count_documents(corpus);
                    &owned
                }
            };
            let query: HashSet<String> = inputs
                .seeds
                .iter()
                .flat_map(|s| s.terms().iter().cloned())
                .collect();
            Ok(select_top_k(
                corpus,
                top_k,
                threads,
                |d| &d.id,
                |d| tfidf_score(&query, d, vocab),
            ))
        }
        Method::Hash => {
            let corpus = need(inputs.corpus, method, "a corpus")?;
            let dim = inputs.hash_dim;
            if dim == 0 {
                return Err(Error::Config("hash dimension must be positive".into()));
            }
            let seeds: Vec<DenseVector<T>> =
                inputs.seeds.iter().map(|s| hash_vector(s, dim)).collect();
            let q = mean(&seeds, dim);
            Ok(select_top_k(
                corpus,
                top_k,
                threads,
                |d| &d.id,
                |d| cosine(&q, &hash_vector(d, dim)),
            ))
        }
        Method::Dense => {
            let store = need(inputs.vectors, method, "a vector store")?;
            let seed_ids: Vec<&str> = inputs.seeds.iter().map(|s| s.id.as_str()).collect();
            let q = dense_query_vector(&seed_ids, store)?;
            let entries: Vec<(&str, &DenseVector<T>)> = store.iter().collect();
            Ok(select_top_k(
                &entries,
                top_k,
                threads,
                |e| e.0,
                |e| cosine(&q, e.1),
            ))
        }
        Method::Random => {
            let ids: Vec<&str> = match (inputs.corpus, inputs.vectors) {
                (Some(c), _) => c.iter().map(|d| d.id.as_str()).collect(),
                (None, Some(v)) => v.ids().iter().map(String::as_str).collect(),
                (None, None) => return Err(Error::Config("method `random` needs a corpus".into())),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(inputs.rng_seed);
            let k = top_k.min(ids.len());
            Ok(sample(&mut rng, ids.len(), k)
                .into_iter()
                .map(|i| RankedDoc {
                    doc_id: ids[i].to_owned(),
                    score: T::zero(),
                })
                .collect())
        }
        Method::Query => {
            let corpus = need(inputs.corpus, method, "a corpus")?;
            let phrases = need(inputs.phrases, method, "a phrase set")?;
            let picked: Vec<&str> = sample_query_phrases(phrases, inputs.rng_seed)
                .into_iter()
                .map(|i| phrases.phrases()[i].as_str())
                .collect();
            Ok(select_top_k(
                corpus,
                top_k,
                threads,
                |d| &d.id,
                |d| {
                    let text = normalize_text(&d.text);
                    let hits = picked.iter().filter(|p| text.contains(*p)).count();
                    T::from(hits).unwrap()
                },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::four_docs;
    use proptest::prelude::*;

    #[test]
    fn tfidf_examples() {
        let docs = vec![
            Document::new("1", "w w x"),
            Document::new("2", "w y"),
            Document::new("3", "z"),
            Document::new("4", "z"),
        ];
        let vocab = count_documents(&docs);
        let q: HashSet<String> = ["w".to_owned()].into();
        let s: f64 = tfidf_score(&q, &docs[0], &vocab);
        assert!((s - 2.0 * 2f64.ln()).abs() < 1e-12);
        let none: HashSet<String> = ["nope".to_owned()].into();
        assert_eq!(tfidf_score::<f64>(&none, &docs[0], &vocab), 0.0);

        let all = vec![Document::new("1", "a b"), Document::new("2", "a")];
        let v = count_documents(&all);
        let qa: HashSet<String> = ["a".to_owned()].into();
        assert_eq!(tfidf_score::<f64>(&qa, &all[0], &v), 0.0);
    }

    #[test]
    fn tfidf_ranking_on_fixture() {
        let docs = four_docs();
        let seeds = [Document::new("q", "b")];
        let mut inputs = BaselineInputs::<f64>::new(&seeds, 4);
        inputs.corpus = Some(&docs);
        let out = baseline_expand(Method::Tfidf, &inputs).unwrap();
        let ln2 = 2f64.ln();
        assert_eq!(out[0].doc_id, "D1");
        assert_eq!(out[1].doc_id, "D2");
        assert!((out[0].score - ln2).abs() < 1e-12 && (out[1].score - ln2).abs() < 1e-12);
        assert_eq!(out[2].score, 0.0);
        assert_eq!(out[3].score, 0.0);
    }

    #[test]
    fn hash_vector_basics() {
        assert_eq!(
            hash_vector::<f64>(&Document::new("e", ""), 8),
            DenseVector::zeros(8)
        );
        let v: DenseVector<f64> = hash_vector(&Document::new("t", "solar"), 8);
        let nonzero: Vec<f64> = v.values().iter().copied().filter(|x| *x != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].abs(), 1.0);
        assert_eq!(v.values()[hash_bucket("solar", 8)], nonzero[0]);
    }

    #[test]
    fn hash_vector_golden() {
        let doc = Document::new("g", "the quick brown fox jumps over the lazy dog");
        let v: DenseVector<f32> = hash_vector(&doc, 8);
        assert_eq!(v.values(), GOLDEN_HASH_8);
    }

    // cross-checked against the reference XXH64 implementation
    const GOLDEN_HASH_8: &[f32] = &[2.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0];

    #[test]
    fn cosine_examples() {
        let x = DenseVector::new(vec![1.0f64, 2.0]);
        let y = DenseVector::new(vec![2.0, 1.0]);
        assert!((cosine(&x, &x) - 1.0).abs() < 1e-12);
        assert!((cosine(&x, &y) - 0.8).abs() < 1e-12);
        let e1 = DenseVector::new(vec![1.0f32, 0.0]);
        let e2 = DenseVector::new(vec![0.0f32, 1.0]);
        assert_eq!(cosine(&e1, &e2), 0.0);
        assert_eq!(cosine(&DenseVector::zeros(2), &e1), 0.0);
    }

    fn store() -> VectorStore<f64> {
        let mut s = VectorStore::new(2);
        s.insert("a", DenseVector::new(vec![1.0, 0.0])).unwrap();
        s.insert("b", DenseVector::new(vec![0.0, 1.0])).unwrap();
        s.insert("c", DenseVector::new(vec![3.0, 3.0])).unwrap();
        s
    }

    #[test]
    fn dense_query_examples() {
        let s = store();
        assert_eq!(dense_query_vector(&["a"], &s).unwrap().values(), [1.0, 0.0]);
        assert_eq!(
            dense_query_vector(&["a", "b"], &s).unwrap().values(),
            [0.5, 0.5]
        );
        let m = dense_query_vector(&["a", "b", "c"], &s).unwrap();
        assert!((m.values()[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((m.values()[1] - 4.0 / 3.0).abs() < 1e-12);
        assert!(
            matches!(dense_query_vector(&["zz"], &s), Err(Error::UnknownId(ref id)) if id == "zz")
        );
    }

    #[test]
    fn vector_store_round_trip_and_errors() {
        let s = store();
        let bytes = s.encode();
        assert_eq!(&bytes[..4], &2u32.to_le_bytes());
        assert_eq!(VectorStore::<f64>::decode(&bytes).unwrap(), s);
        assert!(VectorStore::<f64>::decode(&bytes[..bytes.len() - 2]).is_err());
        let mut bad = VectorStore::<f32>::new(2);
        assert!(bad.insert("x", DenseVector::new(vec![1.0])).is_err());
        assert!(bad
            .insert("x", DenseVector::new(vec![f32::NAN, 0.0]))
            .is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.bin");
        s.save(&path).unwrap();
        assert_eq!(VectorStore::<f64>::load(&path).unwrap(), s);
        let mut tail = bytes.clone();
        tail.extend_from_slice(&[1, 2]);
        fs::write(&path, tail).unwrap();
        assert!(VectorStore::<f64>::load(&path).is_err());
    }

    #[test]
    fn dense_ranking() {
        let s = store();
        let seeds = [Document::new("a", "")];
        let mut inputs = BaselineInputs::new(&seeds, 3);
        inputs.vectors = Some(&s);
        let out = baseline_expand(Method::Dense, &inputs).unwrap();
        let ids: Vec<&str> = out.iter().map(|r| r.doc_id.as_str()).collect();
        assert_eq!(ids, ["a", "c", "b"]);
    }

    #[test]
    fn random_is_seeded() {
        let docs = four_docs();
        let mut inputs = BaselineInputs::<f64>::new(&[], 3);
        inputs.corpus = Some(&docs);
        inputs.rng_seed = 7;
        let a = baseline_expand(Method::Random, &inputs).unwrap();
        let b = baseline_expand(Method::Random, &inputs).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let distinct: HashSet<&str> = a.iter().map(|r| r.doc_id.as_str()).collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn query_ranks_phrase_matches_first() {
        let docs = four_docs();
        let phrases = PhraseSet::new(["a b"]);
        let mut inputs = BaselineInputs::<f64>::new(&[], 4);
        inputs.corpus = Some(&docs);
        inputs.phrases = Some(&phrases);
        let out = baseline_expand(Method::Query, &inputs).unwrap();
        let ids: Vec<&str> = out.iter().map(|r| r.doc_id.as_str()).collect();
        assert_eq!(ids, ["D1", "D2", "D3", "D4"]);
        assert_eq!(out[0].score, 1.0);
        assert_eq!(out[2].score, 0.0);
    }

    #[test]
    fn query_samples_ten_percent() {
        let phrases = PhraseSet::new((0..50).map(|i| format!("p{i}")));
        let picked = sample_query_phrases(&phrases, 3);
        assert_eq!(picked.len(), 5);
        assert_eq!(picked, sample_query_phrases(&phrases, 3));
        assert_eq!(sample_query_phrases(&PhraseSet::new(["x"]), 1), [0]);
    }

    #[test]
    fn missing_inputs_are_config_errors() {
        let inputs = BaselineInputs::<f64>::new(&[], 3);
        for m in [
            Method::Tfidf,
            Method::Hash,
            Method::Dense,
            Method::Random,
            Method::Query,
            Method::Signature,
        ] {
            assert!(
                matches!(baseline_expand(m, &inputs), Err(Error::Config(_))),
                "{m:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn cosine_bounded(a in prop::collection::vec(-1e6f64..1e6, 1..16), b in prop::collection::vec(-1e6f64..1e6, 1..16)) {
            let n = a.len().min(b.len());
            let c = cosine(&DenseVector::new(a[..n].to_vec()), &DenseVector::new(b[..n].to_vec()));
            prop_assert!(c.abs() <= 1.0 + 1e-9);
        }

        #[test]
        fn hashing_is_additive(a in "[a-e ]{0,30}", b in "[a-e ]{0,30}", dim in 1usize..16) {
            let joined = Document::new("ab", format!("{a} {b}"));
            let sum = hash_vector::<f64>(&Document::new("a", a.clone()), dim)
                .add(&hash_vector(&Document::new("b", b.clone()), dim));
            prop_assert_eq!(hash_vector::<f64>(&joined, dim), sum);
        }

        #[test]
        fn tfidf_decomposes_over_terms(words in prop::collection::vec(0u8..8, 1..20), others in prop::collection::vec(prop::collection::vec(0u8..8, 0..6), 0..6)) {
            let text = |ws: &[u8]| ws.iter().map(|w| format!("t{w}")).collect::<Vec<_>>().join(" ");
            let mut docs = vec![Document::new("x", text(&words))];
            docs.extend(others.iter().enumerate().map(|(i, ws)| Document::new(format!("o{i}"), text(ws))));
            let vocab = count_documents(&docs);
            let all: HashSet<String> = vocab.terms().iter().cloned().collect();
            let whole: f64 = tfidf_score(&all, &docs[0], &vocab);
            let parts: f64 = vocab.terms().iter()
                .map(|t| tfidf_score::<f64>(&[t.clone()].into(), &docs[0], &vocab))
                .sum();
            prop_assert!((whole - parts).abs() < 1e-9);
        }
    }
}
