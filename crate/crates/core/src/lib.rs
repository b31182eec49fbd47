//! Corpus expansion with truncated sparse document signatures.
//!
//! Every document is reduced to a short ascending list of term ids: the
//! `k2` rarest of its terms among those occurring in at least `k1`
//! documents. A seed corpus becomes the union of its signatures, and the
//! collection is ranked by list intersection against it. Baseline methods
//! and an evaluation harness are included for comparison.
//!
//! Floating-point code (baseline scores, dense vectors, metrics) is generic
//! over [`num_traits::Float`]; the aliases below fix the common choices.

pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod index_file;
pub mod parallel;
pub mod rank;
pub mod retrieval;
pub mod signature;
pub mod synth;

pub use baselines::{
    baseline_expand, cosine, hash_vector, tfidf_score, BaselineInputs, DenseVector, Method,
    VectorStore,
};
pub use corpus::{
    count_documents, ingest_jsonl, merge_counts, tokenize, Document, PartialCounts, Vocabulary,
};
pub use error::{Error, FormatError, Result};
pub use eval::{coverage, map_and_recall, ndcg, pr_curve, EvalReport, Judgments, PhraseSet};
pub use index_file::{load_index, save_index};
pub use rank::{RankScore, RankedDoc};
pub use retrieval::{expand, merge_and_score, query_signature, ScoredDoc};
pub use signature::{
    build_index, sign_document, surviving_term_count, Signature, SignatureIndex, SignatureParams,
};

pub type DenseVector32 = DenseVector<f32>;
pub type DenseVector64 = DenseVector<f64>;
pub type VectorStore32 = VectorStore<f32>;
pub type VectorStore64 = VectorStore<f64>;
pub type Coverage64 = eval::Coverage<f64>;
pub type RankedDoc64 = RankedDoc<f64>;
