//! Seed-corpus queries scored by sorted-list intersection.
//!
//! The query is the union of the seed documents' signatures. A document's
//! score is the size of the intersection between the query and its
//! signature, computed by a two-pointer merge over the ascending id lists.

use crate::corpus::Document;
use crate::rank::{select_top_k, RankedDoc, TopK};
use crate::signature::SignatureIndex;

pub type ScoredDoc = RankedDoc<u32>;

/// Union of the seed signatures, ascending and deduplicated.
pub fn query_signature(seeds: &[Document], index: &SignatureIndex) -> Vec<u32> {
    let mut ids: Vec<u32> = seeds
        .iter()
        .flat_map(|seed| index.sign(seed).term_ids().to_vec())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// `|q ∩ s|` for two strictly ascending lists.
pub fn merge_and_score(q: &[u32], s: &[u32]) -> u32 {
    merge_and_count(q, s).0
}

/// Like [`merge_and_score`], also returning the number of id comparisons,
/// which never exceeds `q.len() + s.len()`.
pub fn merge_and_count(q: &[u32], s: &[u32]) -> (u32, usize) {
    let (mut i, mut j) = (0, 0);
    let mut hits = 0u32;
    let mut comparisons = 0usize;
    while i < q.len() && j < s.len() {
        comparisons += 1;
        match q[i].cmp(&s[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hits += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (hits, comparisons)
}

/// Binary cosine between a query and a signature; zero if either is empty.
pub fn normalized_score(q: &[u32], s: &[u32]) -> f64 {
    if q.is_empty() || s.is_empty() {
        return 0.0;
    }
    f64::from(merge_and_score(q, s)) / ((q.len() * s.len()) as f64).sqrt()
}

/// Per-scan counters, kept to check the linear-merge cost bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub docs_scanned: usize,
    pub total_comparisons: u64,
    pub max_comparisons: usize,
    /// Documents whose merge took more than `|q| + k2` comparisons.
    pub over_budget: usize,
}

impl ScanStats {
    fn merge(self, o: ScanStats) -> ScanStats {
        ScanStats {
            docs_scanned: self.docs_scanned + o.docs_scanned,
            total_comparisons: self.total_comparisons + o.total_comparisons,
            max_comparisons: self.max_comparisons.max(o.max_comparisons),
            over_budget: self.over_budget + o.over_budget,
        }
    }
}

/// Exact top-k of `index` against the seed documents, sequential scan.
pub fn expand(index: &SignatureIndex, seeds: &[Document], top_k: usize) -> Vec<ScoredDoc> {
    let q = query_signature(seeds, index);
    expand_query(index, &q, top_k, 1)
}

/// Exact top-k for a precomputed query, scanned on `threads` workers.
/// Output is independent of the thread count.
pub fn expand_query(
    index: &SignatureIndex,
    query: &[u32],
    top_k: usize,
    threads: usize,
) -> Vec<ScoredDoc> {
    select_top_k(
        index.signatures(),
        top_k,
        threads,
        |s| &s.doc_id,
        |s| merge_and_score(query, s.term_ids()),
    )
}

/// Top-k ranked by binary cosine instead of raw overlap.
pub fn expand_query_normalized(
    index: &SignatureIndex,
    query: &[u32],
    top_k: usize,
    threads: usize,
) -> Vec<RankedDoc<f64>> {
    select_top_k(
        index.signatures(),
        top_k,
        threads,
        |s| &s.doc_id,
        |s| normalized_score(query, s.term_ids()),
    )
}

/// Sequential scan that also reports comparison counts.
pub fn expand_instrumented(
    index: &SignatureIndex,
    query: &[u32],
    top_k: usize,
) -> (Vec<ScoredDoc>, ScanStats) {
    let budget = query.len() + index.params().k2() as usize;
    let mut stats = ScanStats::default();
    let mut top = TopK::new(top_k);
    for sig in index.signatures() {
        let (score, cmp) = merge_and_count(query, sig.term_ids());
        let one = ScanStats {
            docs_scanned: 1,
            total_comparisons: cmp as u64,
            max_comparisons: cmp,
            over_budget: usize::from(cmp > budget),
        };
        stats = stats.merge(one);
        top.push(&sig.doc_id, score);
    }
    (top.into_sorted(), stats)
}

/// Reference implementation working from raw text with full-width
/// bit-vectors. Shares no code with the index path; used to check it.
pub mod oracle {
    use std::collections::{HashMap, HashSet};

    use crate::corpus::{tokenize, Document};
    use crate::rank::{sort_and_truncate, RankedDoc};
    use crate::signature::SignatureParams;

    struct Space {
        dc: Vec<u64>,
        ids: HashMap<String, usize>,
    }

    impl Space {
        fn new(corpus: &[Document]) -> Self {
            // first-occurrence order over the token stream
            let mut order: Vec<String> = Vec::new();
            let mut seen = HashSet::new();
            for doc in corpus {
                for tok in tokenize(&doc.text) {
                    if seen.insert(tok.clone()) {
                        order.push(tok);
                    }
                }
            }
            let sets: Vec<HashSet<String>> = corpus
                .iter()
                .map(|d| tokenize(&d.text).into_iter().collect())
                .collect();
            let counts: Vec<u64> = order
                .iter()
                .map(|t| sets.iter().filter(|s| s.contains(t)).count() as u64)
                .collect();
            let mut ranked: Vec<usize> = (0..order.len()).collect();
            ranked.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
            let ids = ranked
                .iter()
                .enumerate()
                .map(|(id, &o)| (order[o].clone(), id))
                .collect();
            let dc = ranked.iter().map(|&o| counts[o]).collect();
            Space { dc, ids }
        }

        /// Untruncated bit-vector over the whole vocabulary.
        fn full_bits(&self, text: &str) -> Vec<bool> {
            let mut bits = vec![false; self.dc.len()];
            for tok in tokenize(text) {
                if let Some(&id) = self.ids.get(&tok) {
                    bits[id] = true;
                }
            }
            bits
        }

        fn truncated_bits(&self, text: &str, params: SignatureParams) -> Vec<bool> {
            let full = self.full_bits(text);
            let mut candidates: Vec<usize> = (0..full.len())
                .filter(|&j| full[j] && self.dc[j] >= u64::from(params.k1()))
                .collect();
            candidates.sort_by_key(|&j| (self.dc[j], j));
            let mut bits = vec![false; full.len()];
            for &j in candidates.iter().take(params.k2() as usize) {
                bits[j] = true;
            }
            bits
        }
    }

    pub fn brute_force_expand(
        corpus: &[Document],
        seeds: &[Document],
        params: SignatureParams,
        top_k: usize,
    ) -> Vec<RankedDoc<u32>> {
        let space = Space::new(corpus);
        let mut query = vec![false; space.dc.len()];
        for seed in seeds {
            for (q, b) in query
                .iter_mut()
                .zip(space.truncated_bits(&seed.text, params))
            {
                *q |= b;
            }
        }
        let scored = corpus
            .iter()
            .map(|doc| {
                let bits = space.truncated_bits(&doc.text, params);
                let score = bits.iter().zip(&query).filter(|(a, b)| **a && **b).count() as u32;
                RankedDoc {
                    doc_id: doc.id.clone(),
                    score,
                }
            })
            .collect();
        sort_and_truncate(scored, top_k)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::brute_force_expand;
    use super::*;
    use crate::corpus::fixtures::four_docs;
    use crate::signature::{build_index, SignatureParams};
    use proptest::prelude::*;

    fn fixture_index() -> SignatureIndex {
        build_index(&four_docs(), SignatureParams::new(2, 1).unwrap()).unwrap()
    }

    fn scored(pairs: &[(&str, u32)]) -> Vec<ScoredDoc> {
        pairs
            .iter()
            .map(|&(d, s)| RankedDoc {
                doc_id: d.into(),
                score: s,
            })
            .collect()
    }

    #[test]
    fn query_signature_examples() {
        let index = fixture_index();
        let docs = four_docs();
        let id = |t: &str| index.vocab().id(t).unwrap();
        assert_eq!(query_signature(&docs[2..3], &index), [id("c")]);
        assert!(query_signature(&[], &index).is_empty());
        let both = [docs[0].clone(), docs[2].clone()];
        assert_eq!(query_signature(&both, &index), [id("b"), id("c")]);
    }

    #[test]
    fn merge_and_examples() {
        assert_eq!(merge_and_score(&[1, 3, 5], &[3, 4, 5]), 2);
        assert_eq!(merge_and_score(&[], &[1, 2]), 0);
        assert_eq!(merge_and_score(&[1, 2], &[]), 0);
    }

    #[test]
    fn expand_fixture() {
        let index = fixture_index();
        let docs = four_docs();
        assert_eq!(
            expand(&index, &docs[2..3], 4),
            scored(&[("D3", 1), ("D1", 0), ("D2", 0), ("D4", 0)])
        );
        assert_eq!(expand(&index, &docs[0..1], 1), scored(&[("D1", 1)]));
        assert_eq!(
            expand(&index, &[], 10),
            scored(&[("D1", 0), ("D2", 0), ("D3", 0), ("D4", 0)])
        );
    }

    #[test]
    fn oracle_reproduces_fixture() {
        let docs = four_docs();
        let params = SignatureParams::new(2, 1).unwrap();
        assert_eq!(
            brute_force_expand(&docs, &docs[2..3], params, 4),
            expand(&fixture_index(), &docs[2..3], 4)
        );
    }

    #[test]
    fn single_doc_ranks_first() {
        let docs = vec![Document::new("only", "x y")];
        let params = SignatureParams::new(1, 2).unwrap();
        let index = build_index(&docs, params).unwrap();
        let seed = [Document::new("s", "y")];
        assert_eq!(expand(&index, &seed, 5), scored(&[("only", 1)]));
        assert_eq!(
            brute_force_expand(&docs, &seed, params, 5),
            scored(&[("only", 1)])
        );
    }

    #[test]
    fn normalized_mode() {
        assert_eq!(normalized_score(&[], &[1]), 0.0);
        assert!((normalized_score(&[1, 2], &[2, 3]) - 0.5).abs() < 1e-12);
        let index = fixture_index();
        let q = query_signature(&four_docs()[2..3], &index);
        let top = expand_query_normalized(&index, &q, 1, 1);
        assert_eq!(top[0].doc_id, "D3");
    }

    #[test]
    fn instrumented_scan_stays_linear() {
        let index = fixture_index();
        let q = query_signature(&four_docs(), &index);
        let (top, stats) = expand_instrumented(&index, &q, 4);
        assert_eq!(top, expand_query(&index, &q, 4, 1));
        assert_eq!(stats.docs_scanned, 4);
        assert_eq!(stats.over_budget, 0);
    }

    fn sorted_ids() -> impl Strategy<Value = Vec<u32>> {
        prop::collection::btree_set(0u32..64, 0..20).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn merge_symmetric_and_bounded(a in sorted_ids(), b in sorted_ids()) {
            let (s, c) = merge_and_count(&a, &b);
            prop_assert_eq!(s, merge_and_score(&b, &a));
            prop_assert!(c <= a.len() + b.len());
        }

        #[test]
        fn adding_seed_never_lowers_scores(
            docs in crate::signature::tests::random_corpus(),
            k1 in 1u32..4, k2 in 1u32..6, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()
        ) {
            prop_assume!(!docs.is_empty());
            let index = build_index(&docs, SignatureParams::new(k1, k2).unwrap()).unwrap();
            let one = [docs[a.index(docs.len())].clone()];
            let two = [one[0].clone(), docs[b.index(docs.len())].clone()];
            let (q1, q2) = (query_signature(&one, &index), query_signature(&two, &index));
            for sig in index.signatures() {
                prop_assert!(merge_and_score(&q2, sig.term_ids()) >= merge_and_score(&q1, sig.term_ids()));
            }
        }

        #[test]
        fn thread_count_does_not_change_results(docs in crate::signature::tests::random_corpus(), k in 1usize..50) {
            let index = build_index(&docs, SignatureParams::new(1, 3).unwrap()).unwrap();
            let q = query_signature(&docs[..docs.len().min(3)], &index);
            prop_assert_eq!(expand_query(&index, &q, k, 1), expand_query(&index, &q, k, 4));
        }
    }
}
