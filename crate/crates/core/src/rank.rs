//! Ranked results and exact bounded top-k selection.
//!
//! Results are ordered by score descending, then by document id ascending.
//! That order is total, so per-partition selections merged together give the
//! same list as a single sequential pass.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::parallel;

/// Score types usable for ranking. Floats compare with `total_cmp`.
pub trait RankScore: Copy + Send + Sync + std::fmt::Debug {
    fn rank_cmp(&self, other: &Self) -> Ordering;
}

macro_rules! rank_score_ord {
    ($($t:ty),*) => {$(
        impl RankScore for $t {
            fn rank_cmp(&self, other: &Self) -> Ordering {
                self.cmp(other)
            }
        }
    )*};
}

macro_rules! rank_score_float {
    ($($t:ty),*) => {$(
        impl RankScore for $t {
            fn rank_cmp(&self, other: &Self) -> Ordering {
                self.total_cmp(other)
            }
        }
    )*};
}

rank_score_ord!(u32, u64, usize);
rank_score_float!(f32, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct RankedDoc<S> {
    pub doc_id: String,
    pub score: S,
}

/// `Less` when `a` ranks ahead of `b`.
pub fn rank_order<S: RankScore>(a: (&S, &str), b: (&S, &str)) -> Ordering {
    b.0.rank_cmp(a.0).then_with(|| a.1.cmp(b.1))
}

struct Entry<'a, S> {
    score: S,
    doc_id: &'a str,
}

impl<S: RankScore> PartialEq for Entry<'_, S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: RankScore> Eq for Entry<'_, S> {}

impl<S: RankScore> PartialOrd for Entry<'_, S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: RankScore> Ord for Entry<'_, S> {
    // the heap keeps its worst-ranked entry on top
    fn cmp(&self, other: &Self) -> Ordering {
        rank_order((&self.score, self.doc_id), (&other.score, other.doc_id))
    }
}

/// Bounded collector keeping the `k` best-ranked documents seen so far.
pub struct TopK<'a, S> {
    k: usize,
    heap: BinaryHeap<Entry<'a, S>>,
}

impl<'a, S: RankScore> TopK<'a, S> {
    pub fn new(k: usize) -> Self {
        TopK {
            k,
            heap: BinaryHeap::with_capacity(k.min(1 << 16) + 1),
        }
    }

    pub fn push(&mut self, doc_id: &'a str, score: S) {
        if self.k == 0 {
            return;
        }
        let entry = Entry { score, doc_id };
        if self.heap.len() < self.k {
            self.heap.push(entry);
        } else if let Some(mut worst) = self.heap.peek_mut() {
            if entry < *worst {
                *worst = entry;
            }
        }
    }

    pub fn merge(mut self, other: TopK<'a, S>) -> Self {
        for e in other.heap {
            self.push(e.doc_id, e.score);
        }
        self
    }

    /// Best first.
    pub fn into_sorted(self) -> Vec<RankedDoc<S>> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|e| RankedDoc {
                doc_id: e.doc_id.to_owned(),
                score: e.score,
            })
            .collect()
    }
}

const CHUNK: usize = 4096;

/// Scores every item and keeps the `top_k` best, scanning on `threads`
/// workers (0 = all cores). The result does not depend on `threads`.
pub fn select_top_k<'a, X, S, I, F>(
    items: &'a [X],
    top_k: usize,
    threads: usize,
    id: I,
    score: F,
) -> Vec<RankedDoc<S>>
where
    X: Sync,
    S: RankScore,
    I: Fn(&'a X) -> &'a str + Sync,
    F: Fn(&'a X) -> S + Sync,
{
    let chunk = |part: &'a [X]| {
        let mut top = TopK::new(top_k);
        for item in part {
            top.push(id(item), score(item));
        }
        top
    };
    if parallel::is_sequential(threads) {
        return chunk(items).into_sorted();
    }
    parallel::run(threads, || {
        items
            .par_chunks(CHUNK)
            .map(chunk)
            .reduce(|| TopK::new(top_k), TopK::merge)
            .into_sorted()
    })
}

/// Sorts a full result list into rank order and keeps the first `k`.
pub fn sort_and_truncate<S: RankScore>(mut docs: Vec<RankedDoc<S>>, k: usize) -> Vec<RankedDoc<S>> {
    docs.sort_by(|a, b| rank_order((&a.score, &a.doc_id), (&b.score, &b.doc_id)));
    docs.truncate(k);
    docs
}
