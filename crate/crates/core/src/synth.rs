//! Synthetic corpora for benchmarks and acceptance runs.
//!
//! Background documents draw words from a Zipfian distribution. A planted
//! domain sub-corpus mixes in words from a separate domain vocabulary, and
//! lexicon phrases are planted into domain documents with frequencies that
//! decay along the phrase list, so most phrases sit in the long tail.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::eval::{Judgments, PhraseSet};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub domain_docs: usize,
    pub seed_docs: usize,
    pub background_vocab: usize,
    pub domain_vocab: usize,
    pub zipf_exponent: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Share of a domain document's words drawn from the domain vocabulary.
    pub domain_mix: f64,
    pub phrases: usize,
    /// Planting count of the most frequent phrase.
    pub max_phrase_docs: usize,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 10_000,
            domain_docs: 400,
            seed_docs: 20,
            background_vocab: 20_000,
            domain_vocab: 600,
            zipf_exponent: 1.07,
            min_len: 40,
            max_len: 120,
            domain_mix: 0.3,
            phrases: 100,
            max_phrase_docs: 40,
            rng_seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Vec<Document>,
    pub seeds: Vec<Document>,
    pub phrases: PhraseSet,
    pub domain_ids: HashSet<String>,
}

impl SynthCorpus {
    /// Domain documents judged relevant, everything else not.
    pub fn judgments(&self) -> Judgments {
        Judgments::new(
            self.corpus
                .iter()
                .map(|d| (d.id.clone(), self.domain_ids.contains(&d.id))),
        )
    }
}

struct Sampler {
    background: Zipf<f64>,
    domain: Zipf<f64>,
    cfg: SynthConfig,
}

impl Sampler {
    fn words(&self, rng: &mut ChaCha8Rng, domain: bool) -> Vec<String> {
        let len = rng.random_range(self.cfg.min_len..=self.cfg.max_len);
        (0..len)
            .map(|_| {
                if domain && rng.random_bool(self.cfg.domain_mix) {
                    format!("dom{}", self.domain.sample(rng) as u64)
                } else {
                    format!("w{}", self.background.sample(rng) as u64)
                }
            })
            .collect()
    }
}

/// Planting count for phrase `i`; decays so most phrases are rare.
fn phrase_docs(i: usize, max: usize) -> usize {
    ((max as f64) / ((i + 1) as f64).powf(0.9)).round().max(1.0) as usize
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.domain_docs > cfg.n_docs || cfg.min_len > cfg.max_len || cfg.min_len == 0 {
        return Err(Error::Config(
            "inconsistent synthetic corpus configuration".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.domain_mix) {
        return Err(Error::Config("domain mix must lie in [0, 1]".into()));
    }
    let zipf = |n: usize| {
        Zipf::new(n.max(1) as f64, cfg.zipf_exponent)
            .map_err(|e| Error::Config(format!("zipf distribution: {e}")))
    };
    let sampler = Sampler {
        background: zipf(cfg.background_vocab)?,
        domain: zipf(cfg.domain_vocab)?,
        cfg: cfg.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let mut is_domain: Vec<bool> = (0..cfg.n_docs).map(|i| i < cfg.domain_docs).collect();
    is_domain.shuffle(&mut rng);
    let mut bodies: Vec<Vec<String>> = is_domain
        .iter()
        .map(|&d| sampler.words(&mut rng, d))
        .collect();

    let domain_positions: Vec<usize> = (0..cfg.n_docs).filter(|&i| is_domain[i]).collect();
    let mut phrase_text = Vec::with_capacity(cfg.phrases);
    for i in 0..cfg.phrases {
        let phrase = format!("lex{i}a lex{i}b");
        let copies = phrase_docs(i, cfg.max_phrase_docs).min(domain_positions.len());
        for &pos in domain_positions.choose_multiple(&mut rng, copies) {
            let body = &mut bodies[pos];
            let at = rng.random_range(0..=body.len());
            body.insert(at, phrase.clone());
        }
        phrase_text.push(phrase);
    }

    let corpus = bodies
        .into_iter()
        .enumerate()
        .map(|(i, words)| Document::new(format!("doc{i:06}"), words.join(" ")))
        .collect::<Vec<_>>();
    let domain_ids = corpus
        .iter()
        .zip(&is_domain)
        .filter(|(_, &d)| d)
        .map(|(d, _)| d.id.clone())
        .collect();
    let seeds = (0..cfg.seed_docs)
        .map(|i| {
            Document::new(
                format!("seed{i:03}"),
                sampler.words(&mut rng, true).join(" "),
            )
        })
        .collect();
    Ok(SynthCorpus {
        corpus,
        seeds,
        phrases: PhraseSet::new(phrase_text),
        domain_ids,
    })
}
