//! Acceptance gate. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p sigexpand --test acceptance -- --nocapture`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigexpand::baselines::{baseline_expand, BaselineInputs, Method};
use sigexpand::corpus::write_jsonl;
use sigexpand::eval::Coverage;
use sigexpand::index_file::encode_index;
use sigexpand::retrieval::{expand_instrumented, oracle::brute_force_expand};
use sigexpand::synth::{generate, SynthConfig};
use sigexpand::*;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const METRIC_TOL: f64 = 1e-9;

fn random_corpus(
    rng: &mut ChaCha8Rng,
    prefix: &str,
    max_docs: usize,
    max_terms: usize,
) -> Vec<Document> {
    let n = rng.random_range(0..=max_docs);
    (0..n)
        .map(|i| {
            let len = rng.random_range(0..=max_terms);
            let words: Vec<String> = (0..len)
                .map(|_| format!("t{}", rng.random_range(0..30u32)))
                .collect();
            Document::new(format!("{prefix}{i:03}"), words.join(" "))
        })
        .collect()
}

fn params(k1: u32, k2: u32) -> SignatureParams {
    SignatureParams::new(k1, k2).unwrap()
}

fn payload_width() -> Outcome {
    // 150 shared terms so every one survives k1 = 2
    let text: Vec<String> = (0..150).map(|i| format!("x{i}")).collect();
    let docs = vec![
        Document::new("big", text.join(" ")),
        Document::new("twin", text.join(" ")),
        Document::new("small", "x0 x1 lonely"),
    ];
    let index = build_index(&docs, params(2, 100)).map_err(|e| e.to_string())?;
    let sig = index.signature("big").ok_or("missing signature")?;
    if sig.payload().len() != 400 {
        return Err(format!("payload is {} bytes", sig.payload().len()));
    }
    let vocab = index.vocab();
    let header = 4 + 2 + 4 + 4 + 8 + 8;
    let terms: usize = vocab.terms().iter().map(|t| 4 + t.len() + 8).sum();
    let records: usize = index
        .signatures()
        .iter()
        .map(|s| 4 + s.doc_id.len() + 4 + 4 * s.len())
        .sum();
    let expected = header + terms + 8 + records;
    let actual = encode_index(&index).len();
    if actual != expected {
        return Err(format!("encoded {actual} bytes, layout gives {expected}"));
    }
    Ok(format!(
        "payload 400 bytes, encoded size {actual} matches layout"
    ))
}

fn expand_matches_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 200;
    for t in 0..trials {
        let corpus = random_corpus(&mut rng, "d", 50, 30);
        let seeds = random_corpus(&mut rng, "s", 4, 30);
        let p = params(rng.random_range(1..=5), rng.random_range(1..=10));
        let top_k = rng.random_range(1..=60);
        let index = build_index(&corpus, p).map_err(|e| e.to_string())?;
        let got = expand(&index, &seeds, top_k);
        let want = brute_force_expand(&corpus, &seeds, p, top_k);
        if got != want {
            return Err(format!("trial {t} differs"));
        }
    }
    Ok(format!("{trials} random corpora identical"))
}

fn stream_equals_batch() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let trials = 100;
    for t in 0..trials {
        let full = random_corpus(&mut rng, "d", 50, 30);
        let split = rng.random_range(0..=full.len());
        let p = params(rng.random_range(1..=5), rng.random_range(1..=10));
        let mut index = build_index(&full[..split], p).map_err(|e| e.to_string())?;
        for doc in &full[split..] {
            index.update(doc).map_err(|e| e.to_string())?;
        }
        index.resign_all().map_err(|e| e.to_string())?;
        let batch = build_index(&full, p).map_err(|e| e.to_string())?;
        if index.vocab() != batch.vocab()
            || index.dim() != batch.dim()
            || index.signatures() != batch.signatures()
        {
            return Err(format!(
                "trial {t} (split {split} of {}) differs",
                full.len()
            ));
        }
    }
    Ok(format!("{trials} prefix/suffix splits identical"))
}

fn bitset_popcount(q: &[u32], s: &[u32], width: usize) -> u32 {
    let mut a = vec![0u64; width.div_ceil(64)];
    let mut b = a.clone();
    for &i in q {
        a[i as usize / 64] |= 1 << (i % 64);
    }
    for &i in s {
        b[i as usize / 64] |= 1 << (i % 64);
    }
    a.iter().zip(&b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn sorted_ids(rng: &mut ChaCha8Rng, width: u32) -> Vec<u32> {
    let n = rng.random_range(0..=width.min(120));
    let mut v: Vec<u32> = (0..n).map(|_| rng.random_range(0..width)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn merge_matches_bitset() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pairs = 1000;
    for t in 0..pairs {
        let width = rng.random_range(1..=1000u32);
        let q = sorted_ids(&mut rng, width);
        let s = sorted_ids(&mut rng, width);
        if merge_and_score(&q, &s) != bitset_popcount(&q, &s, width as usize) {
            return Err(format!("pair {t} differs"));
        }
    }
    Ok(format!("{pairs} fuzzed pairs identical"))
}

fn metrics_hold() -> Outcome {
    let judg = Judgments::new([("r1", true), ("r2", true), ("n", false)]);
    let v: f64 = ndcg(&["r1", "n", "r2"], &judg, 3);
    if (v - 0.9197207891481876).abs() > METRIC_TOL {
        return Err(format!("nDCG {v}"));
    }
    let (ap, recall): (f64, f64) = map_and_recall(&["r1", "n", "r2"], &judg, 3);
    if (ap - 5.0 / 6.0).abs() > METRIC_TOL || (recall - 1.0).abs() > METRIC_TOL {
        return Err(format!("AP {ap}, recall {recall}"));
    }
    let phrases = PhraseSet::new((0..10).map(|i| format!("phrase number{i}")));
    let docs = [
        Document::new("r1", "phrase number0 phrase number1 phrase number2"),
        Document::new("r2", "phrase number3 phrase number4 phrase number5"),
        Document::new("r3", "phrase number6"),
    ];
    let c: Coverage<f64> =
        coverage(&phrases, &docs.iter().collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    if (c.fraction - 0.7).abs() > METRIC_TOL {
        return Err(format!("coverage {}", c.fraction));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let instances = 1000;
    for t in 0..instances {
        let n_docs = rng.random_range(1..=20);
        let corpus: Vec<Document> = (0..n_docs)
            .map(|i| {
                let words: Vec<String> = (0..rng.random_range(0..8))
                    .map(|_| format!("p{}", rng.random_range(0..15)))
                    .collect();
                Document::new(format!("d{i}"), words.join(" "))
            })
            .collect();
        let phrases = PhraseSet::new((0..rng.random_range(1..10)).map(|i| format!("p{i}")));
        let subset: Vec<&Document> = corpus.iter().filter(|_| rng.random_bool(0.5)).collect();
        let superset: Vec<&Document> = corpus.iter().collect();
        let small: Coverage<f64> = coverage(&phrases, &subset).map_err(|e| e.to_string())?;
        let big: Coverage<f64> = coverage(&phrases, &superset).map_err(|e| e.to_string())?;
        if small.fraction > big.fraction {
            return Err(format!("instance {t}: coverage not monotone"));
        }
        let ranked: Vec<&str> = corpus.iter().map(|d| d.id.as_str()).collect();
        let j = Judgments::new(ranked.iter().map(|&id| (id, rng.random_bool(0.4))));
        if j.relevant_count() == 0 {
            continue;
        }
        let curve: Vec<(f64, f64)> = pr_curve(&ranked, &j).map_err(|e| e.to_string())?;
        if curve.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(format!("instance {t}: recall decreases along the curve"));
        }
    }
    Ok(format!(
        "hand values within {METRIC_TOL:e}, {instances} fuzzed instances monotone"
    ))
}

fn beats_random() -> Outcome {
    let synth = generate(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let by_id: HashMap<&str, &Document> = synth.corpus.iter().map(|d| (d.id.as_str(), d)).collect();
    let top_k = 500;
    let cov = |ids: Vec<&str>| -> f64 {
        let docs: Vec<&Document> = ids.iter().map(|id| by_id[id]).collect();
        coverage::<f64>(&synth.phrases, &docs).unwrap().fraction
    };

    let index = build_index(&synth.corpus, params(5, 20)).map_err(|e| e.to_string())?;
    let q = query_signature(&synth.seeds, &index);
    let (ranked, stats) = expand_instrumented(&index, &q, top_k);
    let sig_cov = cov(ranked.iter().map(|d| d.doc_id.as_str()).collect());

    let mut random_cov = 0.0;
    for seed in 0..3 {
        let mut inputs = BaselineInputs::<f64>::new(&synth.seeds, top_k);
        inputs.corpus = Some(&synth.corpus);
        inputs.rng_seed = seed;
        let r = baseline_expand(Method::Random, &inputs).map_err(|e| e.to_string())?;
        random_cov += cov(r.iter().map(|d| d.doc_id.as_str()).collect()) / 3.0;
    }
    let detail = format!(
        "signature {sig_cov:.3} vs random {random_cov:.3} at top-{top_k}, {} of {} merges over budget",
        stats.over_budget, stats.docs_scanned
    );
    if sig_cov > random_cov && stats.over_budget == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn double_save_identical() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut fixtures: Vec<(Vec<Document>, SignatureParams)> = vec![
        (
            ["a b c", "a b d", "a c e", "a f"]
                .iter()
                .enumerate()
                .map(|(i, t)| Document::new(format!("D{}", i + 1), *t))
                .collect(),
            params(2, 1),
        ),
        (Vec::new(), params(1, 1)),
    ];
    for _ in 0..20 {
        fixtures.push((
            random_corpus(&mut rng, "d", 50, 30),
            params(rng.random_range(1..=5), rng.random_range(1..=10)),
        ));
    }
    for (i, (docs, p)) in fixtures.iter().enumerate() {
        let index = build_index(docs, *p).map_err(|e| e.to_string())?;
        let (a, b, c) = (
            dir.path().join("a"),
            dir.path().join("b"),
            dir.path().join("c"),
        );
        save_index(&index, &a).map_err(|e| e.to_string())?;
        save_index(&index, &b).map_err(|e| e.to_string())?;
        save_index(&load_index(&a).map_err(|e| e.to_string())?, &c).map_err(|e| e.to_string())?;
        let bytes = fs::read(&a).map_err(|e| e.to_string())?;
        if bytes != fs::read(&b).map_err(|e| e.to_string())?
            || bytes != fs::read(&c).map_err(|e| e.to_string())?
        {
            return Err(format!("fixture {i} differs"));
        }
    }
    Ok(format!(
        "{} fixtures bit-identical across saves and reload",
        fixtures.len()
    ))
}

fn run_bin(args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sigexpand"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn threads_invariant() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    // large enough to span several parallel chunks
    let synth = generate(&SynthConfig {
        n_docs: 9000,
        domain_docs: 300,
        seed_docs: 5,
        background_vocab: 5000,
        min_len: 5,
        max_len: 20,
        phrases: 30,
        ..SynthConfig::default()
    })
    .map_err(|e| e.to_string())?;
    write_jsonl(Path::new(&p("corpus.jsonl")), &synth.corpus).map_err(|e| e.to_string())?;
    write_jsonl(Path::new(&p("seeds.jsonl")), &synth.seeds).map_err(|e| e.to_string())?;
    fs::write(p("phrases.txt"), synth.phrases.phrases().join("\n")).map_err(|e| e.to_string())?;
    let mut store = VectorStore32::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for d in synth.corpus.iter().chain(&synth.seeds) {
        // coarse values so many documents tie on score
        let v = (0..8).map(|_| rng.random_range(0..3) as f32).collect();
        store
            .insert(d.id.clone(), DenseVector::new(v))
            .map_err(|e| e.to_string())?;
    }
    store
        .save(Path::new(&p("vectors.bin")))
        .map_err(|e| e.to_string())?;
    run_bin(&[
        "build",
        "--corpus",
        &p("corpus.jsonl"),
        "--k1",
        "3",
        "--k2",
        "10",
        "--out",
        &p("index.bin"),
    ])?;

    let methods = ["signature", "tfidf", "hash", "dense", "random", "query"];
    for method in methods {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = p(&format!("{method}-{threads}.tsv"));
            run_bin(&[
                "expand",
                "--method",
                method,
                "--index",
                &p("index.bin"),
                "--seeds",
                &p("seeds.jsonl"),
                "--corpus",
                &p("corpus.jsonl"),
                "--vectors",
                &p("vectors.bin"),
                "--phrases",
                &p("phrases.txt"),
                "--rng-seed",
                "7",
                "--top-k",
                "3000",
                "--threads",
                threads,
                "--out",
                &out,
            ])?;
            outputs.push(fs::read(&out).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("method {method} differs between 1 and 4 threads"));
        }
    }
    Ok(format!(
        "{} methods identical at 1 and 4 threads",
        methods.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("signature payload is 4*k2 bytes", payload_width),
        (
            "expand equals brute-force bit-vector oracle",
            expand_matches_oracle,
        ),
        (
            "streamed updates plus full re-sign equal batch build",
            stream_equals_batch,
        ),
        ("merge score equals bitset popcount", merge_matches_bitset),
        ("metric hand values and monotonicity", metrics_hold),
        (
            "signature coverage beats random on Zipf corpus",
            beats_random,
        ),
        ("index save is deterministic", double_save_identical),
        (
            "CLI expand output independent of thread count",
            threads_invariant,
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
