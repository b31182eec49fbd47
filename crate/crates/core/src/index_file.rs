//! Binary index file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      "SAUC"
//! version    u16
//! k1, k2     u32, u32
//! n_docs     u64
//! vocab_len  u64
//!   term     u32 byte length, UTF-8 bytes, u64 document count   (id order)
//! doc_count  u64
//!   doc      u32 byte length, UTF-8 id, u32 signature length, u32 ids (ascending)
//! ```
//!
//! A signature of `n` ids occupies exactly `4 * n` payload bytes.

use std::fs;
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::error::{Error, FormatError, Result};
use crate::signature::{Signature, SignatureIndex, SignatureParams};

pub const MAGIC: [u8; 4] = *b"SAUC";
pub const VERSION: u16 = 1;

pub fn encode_index(index: &SignatureIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let params = index.params();
    out.extend_from_slice(&params.k1().to_le_bytes());
    out.extend_from_slice(&params.k2().to_le_bytes());
    let vocab = index.vocab();
    out.extend_from_slice(&vocab.n_docs().to_le_bytes());
    out.extend_from_slice(&(vocab.len() as u64).to_le_bytes());
    for (term, dc) in vocab.terms().iter().zip(vocab.dcs()) {
        put_str(&mut out, term);
        out.extend_from_slice(&dc.to_le_bytes());
    }
    out.extend_from_slice(&(index.len() as u64).to_le_bytes());
    for sig in index.signatures() {
        put_str(&mut out, &sig.doc_id);
        out.extend_from_slice(&(sig.len() as u32).to_le_bytes());
        out.extend_from_slice(&sig.payload());
    }
    out
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        if self.buf.len() < n {
            return Err(FormatError::Truncated(what));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N], FormatError> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, FormatError> {
        self.array(what).map(u16::from_le_bytes)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        self.array(what).map(u32::from_le_bytes)
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, FormatError> {
        self.array(what).map(u64::from_le_bytes)
    }

    fn string(&mut self, what: &'static str) -> Result<String, FormatError> {
        let len = self.u32(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| FormatError::InvalidUtf8(what))
    }

    /// Guards preallocation against corrupt counts.
    fn capacity_for(&self, count: u64, min_record: usize) -> usize {
        (count as usize).min(self.buf.len() / min_record.max(1))
    }
}

pub fn decode_index(bytes: &[u8]) -> Result<SignatureIndex> {
    let mut r = Reader { buf: bytes };
    let magic: [u8; 4] = r.array("magic")?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let version = r.u16("version")?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let k1 = r.u32("k1")?;
    let k2 = r.u32("k2")?;
    let params =
        SignatureParams::new(k1, k2).map_err(|e| FormatError::Inconsistent(e.to_string()))?;
    let n_docs = r.u64("document total")?;
    let vocab_len = r.u64("vocabulary length")?;
    let mut terms = Vec::with_capacity(r.capacity_for(vocab_len, 12));
    let mut dcs = Vec::with_capacity(terms.capacity());
    for _ in 0..vocab_len {
        terms.push(r.string("vocabulary term")?);
        dcs.push(r.u64("document count")?);
    }
    let doc_count = r.u64("document count")?;
    if doc_count != n_docs {
        return Err(FormatError::Inconsistent(format!(
            "header says {n_docs} documents but {doc_count} records follow"
        ))
        .into());
    }
    let mut signatures = Vec::with_capacity(r.capacity_for(doc_count, 8));
    for _ in 0..doc_count {
        let doc_id = r.string("document id")?;
        let len = r.u32("signature length")? as usize;
        let payload = r.take(
            len.checked_mul(4)
                .ok_or(FormatError::Truncated("signature"))?,
            "signature",
        )?;
        let ids: Vec<u32> = payload
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("chunk of 4")))
            .collect();
        if !ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(FormatError::Inconsistent(format!(
                "signature of `{doc_id}` is not strictly ascending"
            ))
            .into());
        }
        signatures.push(Signature::new(doc_id, ids));
    }
    if !r.buf.is_empty() {
        return Err(FormatError::TrailingBytes(r.buf.len()).into());
    }
    let vocab = Vocabulary::from_parts(terms, dcs, n_docs)
        .map_err(|e| FormatError::Inconsistent(e.to_string()))?;
    SignatureIndex::from_parts(params, vocab, signatures).map_err(|e| match e {
        Error::Format(f) => Error::Format(f),
        other => FormatError::Inconsistent(other.to_string()).into(),
    })
}

pub fn save_index(index: &SignatureIndex, path: &Path) -> Result<()> {
    fs::write(path, encode_index(index)).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: &Path) -> Result<SignatureIndex> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_index(&bytes)
}
