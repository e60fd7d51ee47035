//! Append-only hash-chained contract ledger.
//!
//! Records are hashed with SHA-256 over a length-prefixed byte layout:
//! kind tag (1 byte), payload digest (32), sender id length (u64 LE) and
//! UTF-8 bytes, gas (IEEE-754 bits, u64 LE), previous hash (32).

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};

pub type Digest = [u8; 32];

pub const ZERO_DIGEST: Digest = [0; 32];

/// SHA-256 of arbitrary bytes, for payload digests.
pub fn digest(bytes: &[u8]) -> Digest {
    Sha256::digest(bytes).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    /// Chain anchor; only ever the first record.
    Genesis,
    TaskPublish,
    ResultUpload,
}

impl RecordKind {
    fn tag(self) -> u8 {
        match self {
            RecordKind::Genesis => 0,
            RecordKind::TaskPublish => 1,
            RecordKind::ResultUpload => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractRecord {
    pub kind: RecordKind,
    #[serde(with = "hex_digest")]
    pub payload_digest: Digest,
    pub sender_id: String,
    pub gas: f64,
    #[serde(with = "hex_digest")]
    pub prev_hash: Digest,
    #[serde(with = "hex_digest")]
    pub record_hash: Digest,
}

impl ContractRecord {
    /// Hash of every field except `record_hash` itself.
    pub fn compute_hash(&self) -> Digest {
        let mut h = Sha256::new();
        h.update([self.kind.tag()]);
        h.update(self.payload_digest);
        h.update((self.sender_id.len() as u64).to_le_bytes());
        h.update(self.sender_id.as_bytes());
        h.update(self.gas.to_bits().to_le_bytes());
        h.update(self.prev_hash);
        h.finalize().into()
    }

    fn sealed(kind: RecordKind, payload_digest: Digest, sender_id: String, gas: f64, prev_hash: Digest) -> Self {
        let mut record = ContractRecord {
            kind,
            payload_digest,
            sender_id,
            gas,
            prev_hash,
            record_hash: ZERO_DIGEST,
        };
        record.record_hash = record.compute_hash();
        record
    }
}

/// True iff the chain starts with a genesis record, every hash recomputes
/// and every `prev_hash` names its predecessor.
pub fn verify_chain(records: &[ContractRecord]) -> bool {
    let Some(first) = records.first() else {
        return false;
    };
    if first.kind != RecordKind::Genesis || first.prev_hash != ZERO_DIGEST {
        return false;
    }
    let mut prev = None;
    for record in records {
        if record.record_hash != record.compute_hash() {
            return false;
        }
        if let Some(prev_hash) = prev {
            if record.kind == RecordKind::Genesis || record.prev_hash != prev_hash {
                return false;
            }
        }
        prev = Some(record.record_hash);
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    records: Vec<ContractRecord>,
}

impl Default for Ledger {
    fn default() -> Self {
        Self::new()
    }
}

impl Ledger {
    pub fn new() -> Self {
        let genesis = ContractRecord::sealed(RecordKind::Genesis, ZERO_DIGEST, "genesis".into(), 0.0, ZERO_DIGEST);
        Self { records: vec![genesis] }
    }

    /// Wraps existing records without checking them; see [`Ledger::verify`].
    pub fn from_records(records: Vec<ContractRecord>) -> Self {
        Self { records }
    }

    pub fn into_records(self) -> Vec<ContractRecord> {
        self.records
    }

    pub fn records(&self) -> &[ContractRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn head_hash(&self) -> Digest {
        self.records.last().map_or(ZERO_DIGEST, |r| r.record_hash)
    }

    pub fn append(
        &mut self,
        kind: RecordKind,
        payload_digest: Digest,
        sender_id: impl Into<String>,
        gas: f64,
    ) -> Result<&ContractRecord> {
        if kind == RecordKind::Genesis {
            return Err(Error::domain("genesis can only open a ledger"));
        }
        if !(gas > 0.0 && gas.is_finite()) {
            return Err(Error::domain(format!("gas must be positive and finite, got {gas}")));
        }
        let record = ContractRecord::sealed(kind, payload_digest, sender_id.into(), gas, self.head_hash());
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    pub fn verify(&self) -> bool {
        verify_chain(&self.records)
    }

    /// One JSON object per line, digests in lowercase hex.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n").map_err(|e| Error::io("<ledger stream>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::io("<ledger stream>", e))?;
            if !line.trim().is_empty() {
                records.push(serde_json::from_str(&line)?);
            }
        }
        Ok(Self { records })
    }

    pub fn export_jsonl(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_jsonl(&mut out)?;
        out.flush().map_err(|e| Error::io(path, e))
    }
}

mod hex_digest {
    use super::Digest;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Digest, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Digest, D::Error> {
        let text = String::deserialize(d)?;
        let mut out = [0u8; 32];
        hex::decode_to_slice(&text, &mut out).map_err(D::Error::custom)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Ledger {
        let mut ledger = Ledger::new();
        for i in 0..n {
            let kind = if i % 2 == 0 { RecordKind::TaskPublish } else { RecordKind::ResultUpload };
            ledger
                .append(kind, digest(format!("task {i}").as_bytes()), format!("sensor-{i}"), 1.5e6 + i as f64)
                .unwrap();
        }
        ledger
    }

    #[test]
    fn first_append_links_to_genesis() {
        let mut ledger = Ledger::new();
        let genesis = ledger.head_hash();
        let rec = ledger.append(RecordKind::TaskPublish, digest(b"x"), "s", 1.0).unwrap();
        assert_eq!(rec.prev_hash, genesis);
        assert!(ledger.verify());
    }

    #[test]
    fn identical_payloads_hash_differently() {
        let mut ledger = Ledger::new();
        let a = ledger.append(RecordKind::TaskPublish, digest(b"x"), "s", 1.0).unwrap().record_hash;
        let b = ledger.append(RecordKind::TaskPublish, digest(b"x"), "s", 1.0).unwrap().record_hash;
        assert_ne!(a, b);
    }

    #[test]
    fn length_counts_genesis() {
        assert_eq!(sample(7).len(), 8);
        assert_eq!(Ledger::new().len(), 1);
    }

    #[test]
    fn deterministic_head() {
        assert_eq!(sample(5).head_hash(), sample(5).head_hash());
        assert_ne!(sample(5).head_hash(), sample(6).head_hash());
    }

    #[test]
    fn detects_payload_flip_and_swap() {
        let ledger = sample(6);
        let mut records = ledger.clone().into_records();
        records[3].payload_digest[0] ^= 1;
        assert!(!verify_chain(&records));

        let mut records = ledger.into_records();
        records.swap(2, 3);
        assert!(!verify_chain(&records));
    }

    #[test]
    fn rejects_structural_damage() {
        assert!(!verify_chain(&[]));
        let mut records = sample(3).into_records();
        records.remove(0);
        assert!(!verify_chain(&records));
        let mut ledger = Ledger::new();
        assert!(ledger.append(RecordKind::Genesis, ZERO_DIGEST, "x", 1.0).is_err());
        assert!(ledger.append(RecordKind::TaskPublish, ZERO_DIGEST, "x", 0.0).is_err());
        assert!(ledger.append(RecordKind::TaskPublish, ZERO_DIGEST, "x", f64::NAN).is_err());
    }

    #[test]
    fn hash_layout_is_length_prefixed() {
        // Moving a byte between sender id and payload must not collide.
        let a = ContractRecord::sealed(RecordKind::TaskPublish, ZERO_DIGEST, "ab".into(), 1.0, ZERO_DIGEST);
        let b = ContractRecord::sealed(RecordKind::TaskPublish, ZERO_DIGEST, "a".into(), 1.0, ZERO_DIGEST);
        assert_ne!(a.record_hash, b.record_hash);
    }

    #[test]
    fn jsonl_round_trip() {
        let ledger = sample(4);
        let mut buf = Vec::new();
        ledger.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().next().unwrap().contains("\"kind\":\"genesis\""));
        let back = Ledger::read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, ledger);
        assert!(back.verify());
        assert!(Ledger::read_jsonl(&b"{\"kind\":\"genesis\"}\n"[..]).is_err());
    }

    #[test]
    fn export_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        sample(2).export_jsonl(&path).unwrap();
        let back = Ledger::read_jsonl(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
        assert!(back.verify());
        assert!(sample(1).export_jsonl(&dir.path().join("missing/ledger.jsonl")).is_err());
    }
}
