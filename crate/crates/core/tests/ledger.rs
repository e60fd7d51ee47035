use irs_offload::ledger::{digest, verify_chain, ContractRecord, Ledger, RecordKind};
use proptest::prelude::*;

fn ledger(n: usize) -> Ledger {
    let mut l = Ledger::new();
    for i in 0..n {
        l.append(RecordKind::TaskPublish, digest(&(i as u64).to_le_bytes()), format!("sensor-{i}"), 1.6e6 + i as f64)
            .unwrap();
        l.append(RecordKind::ResultUpload, digest(&(i as u64 + 99).to_le_bytes()), format!("server-{i}"), 1.6e6 + i as f64)
            .unwrap();
    }
    l
}

/// Flips bit `bit` of field `field` in `record`. Sender-id flips stay within
/// the low seven bits so the id remains valid UTF-8.
fn flip(record: &mut ContractRecord, field: usize, bit: usize) {
    match field {
        0 => {
            record.kind = match (record.kind, bit % 2) {
                (RecordKind::Genesis, 0) | (RecordKind::ResultUpload, 1) => RecordKind::TaskPublish,
                (RecordKind::TaskPublish, 0) | (RecordKind::Genesis, 1) => RecordKind::ResultUpload,
                _ => RecordKind::Genesis,
            }
        }
        1 => record.payload_digest[bit / 8 % 32] ^= 1 << (bit % 8),
        2 => {
            let mut bytes = record.sender_id.clone().into_bytes();
            let i = bit % bytes.len();
            bytes[i] ^= 1 << (bit % 7);
            record.sender_id = String::from_utf8(bytes).expect("ascii stays ascii");
        }
        3 => record.gas = f64::from_bits(record.gas.to_bits() ^ (1 << (bit % 64))),
        4 => record.prev_hash[bit / 8 % 32] ^= 1 << (bit % 8),
        _ => record.record_hash[bit / 8 % 32] ^= 1 << (bit % 8),
    }
}

#[test]
fn exported_chain_round_trips_and_verifies() {
    let l = ledger(10);
    assert!(l.verify());
    let mut buf = Vec::new();
    l.write_jsonl(&mut buf).unwrap();
    let back = Ledger::read_jsonl(buf.as_slice()).unwrap();
    assert_eq!(back.head_hash(), l.head_hash());
    assert!(back.verify());
}

#[test]
fn reordering_is_detected() {
    let mut records = ledger(4).into_records();
    records.swap(3, 5);
    assert!(!verify_chain(&records));
    let mut records = ledger(4).into_records();
    records.pop();
    assert!(verify_chain(&records), "truncating the tail keeps a valid prefix");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn any_single_bit_tamper_is_detected(record in 0usize..21, field in 0usize..6, bit in 0usize..256) {
        let mut records = ledger(10).into_records();
        flip(&mut records[record], field, bit);
        prop_assert!(!verify_chain(&records));
    }
}
