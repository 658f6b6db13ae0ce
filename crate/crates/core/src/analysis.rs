//! Attacks that follow directly from the cipher's construction.
//!
//! With `c = S[p] ^ k` a single known (plain, cipher) pair gives the key as
//! `S[p] ^ c`, and without known plaintext the whole key space is 256 values.
//! The flag study measures what happens when the key-source flags or the
//! timestamp in a timestamp-keyed frame are corrupted but the frame still
//! passes its checksum.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::framing::{encode_frame, Frame};
use crate::keying::{decode_flags, derive_key, encode_flags, KeySpec, TsField};
use crate::meshsim::{coordinator_receive, receive_frame, ReceiveFailure};
use crate::registry::Registry;
use crate::sbox::{decrypt_byte, substitute, KeyByte};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackMethod {
    KnownPlaintext,
    Exhaustive,
    FlagCorruption,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub recovered_key: Option<KeyByte>,
    /// Candidate keys, best first, with their plausibility scores in `[0, 1]`.
    pub candidates: Vec<(KeyByte, f64)>,
    pub trials: usize,
    pub method: AttackMethod,
}

impl AttackResult {
    pub fn render_tsv(&self) -> String {
        let mut s = String::from("key\tscore\n");
        for (k, score) in &self.candidates {
            let _ = writeln!(s, "{k}\t{score:.4}");
        }
        s
    }
}

/// Recovers the key from known pairs and checks that every pair agrees.
pub fn recover_key_known_plaintext(pairs: &[(u8, u8)]) -> Result<AttackResult> {
    let (&(p0, c0), rest) = pairs.split_first().ok_or(Error::EmptyInput)?;
    let key = KeyByte(substitute(p0) ^ c0);
    if let Some(i) = rest.iter().position(|&(p, c)| substitute(p) ^ c != key.0) {
        return Err(Error::InconsistentPairs(i + 1));
    }
    Ok(AttackResult {
        recovered_key: Some(key),
        candidates: vec![(key, 1.0)],
        trials: pairs.len(),
        method: AttackMethod::KnownPlaintext,
    })
}

/// Inclusive byte range a decrypted sensor value must fall into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValueRange {
    pub lo: u8,
    pub hi: u8,
}

impl ValueRange {
    pub const ANY: ValueRange = ValueRange { lo: 0, hi: 255 };
    /// Degrees Celsius.
    pub const TEMPERATURE: ValueRange = ValueRange { lo: 0, hi: 50 };
    /// Percent relative humidity.
    pub const HUMIDITY: ValueRange = ValueRange { lo: 0, hi: 100 };
    pub const UV_INDEX: ValueRange = ValueRange { lo: 0, hi: 11 };

    pub fn contains(self, b: u8) -> bool {
        (self.lo..=self.hi).contains(&b)
    }

    pub fn preset(name: &str) -> Option<ValueRange> {
        match name {
            "any" => Some(Self::ANY),
            "temperature" => Some(Self::TEMPERATURE),
            "humidity" => Some(Self::HUMIDITY),
            "uv" | "uv-index" => Some(Self::UV_INDEX),
            _ => None,
        }
    }
}

fn score(cipher: &[u8], key: KeyByte, plausible: &impl Fn(u8) -> bool) -> f64 {
    let hits = cipher.iter().filter(|&&c| plausible(decrypt_byte(c, key))).count();
    hits as f64 / cipher.len() as f64
}

fn rank(mut candidates: Vec<(KeyByte, f64)>) -> AttackResult {
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let recovered_key = match candidates.as_slice() {
        [(k, best), (_, second), ..] if best > second => Some(*k),
        _ => None,
    };
    AttackResult {
        recovered_key,
        trials: candidates.len(),
        candidates,
        method: AttackMethod::Exhaustive,
    }
}

/// Tries all 256 keys and ranks them by the fraction of decrypted bytes the
/// predicate accepts. `recovered_key` is set only when one key scores
/// strictly higher than every other.
pub fn exhaustive_search(cipher: &[u8], plausible: impl Fn(u8) -> bool) -> Result<AttackResult> {
    if cipher.is_empty() {
        return Err(Error::EmptyInput);
    }
    let candidates = (0..=255u8)
        .map(KeyByte)
        .map(|k| (k, score(cipher, k, &plausible)))
        .collect();
    Ok(rank(candidates))
}

/// [`exhaustive_search`] with the key space split across `workers` threads.
/// Output is identical to the sequential search.
pub fn exhaustive_search_parallel(
    cipher: &[u8],
    plausible: impl Fn(u8) -> bool + Sync,
    workers: usize,
) -> Result<AttackResult> {
    if cipher.is_empty() {
        return Err(Error::EmptyInput);
    }
    let workers = workers.clamp(1, 256);
    let keys: Vec<u8> = (0..=255).collect();
    let chunk = keys.len().div_ceil(workers);
    let plausible = &plausible;
    let candidates = std::thread::scope(|scope| {
        let handles: Vec<_> = keys
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&k| (KeyByte(k), score(cipher, KeyByte(k), plausible)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    Ok(rank(candidates))
}

/// One corruption applied to a frame header before the checksum is
/// computed, so framing alone cannot catch it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Flip bit `n` (0 = least significant) of the flags byte.
    FlagBit(u8),
    /// Flip bit `n` of the 32-bit timestamp.
    TimestampBit(u8),
    /// Rewrite the timestamp-field selector.
    FieldSwap { from: TsField, to: TsField },
}

impl std::fmt::Display for Mutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mutation::FlagBit(n) => write!(f, "flag-bit-{n}"),
            Mutation::TimestampBit(n) => write!(f, "ts-bit-{n}"),
            Mutation::FieldSwap { from, to } => write!(f, "field-{from:?}->{to:?}"),
        }
    }
}

impl Mutation {
    fn apply(self, frame: &Frame) -> Frame {
        let mut f = frame.clone();
        match self {
            Mutation::FlagBit(n) => f.flags ^= 1 << n,
            Mutation::TimestampBit(n) => f.timestamp ^= 1 << n,
            Mutation::FieldSwap { to, .. } => f.flags = encode_flags(KeySpec::Timestamp(to)),
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Rejected(ReceiveFailure),
    Accepted { key: KeyByte, plain: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorruptionRow {
    pub mutation: Mutation,
    pub verdict: Verdict,
    pub key_changed: bool,
    pub value_changed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagStudy {
    pub spec: KeySpec,
    pub original_key: KeyByte,
    pub original_plain: Vec<u8>,
    pub rows: Vec<CorruptionRow>,
}

impl FlagStudy {
    pub fn method(&self) -> AttackMethod {
        AttackMethod::FlagCorruption
    }

    pub fn row(&self, mutation: Mutation) -> Option<&CorruptionRow> {
        self.rows.iter().find(|r| r.mutation == mutation)
    }

    pub fn rejected(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.verdict, Verdict::Rejected(_)))
            .count()
    }

    pub fn accepted_wrong(&self) -> usize {
        self.rows.iter().filter(|r| r.value_changed).count()
    }

    pub fn accepted_unchanged(&self) -> usize {
        self.rows.len() - self.rejected() - self.accepted_wrong()
    }

    /// Fraction of corruptions that deliver a wrong value without any error.
    pub fn undetected_wrong_rate(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.accepted_wrong() as f64 / self.rows.len() as f64
        }
    }

    pub fn render_tsv(&self) -> String {
        let mut s = String::from("mutation\tverdict\tkey\tvalue\tkey_changed\tvalue_changed\n");
        for r in &self.rows {
            let (verdict, key, value) = match &r.verdict {
                Verdict::Rejected(f) => (format!("rejected:{}", f.class()), "-".to_string(), "-".to_string()),
                Verdict::Accepted { key, plain } => ("accepted".to_string(), key.to_string(), hex(plain)),
            };
            let _ = writeln!(
                s,
                "{}\t{verdict}\t{key}\t{value}\t{}\t{}",
                r.mutation, r.key_changed, r.value_changed
            );
        }
        let _ = writeln!(
            s,
            "# total {} rejected {} accepted-unchanged {} accepted-wrong {} undetected-wrong-rate {:.4}",
            self.rows.len(),
            self.rejected(),
            self.accepted_unchanged(),
            self.accepted_wrong(),
            self.undetected_wrong_rate()
        );
        s
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02X}")).collect()
}

impl From<ReceiveFailure> for Error {
    fn from(f: ReceiveFailure) -> Self {
        match f {
            ReceiveFailure::Frame(e) | ReceiveFailure::Flags(e) => e,
            ReceiveFailure::UnknownSource { mac, .. } => Error::UnknownNode(format!("{mac:016X}")),
        }
    }
}

/// Replays a timestamp-keyed frame through the coordinator under every
/// single-bit flip of the flags byte and of the timestamp, and under every
/// rewrite of the timestamp-field selector.
pub fn flag_corruption_study(frame: &Frame, spec: KeySpec, registry: &Registry) -> Result<FlagStudy> {
    let KeySpec::Timestamp(field) = spec else {
        return Err(Error::WrongMode);
    };
    if decode_flags(frame.flags).ok() != Some(spec) {
        return Err(Error::WrongMode);
    }
    let original = receive_frame(frame, registry)?;
    let source = registry.get(&original.node).expect("receive resolved the node");
    let original_key = derive_key(spec, source, original.timestamp)?;

    let mutations = (0..8)
        .map(Mutation::FlagBit)
        .chain((0..32).map(Mutation::TimestampBit))
        .chain(
            TsField::ALL
                .into_iter()
                .filter(|&to| to != field)
                .map(|to| Mutation::FieldSwap { from: field, to }),
        );

    let mut rows = Vec::new();
    for mutation in mutations {
        let bytes = encode_frame(&mutation.apply(frame))?;
        let row = match coordinator_receive(&bytes, registry) {
            Err(failure) => CorruptionRow {
                mutation,
                verdict: Verdict::Rejected(failure),
                key_changed: false,
                value_changed: false,
            },
            Ok(reading) => {
                let node = registry.get(&reading.node).expect("receive resolved the node");
                let key = derive_key(reading.spec, node, reading.timestamp)?;
                CorruptionRow {
                    mutation,
                    key_changed: key != original_key,
                    value_changed: reading.plain != original.plain,
                    verdict: Verdict::Accepted {
                        key,
                        plain: reading.plain,
                    },
                }
            }
        };
        rows.push(row);
    }
    Ok(FlagStudy {
        spec,
        original_key,
        original_plain: original.plain,
        rows,
    })
}
