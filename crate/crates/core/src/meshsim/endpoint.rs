use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::framing::{decode_frame, Frame, VERSION};
use crate::keying::{decode_flags, derive_key, encode_flags, KeySpec, Timestamp};
use crate::registry::{NodeDescriptor, Registry, SensorSchedule};
use crate::sbox::{decrypt_payload, encrypt_payload};

/// Builds the frame a node sends for one sensor reading.
pub fn originate_reading(
    node: &NodeDescriptor,
    sensor: &SensorSchedule,
    value: u8,
    now: Timestamp,
    spec: KeySpec,
) -> Result<Frame> {
    if sensor.node_name != node.name {
        return Err(Error::InvariantViolation {
            name: node.name.clone(),
            which: format!("sensor {} belongs to node {}", sensor.sensor_id, sensor.node_name),
        });
    }
    let key = derive_key(spec, node, now)?;
    Ok(Frame {
        version: VERSION,
        flags: encode_flags(spec),
        source_mac: node.mac,
        source_short: node.short_addr,
        timestamp: now.epoch(),
        payload: encrypt_payload(&[value], key)?,
    })
}

/// Passes bytes through a binary symmetric channel: every bit flips
/// independently with probability `flip_prob`.
pub fn transmit<R: Rng + ?Sized>(bytes: &[u8], flip_prob: f64, rng: &mut R) -> Vec<u8> {
    if flip_prob <= 0.0 {
        return bytes.to_vec();
    }
    let p = flip_prob.min(1.0);
    bytes
        .iter()
        .map(|&b| (0..8).fold(b, |acc, bit| if rng.random_bool(p) { acc ^ (1 << bit) } else { acc }))
        .collect()
}

/// A reading as handed to the gateway.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reading {
    pub node: String,
    pub timestamp: Timestamp,
    pub spec: KeySpec,
    pub plain: Vec<u8>,
}

impl Reading {
    pub fn value(&self) -> Option<u8> {
        self.plain.first().copied()
    }
}

/// Why the coordinator discarded a frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReceiveFailure {
    /// Framing rejected the bytes.
    Frame(Error),
    /// The flags byte is outside the defined encodings.
    Flags(Error),
    /// No registered node has this MAC and short address.
    UnknownSource { mac: u64, short: u16 },
}

impl ReceiveFailure {
    /// Stable label for counting failures by class.
    pub fn class(&self) -> &'static str {
        match self {
            ReceiveFailure::Frame(Error::BadMagic(_)) => "bad-magic",
            ReceiveFailure::Frame(Error::BadVersion(_)) => "bad-version",
            ReceiveFailure::Frame(Error::TruncatedFrame(_)) => "truncated",
            ReceiveFailure::Frame(Error::LengthMismatch { .. }) => "length-mismatch",
            ReceiveFailure::Frame(Error::ChecksumMismatch { .. }) => "checksum-mismatch",
            ReceiveFailure::Frame(_) => "frame-other",
            ReceiveFailure::Flags(_) => "reserved-flags",
            ReceiveFailure::UnknownSource { .. } => "unknown-source",
        }
    }
}

impl fmt::Display for ReceiveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiveFailure::Frame(e) | ReceiveFailure::Flags(e) => write!(f, "{e}"),
            ReceiveFailure::UnknownSource { mac, short } => {
                write!(f, "unknown source MAC {mac:016X} / short {short:04X}")
            }
        }
    }
}

/// Coordinator side: deframe, look up the sender, rebuild the key from the
/// frame's own flags and timestamp, and decrypt.
pub fn coordinator_receive(bytes: &[u8], registry: &Registry) -> std::result::Result<Reading, ReceiveFailure> {
    let frame = decode_frame(bytes).map_err(ReceiveFailure::Frame)?;
    receive_frame(&frame, registry)
}

/// [`coordinator_receive`] for an already decoded frame.
pub fn receive_frame(frame: &Frame, registry: &Registry) -> std::result::Result<Reading, ReceiveFailure> {
    let spec = decode_flags(frame.flags).map_err(ReceiveFailure::Flags)?;
    let unknown = || ReceiveFailure::UnknownSource {
        mac: frame.source_mac,
        short: frame.source_short,
    };
    let node = registry.by_mac(frame.source_mac).ok_or_else(unknown)?;
    if node.short_addr != frame.source_short {
        return Err(unknown());
    }
    let timestamp = Timestamp::from_epoch(frame.timestamp);
    let key = derive_key(spec, node, timestamp).map_err(ReceiveFailure::Flags)?;
    let plain = decrypt_payload(&frame.payload, key).map_err(ReceiveFailure::Frame)?;
    Ok(Reading {
        node: node.name.clone(),
        timestamp,
        spec,
        plain,
    })
}
