//! Wire packet carrying one encrypted reading.
//!
//! Layout (multi-byte fields big-endian):
//!
//! | offset      | size | field                                   |
//! |-------------|------|-----------------------------------------|
//! | 0           | 2    | magic `0x57 0x53` ("WS")                |
//! | 2           | 1    | version `0x01`                          |
//! | 3           | 1    | key flags (see [`crate::keying`])       |
//! | 4           | 8    | source MAC                              |
//! | 12          | 2    | source short address                    |
//! | 14          | 4    | timestamp, epoch seconds                |
//! | 18          | 1    | payload length N                        |
//! | 19          | N    | ciphertext                              |
//! | 19 + N      | 1    | XOR of bytes `0 .. 19 + N`              |
//!
//! Headers travel in clear; only the payload is enciphered.

use crate::error::{Error, Result};
use crate::sbox::MAX_PAYLOAD;

pub const MAGIC: [u8; 2] = [0x57, 0x53];
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 19;
/// Header plus checksum; the size of a frame with an empty payload.
pub const MIN_FRAME_LEN: usize = HEADER_LEN + 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub version: u8,
    pub flags: u8,
    pub source_mac: u64,
    pub source_short: u16,
    pub timestamp: u32,
    pub payload: Vec<u8>,
}

impl Frame {
    /// Encoded size in bytes.
    pub fn wire_len(&self) -> usize {
        MIN_FRAME_LEN + self.payload.len()
    }

    /// Checksum byte this frame encodes to.
    pub fn checksum(&self) -> Result<u8> {
        encode_frame(self).map(|bytes| bytes[bytes.len() - 1])
    }
}

pub fn xor_checksum(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

pub fn encode_frame(f: &Frame) -> Result<Vec<u8>> {
    if f.payload.len() > MAX_PAYLOAD {
        return Err(Error::PayloadTooLong(f.payload.len()));
    }
    if f.version != VERSION {
        return Err(Error::BadVersion(f.version));
    }
    let mut out = Vec::with_capacity(f.wire_len());
    out.extend_from_slice(&MAGIC);
    out.push(f.version);
    out.push(f.flags);
    out.extend_from_slice(&f.source_mac.to_be_bytes());
    out.extend_from_slice(&f.source_short.to_be_bytes());
    out.extend_from_slice(&f.timestamp.to_be_bytes());
    out.push(f.payload.len() as u8);
    out.extend_from_slice(&f.payload);
    out.push(xor_checksum(&out));
    Ok(out)
}

pub fn decode_frame(bytes: &[u8]) -> Result<Frame> {
    if bytes.len() < MIN_FRAME_LEN {
        return Err(Error::TruncatedFrame(bytes.len()));
    }
    let magic = [bytes[0], bytes[1]];
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    if bytes[2] != VERSION {
        return Err(Error::BadVersion(bytes[2]));
    }
    let declared = bytes[18] as usize;
    let actual = bytes.len() - MIN_FRAME_LEN;
    if declared != actual {
        return Err(Error::LengthMismatch { declared, actual });
    }
    let (body, tail) = bytes.split_at(bytes.len() - 1);
    let computed = xor_checksum(body);
    if computed != tail[0] {
        return Err(Error::ChecksumMismatch {
            computed,
            received: tail[0],
        });
    }
    Ok(Frame {
        version: bytes[2],
        flags: bytes[3],
        source_mac: u64::from_be_bytes(bytes[4..12].try_into().unwrap()),
        source_short: u16::from_be_bytes([bytes[12], bytes[13]]),
        timestamp: u32::from_be_bytes(bytes[14..18].try_into().unwrap()),
        payload: bytes[HEADER_LEN..HEADER_LEN + declared].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> Frame {
        Frame {
            version: VERSION,
            flags: 0x00,
            source_mac: 0x0008_0008_0008_0008,
            source_short: 0x0008,
            timestamp: 0,
            payload: vec![0x0B],
        }
    }

    // Layout and checksum computed by hand.
    const EXAMPLE_BYTES: [u8; 21] = [
        0x57, 0x53, 0x01, 0x00, 0x00, 0x08, 0x00, 0x08, 0x00, 0x08, 0x00, 0x08, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00,
        0x01, 0x0B, 0x07,
    ];

    #[test]
    fn encodes_example_frame() {
        assert_eq!(encode_frame(&example()).unwrap(), EXAMPLE_BYTES);
        assert_eq!(example().checksum().unwrap(), 0x07);
        assert_eq!(decode_frame(&EXAMPLE_BYTES).unwrap(), example());
    }

    #[test]
    fn empty_payload_is_twenty_bytes() {
        let f = Frame {
            payload: vec![],
            ..example()
        };
        let bytes = encode_frame(&f).unwrap();
        assert_eq!(bytes.len(), 20);
        assert_eq!(decode_frame(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(decode_frame(&EXAMPLE_BYTES[..19]), Err(Error::TruncatedFrame(19)));
        assert_eq!(decode_frame(&[]), Err(Error::TruncatedFrame(0)));

        let mut b = EXAMPLE_BYTES;
        b[20] ^= 0xFF;
        assert!(matches!(decode_frame(&b), Err(Error::ChecksumMismatch { .. })));

        let mut b = EXAMPLE_BYTES;
        b[0] = 0x00;
        assert_eq!(decode_frame(&b), Err(Error::BadMagic([0x00, 0x53])));

        let mut b = EXAMPLE_BYTES;
        b[2] = 0x02;
        assert_eq!(decode_frame(&b), Err(Error::BadVersion(0x02)));

        let mut b = EXAMPLE_BYTES;
        b[18] = 0x02;
        assert_eq!(decode_frame(&b), Err(Error::LengthMismatch { declared: 2, actual: 1 }));

        let mut long = EXAMPLE_BYTES.to_vec();
        long.push(0);
        assert!(matches!(decode_frame(&long), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn encode_rejects_oversize_and_bad_version() {
        let f = Frame {
            payload: vec![0; 256],
            ..example()
        };
        assert_eq!(encode_frame(&f), Err(Error::PayloadTooLong(256)));
        let f = Frame {
            version: 2,
            ..example()
        };
        assert_eq!(encode_frame(&f), Err(Error::BadVersion(2)));
    }

    fn arb_frame() -> impl Strategy<Value = Frame> {
        (
            any::<u8>(),
            any::<u64>(),
            any::<u16>(),
            any::<u32>(),
            prop::collection::vec(any::<u8>(), 0..=255),
        )
            .prop_map(|(flags, source_mac, source_short, timestamp, payload)| Frame {
                version: VERSION,
                flags,
                source_mac,
                source_short,
                timestamp,
                payload,
            })
    }

    proptest! {
        #[test]
        fn round_trip(f in arb_frame()) {
            let bytes = encode_frame(&f).unwrap();
            prop_assert_eq!(bytes.len(), 20 + f.payload.len());
            prop_assert_eq!(decode_frame(&bytes).unwrap(), f);
        }

        #[test]
        fn single_bit_flip_never_returns_original(f in arb_frame(), bit in any::<prop::sample::Index>()) {
            let mut bytes = encode_frame(&f).unwrap();
            let i = bit.index(bytes.len() * 8);
            bytes[i / 8] ^= 1 << (i % 8);
            if let Ok(decoded) = decode_frame(&bytes) {
                prop_assert_ne!(decoded, f);
            }
        }
    }
}
