//! The embedded 16×16 substitution table and the byte-level cipher built on it.
//!
//! Encryption is a table lookup followed by an XOR with a single key byte:
//!
//! ```text
//! cipher = S[plain] ^ key
//! plain  = S⁻¹[cipher ^ key]
//! ```
//!
//! The forward table is the AES `SubBytes` table, row indexed by the high
//! nibble of the input and column by the low nibble. The inverse table is
//! derived from it at compile time.

use std::fmt;

use crate::error::Error;

/// Maximum payload length accepted by [`encrypt_payload`]; the frame length
/// field is a single byte.
pub const MAX_PAYLOAD: usize = u8::MAX as usize;

#[rustfmt::skip]
const FORWARD: [u8; 256] = [
    // 0     1     2     3     4     5     6     7     8     9     A     B     C     D     E     F
    0x63, 0x7C, 0x77, 0x7B, 0xF2, 0x6B, 0x6F, 0xC5, 0x30, 0x01, 0x67, 0x2B, 0xFE, 0xD7, 0xAB, 0x76, // 0
    0xCA, 0x82, 0xC9, 0x7D, 0xFA, 0x59, 0x47, 0xF0, 0xAD, 0xD4, 0xA2, 0xAF, 0x9C, 0xA4, 0x72, 0xC0, // 1
    0xB7, 0xFD, 0x93, 0x26, 0x36, 0x3F, 0xF7, 0xCC, 0x34, 0xA5, 0xE5, 0xF1, 0x71, 0xD8, 0x31, 0x15, // 2
    0x04, 0xC7, 0x23, 0xC3, 0x18, 0x96, 0x05, 0x9A, 0x07, 0x12, 0x80, 0xE2, 0xEB, 0x27, 0xB2, 0x75, // 3
    0x09, 0x83, 0x2C, 0x1A, 0x1B, 0x6E, 0x5A, 0xA0, 0x52, 0x3B, 0xD6, 0xB3, 0x29, 0xE3, 0x2F, 0x84, // 4
    0x53, 0xD1, 0x00, 0xED, 0x20, 0xFC, 0xB1, 0x5B, 0x6A, 0xCB, 0xBE, 0x39, 0x4A, 0x4C, 0x58, 0xCF, // 5
    0xD0, 0xEF, 0xAA, 0xFB, 0x43, 0x4D, 0x33, 0x85, 0x45, 0xF9, 0x02, 0x7F, 0x50, 0x3C, 0x9F, 0xA8, // 6
    0x51, 0xA3, 0x40, 0x8F, 0x92, 0x9D, 0x38, 0xF5, 0xBC, 0xB6, 0xDA, 0x21, 0x10, 0xFF, 0xF3, 0xD2, // 7
    0xCD, 0x0C, 0x13, 0xEC, 0x5F, 0x97, 0x44, 0x17, 0xC4, 0xA7, 0x7E, 0x3D, 0x64, 0x5D, 0x19, 0x73, // 8
    0x60, 0x81, 0x4F, 0xDC, 0x22, 0x2A, 0x90, 0x88, 0x46, 0xEE, 0xB8, 0x14, 0xDE, 0x5E, 0x0B, 0xDB, // 9
    0xE0, 0x32, 0x3A, 0x0A, 0x49, 0x06, 0x24, 0x5C, 0xC2, 0xD3, 0xAC, 0x62, 0x91, 0x95, 0xE4, 0x79, // A
    0xE7, 0xC8, 0x37, 0x6D, 0x8D, 0xD5, 0x4E, 0xA9, 0x6C, 0x56, 0xF4, 0xEA, 0x65, 0x7A, 0xAE, 0x08, // B
    0xBA, 0x78, 0x25, 0x2E, 0x1C, 0xA6, 0xB4, 0xC6, 0xE8, 0xDD, 0x74, 0x1F, 0x4B, 0xBD, 0x8B, 0x8A, // C
    0x70, 0x3E, 0xB5, 0x66, 0x48, 0x03, 0xF6, 0x0E, 0x61, 0x35, 0x57, 0xB9, 0x86, 0xC1, 0x1D, 0x9E, // D
    0xE1, 0xF8, 0x98, 0x11, 0x69, 0xD9, 0x8E, 0x94, 0x9B, 0x1E, 0x87, 0xE9, 0xCE, 0x55, 0x28, 0xDF, // E
    0x8C, 0xA1, 0x89, 0x0D, 0xBF, 0xE6, 0x42, 0x68, 0x41, 0x99, 0x2D, 0x0F, 0xB0, 0x54, 0xBB, 0x16, // F
];

const fn invert(forward: &[u8; 256]) -> [u8; 256] {
    let mut inverse = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        inverse[forward[i] as usize] = i as u8;
        i += 1;
    }
    inverse
}

/// A byte permutation and its inverse.
#[derive(Clone, PartialEq, Eq)]
pub struct SBoxTable {
    forward: [u8; 256],
    inverse: [u8; 256],
}

/// The table every node carries in flash.
pub static SBOX: SBoxTable = SBoxTable {
    forward: FORWARD,
    inverse: invert(&FORWARD),
};

impl SBoxTable {
    #[inline]
    pub fn forward(&self) -> &[u8; 256] {
        &self.forward
    }

    #[inline]
    pub fn inverse(&self) -> &[u8; 256] {
        &self.inverse
    }

    /// Serialized forward table, exactly as stored on a node.
    pub fn to_bytes(&self) -> [u8; 256] {
        self.forward
    }

    /// Bits of node storage consumed by the forward table.
    pub fn storage_bits(&self) -> usize {
        self.to_bytes().len() * 8
    }

    /// True when `forward` hits every byte value exactly once and `inverse`
    /// undoes it.
    pub fn is_bijection(&self) -> bool {
        let mut seen = [false; 256];
        for &b in &self.forward {
            if std::mem::replace(&mut seen[b as usize], true) {
                return false;
            }
        }
        (0..=255u8).all(|x| self.inverse[self.forward[x as usize] as usize] == x)
    }

    /// Renders one of the tables as a 16×16 uppercase hex grid with row and
    /// column nibble labels.
    pub fn grid(&self, which: Direction) -> String {
        let table = match which {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut out = String::from("   ");
        for col in 0..16 {
            out.push_str(&format!(" {col:X} "));
        }
        out.push('\n');
        for row in 0..16 {
            out.push_str(&format!("{row:X} |"));
            for col in 0..16 {
                out.push_str(&format!(" {:02X}", table[row * 16 + col]));
            }
            out.push('\n');
        }
        out
    }

    /// Parses a grid produced by [`SBoxTable::grid`] back into 256 bytes.
    pub fn parse_grid(text: &str) -> Result<[u8; 256], Error> {
        let mut table = [0u8; 256];
        let mut rows = 0;
        for line in text.lines() {
            let Some((label, cells)) = line.split_once('|') else {
                continue;
            };
            let row = usize::from_str_radix(label.trim(), 16).map_err(|_| Error::Parse {
                line: rows + 2,
                reason: format!("bad row label {label:?}"),
            })?;
            let values: Vec<&str> = cells.split_whitespace().collect();
            if row > 15 || values.len() != 16 {
                return Err(Error::Parse {
                    line: rows + 2,
                    reason: "expected 16 cells".into(),
                });
            }
            for (col, v) in values.iter().enumerate() {
                table[row * 16 + col] = u8::from_str_radix(v, 16).map_err(|_| Error::Parse {
                    line: rows + 2,
                    reason: format!("bad cell {v:?}"),
                })?;
            }
            rows += 1;
        }
        if rows != 16 {
            return Err(Error::Parse {
                line: rows + 2,
                reason: format!("expected 16 rows, got {rows}"),
            });
        }
        Ok(table)
    }
}

impl fmt::Debug for SBoxTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SBoxTable").finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// The single XOR key byte shared by sender and receiver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KeyByte(pub u8);

impl fmt::Display for KeyByte {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02X}", self.0)
    }
}

impl From<u8> for KeyByte {
    fn from(v: u8) -> Self {
        KeyByte(v)
    }
}

#[inline]
pub fn substitute(plain: u8) -> u8 {
    SBOX.forward[plain as usize]
}

#[inline]
pub fn inverse_substitute(sub: u8) -> u8 {
    SBOX.inverse[sub as usize]
}

#[inline]
pub fn encrypt_byte(plain: u8, key: KeyByte) -> u8 {
    substitute(plain) ^ key.0
}

#[inline]
pub fn decrypt_byte(cipher: u8, key: KeyByte) -> u8 {
    inverse_substitute(cipher ^ key.0)
}

/// Encrypts every byte with the same key. No chaining.
pub fn encrypt_payload(plain: &[u8], key: KeyByte) -> Result<Vec<u8>, Error> {
    if plain.len() > MAX_PAYLOAD {
        return Err(Error::PayloadTooLong(plain.len()));
    }
    Ok(plain.iter().map(|&p| encrypt_byte(p, key)).collect())
}

pub fn decrypt_payload(cipher: &[u8], key: KeyByte) -> Result<Vec<u8>, Error> {
    if cipher.len() > MAX_PAYLOAD {
        return Err(Error::PayloadTooLong(cipher.len()));
    }
    Ok(cipher.iter().map(|&c| decrypt_byte(c, key)).collect())
}
