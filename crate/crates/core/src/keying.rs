//! Key derivation and the on-wire key flags.
//!
//! A node's key byte comes from one of three sources: the low byte of its
//! MAC address, the low byte of its 4-hex-digit name, or one field (hours,
//! minutes or seconds) of a timestamp. The receiver learns which source was
//! used from a flags byte in the frame header:
//!
//! ```text
//!  7   6   5   4   3   2   1   0
//! [ mode ][ field ][ reserved 0 ]
//!  00 MacTail       00 Hours
//!  01 NodeName      01 Minutes
//!  10 Timestamp     10 Seconds
//!  11 reserved      11 reserved
//! ```

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Timelike};

use crate::error::{Error, Result};
use crate::registry::NodeDescriptor;
use crate::sbox::KeyByte;

const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// Which timestamp field supplies the key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TsField {
    Hours,
    Minutes,
    Seconds,
}

impl TsField {
    pub const ALL: [TsField; 3] = [TsField::Hours, TsField::Minutes, TsField::Seconds];

    fn bits(self) -> u8 {
        match self {
            TsField::Hours => 0b00,
            TsField::Minutes => 0b01,
            TsField::Seconds => 0b10,
        }
    }
}

/// Key source; the timestamp field travels with the `Timestamp` variant so
/// it cannot be set for the other modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeySpec {
    MacTail,
    NodeName,
    Timestamp(TsField),
}

impl KeySpec {
    pub const ALL: [KeySpec; 5] = [
        KeySpec::MacTail,
        KeySpec::NodeName,
        KeySpec::Timestamp(TsField::Hours),
        KeySpec::Timestamp(TsField::Minutes),
        KeySpec::Timestamp(TsField::Seconds),
    ];

    pub fn is_timestamp(self) -> bool {
        matches!(self, KeySpec::Timestamp(_))
    }
}

impl fmt::Display for KeySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            KeySpec::MacTail => "mac",
            KeySpec::NodeName => "name",
            KeySpec::Timestamp(TsField::Hours) => "ts-hours",
            KeySpec::Timestamp(TsField::Minutes) => "ts-minutes",
            KeySpec::Timestamp(TsField::Seconds) => "ts-seconds",
        })
    }
}

impl FromStr for KeySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mac" | "mac-tail" => Ok(KeySpec::MacTail),
            "name" | "node-name" => Ok(KeySpec::NodeName),
            "ts-hours" => Ok(KeySpec::Timestamp(TsField::Hours)),
            "ts-minutes" => Ok(KeySpec::Timestamp(TsField::Minutes)),
            "ts-seconds" => Ok(KeySpec::Timestamp(TsField::Seconds)),
            other => Err(format!(
                "unknown key mode {other:?} (expected mac, name, ts-hours, ts-minutes or ts-seconds)"
            )),
        }
    }
}

/// Calendar time at one-second resolution, carried on the wire as unsigned
/// 32-bit seconds since the Unix epoch (UTC).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(NaiveDateTime);

impl Timestamp {
    pub fn from_epoch(secs: u32) -> Self {
        // Every u32 lies inside chrono's supported range.
        Timestamp(DateTime::from_timestamp(i64::from(secs), 0).unwrap().naive_utc())
    }

    pub fn epoch(self) -> u32 {
        self.0.and_utc().timestamp() as u32
    }

    pub fn hour(self) -> u8 {
        self.0.hour() as u8
    }

    pub fn minute(self) -> u8 {
        self.0.minute() as u8
    }

    pub fn second(self) -> u8 {
        self.0.second() as u8
    }

    pub fn field(self, field: TsField) -> u8 {
        match field {
            TsField::Hours => self.hour(),
            TsField::Minutes => self.minute(),
            TsField::Seconds => self.second(),
        }
    }

    /// Seconds from `self` to `later` (negative if `later` is earlier).
    pub fn seconds_until(self, later: Timestamp) -> i64 {
        i64::from(later.epoch()) - i64::from(self.epoch())
    }
}

impl FromStr for Timestamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dt = NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT)
            .map_err(|e| Error::InvalidTimestamp(format!("{s:?}: {e}")))?;
        let secs = dt.and_utc().timestamp();
        if !(0..=i64::from(u32::MAX)).contains(&secs) {
            return Err(Error::InvalidTimestamp(format!(
                "{s:?} is outside the 32-bit epoch range"
            )));
        }
        Ok(Timestamp(dt))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(TIMESTAMP_FORMAT))
    }
}

/// Low byte of a 4-hex-digit node name.
pub fn name_key(name: &str) -> Result<KeyByte> {
    if name.len() != 4 || !name.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidNodeName(name.to_owned()));
    }
    let v = u16::from_str_radix(name, 16).map_err(|_| Error::InvalidNodeName(name.to_owned()))?;
    Ok(KeyByte(v as u8))
}

pub fn derive_key(spec: KeySpec, node: &NodeDescriptor, ts: Timestamp) -> Result<KeyByte> {
    match spec {
        KeySpec::MacTail => Ok(KeyByte(node.mac as u8)),
        KeySpec::NodeName => name_key(&node.name),
        KeySpec::Timestamp(field) => Ok(KeyByte(ts.field(field))),
    }
}

pub fn encode_flags(spec: KeySpec) -> u8 {
    let (mode, field) = match spec {
        KeySpec::MacTail => (0b00, 0b00),
        KeySpec::NodeName => (0b01, 0b00),
        KeySpec::Timestamp(f) => (0b10, f.bits()),
    };
    (mode << 6) | (field << 4)
}

/// Inverse of [`encode_flags`]. Any byte outside its image is rejected,
/// including a non-zero field selector on a non-timestamp mode.
pub fn decode_flags(b: u8) -> Result<KeySpec> {
    let mode = b >> 6;
    let field = (b >> 4) & 0b11;
    if b & 0x0F != 0 || field == 0b11 {
        return Err(Error::ReservedFlagBits(b));
    }
    match (mode, field) {
        (0b00, 0b00) => Ok(KeySpec::MacTail),
        (0b01, 0b00) => Ok(KeySpec::NodeName),
        (0b10, 0b00) => Ok(KeySpec::Timestamp(TsField::Hours)),
        (0b10, 0b01) => Ok(KeySpec::Timestamp(TsField::Minutes)),
        (0b10, 0b10) => Ok(KeySpec::Timestamp(TsField::Seconds)),
        _ => Err(Error::ReservedFlagBits(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{Duty, Role};

    fn node(name: &str, mac: u64) -> NodeDescriptor {
        NodeDescriptor {
            name: name.into(),
            location: String::new(),
            mac,
            short_addr: mac as u16,
            role: Role::Rfd,
            duty: Duty::Active,
        }
    }

    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    #[test]
    fn derive_examples() {
        let any = Timestamp::from_epoch(0);
        assert_eq!(
            derive_key(KeySpec::MacTail, &node("0008", 0x0008000800080008), any).unwrap(),
            KeyByte(0x08)
        );
        assert_eq!(
            derive_key(KeySpec::MacTail, &node("0019", 0x0019001900190019), any).unwrap(),
            KeyByte(0x19)
        );
        let t = ts("2015-10-18 04:04:57");
        let n = node("0002", 0x0002000200020002);
        assert_eq!(
            derive_key(KeySpec::Timestamp(TsField::Seconds), &n, t).unwrap(),
            KeyByte(0x39)
        );
        assert_eq!(
            derive_key(KeySpec::Timestamp(TsField::Minutes), &n, t).unwrap(),
            KeyByte(0x04)
        );
        assert_eq!(
            derive_key(KeySpec::Timestamp(TsField::Hours), &n, t).unwrap(),
            KeyByte(0x04)
        );
        assert_eq!(
            derive_key(KeySpec::NodeName, &node("0017", 0), any).unwrap(),
            KeyByte(0x17)
        );
    }

    #[test]
    fn bad_names_are_rejected() {
        for bad in ["", "008", "00080", "00G8", "0x08"] {
            let err = derive_key(KeySpec::NodeName, &node(bad, 0), Timestamp::from_epoch(0)).unwrap_err();
            assert_eq!(err, Error::InvalidNodeName(bad.into()));
        }
    }

    #[test]
    fn flag_examples() {
        assert_eq!(encode_flags(KeySpec::MacTail), 0b0000_0000);
        assert_eq!(encode_flags(KeySpec::Timestamp(TsField::Seconds)), 0b1010_0000);
        assert_eq!(encode_flags(KeySpec::NodeName), 0b0100_0000);
        assert_eq!(decode_flags(0).unwrap(), KeySpec::MacTail);
        assert_eq!(decode_flags(0b1010_0000).unwrap(), KeySpec::Timestamp(TsField::Seconds));
        assert_eq!(decode_flags(0b1111_0000), Err(Error::ReservedFlagBits(0b1111_0000)));
        assert_eq!(decode_flags(0b1100_0000), Err(Error::ReservedFlagBits(0b1100_0000)));
        assert_eq!(decode_flags(0b0000_0001), Err(Error::ReservedFlagBits(1)));
        assert_eq!(decode_flags(0b0010_0000), Err(Error::ReservedFlagBits(0b0010_0000)));
    }

    #[test]
    fn flags_round_trip_and_image_is_exact() {
        for spec in KeySpec::ALL {
            assert_eq!(decode_flags(encode_flags(spec)).unwrap(), spec);
        }
        let accepted = (0..=255u8).filter(|&b| decode_flags(b).is_ok()).count();
        assert_eq!(accepted, KeySpec::ALL.len());
    }

    #[test]
    fn timestamp_keys_stay_in_field_range() {
        let n = node("0008", 0x0008000800080008);
        for secs in (0..200_000u32).step_by(37) {
            let t = Timestamp::from_epoch(1_445_000_000 + secs);
            assert!(derive_key(KeySpec::Timestamp(TsField::Hours), &n, t).unwrap().0 <= 23);
            assert!(derive_key(KeySpec::Timestamp(TsField::Minutes), &n, t).unwrap().0 <= 59);
            assert!(derive_key(KeySpec::Timestamp(TsField::Seconds), &n, t).unwrap().0 <= 59);
        }
    }

    #[test]
    fn timestamp_wire_form() {
        let t = ts("2015-10-18 04:04:57");
        assert_eq!(t.epoch(), 1_445_141_097);
        assert_eq!(Timestamp::from_epoch(t.epoch()), t);
        assert_eq!(t.to_string(), "2015-10-18 04:04:57");
        assert!("2015-13-01 00:00:00".parse::<Timestamp>().is_err());
        assert!("1969-12-31 23:59:59".parse::<Timestamp>().is_err());
    }

    #[test]
    fn mode_strings() {
        for spec in KeySpec::ALL {
            assert_eq!(spec.to_string().parse::<KeySpec>().unwrap(), spec);
        }
        assert!("ts-days".parse::<KeySpec>().is_err());
    }
}
