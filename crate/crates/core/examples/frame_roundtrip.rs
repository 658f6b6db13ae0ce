//! Builds a frame, prints its wire bytes, and shows a flipped bit being caught.

use wisense::framing::{xor_checksum, VERSION};
use wisense::{decode_frame, encode_flags, encode_frame, encrypt_payload, Frame, KeyByte, KeySpec};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02X}")).collect::<Vec<_>>().join(" ")
}

fn main() -> wisense::Result<()> {
    let frame = Frame {
        version: VERSION,
        flags: encode_flags(KeySpec::MacTail),
        source_mac: 0x0008_0008_0008_0008,
        source_short: 0x0008,
        timestamp: 1_445_141_097,
        payload: encrypt_payload(&[0xD5], KeyByte(0x08))?,
    };
    let bytes = encode_frame(&frame)?;
    println!("{} bytes: {}", bytes.len(), hex(&bytes));
    println!("checksum {:02X}", xor_checksum(&bytes[..bytes.len() - 1]));
    assert_eq!(decode_frame(&bytes)?, frame);

    let mut tampered = bytes.clone();
    tampered[19] ^= 0x01;
    match decode_frame(&tampered) {
        Ok(_) => println!("tampered frame accepted"),
        Err(e) => println!("tampered frame rejected: {e}"),
    }
    Ok(())
}
