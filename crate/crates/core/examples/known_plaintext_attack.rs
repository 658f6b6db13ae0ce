//! One observed plaintext/ciphertext pair is enough to recover the key.

use wisense::analysis::recover_key_known_plaintext;
use wisense::{encrypt_byte, KeyByte};

fn main() -> wisense::Result<()> {
    let secret = KeyByte(0xA7);
    let readings = [21u8, 22, 22, 23];
    let observed: Vec<(u8, u8)> = readings.iter().map(|&p| (p, encrypt_byte(p, secret))).collect();

    let one = recover_key_known_plaintext(&observed[..1])?;
    if let Some(k) = one.recovered_key {
        println!("from one pair: key {:02X}", k.0);
    }
    let all = recover_key_known_plaintext(&observed)?;
    print!("{}", all.render_tsv());
    assert_eq!(all.recovered_key, Some(secret));

    // A pair that disagrees with the first exposes a key change.
    let mixed = [observed[0], (30, encrypt_byte(30, KeyByte(0x11)))];
    println!(
        "inconsistent pairs: {}",
        recover_key_known_plaintext(&mixed).unwrap_err()
    );
    Ok(())
}
