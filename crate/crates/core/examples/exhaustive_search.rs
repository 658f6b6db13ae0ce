//! Ciphertext-only search: try all 256 keys and keep those whose decryptions
//! look like plausible sensor values.

use wisense::analysis::{exhaustive_search, exhaustive_search_parallel, ValueRange};
use wisense::{encrypt_payload, KeyByte};

fn main() -> wisense::Result<()> {
    let key = KeyByte(0x5C);
    let temps = [18u8, 19, 19, 21, 23, 24, 24, 22, 20, 19, 18, 17];

    for n in [1, 4, 12] {
        let cipher = encrypt_payload(&temps[..n], key)?;
        let r = exhaustive_search(&cipher, |b| ValueRange::TEMPERATURE.contains(b))?;
        let full = r.candidates.iter().filter(|&&(_, s)| s == 1.0).count();
        println!(
            "{n:>2} readings: {full:>3} keys fully plausible, recovered {}",
            r.recovered_key.map_or("-".into(), |k| format!("{:02X}", k.0))
        );
    }

    let cipher = encrypt_payload(&temps, key)?;
    let range = ValueRange::TEMPERATURE;
    let serial = exhaustive_search(&cipher, |b| range.contains(b))?;
    let parallel = exhaustive_search_parallel(&cipher, move |b| range.contains(b), 4)?;
    assert_eq!(serial, parallel);
    for (k, score) in serial.candidates.iter().take(5) {
        println!("  key {:02X} score {score:.3}", k.0);
    }
    Ok(())
}
