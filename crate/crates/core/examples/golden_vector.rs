//! Encrypts one reading byte by hand and through the library, then back.

use wisense::{decrypt_byte, encrypt_byte, substitute, KeyByte};

fn main() {
    let plain = 0xD5;
    let key = KeyByte(0x08);

    let s = substitute(plain);
    println!("S[{plain:02X}]           = {s:02X}");
    println!("{s:02X} ^ {:02X}         = {:02X}", key.0, s ^ key.0);

    let cipher = encrypt_byte(plain, key);
    let back = decrypt_byte(cipher, key);
    println!("encrypt({plain:02X}, {:02X}) = {cipher:02X}", key.0);
    println!("decrypt({cipher:02X}, {:02X}) = {back:02X}", key.0);
    assert_eq!((cipher, back), (0x0B, plain));
}
