//! Prints both lookup tables and checks the inverse grid parses back.

use wisense::sbox::{Direction, SBoxTable};
use wisense::SBOX;

fn main() {
    for dir in [Direction::Forward, Direction::Inverse] {
        println!("{dir:?}");
        let grid = SBOX.grid(dir);
        print!("{grid}");
        let parsed = SBoxTable::parse_grid(&grid).expect("grid round-trips");
        let table = match dir {
            Direction::Forward => SBOX.forward(),
            Direction::Inverse => SBOX.inverse(),
        };
        assert_eq!(&parsed, table);
        println!();
    }
    println!(
        "storage: {} bytes = {} bits",
        SBOX.to_bytes().len(),
        SBOX.storage_bits()
    );
}
