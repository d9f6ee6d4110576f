//! Coding primitives used by the protocols.

pub mod blueberry;
pub mod field;
pub mod prefix;
pub mod silence;
pub mod tree;

pub use blueberry::{BlueberryDecode, BlueberryTable};
pub use field::Field;
pub use prefix::{ecc_decode, ecc_encode, gen_prefix_family, PrefixCodeFamily, PrefixCodeSpec};
pub use silence::{se_decode, se_encode, SilenceDecodeResult};
pub use tree::{tc_gen_verified, TreeCode, TreeCodeSpec};

use crate::symbol::ChannelSymbol;

/// Hamming distance between two equal-length symbol strings.
pub fn hamming<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Field symbols as channel letters.
pub fn to_letters(symbols: &[u8]) -> Vec<ChannelSymbol> {
    symbols.iter().map(|&s| ChannelSymbol::Letter(u32::from(s))).collect()
}
