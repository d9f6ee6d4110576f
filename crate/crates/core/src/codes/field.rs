use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite field of characteristic two, `GF(2^m)` with `1 <= m <= 8`.
///
/// Elements are represented by their polynomial-basis bit patterns, so
/// addition and subtraction are both XOR. The codes and attacks in this crate
/// only ever add elements; multiplication is never needed because messages are
/// binary vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    bits: u8,
}

impl Field {
    pub fn with_size(size: u32) -> Result<Self> {
        if !size.is_power_of_two() || !(2..=256).contains(&size) {
            return Err(Error::config(format!(
                "field size {size} is not 2^m with 1 <= m <= 8"
            )));
        }
        Ok(Field { bits: size.trailing_zeros() as u8 })
    }

    pub fn binary() -> Self {
        Field { bits: 1 }
    }

    pub fn size(&self) -> u32 {
        1u32 << self.bits
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    pub fn contains(&self, a: u8) -> bool {
        u32::from(a) < self.size()
    }
}

impl TryFrom<u32> for Field {
    type Error = Error;

    fn try_from(size: u32) -> Result<Self> {
        Field::with_size(size)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.size()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Field::with_size(16).unwrap().size(), 16);
        assert!(Field::with_size(12).is_err());
        assert!(Field::with_size(512).is_err());
        let f = Field::with_size(4).unwrap();
        assert_eq!(f.sub(f.add(3, 2), 2), 3);
    }
}
