//! Blueberry codes: a secret, independent, injective map `Σ_in → Γ_out` per
//! position. A receiver that knows the maps rejects any symbol outside the
//! image for that position, so a blind substitution is accepted with
//! probability at most `(|Σ_in| - 1) / (|Γ_out| - 1)`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlueberryDecode {
    Ok(u32),
    Invalid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlueberrySpec {
    pub input_size: u32,
    pub output_size: u32,
    pub positions: usize,
    /// `None` builds the identity table.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct BlueberryTable {
    spec: BlueberrySpec,
    maps: Vec<u32>,
}

impl BlueberryTable {
    /// Draws one random injective map per position from `seed`.
    pub fn new(input_size: u32, output_size: u32, positions: usize, seed: u64) -> Result<Self> {
        if input_size == 0 || input_size > output_size {
            return Err(Error::config(format!(
                "Blueberry code needs 0 < |Σ_in| <= |Γ_out|, got {input_size} and {output_size}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut maps = Vec::with_capacity(positions * input_size as usize);
        for _ in 0..positions {
            let picked = sample(&mut rng, output_size as usize, input_size as usize);
            maps.extend(picked.into_iter().map(|v| v as u32));
        }
        Ok(BlueberryTable {
            spec: BlueberrySpec { input_size, output_size, positions, seed: Some(seed) },
            maps,
        })
    }

    /// The identity map at every position; detects nothing.
    pub fn identity(input_size: u32, positions: usize) -> Self {
        let maps = (0..positions).flat_map(|_| 0..input_size).collect();
        BlueberryTable {
            spec: BlueberrySpec { input_size, output_size: input_size, positions, seed: None },
            maps,
        }
    }

    pub fn from_spec(spec: &BlueberrySpec) -> Result<Self> {
        match spec.seed {
            Some(seed) => Self::new(spec.input_size, spec.output_size, spec.positions, seed),
            None => Ok(Self::identity(spec.input_size, spec.positions)),
        }
    }

    pub fn spec(&self) -> BlueberrySpec {
        self.spec
    }

    pub fn positions(&self) -> usize {
        self.spec.positions
    }

    pub fn input_size(&self) -> u32 {
        self.spec.input_size
    }

    pub fn output_size(&self) -> u32 {
        self.spec.output_size
    }

    /// `|Σ_in| / |Γ_out|`.
    pub fn q(&self) -> f64 {
        f64::from(self.spec.input_size) / f64::from(self.spec.output_size)
    }

    fn row(&self, position: usize) -> Result<&[u32]> {
        if position >= self.spec.positions {
            return Err(Error::config(format!(
                "position {position} outside a table of {} positions",
                self.spec.positions
            )));
        }
        let w = self.spec.input_size as usize;
        Ok(&self.maps[position * w..(position + 1) * w])
    }

    pub fn encode(&self, position: usize, symbol: u32) -> Result<u32> {
        self.row(position)?
            .get(symbol as usize)
            .copied()
            .ok_or_else(|| Error::config(format!("symbol {symbol} outside Σ_in")))
    }

    pub fn decode(&self, position: usize, received: u32) -> Result<BlueberryDecode> {
        Ok(match self.row(position)?.iter().position(|&v| v == received) {
            Some(s) => BlueberryDecode::Ok(s as u32),
            None => BlueberryDecode::Invalid,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_injective() {
        let t = BlueberryTable::new(4, 64, 10, 3).unwrap();
        for pos in 0..10 {
            let mut seen = std::collections::HashSet::new();
            for s in 0..4 {
                let g = t.encode(pos, s).unwrap();
                assert!(g < 64);
                assert!(seen.insert(g));
                assert_eq!(t.decode(pos, g).unwrap(), BlueberryDecode::Ok(s));
            }
        }
    }

    #[test]
    fn outside_image_is_invalid() {
        let t = BlueberryTable::new(4, 64, 1, 3).unwrap();
        let image: Vec<u32> = (0..4).map(|s| t.encode(0, s).unwrap()).collect();
        let outside = (0..64).find(|g| !image.contains(g)).unwrap();
        assert_eq!(t.decode(0, outside).unwrap(), BlueberryDecode::Invalid);
        assert!(t.encode(1, 0).is_err());
        assert!(BlueberryTable::new(8, 4, 1, 0).is_err());
    }

    #[test]
    fn positions_are_independent() {
        let t = BlueberryTable::new(4, 1 << 20, 50, 9).unwrap();
        let first: Vec<u32> = (0..50).map(|p| t.encode(p, 0).unwrap()).collect();
        let distinct: std::collections::HashSet<_> = first.iter().collect();
        assert!(distinct.len() > 45);
    }

    #[test]
    fn identity_table() {
        let t = BlueberryTable::identity(5, 3);
        assert_eq!(t.encode(2, 4).unwrap(), 4);
        assert_eq!(t.decode(2, 4).unwrap(), BlueberryDecode::Ok(4));
        assert_eq!(t.decode(2, 7).unwrap(), BlueberryDecode::Invalid);
    }
}
