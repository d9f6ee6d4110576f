//! Random linear codes with the prefix property.
//!
//! A single random `n × W` generator matrix over `GF(2^m)` defines a code for
//! every truncation length `ℓ <= W`: the encoding at length `ℓ` is the first
//! `ℓ` symbols of `x·G`. Messages are binary vectors, so `x·G` is the XOR of
//! the rows selected by the set bits of `x`, and every shorter encoding is a
//! prefix of every longer one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};
use crate::symbol::ChannelSymbol;

/// Largest message length for which exhaustive verification and decoding
/// are attempted.
pub const MAX_MESSAGE_BITS: usize = 16;

const MAX_ATTEMPTS: u32 = 256;

/// Replayable description of a family: the generator is re-sampled from the
/// seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixCodeSpec {
    pub n: usize,
    pub eps: f64,
    pub lengths: Vec<usize>,
    pub field_size: u32,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct PrefixCodeFamily {
    n: usize,
    eps: f64,
    field: Field,
    lengths: Vec<usize>,
    seed: u64,
    width: usize,
    /// Codeword of every message at full width, message-major.
    codewords: Vec<u8>,
    /// `(length, min relative distance)` for every listed length.
    verified_rel_distance: Vec<(usize, f64)>,
    attempts: u32,
}

impl PrefixCodeFamily {
    pub fn from_spec(spec: &PrefixCodeSpec) -> Result<Self> {
        gen_prefix_family(spec.n, spec.eps, &spec.lengths, Field::with_size(spec.field_size)?, spec.seed)
    }

    pub fn spec(&self) -> PrefixCodeSpec {
        PrefixCodeSpec {
            n: self.n,
            eps: self.eps,
            lengths: self.lengths.clone(),
            field_size: self.field.size(),
            seed: self.seed,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Longest available truncation.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn message_count(&self) -> u64 {
        1u64 << self.n
    }

    pub fn verified_rel_distance(&self) -> &[(usize, f64)] {
        &self.verified_rel_distance
    }

    /// Generator samples drawn before one verified.
    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    /// The `len`-symbol encoding of `x` (any `len <= width`).
    pub fn encode_prefix(&self, x: u64, len: usize) -> Result<&[u8]> {
        self.check_message(x)?;
        if len > self.width {
            return Err(Error::LengthMismatch { expected: self.width, got: len });
        }
        let start = x as usize * self.width;
        Ok(&self.codewords[start..start + len])
    }

    /// Nearest codeword among all `2^n` messages at truncation length
    /// `received.len()`. Returns the message and its Hamming distance; ties go
    /// to the numerically smallest message. Non-letter symbols mismatch every
    /// codeword symbol.
    pub fn decode_prefix(&self, received: &[ChannelSymbol]) -> Result<(u64, usize)> {
        let len = received.len();
        if len > self.width {
            return Err(Error::LengthMismatch { expected: self.width, got: len });
        }
        let mut best = (0u64, usize::MAX);
        for x in 0..self.message_count() {
            let cw = self.encode_prefix(x, len)?;
            let d = mismatches(cw, received);
            if d < best.1 {
                best = (x, d);
            }
        }
        Ok(best)
    }

    fn check_message(&self, x: u64) -> Result<()> {
        if x >= self.message_count() {
            return Err(Error::config(format!("message {x} does not fit in {} bits", self.n)));
        }
        Ok(())
    }

    fn length_of(&self, index: usize) -> Result<usize> {
        self.lengths
            .get(index)
            .copied()
            .ok_or_else(|| Error::config(format!("no code with index {index}")))
    }
}

/// Counts positions where `received` is not the letter `cw[i]`.
pub fn mismatches(cw: &[u8], received: &[ChannelSymbol]) -> usize {
    cw.iter()
        .zip(received)
        .filter(|(&c, &r)| r != ChannelSymbol::Letter(u32::from(c)))
        .count()
}

/// Samples generators until one has minimum relative distance at least
/// `1 - 2·eps` at every truncation length from `lengths[0]` up to the widest
/// length.
pub fn gen_prefix_family(
    n: usize,
    eps: f64,
    lengths: &[usize],
    field: Field,
    seed: u64,
) -> Result<PrefixCodeFamily> {
    if n == 0 || n > MAX_MESSAGE_BITS {
        return Err(Error::config(format!("message length {n} outside 1..={MAX_MESSAGE_BITS}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::config(format!("eps {eps} outside (0, 1/2)")));
    }
    if lengths.is_empty() || lengths[0] == 0 || lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("code lengths must be positive and strictly increasing"));
    }
    let width = *lengths.last().unwrap();
    let target = 1.0 - 2.0 * eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for attempt in 1..=MAX_ATTEMPTS {
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..width).map(|_| rng.gen_range(0..field.size()) as u8).collect())
            .collect();
        let codewords = all_codewords(&rows, width);
        let min_weight = min_prefix_weights(&codewords, n, width);
        let ok = (lengths[0]..=width).all(|len| min_weight[len - 1] as f64 >= target * len as f64 - 1e-9);
        if ok {
            let verified_rel_distance =
                lengths.iter().map(|&len| (len, min_weight[len - 1] as f64 / len as f64)).collect();
            return Ok(PrefixCodeFamily {
                n,
                eps,
                field,
                lengths: lengths.to_vec(),
                seed,
                width,
                codewords,
                verified_rel_distance,
                attempts: attempt,
            });
        }
    }
    Err(Error::Generation(format!(
        "no generator with relative distance {target} after {MAX_ATTEMPTS} attempts; enlarge the field or the lengths"
    )))
}

fn all_codewords(rows: &[Vec<u8>], width: usize) -> Vec<u8> {
    let count = 1usize << rows.len();
    let mut out = vec![0u8; count * width];
    for x in 1..count {
        // x differs from x without its lowest set bit by exactly one row
        let low = x.trailing_zeros() as usize;
        let prev = x & (x - 1);
        for j in 0..width {
            out[x * width + j] = out[prev * width + j] ^ rows[low][j];
        }
    }
    out
}

/// For each prefix length `ℓ`, the minimum weight of a nonzero codeword's
/// first `ℓ` symbols. For a linear code this is the minimum pairwise distance.
fn min_prefix_weights(codewords: &[u8], n: usize, width: usize) -> Vec<usize> {
    let mut min = vec![usize::MAX; width];
    for x in 1..(1usize << n) {
        let mut w = 0;
        for (j, &s) in codewords[x * width..(x + 1) * width].iter().enumerate() {
            w += usize::from(s != 0);
            min[j] = min[j].min(w);
        }
    }
    min
}

/// Encodes `x` with the `index`-th code of the family.
pub fn ecc_encode(family: &PrefixCodeFamily, index: usize, x: u64) -> Result<Vec<u8>> {
    let len = family.length_of(index)?;
    Ok(family.encode_prefix(x, len)?.to_vec())
}

/// Exhaustive nearest-codeword decoding with the `length_index`-th code.
pub fn ecc_decode(
    family: &PrefixCodeFamily,
    received: &[ChannelSymbol],
    length_index: usize,
) -> Result<(u64, usize)> {
    let len = family.length_of(length_index)?;
    if received.len() != len {
        return Err(Error::LengthMismatch { expected: len, got: received.len() });
    }
    family.decode_prefix(received)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hamming, to_letters};

    fn family() -> PrefixCodeFamily {
        gen_prefix_family(4, 0.1, &[32, 64, 128], Field::with_size(16).unwrap(), 7).unwrap()
    }

    #[test]
    fn zero_message_is_zero_codeword() {
        let f = family();
        assert!(ecc_encode(&f, 2, 0).unwrap().iter().all(|&s| s == 0));
    }

    #[test]
    fn verified_distance_matches_pairwise_oracle() {
        let f = family();
        for &(len, rel) in f.verified_rel_distance() {
            let mut min = usize::MAX;
            for a in 0..16u64 {
                for b in (a + 1)..16 {
                    let ca = f.encode_prefix(a, len).unwrap();
                    let cb = f.encode_prefix(b, len).unwrap();
                    min = min.min(hamming(ca, cb));
                }
            }
            assert_eq!(min as f64 / len as f64, rel);
            assert!(rel >= 0.8, "length {len}: {rel}");
        }
    }

    #[test]
    fn decode_round_trip_and_single_flip() {
        let f = family();
        for x in 0..16 {
            let cw = to_letters(&ecc_encode(&f, 1, x).unwrap());
            assert_eq!(ecc_decode(&f, &cw, 1).unwrap(), (x, 0));
            let mut bad = cw.clone();
            bad[5] = ChannelSymbol::Silence;
            assert_eq!(ecc_decode(&f, &bad, 1).unwrap(), (x, 1));
        }
    }

    #[test]
    fn decode_ties_go_to_smallest_message() {
        let f = family();
        let all_silent = vec![ChannelSymbol::Silence; 32];
        assert_eq!(ecc_decode(&f, &all_silent, 0).unwrap(), (0, 32));
    }

    #[test]
    fn configuration_errors() {
        let gf = Field::with_size(16).unwrap();
        assert!(matches!(gen_prefix_family(4, 0.1, &[64, 32], gf, 1), Err(Error::Config(_))));
        assert!(matches!(gen_prefix_family(4, 0.1, &[32, 32], gf, 1), Err(Error::Config(_))));
        assert!(matches!(gen_prefix_family(17, 0.1, &[32], gf, 1), Err(Error::Config(_))));
        let f = family();
        assert!(matches!(ecc_decode(&f, &[ChannelSymbol::Silence; 3], 0), Err(Error::LengthMismatch { .. })));
        assert!(ecc_encode(&f, 9, 0).is_err());
    }

    #[test]
    fn unattainable_distance_is_generation_error() {
        // binary alphabet, length 2: two nonzero codewords cannot all have weight 2
        let err = gen_prefix_family(3, 0.01, &[2], Field::binary(), 1).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
    }

    #[test]
    fn spec_round_trip_regenerates_same_code() {
        let f = family();
        let json = serde_json::to_string(&f.spec()).unwrap();
        let g = PrefixCodeFamily::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        for x in 0..16 {
            assert_eq!(f.encode_prefix(x, 128).unwrap(), g.encode_prefix(x, 128).unwrap());
        }
    }
}
