//! `k`-silence encoding.
//!
//! Value `i` of a domain of size `n` is sent as `k·n` slots that are all
//! silent except block `i`, which carries `k` copies of the designated letter
//! σ. Decoding picks the block with the most σ's, which is the same as
//! nearest-codeword decoding: every codeword has the same number of σ's, so
//! the distance to block `i` is `const - 2·(σ-count of block i)`.

use crate::error::{Error, Result};
use crate::symbol::ChannelSymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SilenceDecodeResult {
    /// 1-based value and the σ-count gap to the runner-up block (`gap > 0`).
    Value { index: usize, gap: usize },
    Erasure,
}

/// Encodes the 1-based value `index` of a domain of size `n`.
pub fn se_encode(index: usize, k: usize, n: usize) -> Result<Vec<ChannelSymbol>> {
    if k == 0 || n == 0 || index == 0 || index > n {
        return Err(Error::config(format!("silence encoding of {index} with k={k}, n={n}")));
    }
    let mut word = vec![ChannelSymbol::Silence; k * n];
    word[(index - 1) * k..index * k].fill(ChannelSymbol::SIGMA);
    Ok(word)
}

/// σ-count of every block.
pub fn block_counts(word: &[ChannelSymbol], k: usize, n: usize) -> Result<Vec<usize>> {
    if word.len() != k * n {
        return Err(Error::LengthMismatch { expected: k * n, got: word.len() });
    }
    Ok(word.chunks(k).map(|b| b.iter().filter(|&&s| s == ChannelSymbol::SIGMA).count()).collect())
}

/// Decodes by strict block maximality; a tie for the maximum is an erasure.
pub fn se_decode(word: &[ChannelSymbol], k: usize, n: usize) -> Result<SilenceDecodeResult> {
    if k == 0 || n == 0 {
        return Err(Error::config("silence decoding needs k, n >= 1"));
    }
    Ok(decode_counts(&block_counts(word, k, n)?))
}

pub(crate) fn decode_counts(counts: &[usize]) -> SilenceDecodeResult {
    let best = counts.iter().copied().max().unwrap_or(0);
    let mut winners = counts.iter().enumerate().filter(|&(_, &c)| c == best);
    let (index, _) = winners.next().expect("at least one block");
    if winners.next().is_some() {
        return SilenceDecodeResult::Erasure;
    }
    // with a single block the runner-up count is taken as zero
    let second = counts.iter().enumerate().filter(|&(i, _)| i != index).map(|(_, &c)| c).max().unwrap_or(0);
    if best == second {
        return SilenceDecodeResult::Erasure;
    }
    SilenceDecodeResult::Value { index: index + 1, gap: best - second }
}
