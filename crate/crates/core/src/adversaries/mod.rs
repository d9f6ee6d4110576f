//! Adversarial strategies: the midpoint and rolling attacks, and generic
//! randomized and exhaustive adversaries used to test resilience.

mod enumerate;
mod midpoint;
mod random;
mod rolling;
mod virtual_party;

use std::sync::Arc;

pub use enumerate::{enumerate_patterns, pattern_count, NoisePattern, PatternAdversary};
pub use midpoint::MidpointAdversary;
pub use random::{Deleter, RandomBudgeted};
pub use rolling::{rolling_change, RollingAdversary};

use crate::channel::{ChannelConfig, Party};
use crate::symbol::{ChannelSymbol, Role};

/// Builds a fresh endpoint for `role` on `input`. Attacks use this to run
/// virtual copies of the parties.
pub type PartyFactory = Arc<dyn Fn(Role, u64) -> Box<dyn Party> + Send + Sync>;

/// The `j`-th symbol of `Σ ∪ {silence}` other than `sent`, letters first.
pub(crate) fn alternative(channel: &ChannelConfig, sent: ChannelSymbol, j: u32) -> ChannelSymbol {
    if channel.erasure_only {
        return ChannelSymbol::ErasureMark;
    }
    let skip = match sent {
        ChannelSymbol::Letter(l) => l,
        _ => channel.alphabet_size,
    };
    let idx = if j >= skip { j + 1 } else { j };
    if idx < channel.alphabet_size {
        ChannelSymbol::Letter(idx)
    } else {
        ChannelSymbol::Silence
    }
}

/// Number of symbols a slot can be corrupted into.
pub fn alternative_count(channel: &ChannelConfig) -> u32 {
    if channel.erasure_only {
        1
    } else {
        channel.alphabet_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternatives_enumerate_everything_but_sent() {
        let ch = ChannelConfig::new(3);
        for sent in [ChannelSymbol::Letter(0), ChannelSymbol::Letter(2), ChannelSymbol::Silence] {
            let alts: Vec<_> = (0..alternative_count(&ch)).map(|j| alternative(&ch, sent, j)).collect();
            assert_eq!(alts.len(), 3);
            assert!(!alts.contains(&sent));
            let set: std::collections::HashSet<_> = alts.iter().collect();
            assert_eq!(set.len(), 3);
        }
        let unary = ChannelConfig::unary();
        assert_eq!(alternative(&unary, ChannelSymbol::SIGMA, 0), ChannelSymbol::Silence);
        assert_eq!(alternative(&unary, ChannelSymbol::Silence, 0), ChannelSymbol::SIGMA);
        assert_eq!(alternative(&ChannelConfig::erasure(4), ChannelSymbol::Silence, 0), ChannelSymbol::ErasureMark);
    }
}
