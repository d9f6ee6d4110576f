use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{alternative, alternative_count};
use crate::channel::{Adversary, SlotView};
use crate::symbol::ChannelSymbol;

/// Corrupts each slot independently with probability `p`, into a uniformly
/// chosen different symbol (an erasure mark on erasure channels).
pub struct RandomBudgeted {
    p: f64,
    rng: ChaCha8Rng,
}

impl RandomBudgeted {
    pub fn new(p: f64, seed: u64) -> Self {
        RandomBudgeted { p: p.clamp(0.0, 1.0), rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Adversary for RandomBudgeted {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        if !self.rng.gen_bool(self.p) {
            return sent;
        }
        let j = self.rng.gen_range(0..alternative_count(view.channel));
        alternative(view.channel, sent, j)
    }
}

/// Silences (or erases) each non-silent slot with probability `p`.
pub struct Deleter {
    p: f64,
    rng: ChaCha8Rng,
}

impl Deleter {
    pub fn new(p: f64, seed: u64) -> Self {
        Deleter { p: p.clamp(0.0, 1.0), rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Adversary for Deleter {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        if sent.is_silence() || !self.rng.gen_bool(self.p) {
            return sent;
        }
        if view.channel.erasure_only {
            ChannelSymbol::ErasureMark
        } else {
            ChannelSymbol::Silence
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelConfig;
    use crate::symbol::Role;

    fn outputs(adv: &mut dyn Adversary, channel: &ChannelConfig, sent: &[ChannelSymbol]) -> Vec<ChannelSymbol> {
        sent.iter()
            .enumerate()
            .map(|(i, &s)| {
                let view = SlotView { round: i + 1, sender: Role::Alice, history: &[], channel };
                adv.corrupt(&view, s)
            })
            .collect()
    }

    #[test]
    fn probability_extremes() {
        let ch = ChannelConfig::unary();
        let sent = vec![ChannelSymbol::SIGMA, ChannelSymbol::Silence, ChannelSymbol::SIGMA];
        assert_eq!(outputs(&mut RandomBudgeted::new(0.0, 1), &ch, &sent), sent);
        let flipped = outputs(&mut RandomBudgeted::new(1.0, 1), &ch, &sent);
        assert_eq!(flipped, vec![ChannelSymbol::Silence, ChannelSymbol::SIGMA, ChannelSymbol::Silence]);
    }

    #[test]
    fn replay_is_deterministic() {
        let ch = ChannelConfig::new(5);
        let sent: Vec<_> = (0..200).map(|i| ChannelSymbol::Letter(i % 5)).collect();
        let a = outputs(&mut RandomBudgeted::new(0.3, 42), &ch, &sent);
        let b = outputs(&mut RandomBudgeted::new(0.3, 42), &ch, &sent);
        assert_eq!(a, b);
        assert_ne!(a, sent);
    }

    #[test]
    fn deleter_only_removes() {
        let ch = ChannelConfig::erasure(3);
        let sent = vec![ChannelSymbol::Letter(1), ChannelSymbol::Silence];
        let out = outputs(&mut Deleter::new(1.0, 0), &ch, &sent);
        assert_eq!(out, vec![ChannelSymbol::ErasureMark, ChannelSymbol::Silence]);
    }
}
