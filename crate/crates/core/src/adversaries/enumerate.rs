//! Exhaustive oblivious noise patterns.
//!
//! Against a deterministic protocol on fixed inputs, any deterministic
//! adaptive adversary induces the same run as exactly one oblivious pattern,
//! so enumerating patterns covers every deterministic attack.

use itertools::Itertools;

use super::alternative;
use crate::channel::{Adversary, SlotView};
use crate::symbol::ChannelSymbol;

/// Corrupted slots in increasing order, each with the index of the
/// replacement among the symbols other than the one sent.
pub type NoisePattern = Vec<(usize, u32)>;

/// Every pattern with at most `max_weight` corrupted slots among
/// `slot_count`, combined with every choice of replacement.
pub fn enumerate_patterns(
    slot_count: usize,
    max_weight: usize,
    alternatives: u32,
) -> impl Iterator<Item = NoisePattern> {
    (0..=max_weight.min(slot_count)).flat_map(move |w| {
        (0..slot_count).combinations(w).flat_map(move |slots| {
            let choices = u64::from(alternatives).pow(w as u32);
            (0..choices).map(move |mut c| {
                slots
                    .iter()
                    .map(|&s| {
                        let a = (c % u64::from(alternatives)) as u32;
                        c /= u64::from(alternatives);
                        (s, a)
                    })
                    .collect()
            })
        })
    })
}

/// Closed-form size of [`enumerate_patterns`]: `Σ_{w ≤ W} C(n, w)·a^w`.
pub fn pattern_count(slot_count: usize, max_weight: usize, alternatives: u32) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for w in 0..=max_weight.min(slot_count) {
        total += binom * u128::from(alternatives).pow(w as u32);
        binom = binom * (slot_count - w) as u128 / (w + 1) as u128;
    }
    total
}

/// Applies a fixed pattern, indexed by slot position in the run.
pub struct PatternAdversary {
    pattern: NoisePattern,
    next: usize,
}

impl PatternAdversary {
    pub fn new(mut pattern: NoisePattern) -> Self {
        pattern.sort_unstable();
        PatternAdversary { pattern, next: 0 }
    }
}

impl Adversary for PatternAdversary {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        let slot = view.slot_index();
        while self.next < self.pattern.len() && self.pattern[self.next].0 < slot {
            self.next += 1;
        }
        match self.pattern.get(self.next) {
            Some(&(s, alt)) if s == slot => alternative(view.channel, sent, alt),
            _ => sent,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn weight_zero_is_one_clean_pattern() {
        let all: Vec<_> = enumerate_patterns(10, 0, 3).collect();
        assert_eq!(all, vec![Vec::new()]);
    }

    #[test]
    fn counts_match_closed_form_and_are_distinct() {
        for (n, w, a) in [(5, 2, 1), (6, 3, 2), (4, 4, 3), (3, 5, 2)] {
            let all: Vec<_> = enumerate_patterns(n, w, a).collect();
            let unique: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(all.len() as u128, pattern_count(n, w, a));
            assert_eq!(unique.len(), all.len());
        }
    }

    #[test]
    fn binomial_sum_for_the_two_thirds_suite() {
        assert_eq!(pattern_count(36, 6, 1), 2_391_496);
    }
}
