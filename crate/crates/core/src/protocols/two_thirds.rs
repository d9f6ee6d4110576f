//! Adaptive-order protocol over a unary channel.
//!
//! Alice sends the `k`-silence encoding of `x` in rounds `1..=k|X|`. Bob
//! decodes it; an ambiguous word makes him abort. Otherwise, with gap `t`,
//! he sends σ for `2t` rounds starting at the beginning of his window
//! `k|X| + 2k(j-1) + 1` (`j` is `y`'s 1-based index) and stops. Alice takes
//! the window holding strictly the most σ's, aborting on a tie.

use std::sync::Arc;

use super::{Function, Protocol, RunSetup};
use crate::channel::{Action, ChannelConfig, Output, Party};
use crate::codes::silence::decode_counts;
use crate::codes::{se_decode, SilenceDecodeResult};
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

struct Inner {
    x_size: usize,
    y_size: usize,
    k: usize,
    f: Function,
}

#[derive(Clone)]
pub struct TwoThirds {
    inner: Arc<Inner>,
    setup: RunSetup,
}

/// Inputs are `0..|X|` and `0..|Y|`; input `i` is the `(i+1)`-th element.
pub fn make_two_thirds(x_size: usize, y_size: usize, k: usize, f: Function) -> Result<TwoThirds> {
    if x_size == 0 || y_size == 0 || k == 0 {
        return Err(Error::config("two-thirds protocol needs |X|, |Y|, k >= 1"));
    }
    let r_max = k * x_size + 2 * k * y_size;
    Ok(TwoThirds { inner: Arc::new(Inner { x_size, y_size, k, f }), setup: RunSetup::Adp { r_max } })
}

impl TwoThirds {
    pub fn k(&self) -> usize {
        self.inner.k
    }
}

impl Protocol for TwoThirds {
    fn name(&self) -> &'static str {
        "two_thirds"
    }

    fn input_space(&self) -> (u64, u64) {
        (self.inner.x_size as u64, self.inner.y_size as u64)
    }

    fn setup(&self) -> &RunSetup {
        &self.setup
    }

    fn channel(&self) -> ChannelConfig {
        ChannelConfig::unary()
    }

    fn party(&self, role: Role, input: u64) -> Box<dyn Party> {
        let inner = Arc::clone(&self.inner);
        match role {
            Role::Alice => Box::new(Alice { inner, x: input as usize, received: Vec::new() }),
            Role::Bob => Box::new(Bob { inner, y: input as usize, received: Vec::new(), plan: None }),
        }
    }

    fn expected(&self, x: u64, y: u64) -> u64 {
        (self.inner.f)(x, y)
    }
}

struct Alice {
    inner: Arc<Inner>,
    x: usize,
    received: Vec<ChannelSymbol>,
}

impl Party for Alice {
    fn next_action(&mut self, round: usize) -> Action {
        let k = self.inner.k;
        if round > self.x * k && round <= (self.x + 1) * k {
            Action::Send(ChannelSymbol::SIGMA)
        } else {
            Action::Silent
        }
    }

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol) {
        if round > self.inner.k * self.inner.x_size {
            self.received.push(symbol);
        }
    }

    fn finish(&mut self) -> Output {
        let w = 2 * self.inner.k;
        let mut counts = vec![0usize; self.inner.y_size];
        for (i, s) in self.received.iter().enumerate() {
            if *s == ChannelSymbol::SIGMA {
                counts[(i / w).min(self.inner.y_size - 1)] += 1;
            }
        }
        match decode_counts(&counts) {
            SilenceDecodeResult::Value { index, .. } => Output::Value((self.inner.f)(self.x as u64, index as u64 - 1)),
            SilenceDecodeResult::Erasure => Output::Abort,
        }
    }
}

struct Bob {
    inner: Arc<Inner>,
    y: usize,
    received: Vec<ChannelSymbol>,
    /// Rounds carrying σ and the output, once decided.
    plan: Option<(std::ops::RangeInclusive<usize>, Output)>,
}

impl Party for Bob {
    fn next_action(&mut self, round: usize) -> Action {
        let k = self.inner.k;
        let start = k * self.inner.x_size;
        if round <= start {
            return Action::Silent;
        }
        if round == start + 1 {
            match se_decode(&self.received, k, self.inner.x_size) {
                Ok(SilenceDecodeResult::Value { index, gap }) => {
                    let first = start + 2 * k * self.y + 1;
                    let out = Output::Value((self.inner.f)(index as u64 - 1, self.y as u64));
                    self.plan = Some((first..=first + 2 * gap - 1, out));
                }
                _ => return Action::Terminate(Output::Abort),
            }
        }
        let (window, out) = self.plan.clone().expect("decided after Alice's part");
        if window.contains(&round) {
            Action::Send(ChannelSymbol::SIGMA)
        } else if round > *window.end() {
            Action::Terminate(out)
        } else {
            Action::Silent
        }
    }

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol) {
        if round <= self.inner.k * self.inner.x_size {
            self.received.push(symbol);
        }
    }

    fn finish(&mut self) -> Output {
        self.plan.as_ref().map_or(Output::Abort, |(_, out)| *out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::PatternAdversary;
    use crate::channel::Noiseless;
    use crate::protocols::{run, Outcome};

    fn protocol(k: usize) -> TwoThirds {
        make_two_thirds(2, 2, k, Arc::new(|x, y| x * 2 + y)).unwrap()
    }

    #[test]
    fn noiseless_trace() {
        let p = protocol(3);
        // x_2, y_1
        let rec = run(&p, 1, 0, &mut Noiseless).unwrap();
        let alice: Vec<usize> = rec.slots_of(Role::Alice).filter(|s| !s.sent.is_silence()).map(|s| s.round).collect();
        let bob: Vec<usize> = rec.slots_of(Role::Bob).filter(|s| !s.sent.is_silence()).map(|s| s.round).collect();
        assert_eq!(alice, vec![4, 5, 6]);
        assert_eq!(bob, (7..=12).collect::<Vec<_>>());
        assert_eq!(rec.metrics().unwrap().cc, 9);
        assert_eq!(Outcome::classify(&rec, 2), Outcome::Correct);
    }

    #[test]
    fn deleting_alice_makes_bob_abort() {
        let p = protocol(3);
        // Alice's slots are the even slot indices; x_1 occupies rounds 1..3
        let rec = run(&p, 0, 1, &mut PatternAdversary::new(vec![(0, 0), (2, 0), (4, 0)])).unwrap();
        assert_eq!(rec.output(Role::Bob), Output::Abort);
        let m = rec.metrics().unwrap();
        assert_eq!((m.cc, m.nc), (3, 3));
    }
}
