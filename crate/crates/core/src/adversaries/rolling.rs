//! Rolling changes and the attack on fully-utilized abort-model protocols.

use super::virtual_party::{Shadow, VirtualParty};
use super::PartyFactory;
use crate::channel::{Adversary, SlotView};
use crate::codes::Field;
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

/// A change `z` with `H(x+z, x) >= H(x+z, y)` whose every prefix of length
/// `j` has weight at most `(j+1)/2`.
///
/// The positions where `x` and `y` differ are paired up in order; the second
/// position of each pair is moved to `y`'s value, as is an unpaired last
/// position.
pub fn rolling_change(x: &[u8], y: &[u8], field: Field) -> Result<Vec<u8>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if let Some(&bad) = x.iter().chain(y).find(|&&s| !field.contains(s)) {
        return Err(Error::config(format!("symbol {bad} outside a field of size {}", field.size())));
    }
    let diff: Vec<usize> = (0..x.len()).filter(|&i| x[i] != y[i]).collect();
    let mut z = vec![0u8; x.len()];
    for pair in diff.chunks(2) {
        let i = *pair.last().unwrap();
        z[i] = field.sub(y[i], x[i]);
    }
    Ok(z)
}

/// Makes Alice's view identical whether Bob holds `y` or `y_alt`.
///
/// After a clean prefix, Bob's slots are handled in two-round batches: the
/// first slot delivers what Bob would send on `y`, the second what he would
/// send on `y_alt`. Either way at most one slot per batch is corrupted. The
/// attack assumes a fully-utilized schedule and that Bob's transcript on `y`
/// and `y_alt` agrees during the clean prefix.
pub struct RollingAdversary {
    shadow: Shadow,
    clean_rounds: usize,
}

impl RollingAdversary {
    pub const DEFAULT_CLEAN_ROUNDS: usize = 10;

    pub fn new(factory: &PartyFactory, y: u64, y_alt: u64, r_max: usize) -> Self {
        Self::with_clean_rounds(factory, y, y_alt, r_max, Self::DEFAULT_CLEAN_ROUNDS)
    }

    pub fn with_clean_rounds(
        factory: &PartyFactory,
        y: u64,
        y_alt: u64,
        r_max: usize,
        clean_rounds: usize,
    ) -> Self {
        let copy = |input| VirtualParty::new(factory(Role::Bob, input), r_max);
        RollingAdversary { shadow: Shadow::new(Vec::new(), vec![copy(y), copy(y_alt)]), clean_rounds }
    }
}

impl Adversary for RollingAdversary {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        self.shadow.sync(view.round, view.history);
        if view.sender != Role::Bob || view.round <= self.clean_rounds {
            return sent;
        }
        let which = (view.round - self.clean_rounds - 1) % 2;
        self.shadow.current[Role::Bob.index()][which]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let z = rolling_change(&[0, 0, 1, 1], &[0, 1, 0, 1], Field::binary()).unwrap();
        assert_eq!(z, vec![0, 0, 1, 0]);
    }

    #[test]
    fn equal_strings_need_no_change() {
        let x = [3, 1, 2, 0];
        assert_eq!(rolling_change(&x, &x, Field::with_size(4).unwrap()).unwrap(), vec![0; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rolling_change(&[0, 1], &[0], Field::binary()).is_err());
        assert!(rolling_change(&[0, 2], &[0, 1], Field::binary()).is_err());
    }
}
