//! The midpoint attack on adaptive-length protocols.
//!
//! Four virtual endpoints run alongside the real parties: Alice on `x` and on
//! `x_alt`, Bob on `y` and on `y_alt`, each fed what its role actually
//! receives. Whenever the two copies of the sender disagree, the delivered
//! symbol alternates between the real-input copy and the alternative copy, so
//! the receiver's view sits halfway between the two transcripts while at most
//! half of the disagreeing slots are corrupted. The attack stops at the first
//! termination.

use super::virtual_party::{Shadow, VirtualParty};
use super::PartyFactory;
use crate::channel::{Adversary, SlotView};
use crate::symbol::{ChannelSymbol, Role};

pub struct MidpointAdversary {
    shadow: Shadow,
    /// Next disagreement per direction delivers the alternative copy.
    use_alt: [bool; 2],
    stopped: bool,
}

impl MidpointAdversary {
    /// `x`, `y` are the real inputs; `r_max` is the run's hard stop.
    pub fn new(factory: &PartyFactory, x: u64, x_alt: u64, y: u64, y_alt: u64, r_max: usize) -> Self {
        let copy = |role, input| VirtualParty::new(factory(role, input), r_max);
        let shadow = Shadow::new(
            vec![copy(Role::Alice, x), copy(Role::Alice, x_alt)],
            vec![copy(Role::Bob, y), copy(Role::Bob, y_alt)],
        );
        MidpointAdversary { shadow, use_alt: [false; 2], stopped: false }
    }
}

impl Adversary for MidpointAdversary {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        self.shadow.sync(view.round, view.history);
        if self.stopped || self.shadow.any_terminated() {
            self.stopped = true;
            return sent;
        }
        let i = view.sender.index();
        let alt = self.shadow.current[i][1];
        if self.shadow.current[i][0] == alt {
            return sent;
        }
        let take_alt = self.use_alt[i];
        self.use_alt[i] = !take_alt;
        if take_alt {
            alt
        } else {
            sent
        }
    }
}
