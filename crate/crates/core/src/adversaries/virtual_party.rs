use crate::channel::{Action, Party, SlotRecord};
use crate::symbol::{ChannelSymbol, Role};

/// A shadow copy of an endpoint driven by an adversary.
pub(crate) struct VirtualParty {
    party: Box<dyn Party>,
    r_max: usize,
    terminated: bool,
}

impl VirtualParty {
    pub(crate) fn new(party: Box<dyn Party>, r_max: usize) -> Self {
        VirtualParty { party, r_max, terminated: false }
    }

    pub(crate) fn terminated(&self) -> bool {
        self.terminated
    }

    /// What the copy puts on the wire in `round`.
    pub(crate) fn step(&mut self, round: usize) -> ChannelSymbol {
        if self.terminated {
            return ChannelSymbol::Silence;
        }
        if round >= self.r_max {
            self.terminated = true;
            return ChannelSymbol::Silence;
        }
        match self.party.next_action(round) {
            Action::Send(s) => s,
            Action::Silent => ChannelSymbol::Silence,
            Action::Terminate(_) => {
                self.terminated = true;
                ChannelSymbol::Silence
            }
        }
    }

    pub(crate) fn deliver(&mut self, round: usize, sym: ChannelSymbol) {
        if !self.terminated {
            self.party.deliver(round, sym);
        }
    }
}

/// Keeps a set of virtual endpoints in lock-step with the real run.
///
/// `copies[r]` are the copies playing role `r`; each receives the symbols
/// actually delivered to that role.
pub(crate) struct Shadow {
    pub(crate) copies: [Vec<VirtualParty>; 2],
    /// Symbols the copies emit in the current round.
    pub(crate) current: [Vec<ChannelSymbol>; 2],
    stepped: usize,
    processed: usize,
}

impl Shadow {
    pub(crate) fn new(alice: Vec<VirtualParty>, bob: Vec<VirtualParty>) -> Self {
        let current = [vec![ChannelSymbol::Silence; alice.len()], vec![ChannelSymbol::Silence; bob.len()]];
        Shadow { copies: [alice, bob], current, stepped: 0, processed: 0 }
    }

    /// Catches up with `history` and steps every copy to `round`. Symbols of
    /// the current round are delivered only once the next round starts.
    pub(crate) fn sync(&mut self, round: usize, history: &[SlotRecord]) {
        if round <= self.stepped {
            return;
        }
        for rec in &history[self.processed..] {
            for copy in &mut self.copies[rec.sender.other().index()] {
                copy.deliver(rec.round, rec.delivered);
            }
        }
        self.processed = history.len();
        for r in self.stepped + 1..=round {
            for role in [Role::Alice, Role::Bob] {
                let i = role.index();
                for (j, copy) in self.copies[i].iter_mut().enumerate() {
                    self.current[i][j] = copy.step(r);
                }
            }
        }
        self.stepped = round;
    }

    pub(crate) fn any_terminated(&self) -> bool {
        self.copies.iter().flatten().any(VirtualParty::terminated)
    }
}
