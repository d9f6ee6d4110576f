//! The emulation with shared randomness, resisting corruption rates up to
//! `1 − ε`.
//!
//! Every BR round becomes an epoch in which both parties transmit their label
//! at once. An epoch is a data window of `k` rounds followed by `t_rep`
//! attempts of one request round and `k` resend rounds:
//!
//! ```text
//! | data ×k | req | resend ×k | req | resend ×k | ... (t_rep times)
//! ```
//!
//! The label is Blueberry-coded once per slot, with a fresh table position
//! for every slot of every window, and repeated over the `k` slots of a
//! window. The receiver accepts the value that decodes validly most often
//! (strictly). Until it holds a valid label it sends a Blueberry-coded
//! request in each request round, and the sender resends only after a valid
//! request. A blind adversary is caught by the Blueberry layer, so it can
//! only delete, and deleting costs it as much as the parties spend.
//!
//! In the erasure variant the Blueberry layers are identity maps and the
//! channel itself only lets the adversary erase.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::br::{BrCore, BrParams, GAMMA_SIZE};
use super::{NoiselessTree, Protocol, RunSetup};
use crate::channel::{Action, ChannelConfig, Output, Party, RunRecord};
use crate::codes::{BlueberryDecode, BlueberryTable, TreeCode};
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

struct Tables {
    /// Label tables, indexed by sender.
    data: [BlueberryTable; 2],
    /// Request tables, indexed by the requesting party.
    request: [BlueberryTable; 2],
}

#[derive(Clone)]
pub struct SharedRand {
    tree: Arc<NoiselessTree>,
    code: Arc<TreeCode>,
    tables: Arc<Tables>,
    epochs: usize,
    k: usize,
    t_rep: usize,
    erasure_only: bool,
    channel: ChannelConfig,
    setup: RunSetup,
}

/// Builds the protocol. `params.seed` is the shared random string: it
/// determines the tree code and every Blueberry table.
pub fn make_shared_rand(tree: NoiselessTree, params: BrParams, erasure_only: bool) -> Result<SharedRand> {
    if !(params.eps > 0.0 && params.eps < 1.0) {
        return Err(Error::config(format!("eps {} outside (0, 1)", params.eps)));
    }
    let k = (1.0 / params.eps - 1e-9).ceil() as usize;
    let t_rep = (k as f64 / params.eps - 1e-9).ceil() as usize;
    let epochs = params.rounds(tree.depth());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let code = TreeCode::windowed_verified(
        GAMMA_SIZE,
        params.label_size,
        params.alpha,
        params.memory,
        params.verified_depth,
        rng.gen(),
    )?;
    let labels = params.label_size;
    let data_positions = epochs * (t_rep + 1) * k;
    let request_positions = epochs * t_rep;
    let (tables, channel) = if erasure_only {
        let data = BlueberryTable::identity(labels, data_positions);
        let request = BlueberryTable::identity(1, request_positions);
        (
            Tables { data: [data.clone(), data], request: [request.clone(), request] },
            ChannelConfig::erasure(labels),
        )
    } else {
        // q = |Σ_in|/|Γ_out| < (k·t_rep)^-2
        let bound = u64::from(labels) * ((k * t_rep) as u64).pow(2);
        let out = (bound + 1).next_power_of_two();
        let out = u32::try_from(out).map_err(|_| Error::config("Blueberry alphabet does not fit in 32 bits"))?;
        let mut table = |input, positions| BlueberryTable::new(input, out, positions, rng.gen());
        let data = [table(labels, data_positions)?, table(labels, data_positions)?];
        let request = [table(1, request_positions)?, table(1, request_positions)?];
        (Tables { data, request }, ChannelConfig::new(out))
    };
    let epoch_len = k + t_rep * (k + 1);
    Ok(SharedRand {
        tree: Arc::new(tree),
        code: Arc::new(code),
        tables: Arc::new(tables),
        epochs,
        k,
        t_rep,
        erasure_only,
        channel,
        setup: RunSetup::Adp { r_max: epochs * epoch_len },
    })
}

impl SharedRand {
    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t_rep(&self) -> usize {
        self.t_rep
    }

    pub fn epoch_len(&self) -> usize {
        self.k + self.t_rep * (self.k + 1)
    }

    pub fn tree(&self) -> &NoiselessTree {
        &self.tree
    }

    /// `|Σ_in| / |Γ_out|` of the label tables.
    pub fn q(&self) -> f64 {
        self.tables.data[0].q()
    }

    fn layout(&self) -> Layout {
        Layout { k: self.k, t_rep: self.t_rep }
    }
}

/// Where a round falls inside its epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    /// Slot `j` of window `attempt` (0 is the data window).
    Window { attempt: usize, j: usize },
    /// Request round of attempt `attempt` (1-based).
    Request { attempt: usize },
}

#[derive(Clone, Copy)]
struct Layout {
    k: usize,
    t_rep: usize,
}

impl Layout {
    fn len(self) -> usize {
        self.k + self.t_rep * (self.k + 1)
    }

    /// Epoch and slot of a 1-based round.
    fn locate(self, round: usize) -> (usize, Slot) {
        let epoch = (round - 1) / self.len();
        let o = (round - 1) % self.len();
        if o < self.k {
            return (epoch, Slot::Window { attempt: 0, j: o });
        }
        let o = o - self.k;
        let (attempt, w) = (o / (self.k + 1) + 1, o % (self.k + 1));
        match w {
            0 => (epoch, Slot::Request { attempt }),
            w => (epoch, Slot::Window { attempt, j: w - 1 }),
        }
    }

    fn data_position(self, epoch: usize, attempt: usize, j: usize) -> usize {
        (epoch * (self.t_rep + 1) + attempt) * self.k + j
    }

    fn request_position(self, epoch: usize, attempt: usize) -> usize {
        epoch * self.t_rep + attempt - 1
    }
}

/// The value with strictly the most valid decodes in a window.
fn decode_window(table: &BlueberryTable, layout: Layout, epoch: usize, attempt: usize, window: &[ChannelSymbol]) -> Option<u32> {
    let mut counts = vec![0usize; table.input_size() as usize];
    for (j, sym) in window.iter().enumerate() {
        if let ChannelSymbol::Letter(l) = *sym {
            if let Ok(BlueberryDecode::Ok(v)) = table.decode(layout.data_position(epoch, attempt, j), l) {
                counts[v as usize] += 1;
            }
        }
    }
    let best = *counts.iter().max()?;
    let mut winners = counts.iter().enumerate().filter(|&(_, &c)| c == best);
    let (v, _) = winners.next()?;
    (best > 0 && winners.next().is_none()).then_some(v as u32)
}

fn request_valid(table: &BlueberryTable, layout: Layout, epoch: usize, attempt: usize, sym: ChannelSymbol) -> bool {
    match sym {
        ChannelSymbol::Letter(l) => matches!(
            table.decode(layout.request_position(epoch, attempt), l),
            Ok(BlueberryDecode::Ok(_))
        ),
        _ => false,
    }
}

impl Protocol for SharedRand {
    fn name(&self) -> &'static str {
        if self.erasure_only {
            "shared_rand_erasure"
        } else {
            "shared_rand"
        }
    }

    fn input_space(&self) -> (u64, u64) {
        let size = 1u64 << self.tree.input_bits();
        (size, size)
    }

    fn setup(&self) -> &RunSetup {
        &self.setup
    }

    fn channel(&self) -> ChannelConfig {
        self.channel
    }

    fn party(&self, role: Role, input: u64) -> Box<dyn Party> {
        Box::new(EpochParty {
            core: BrCore::new(role, input, Arc::clone(&self.tree), Arc::clone(&self.code)),
            role,
            tables: Arc::clone(&self.tables),
            layout: self.layout(),
            label: 0,
            valid: None,
            honoring: false,
            window: Vec::with_capacity(self.k),
        })
    }

    fn expected(&self, x: u64, y: u64) -> u64 {
        self.tree.evaluate(x, y)
    }
}

struct EpochParty {
    core: BrCore,
    role: Role,
    tables: Arc<Tables>,
    layout: Layout,
    /// Our label this epoch.
    label: u32,
    /// The other's label this epoch, once received.
    valid: Option<u32>,
    /// A valid request arrived in the current attempt.
    honoring: bool,
    window: Vec<ChannelSymbol>,
}

impl Party for EpochParty {
    fn next_action(&mut self, round: usize) -> Action {
        let (epoch, slot) = self.layout.locate(round);
        let me = self.role.index();
        match slot {
            Slot::Window { attempt: 0, j } => {
                if j == 0 {
                    self.label = self.core.next_label();
                    self.valid = None;
                }
                let pos = self.layout.data_position(epoch, 0, j);
                Action::Send(ChannelSymbol::Letter(self.tables.data[me].encode(pos, self.label).expect("label in range")))
            }
            Slot::Window { attempt, j } if self.honoring => {
                let pos = self.layout.data_position(epoch, attempt, j);
                Action::Send(ChannelSymbol::Letter(self.tables.data[me].encode(pos, self.label).expect("label in range")))
            }
            Slot::Window { .. } => Action::Silent,
            Slot::Request { attempt } => {
                self.honoring = false;
                if self.valid.is_some() {
                    return Action::Silent;
                }
                let pos = self.layout.request_position(epoch, attempt);
                Action::Send(ChannelSymbol::Letter(self.tables.request[me].encode(pos, 0).expect("request symbol")))
            }
        }
    }

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol) {
        let (epoch, slot) = self.layout.locate(round);
        let other = self.role.other().index();
        match slot {
            Slot::Window { attempt, j } => {
                self.window.push(symbol);
                if j + 1 == self.layout.k {
                    if self.valid.is_none() {
                        self.valid = decode_window(&self.tables.data[other], self.layout, epoch, attempt, &self.window);
                    }
                    self.window.clear();
                }
            }
            Slot::Request { attempt } => {
                self.honoring = request_valid(&self.tables.request[other], self.layout, epoch, attempt, symbol);
            }
        }
        if round.is_multiple_of(self.layout.len()) {
            self.core.receive(self.valid);
        }
    }

    fn finish(&mut self) -> Output {
        self.core.output()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpochOutcome {
    Delivered(u32),
    Deleted,
}

/// One label transmission, reconstructed from a run record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub sender: Role,
    pub label: u32,
    /// Valid requests the sender received.
    pub requests_received: usize,
    /// Resend windows the sender actually transmitted.
    pub requests_honored: usize,
    pub outcome: EpochOutcome,
    /// Non-silent slots of the epoch in this transmission: the sender's
    /// windows and the receiver's requests.
    pub communication: usize,
    /// Corrupted slots among the same slots.
    pub corruptions: usize,
}

impl EpochLog {
    /// The receiver accepted a label the sender did not send.
    pub fn lucky(&self) -> bool {
        matches!(self.outcome, EpochOutcome::Delivered(v) if v != self.label)
    }
}

/// Reconstructs every epoch of a run, in both directions.
pub fn epoch_logs(record: &RunRecord, protocol: &SharedRand) -> Result<Vec<EpochLog>> {
    let layout = protocol.layout();
    let expected = protocol.epochs * layout.len();
    if record.r_max != expected || record.slots.len() != 2 * expected {
        return Err(Error::config("record does not belong to this protocol"));
    }
    let tables = &protocol.tables;
    let mut logs = Vec::with_capacity(2 * protocol.epochs);
    for epoch in 0..protocol.epochs {
        for sender in [Role::Alice, Role::Bob] {
            let (s, r) = (sender.index(), sender.other().index());
            let mut log = EpochLog {
                epoch,
                sender,
                label: 0,
                requests_received: 0,
                requests_honored: 0,
                outcome: EpochOutcome::Deleted,
                communication: 0,
                corruptions: 0,
            };
            let mut sent = Vec::with_capacity(layout.k);
            let mut got = Vec::with_capacity(layout.k);
            for o in 0..layout.len() {
                let round = epoch * layout.len() + o + 1;
                let (_, slot) = layout.locate(round);
                let who = match slot {
                    Slot::Window { .. } => s,
                    Slot::Request { .. } => r,
                };
                let rec = &record.slots[2 * (round - 1) + who];
                log.communication += usize::from(!rec.sent.is_silence());
                log.corruptions += usize::from(rec.corrupted());
                match slot {
                    Slot::Window { attempt, j } => {
                        sent.push(rec.sent);
                        got.push(rec.delivered);
                        if j + 1 == layout.k {
                            if attempt == 0 {
                                log.label = decode_window(&tables.data[s], layout, epoch, 0, &sent).unwrap_or(0);
                            } else if sent.iter().any(|x| !x.is_silence()) {
                                log.requests_honored += 1;
                            }
                            if log.outcome == EpochOutcome::Deleted {
                                if let Some(v) = decode_window(&tables.data[s], layout, epoch, attempt, &got) {
                                    log.outcome = EpochOutcome::Delivered(v);
                                }
                            }
                            sent.clear();
                            got.clear();
                        }
                    }
                    Slot::Request { attempt } => {
                        log.requests_received +=
                            usize::from(request_valid(&tables.request[r], layout, epoch, attempt, rec.delivered));
                    }
                }
            }
            logs.push(log);
        }
    }
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::Deleter;
    use crate::channel::{Adversary, Noiseless, SlotView};
    use crate::protocols::{run, Outcome};

    fn protocol(erasure_only: bool) -> SharedRand {
        let tree = NoiselessTree::identity_exchange(4).unwrap();
        make_shared_rand(tree, BrParams { eps: 0.25, seed: 7, ..BrParams::default() }, erasure_only).unwrap()
    }

    #[test]
    fn parameters() {
        let p = protocol(false);
        assert_eq!((p.k(), p.t_rep()), (4, 16));
        assert_eq!(p.epochs(), 64);
        assert!(p.q() < 1.0 / 4096.0);
        assert_eq!(p.setup().r_max(), 64 * (4 + 16 * 5));
    }

    #[test]
    fn noiseless_epochs_deliver_first_time() {
        for erasure_only in [false, true] {
            let p = protocol(erasure_only);
            let rec = run(&p, 2, 3, &mut Noiseless).unwrap();
            assert_eq!(Outcome::classify(&rec, p.expected(2, 3)), Outcome::Correct);
            assert_eq!(rec.metrics().unwrap().cc, (2 * p.epochs() * p.k()) as u64);
            for log in epoch_logs(&rec, &p).unwrap() {
                assert_eq!(log.outcome, EpochOutcome::Delivered(log.label));
                assert_eq!((log.communication, log.requests_received), (p.k(), 0));
            }
        }
    }

    /// Deletes everything Alice sends and every request Bob sends in the
    /// first epoch.
    struct KillFirstEpoch(usize);

    impl Adversary for KillFirstEpoch {
        fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
            let in_first = view.round <= self.0;
            let alice_window = view.sender == Role::Alice && !matches!(
                Layout { k: 4, t_rep: 16 }.locate(view.round).1,
                Slot::Request { .. }
            );
            let bob_request = view.sender == Role::Bob
                && matches!(Layout { k: 4, t_rep: 16 }.locate(view.round).1, Slot::Request { .. });
            if in_first && !sent.is_silence() && (alice_window || bob_request) {
                ChannelSymbol::Silence
            } else {
                sent
            }
        }
    }

    #[test]
    fn deleted_epoch_costs_the_adversary() {
        let p = protocol(false);
        let rec = run(&p, 1, 1, &mut KillFirstEpoch(p.epoch_len())).unwrap();
        let log = &epoch_logs(&rec, &p).unwrap()[0];
        assert_eq!(log.sender, Role::Alice);
        assert_eq!(log.outcome, EpochOutcome::Deleted);
        assert!(log.communication >= p.k() + p.t_rep());
        assert!(log.corruptions as f64 >= (1.0 - 0.25) * log.communication as f64);
    }

    #[test]
    fn deletions_are_repaired() {
        let p = protocol(true);
        let mut adv = Deleter::new(0.5, 5);
        let rec = run(&p, 3, 1, &mut adv).unwrap();
        assert_eq!(Outcome::classify(&rec, p.expected(3, 1)), Outcome::Correct);
        let logs = epoch_logs(&rec, &p).unwrap();
        assert!(logs.iter().any(|l| l.requests_honored > 0));
        for l in &logs {
            assert!(!l.lucky());
            assert!(l.corruptions >= l.communication.saturating_sub(2 * p.k() + 1), "{l:?}");
        }
    }
}
