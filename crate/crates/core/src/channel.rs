//! Channel models and the run simulator.
//!
//! Two models are supported. In the termination model (`Term`) every round
//! has a fixed owner set: round `i` carries a slot for Alice iff `i ∈ I_A`
//! and a slot for Bob iff `i ∈ I_B`, and each party may terminate at the
//! beginning of any round. Its later slots carry silence, which the adversary
//! may still corrupt. `Abort` is the same model except that outputs are
//! replaced by [`Output::Abort`] unless both parties ran to `R_max`.
//!
//! In the adaptive-order model (`Adp`) both parties own a slot in every round
//! and choose whether to send a letter or stay silent. Slots are interleaved
//! `a_1, b_1, a_2, b_2, ...`; Alice's slot of a round is adjudicated first, so
//! the adversary deciding Bob's slot already sees Alice's delivered symbol.
//! Both slots of a round are delivered only after both parties acted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::NoiseRate;
use crate::symbol::{ChannelSymbol, Role};

/// What a party outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Output {
    Value(u64),
    Abort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Send(ChannelSymbol),
    Silent,
    Terminate(Output),
}

/// A protocol endpoint.
///
/// Implementations must be deterministic given their input, shared
/// randomness and the sequence of delivered symbols. After `Terminate` is
/// returned the endpoint is never queried again; `finish` is only called on an
/// endpoint that is still running when the run reaches its hard stop.
pub trait Party: Send {
    fn next_action(&mut self, round: usize) -> Action;

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol);

    fn finish(&mut self) -> Output;
}

/// A pair of endpoints for one run.
pub struct Endpoints {
    pub alice: Box<dyn Party>,
    pub bob: Box<dyn Party>,
}

impl Endpoints {
    pub fn new(alice: impl Party + 'static, bob: impl Party + 'static) -> Self {
        Endpoints { alice: Box::new(alice), bob: Box::new(bob) }
    }
}

/// One adjudicated slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub round: usize,
    pub sender: Role,
    pub sent: ChannelSymbol,
    pub delivered: ChannelSymbol,
}

impl SlotRecord {
    pub fn corrupted(&self) -> bool {
        self.sent != self.delivered
    }

    /// The noise-pattern entry: `None` stands for an uncorrupted slot.
    pub fn noise(&self) -> Option<ChannelSymbol> {
        self.corrupted().then_some(self.delivered)
    }
}

/// Everything the adversary may look at when deciding a slot.
pub struct SlotView<'a> {
    pub round: usize,
    pub sender: Role,
    /// All previously adjudicated slots of this run, in execution order.
    pub history: &'a [SlotRecord],
    pub channel: &'a ChannelConfig,
}

impl SlotView<'_> {
    /// Index of the slot being decided within the run.
    pub fn slot_index(&self) -> usize {
        self.history.len()
    }
}

pub trait Adversary: Send {
    /// Called once at the start of every round, before any slot of it.
    fn begin_round(&mut self, _round: usize) {}

    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol;
}

/// The adversary that never corrupts.
#[derive(Clone, Copy, Debug, Default)]
pub struct Noiseless;

impl Adversary for Noiseless {
    fn corrupt(&mut self, _view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        sent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Number of letters `|Σ|`.
    pub alphabet_size: u32,
    /// When set, the adversary may only replace a symbol by `ErasureMark`.
    pub erasure_only: bool,
}

impl ChannelConfig {
    pub fn new(alphabet_size: u32) -> Self {
        ChannelConfig { alphabet_size, erasure_only: false }
    }

    pub fn unary() -> Self {
        Self::new(1)
    }

    pub fn erasure(alphabet_size: u32) -> Self {
        ChannelConfig { alphabet_size, erasure_only: true }
    }

    fn check_sent(&self, who: Role, round: usize, sym: ChannelSymbol) -> Result<()> {
        match sym {
            ChannelSymbol::Letter(l) if l >= self.alphabet_size => Err(Error::fault(format!(
                "{who:?} sent letter {l} outside an alphabet of size {} in round {round}",
                self.alphabet_size
            ))),
            ChannelSymbol::ErasureMark => {
                Err(Error::fault(format!("{who:?} sent an erasure mark in round {round}")))
            }
            _ => Ok(()),
        }
    }

    fn check_delivered(&self, sent: ChannelSymbol, delivered: ChannelSymbol, round: usize) -> Result<()> {
        if self.erasure_only {
            if delivered != sent && delivered != ChannelSymbol::ErasureMark {
                return Err(Error::fault(format!(
                    "adversary altered a symbol on an erasure channel in round {round}"
                )));
            }
            return Ok(());
        }
        match delivered {
            ChannelSymbol::ErasureMark => Err(Error::fault(format!(
                "adversary delivered an erasure mark on a non-erasure channel in round {round}"
            ))),
            ChannelSymbol::Letter(l) if l >= self.alphabet_size => Err(Error::fault(format!(
                "adversary delivered letter {l} outside the alphabet in round {round}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Term,
    Adp,
    Abort,
}

/// Speaking order for the termination model: which rounds carry a slot for
/// each party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSchedule {
    r_max: usize,
    alice: Vec<bool>,
    bob: Vec<bool>,
}

impl TermSchedule {
    /// Builds a schedule from membership predicates over rounds `1..=r_max`.
    pub fn from_fn(
        r_max: usize,
        alice: impl Fn(usize) -> bool,
        bob: impl Fn(usize) -> bool,
    ) -> Result<Self> {
        let schedule = TermSchedule {
            r_max,
            alice: (1..=r_max).map(&alice).collect(),
            bob: (1..=r_max).map(&bob).collect(),
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Both parties own every round.
    pub fn fully_utilized(r_max: usize) -> Result<Self> {
        Self::from_fn(r_max, |_| true, |_| true)
    }

    /// Alice owns `1..=alice_rounds`, Bob owns the rest.
    pub fn split(alice_rounds: usize, r_max: usize) -> Result<Self> {
        Self::from_fn(r_max, |i| i <= alice_rounds, |i| i > alice_rounds)
    }

    /// Alice owns odd rounds, Bob even rounds.
    pub fn alternating(r_max: usize) -> Result<Self> {
        Self::from_fn(r_max, |i| i % 2 == 1, |i| i % 2 == 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_max == 0 {
            return Err(Error::config("R_max must be positive"));
        }
        if self.alice.len() != self.r_max || self.bob.len() != self.r_max {
            return Err(Error::config("schedule length differs from R_max"));
        }
        if let Some(gap) = (1..=self.r_max).find(|&i| !self.owns(Role::Alice, i) && !self.owns(Role::Bob, i)) {
            return Err(Error::config(format!("round {gap} belongs to neither party")));
        }
        Ok(())
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn owns(&self, who: Role, round: usize) -> bool {
        if round == 0 || round > self.r_max {
            return false;
        }
        match who {
            Role::Alice => self.alice[round - 1],
            Role::Bob => self.bob[round - 1],
        }
    }

    pub fn is_fully_utilized(&self) -> bool {
        self.alice.iter().chain(&self.bob).all(|&b| b)
    }

    /// `|[upto] ∩ I_who|`.
    pub fn count_owned(&self, who: Role, upto: usize) -> usize {
        (1..=upto.min(self.r_max)).filter(|&i| self.owns(who, i)).count()
    }
}

/// The complete trace of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: Model,
    pub r_max: usize,
    pub schedule: Option<TermSchedule>,
    /// Every adjudicated slot in execution order; this is `M` and `E` together.
    pub slots: Vec<SlotRecord>,
    /// Termination rounds (termination model only).
    pub ter: Option<[usize; 2]>,
    pub outputs: [Output; 2],
}

impl RunRecord {
    pub fn output(&self, who: Role) -> Output {
        self.outputs[who.index()]
    }

    /// Sent-symbol string `M`.
    pub fn sent(&self) -> Vec<ChannelSymbol> {
        self.slots.iter().map(|s| s.sent).collect()
    }

    /// Noise pattern `E`.
    pub fn noise_pattern(&self) -> Vec<Option<ChannelSymbol>> {
        self.slots.iter().map(SlotRecord::noise).collect()
    }

    pub fn slots_of(&self, who: Role) -> impl Iterator<Item = &SlotRecord> {
        self.slots.iter().filter(move |s| s.sender == who)
    }

    /// Symbols delivered to `receiver`, in order.
    pub fn delivered_to(&self, receiver: Role) -> Vec<ChannelSymbol> {
        self.slots_of(receiver.other()).map(|s| s.delivered).collect()
    }

    pub fn metrics(&self) -> Result<Metrics> {
        match self.model {
            Model::Term | Model::Abort => metrics_term(self),
            Model::Adp => metrics_adp(self),
        }
    }

    /// Rounds reported for the run: round complexity in the termination
    /// model, `R_max` otherwise.
    pub fn rounds(&self) -> usize {
        match self.ter {
            Some([a, b]) => a.max(b),
            None => self.r_max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub cc: u64,
    /// Round complexity; only defined in the termination model.
    pub rc: Option<usize>,
    pub nc: u64,
    pub nr: NoiseRate,
}

/// Runs one instance in the termination (or abort) model.
pub fn run_term(
    endpoints: &mut Endpoints,
    schedule: &TermSchedule,
    adversary: &mut dyn Adversary,
    channel: &ChannelConfig,
    model: Model,
) -> Result<RunRecord> {
    if model == Model::Adp {
        return Err(Error::config("run_term needs the term or abort model"));
    }
    schedule.validate()?;
    let r_max = schedule.r_max();
    let mut ter: [Option<usize>; 2] = [None, None];
    let mut outputs = [Output::Abort; 2];
    let mut slots = Vec::with_capacity(2 * r_max);

    for round in 1..=r_max {
        adversary.begin_round(round);
        let mut pending = [ChannelSymbol::Silence; 2];
        for who in [Role::Alice, Role::Bob] {
            let i = who.index();
            if ter[i].is_some() {
                continue;
            }
            let party = party_mut(endpoints, who);
            if round == r_max {
                outputs[i] = party.finish();
                ter[i] = Some(round);
                continue;
            }
            match party.next_action(round) {
                Action::Terminate(out) => {
                    outputs[i] = out;
                    ter[i] = Some(round);
                }
                Action::Silent => {}
                Action::Send(sym) => {
                    channel.check_sent(who, round, sym)?;
                    if !sym.is_silence() && !schedule.owns(who, round) {
                        return Err(Error::fault(format!(
                            "{who:?} sent in round {round} which it does not own"
                        )));
                    }
                    pending[i] = sym;
                }
            }
        }

        let mut delivered = [None; 2];
        for who in [Role::Alice, Role::Bob] {
            if !schedule.owns(who, round) {
                continue;
            }
            let sent = pending[who.index()];
            let view = SlotView { round, sender: who, history: &slots, channel };
            let out = adversary.corrupt(&view, sent);
            channel.check_delivered(sent, out, round)?;
            slots.push(SlotRecord { round, sender: who, sent, delivered: out });
            delivered[who.index()] = Some(out);
        }
        for who in [Role::Alice, Role::Bob] {
            if let Some(sym) = delivered[who.index()] {
                let receiver = who.other();
                if ter[receiver.index()].is_none() {
                    party_mut(endpoints, receiver).deliver(round, sym);
                }
            }
        }
    }

    let ter = [ter[0].unwrap_or(r_max), ter[1].unwrap_or(r_max)];
    if model == Model::Abort && ter[0].min(ter[1]) != r_max {
        outputs = [Output::Abort; 2];
    }
    Ok(RunRecord {
        model,
        r_max,
        schedule: Some(schedule.clone()),
        slots,
        ter: Some(ter),
        outputs,
    })
}

/// Runs one instance in the adaptive-order model for exactly `r_max` rounds.
pub fn run_adp(
    endpoints: &mut Endpoints,
    adversary: &mut dyn Adversary,
    r_max: usize,
    channel: &ChannelConfig,
) -> Result<RunRecord> {
    if r_max == 0 {
        return Err(Error::config("R_max must be positive"));
    }
    let mut done: [Option<Output>; 2] = [None, None];
    let mut slots = Vec::with_capacity(2 * r_max);

    for round in 1..=r_max {
        adversary.begin_round(round);
        let mut pending = [ChannelSymbol::Silence; 2];
        for who in [Role::Alice, Role::Bob] {
            let i = who.index();
            if done[i].is_some() {
                continue;
            }
            match party_mut(endpoints, who).next_action(round) {
                Action::Terminate(out) => done[i] = Some(out),
                Action::Silent => {}
                Action::Send(sym) => {
                    channel.check_sent(who, round, sym)?;
                    pending[i] = sym;
                }
            }
        }
        let mut delivered = [ChannelSymbol::Silence; 2];
        for who in [Role::Alice, Role::Bob] {
            let sent = pending[who.index()];
            let view = SlotView { round, sender: who, history: &slots, channel };
            let out = adversary.corrupt(&view, sent);
            channel.check_delivered(sent, out, round)?;
            slots.push(SlotRecord { round, sender: who, sent, delivered: out });
            delivered[who.index()] = out;
        }
        for who in [Role::Alice, Role::Bob] {
            let receiver = who.other();
            if done[receiver.index()].is_none() {
                party_mut(endpoints, receiver).deliver(round, delivered[who.index()]);
            }
        }
    }

    let mut outputs = [Output::Abort; 2];
    for who in [Role::Alice, Role::Bob] {
        let i = who.index();
        outputs[i] = match done[i] {
            Some(out) => out,
            None => party_mut(endpoints, who).finish(),
        };
    }
    Ok(RunRecord { model: Model::Adp, r_max, schedule: None, slots, ter: None, outputs })
}

fn party_mut(endpoints: &mut Endpoints, who: Role) -> &mut dyn Party {
    match who {
        Role::Alice => endpoints.alice.as_mut(),
        Role::Bob => endpoints.bob.as_mut(),
    }
}

/// Communication, round and noise complexity in the termination model.
///
/// Only corruptions in rounds strictly before the round complexity count,
/// including corruptions of post-termination silence.
pub fn metrics_term(record: &RunRecord) -> Result<Metrics> {
    let (Some([ter_a, ter_b]), Some(schedule)) = (record.ter, record.schedule.as_ref()) else {
        return Err(Error::config("metrics_term needs a term or abort record"));
    };
    if record.model == Model::Adp {
        return Err(Error::config("metrics_term needs a term or abort record"));
    }
    let cc = schedule.count_owned(Role::Alice, ter_a.saturating_sub(1))
        + schedule.count_owned(Role::Bob, ter_b.saturating_sub(1));
    let rc = ter_a.max(ter_b);
    let nc = record.slots.iter().filter(|s| s.round < rc && s.corrupted()).count();
    Ok(Metrics {
        cc: cc as u64,
        rc: Some(rc),
        nc: nc as u64,
        nr: NoiseRate::new(nc as u64, cc as u64),
    })
}

/// Communication and noise complexity in the adaptive-order model.
pub fn metrics_adp(record: &RunRecord) -> Result<Metrics> {
    if record.model != Model::Adp {
        return Err(Error::config("metrics_adp needs an adp record"));
    }
    let cc = record.slots.iter().filter(|s| !s.sent.is_silence()).count() as u64;
    let nc = record.slots.iter().filter(|s| s.corrupted()).count() as u64;
    Ok(Metrics { cc, rc: None, nc, nr: NoiseRate::new(nc, cc) })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sends a fixed script then terminates with its own input.
    struct Scripted {
        script: Vec<ChannelSymbol>,
        stop_at: usize,
        value: u64,
        received: Vec<ChannelSymbol>,
    }

    impl Scripted {
        fn new(script: Vec<ChannelSymbol>, stop_at: usize, value: u64) -> Self {
            Scripted { script, stop_at, value, received: Vec::new() }
        }
    }

    impl Party for Scripted {
        fn next_action(&mut self, round: usize) -> Action {
            if round >= self.stop_at {
                return Action::Terminate(Output::Value(self.value));
            }
            match self.script.get(round - 1) {
                Some(&s) => Action::Send(s),
                None => Action::Silent,
            }
        }

        fn deliver(&mut self, _round: usize, symbol: ChannelSymbol) {
            self.received.push(symbol);
        }

        fn finish(&mut self) -> Output {
            Output::Value(self.value)
        }
    }

    struct FlipSlots(Vec<usize>);

    impl Adversary for FlipSlots {
        fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
            if self.0.contains(&view.slot_index()) {
                match sent {
                    ChannelSymbol::Silence => ChannelSymbol::SIGMA,
                    _ => ChannelSymbol::Silence,
                }
            } else {
                sent
            }
        }
    }

    fn sigma_script(n: usize) -> Vec<ChannelSymbol> {
        vec![ChannelSymbol::SIGMA; n]
    }

    /// σ in the rounds of the given parity (1 = odd), silence elsewhere.
    fn parity_script(n: usize, parity: usize) -> Vec<ChannelSymbol> {
        (1..=n)
            .map(|i| if i % 2 == parity { ChannelSymbol::SIGMA } else { ChannelSymbol::Silence })
            .collect()
    }

    #[test]
    fn echo_terminating_at_round_three() {
        let schedule = TermSchedule::alternating(10).unwrap();
        let mut ep = Endpoints::new(Scripted::new(parity_script(10, 1), 3, 1), Scripted::new(parity_script(10, 0), 3, 2));
        let rec = run_term(&mut ep, &schedule, &mut Noiseless, &ChannelConfig::unary(), Model::Term).unwrap();
        assert_eq!(rec.ter, Some([3, 3]));
        assert!(rec.noise_pattern().iter().all(Option::is_none));
        // post-termination slots carry silence
        assert!(rec.slots.iter().filter(|s| s.round >= 3).all(|s| s.sent.is_silence()));
    }

    #[test]
    fn term_metrics_examples() {
        let schedule = TermSchedule::alternating(10).unwrap();
        let run = |flips: Vec<usize>| {
            let mut ep = Endpoints::new(Scripted::new(parity_script(10, 1), 5, 0), Scripted::new(parity_script(10, 0), 5, 0));
            let rec = run_term(&mut ep, &schedule, &mut FlipSlots(flips), &ChannelConfig::unary(), Model::Term).unwrap();
            metrics_term(&rec).unwrap()
        };
        let clean = run(vec![]);
        assert_eq!((clean.cc, clean.rc, clean.nc), (4, Some(5), 0));
        assert_eq!(clean.nr.as_f64(), 0.0);

        // slot 0 is Alice's round-1 slot
        let one = run(vec![0]);
        assert_eq!(one.nc, 1);
        assert_eq!(one.nr, NoiseRate::new(1, 4));

        // slot 4 is Alice's round-5 slot: round == rc is not counted
        let at_rc = run(vec![4]);
        assert_eq!(at_rc.nc, 0);
    }

    #[test]
    fn post_termination_corruptions_count() {
        let schedule = TermSchedule::alternating(10).unwrap();
        let mut ep = Endpoints::new(Scripted::new(parity_script(10, 1), 2, 0), Scripted::new(parity_script(10, 0), 7, 0));
        // slot 2 = Alice round 3 (after she terminated at 2)
        let rec = run_term(&mut ep, &schedule, &mut FlipSlots(vec![2]), &ChannelConfig::unary(), Model::Term).unwrap();
        let m = metrics_term(&rec).unwrap();
        assert_eq!(m.rc, Some(7));
        assert_eq!(m.nc, 1);
        assert_eq!(m.cc, 1 + 3);
    }

    #[test]
    fn abort_model_invalidates_early_termination() {
        let schedule = TermSchedule::fully_utilized(6).unwrap();
        let mut ep = Endpoints::new(Scripted::new(sigma_script(6), 4, 1), Scripted::new(sigma_script(6), 99, 2));
        let rec = run_term(&mut ep, &schedule, &mut Noiseless, &ChannelConfig::unary(), Model::Abort).unwrap();
        assert_eq!(rec.outputs, [Output::Abort, Output::Abort]);

        let mut ep = Endpoints::new(Scripted::new(sigma_script(6), 99, 1), Scripted::new(sigma_script(6), 99, 2));
        let rec = run_term(&mut ep, &schedule, &mut Noiseless, &ChannelConfig::unary(), Model::Abort).unwrap();
        assert_eq!(rec.ter, Some([6, 6]));
        assert_eq!(rec.outputs, [Output::Value(1), Output::Value(2)]);
    }

    #[test]
    fn gap_in_schedule_is_config_error() {
        let err = TermSchedule::from_fn(4, |i| i == 1, |i| i == 2).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn letter_outside_alphabet_is_fault() {
        let schedule = TermSchedule::alternating(4).unwrap();
        let mut ep = Endpoints::new(
            Scripted::new(vec![ChannelSymbol::Letter(5)], 99, 0),
            Scripted::new(vec![], 99, 0),
        );
        let err = run_term(&mut ep, &schedule, &mut Noiseless, &ChannelConfig::new(2), Model::Term).unwrap_err();
        assert!(matches!(err, Error::ProtocolFault(_)));
    }

    #[test]
    fn adp_all_silent() {
        let mut ep = Endpoints::new(Scripted::new(vec![], 99, 0), Scripted::new(vec![], 99, 0));
        let rec = run_adp(&mut ep, &mut Noiseless, 5, &ChannelConfig::unary()).unwrap();
        assert_eq!(rec.slots.len(), 10);
        assert!(rec.sent().iter().all(|s| s.is_silence()));
        let m = metrics_adp(&rec).unwrap();
        assert_eq!((m.cc, m.nc), (0, 0));
    }

    #[test]
    fn adp_insertion_and_rates() {
        let mut ep = Endpoints::new(
            Scripted::new(sigma_script(1), 99, 0),
            Scripted::new(sigma_script(1), 99, 0),
        );
        // slot 0: delete Alice's sigma; slots 2,3: insert into silence
        let rec = run_adp(&mut ep, &mut FlipSlots(vec![0, 2, 3]), 3, &ChannelConfig::unary()).unwrap();
        assert!(rec.slots[2].sent.is_silence());
        assert!(rec.slots[2].noise().is_some());
        let m = metrics_adp(&rec).unwrap();
        assert_eq!((m.cc, m.nc), (2, 3));
        assert_eq!(m.nr.as_f64(), 1.5);

        let mut ep = Endpoints::new(Scripted::new(vec![], 99, 0), Scripted::new(vec![], 99, 0));
        let rec = run_adp(&mut ep, &mut FlipSlots(vec![1]), 2, &ChannelConfig::unary()).unwrap();
        let m = metrics_adp(&rec).unwrap();
        assert!(m.nr.is_infinite());
        assert_eq!(m.cc as usize + rec.sent().iter().filter(|s| s.is_silence()).count(), 2 * rec.r_max);
    }

    #[test]
    fn erasure_channel_rejects_alterations() {
        struct ToSilence;
        impl Adversary for ToSilence {
            fn corrupt(&mut self, _: &SlotView<'_>, _: ChannelSymbol) -> ChannelSymbol {
                ChannelSymbol::Silence
            }
        }
        let mut ep = Endpoints::new(Scripted::new(sigma_script(2), 99, 0), Scripted::new(vec![], 99, 0));
        let err = run_adp(&mut ep, &mut ToSilence, 2, &ChannelConfig::erasure(1)).unwrap_err();
        assert!(matches!(err, Error::ProtocolFault(_)));
    }

    #[test]
    fn wrong_model_tag_rejected() {
        let mut ep = Endpoints::new(Scripted::new(vec![], 99, 0), Scripted::new(vec![], 99, 0));
        let rec = run_adp(&mut ep, &mut Noiseless, 2, &ChannelConfig::unary()).unwrap();
        assert!(metrics_term(&rec).is_err());
    }
}
