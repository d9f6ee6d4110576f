//! Emulating a noiseless protocol tree over the adaptive-order channel.
//!
//! Each party keeps a set of edge announcements. An announcement `(e, s)`
//! made at character position `p` extends the end of the party's own
//! announcement that started at position `p − e` (`e = 0` is the root) by at
//! most two steps `s`. Every round, a party tree-decodes the other's
//! character stream, rebuilds the longest path it believes in, and if the
//! next edge is its own it announces it. The path follows the party's own
//! correct bit on its own levels when someone announced that edge, and on the
//! other's levels the child the other announced most often (most recently on
//! ties). A party with nothing new to say re-announces its whole path from
//! the root, so edges lost to noise are repaired.
//!
//! Announcements are serialized as `'<' bin(e) '>' s '>'` over a five-letter
//! alphabet that also has an idle character. The character stream is
//! tree-code encoded and each label is sent by silence encoding: one σ in a
//! block of `label_size` mini-rounds.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::{NoiselessTree, Protocol, RunSetup};
use crate::channel::{Action, ChannelConfig, Output, Party, RunRecord};
use crate::codes::tree::BeamDecoder;
use crate::codes::{se_decode, SilenceDecodeResult, TreeCode};
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

/// Size of the announcement alphabet `{<, 0, 1, >, idle}`.
pub const GAMMA_SIZE: u8 = 5;

const OPEN: u8 = 0;
const ZERO: u8 = 1;
const ONE: u8 = 2;
const CLOSE: u8 = 3;
const IDLE: u8 = 4;

/// Decoder list: candidates within this distance of the best are kept ...
const DECODE_SLACK: usize = usize::MAX / 2;
/// ... up to this many (at least the number of windowed-code states).
const DECODE_CAP: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Announcement {
    anchor: usize,
    steps: Vec<u8>,
}

fn serialize(a: &Announcement) -> Vec<u8> {
    let mut out = vec![OPEN];
    if a.anchor == 0 {
        out.push(ZERO);
    } else {
        let bits = usize::BITS - a.anchor.leading_zeros();
        out.extend((0..bits).rev().map(|i| if (a.anchor >> i) & 1 == 1 { ONE } else { ZERO }));
    }
    out.push(CLOSE);
    out.extend(a.steps.iter().map(|&b| if b == 1 { ONE } else { ZERO }));
    out.push(CLOSE);
    out
}

/// Parses a character stream into announcements keyed by the position of
/// their `'<'`; malformed fragments are dropped.
fn parse(chars: &[u8]) -> Vec<(usize, Announcement)> {
    enum State {
        Idle,
        Anchor(usize, bool),
        Steps(usize, Vec<u8>),
    }
    let mut out = Vec::new();
    let mut state = State::Idle;
    let mut start = 0;
    for (pos, &c) in chars.iter().enumerate() {
        state = match (state, c) {
            (_, OPEN) => {
                start = pos;
                State::Anchor(0, false)
            }
            (State::Anchor(e, _), ZERO | ONE) if e < 1 << 20 => State::Anchor(2 * e + usize::from(c == ONE), true),
            (State::Anchor(e, true), CLOSE) => State::Steps(e, Vec::new()),
            (State::Steps(e, mut s), ZERO | ONE) if s.len() < 2 => {
                s.push(u8::from(c == ONE));
                State::Steps(e, s)
            }
            (State::Steps(e, s), CLOSE) => {
                out.push((start, Announcement { anchor: e, steps: s }));
                State::Idle
            }
            _ => State::Idle,
        };
    }
    out
}

/// End nodes of a party's announcements, by start position. An
/// announcement anchored where no announcement started has no end.
fn ends(anns: &[(usize, Announcement)]) -> HashMap<usize, Vec<u8>> {
    let mut ends: HashMap<usize, Vec<u8>> = HashMap::with_capacity(anns.len());
    for (pos, a) in anns {
        let start = match a.anchor {
            0 => Some(Vec::new()),
            e => pos.checked_sub(e).and_then(|q| ends.get(&q)).cloned(),
        };
        if let Some(mut end) = start {
            end.extend_from_slice(&a.steps);
            ends.insert(*pos, end);
        }
    }
    ends
}

/// One party's side of the emulation, independent of how labels travel.
pub(crate) struct BrCore {
    role: Role,
    input: u64,
    tree: Arc<NoiselessTree>,
    code: Arc<TreeCode>,
    own_chars: Vec<u8>,
    queue: VecDeque<u8>,
    own: Vec<(usize, Announcement)>,
    own_ends: HashMap<usize, Vec<u8>>,
    pending: Option<(usize, Announcement)>,
    decoder: BeamDecoder,
}

impl BrCore {
    pub(crate) fn new(role: Role, input: u64, tree: Arc<NoiselessTree>, code: Arc<TreeCode>) -> Self {
        BrCore {
            role,
            input,
            tree,
            own_chars: Vec::new(),
            queue: VecDeque::new(),
            own: Vec::new(),
            own_ends: HashMap::new(),
            pending: None,
            decoder: BeamDecoder::new(&code, DECODE_SLACK, DECODE_CAP),
            code,
        }
    }

    /// Label to send in the next BR round.
    pub(crate) fn next_label(&mut self) -> u32 {
        if self.queue.is_empty() {
            match self.next_announcement() {
                Some(a) => {
                    self.queue.extend(serialize(&a));
                    self.pending = Some((self.own_chars.len(), a));
                }
                None => self.queue.push_back(IDLE),
            }
        }
        let c = self.queue.pop_front().expect("queue was filled");
        let label = self.code.encode_step(&self.own_chars, c).expect("hashed tree codes are unbounded");
        self.own_chars.push(c);
        if self.queue.is_empty() {
            if let Some((pos, a)) = self.pending.take() {
                let mut end = match a.anchor {
                    0 => Vec::new(),
                    e => self.own_ends[&(pos - e)].clone(),
                };
                end.extend_from_slice(&a.steps);
                self.own_ends.insert(pos, end);
                self.own.push((pos, a));
            }
        }
        label
    }

    /// Records the label received in the current BR round (`None` for ⊥).
    pub(crate) fn receive(&mut self, label: Option<u32>) {
        self.decoder.push(&self.code, label);
    }

    pub(crate) fn path(&self) -> Vec<u8> {
        let other = parse(self.decoder.best().0);
        let other_ends = ends(&other);
        let mut announced: HashSet<(Vec<u8>, u8)> = HashSet::new();
        // votes for each child the other announced: (count, last position)
        let mut votes: HashMap<(Vec<u8>, u8), (usize, usize)> = HashMap::new();
        for (anns, ends, theirs) in [(&self.own, &self.own_ends, false), (&other, &other_ends, true)] {
            for (pos, a) in anns {
                let Some(end) = ends.get(pos) else { continue };
                let mut node = end[..end.len() - a.steps.len()].to_vec();
                for &b in &a.steps {
                    announced.insert((node.clone(), b));
                    if theirs {
                        let v = votes.entry((node.clone(), b)).or_default();
                        *v = (v.0 + 1, *pos);
                    }
                    node.push(b);
                }
            }
        }
        let mut path = Vec::new();
        while path.len() < self.tree.depth() {
            let next = if NoiselessTree::owner(path.len()) == self.role {
                let b = self.tree.bit(self.role, self.input, &path);
                announced.contains(&(path.clone(), b)).then_some(b)
            } else {
                let mut key = (path.clone(), 0);
                let zero = votes.get(&key).copied();
                key.1 = 1;
                let one = votes.get(&key).copied();
                match (zero, one) {
                    (None, None) => None,
                    (z, o) => Some(u8::from(o > z)),
                }
            };
            match next {
                Some(b) => path.push(b),
                None => break,
            }
        }
        path
    }

    /// Extends the path by our next edge if it is ours to announce, and
    /// otherwise continues re-announcing the path from the root.
    fn next_announcement(&self) -> Option<Announcement> {
        let path = self.path();
        let pos = self.own_chars.len();
        let own_turn = path.len() < self.tree.depth() && NoiselessTree::owner(path.len()) == self.role;
        let mut target = path.clone();
        if own_turn {
            target.push(self.tree.bit(self.role, self.input, &path));
        }
        // deepest own end on the target that falls short of it
        let (anchor, start) = self
            .own_ends
            .iter()
            .filter(|(_, e)| e.len() < target.len() && target.starts_with(e))
            .map(|(&q, e)| (pos - q, e.len()))
            .max_by_key(|&(off, len)| (len, std::cmp::Reverse(off)))
            .unwrap_or((0, 0));
        if own_turn {
            let mut steps = target[start..].to_vec();
            steps.truncate(2);
            return Some(Announcement { anchor, steps });
        }
        if path.is_empty() {
            return None;
        }
        // re-announce: continue the chain of the most recent announcement if
        // it lies on the path, else start over from the root
        let chain = self
            .own
            .last()
            .and_then(|(q, _)| self.own_ends.get(q).map(|e| (pos - q, e)))
            .filter(|(_, e)| e.len() < path.len() && path.starts_with(e));
        let (anchor, start) = chain.map_or((0, 0), |(off, e)| (off, e.len()));
        Some(Announcement { anchor, steps: path[start..(start + 2).min(path.len())].to_vec() })
    }

    pub(crate) fn output(&self) -> Output {
        self.tree.leaf_value(&self.path()).map_or(Output::Abort, Output::Value)
    }
}

/// Parameters of the emulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrParams {
    pub eps: f64,
    /// `N = ⌈c_N·T/ε⌉` BR rounds.
    pub c_n: f64,
    /// Tree-code labels; also the SE_1 block length.
    pub label_size: u32,
    pub alpha: f64,
    /// Depth to which the tree code is verified.
    pub verified_depth: usize,
    /// Window of the tree-code labeling, in characters.
    pub memory: usize,
    pub seed: u64,
}

impl Default for BrParams {
    fn default() -> Self {
        BrParams { eps: 0.2, c_n: 4.0, label_size: 64, alpha: 0.5, verified_depth: 3, memory: 4, seed: 0 }
    }
}

impl BrParams {
    pub fn rounds(&self, depth: usize) -> usize {
        (self.c_n * depth as f64 / self.eps - 1e-9).ceil() as usize
    }
}

#[derive(Clone)]
pub struct BrHalf {
    tree: Arc<NoiselessTree>,
    code: Arc<TreeCode>,
    br_rounds: usize,
    label_size: usize,
    setup: RunSetup,
}

/// Builds the emulation of `tree` with a freshly generated tree code.
pub fn make_br_half(tree: NoiselessTree, params: BrParams) -> Result<BrHalf> {
    if !(params.eps > 0.0 && params.eps < 0.5) {
        return Err(Error::config(format!("eps {} outside (0, 1/2)", params.eps)));
    }
    let code = TreeCode::windowed_verified(
        GAMMA_SIZE,
        params.label_size,
        params.alpha,
        params.memory,
        params.verified_depth,
        params.seed,
    )?;
    let rounds = params.rounds(tree.depth());
    BrHalf::with_code(tree, code, rounds)
}

impl BrHalf {
    /// Uses a given tree code over the announcement alphabet.
    pub fn with_code(tree: NoiselessTree, code: TreeCode, br_rounds: usize) -> Result<Self> {
        if !code.is_verified() {
            return Err(Error::Precondition("the tree code has not been verified".into()));
        }
        if code.arity() != GAMMA_SIZE || code.depth().is_some_and(|d| d < br_rounds) {
            return Err(Error::config("the tree code must be 5-ary and at least N levels deep"));
        }
        if br_rounds == 0 {
            return Err(Error::config("the emulation needs at least one round"));
        }
        let label_size = code.label_size() as usize;
        Ok(BrHalf {
            tree: Arc::new(tree),
            code: Arc::new(code),
            br_rounds,
            label_size,
            setup: RunSetup::Adp { r_max: br_rounds * label_size },
        })
    }

    pub fn br_rounds(&self) -> usize {
        self.br_rounds
    }

    pub fn label_size(&self) -> usize {
        self.label_size
    }

    pub fn tree(&self) -> &NoiselessTree {
        &self.tree
    }

    pub fn code(&self) -> &TreeCode {
        &self.code
    }
}

impl Protocol for BrHalf {
    fn name(&self) -> &'static str {
        "br_half"
    }

    fn input_space(&self) -> (u64, u64) {
        let size = 1u64 << self.tree.input_bits();
        (size, size)
    }

    fn setup(&self) -> &RunSetup {
        &self.setup
    }

    fn channel(&self) -> ChannelConfig {
        ChannelConfig::unary()
    }

    fn party(&self, role: Role, input: u64) -> Box<dyn Party> {
        Box::new(BrParty {
            core: BrCore::new(role, input, Arc::clone(&self.tree), Arc::clone(&self.code)),
            label_size: self.label_size,
            label: 0,
            block: Vec::with_capacity(self.label_size),
        })
    }

    fn expected(&self, x: u64, y: u64) -> u64 {
        self.tree.evaluate(x, y)
    }
}

struct BrParty {
    core: BrCore,
    label_size: usize,
    label: usize,
    block: Vec<ChannelSymbol>,
}

impl Party for BrParty {
    fn next_action(&mut self, round: usize) -> Action {
        let mini = (round - 1) % self.label_size;
        if mini == 0 {
            self.label = self.core.next_label() as usize;
        }
        if mini == self.label {
            Action::Send(ChannelSymbol::SIGMA)
        } else {
            Action::Silent
        }
    }

    fn deliver(&mut self, _round: usize, symbol: ChannelSymbol) {
        self.block.push(symbol);
        if self.block.len() == self.label_size {
            self.core.receive(decode_block(&self.block));
            self.block.clear();
        }
    }

    fn finish(&mut self) -> Output {
        self.core.output()
    }
}

fn decode_block(block: &[ChannelSymbol]) -> Option<u32> {
    match se_decode(block, 1, block.len()) {
        Ok(SilenceDecodeResult::Value { index, .. }) => Some(index as u32 - 1),
        _ => None,
    }
}

/// Effective noise per BR round: an erased label costs 1, a wrongly
/// decoded label costs 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveNoise {
    /// `[charge on Alice's label, charge on Bob's label]` per BR round.
    pub per_round: Vec<[u32; 2]>,
}

impl EffectiveNoise {
    /// `(N_A, N_B, N)` over the 1-based inclusive BR-round interval
    /// `[i, j]`, where `N_A` charges labels sent by Alice.
    pub fn interval(&self, i: usize, j: usize) -> (u32, u32, u32) {
        let (mut a, mut b) = (0, 0);
        for r in self.per_round.iter().take(j).skip(i.saturating_sub(1)) {
            a += r[0];
            b += r[1];
        }
        (a, b, a + b)
    }

    pub fn total(&self) -> u32 {
        self.interval(1, self.per_round.len()).2
    }

    pub fn rounds(&self) -> usize {
        self.per_round.len()
    }
}

/// Recomputes the effective noise of an emulation run from its record.
pub fn effective_noise(record: &RunRecord, label_size: usize) -> Result<EffectiveNoise> {
    if label_size == 0 || !record.r_max.is_multiple_of(label_size) {
        return Err(Error::config("record length is not a whole number of label blocks"));
    }
    let mut per_round = vec![[0u32; 2]; record.r_max / label_size];
    for who in [Role::Alice, Role::Bob] {
        let slots: Vec<_> = record.slots_of(who).collect();
        for (r, block) in slots.chunks(label_size).enumerate() {
            let sent: Vec<_> = block.iter().map(|s| s.sent).collect();
            let got: Vec<_> = block.iter().map(|s| s.delivered).collect();
            per_round[r][who.index()] = match (decode_block(&sent), decode_block(&got)) {
                (_, None) => 1,
                (s, Some(d)) if s == Some(d) => 0,
                _ => 2,
            };
        }
    }
    Ok(EffectiveNoise { per_round })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::PatternAdversary;
    use crate::channel::Noiseless;
    use crate::protocols::{run, Outcome};

    #[test]
    fn serialization_round_trip() {
        let anns = vec![
            Announcement { anchor: 0, steps: vec![1] },
            Announcement { anchor: 1, steps: vec![0, 1] },
            Announcement { anchor: 6, steps: vec![] },
        ];
        let mut chars = vec![IDLE, CLOSE];
        for a in &anns {
            chars.extend(serialize(a));
            chars.push(IDLE);
        }
        assert_eq!(serialize(&anns[1]), vec![OPEN, ONE, CLOSE, ZERO, ONE, CLOSE]);
        let parsed = parse(&chars);
        assert_eq!(parsed.iter().map(|p| p.0).collect::<Vec<_>>(), vec![2, 8, 15]);
        assert_eq!(parsed.into_iter().map(|p| p.1).collect::<Vec<_>>(), anns);
        // a fragment interrupted by a new '<' is dropped
        assert_eq!(parse(&[OPEN, ONE, OPEN, ZERO, CLOSE, ONE, CLOSE]), vec![(2, Announcement { anchor: 0, steps: vec![1] })]);
    }

    fn protocol(depth: usize) -> BrHalf {
        make_br_half(NoiselessTree::identity_exchange(depth).unwrap(), BrParams { seed: 3, ..BrParams::default() }).unwrap()
    }

    #[test]
    fn noiseless_emulation_matches_tree_walk() {
        let p = protocol(4);
        for x in 0..4 {
            for y in 0..4 {
                let rec = run(&p, x, y, &mut Noiseless).unwrap();
                assert_eq!(Outcome::classify(&rec, p.expected(x, y)), Outcome::Correct, "{x} {y}");
                assert_eq!(rec.metrics().unwrap().cc, 2 * p.br_rounds() as u64);
            }
        }
    }

    #[test]
    fn single_corruption_erases_one_label() {
        let p = protocol(4);
        // insert σ into Alice's second mini-slot of round 1
        let rec = run(&p, 1, 2, &mut PatternAdversary::new(vec![(2, 0)])).unwrap();
        let noise = effective_noise(&rec, p.label_size()).unwrap();
        assert_eq!(noise.total(), 1);
        assert_eq!(noise.interval(1, 1), (1, 0, 1));
        assert_eq!(noise.interval(2, p.br_rounds()), (0, 0, 0));
        assert_eq!(Outcome::classify(&rec, p.expected(1, 2)), Outcome::Correct);
    }

    #[test]
    fn unverified_code_is_rejected() {
        let tree = NoiselessTree::identity_exchange(2).unwrap();
        let code = TreeCode::random_unverified(5, 4, 64, 0).unwrap();
        assert!(matches!(BrHalf::with_code(tree, code, 4), Err(Error::Precondition(_))));
    }
}
