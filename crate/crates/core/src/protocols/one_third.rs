//! Adaptive-length protocol in the termination model.
//!
//! With `m = c_j·n`: Alice sends `ECC_j(x)` in rounds `1..=m`. Bob decodes
//! to `(x̃, t)`; if `t < (1/2 - ε)·m` he replies with the first `2m - 4t`
//! symbols of the encoding of `y` and terminates with `f(x̃, y)`, otherwise
//! he aborts at once. Alice listens until the hard stop and infers the reply
//! length by scoring every admissible `(ℓ, ŷ)`: mismatches against the
//! length-`ℓ` prefix of `ŷ`'s codeword plus non-silent symbols after `ℓ`.
//! Candidates of minimal score that disagree on `ŷ` make her abort.

use std::sync::Arc;

use super::{Function, Protocol, RunSetup};
use crate::channel::{Action, ChannelConfig, Model, Output, Party, TermSchedule};
use crate::codes::prefix::mismatches;
use crate::codes::PrefixCodeFamily;
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

struct Inner {
    family: PrefixCodeFamily,
    /// `c_j·n`.
    m: usize,
    /// Number of admissible gaps: `t` is admissible iff `t < t_limit`.
    t_limit: usize,
    f: Function,
}

#[derive(Clone)]
pub struct OneThird {
    inner: Arc<Inner>,
    setup: RunSetup,
    code_index: usize,
}

/// Chooses the first code with `c_j·4ε >= c_1` and builds the protocol.
pub fn make_one_third(n: usize, eps: f64, family: PrefixCodeFamily, f: Function) -> Result<OneThird> {
    if family.n() != n {
        return Err(Error::config(format!("family encodes {} bits, protocol needs {n}", family.n())));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::config(format!("eps {eps} outside (0, 1/2)")));
    }
    let lengths = family.lengths();
    let c1 = lengths[0] as f64;
    let code_index = lengths
        .iter()
        .position(|&l| l as f64 * 4.0 * eps >= c1 - 1e-9)
        .ok_or_else(|| Error::config("no code in the family is long enough for this eps"))?;
    let m = lengths[code_index];
    if family.width() < 2 * m {
        return Err(Error::config(format!(
            "replies need a truncation of length {} but the family is only {} wide",
            2 * m,
            family.width()
        )));
    }
    let bound = (0.5 - eps) * m as f64;
    let t_limit = (0..=m).take_while(|&t| (t as f64) < bound - 1e-9).count();
    let r_max = 3 * m + 1;
    let schedule = TermSchedule::split(m, r_max)?;
    Ok(OneThird {
        inner: Arc::new(Inner { family, m, t_limit, f }),
        setup: RunSetup::Term { schedule, model: Model::Term },
        code_index,
    })
}

impl OneThird {
    /// `c_j·n`, the length of Alice's message.
    pub fn message_length(&self) -> usize {
        self.inner.m
    }

    /// Index `j` of the code Alice uses.
    pub fn code_index(&self) -> usize {
        self.code_index
    }

    pub fn family(&self) -> &PrefixCodeFamily {
        &self.inner.family
    }

    /// Largest admissible gap, i.e. the largest `t` for which Bob replies.
    pub fn max_gap(&self) -> usize {
        self.inner.t_limit - 1
    }
}

impl Protocol for OneThird {
    fn name(&self) -> &'static str {
        "one_third"
    }

    fn input_space(&self) -> (u64, u64) {
        let size = self.inner.family.message_count();
        (size, size)
    }

    fn setup(&self) -> &RunSetup {
        &self.setup
    }

    fn channel(&self) -> ChannelConfig {
        ChannelConfig::new(self.inner.family.field().size())
    }

    fn party(&self, role: Role, input: u64) -> Box<dyn Party> {
        let inner = Arc::clone(&self.inner);
        match role {
            Role::Alice => Box::new(Alice { inner, x: input, received: Vec::new() }),
            Role::Bob => Box::new(Bob { inner, y: input, received: Vec::new(), reply: Vec::new(), output: None }),
        }
    }

    fn expected(&self, x: u64, y: u64) -> u64 {
        (self.inner.f)(x, y)
    }
}

struct Alice {
    inner: Arc<Inner>,
    x: u64,
    received: Vec<ChannelSymbol>,
}

impl Party for Alice {
    fn next_action(&mut self, round: usize) -> Action {
        let m = self.inner.m;
        if round > m {
            return Action::Silent;
        }
        match self.inner.family.encode_prefix(self.x, m) {
            Ok(cw) => Action::Send(ChannelSymbol::Letter(u32::from(cw[round - 1]))),
            // an out-of-range input sends nothing
            Err(_) => Action::Silent,
        }
    }

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol) {
        if round > self.inner.m {
            self.received.push(symbol);
        }
    }

    fn finish(&mut self) -> Output {
        match infer_reply(&self.inner, &self.received) {
            Some(y) => Output::Value((self.inner.f)(self.x, y)),
            None => Output::Abort,
        }
    }
}

/// Alice's length inference; `None` when the best candidates disagree.
fn infer_reply(inner: &Inner, received: &[ChannelSymbol]) -> Option<u64> {
    let m = inner.m;
    let full = (2 * m).min(received.len());
    let received = &received[..full];
    // non-silent symbols from position i on
    let mut tail = vec![0usize; full + 1];
    for i in (0..full).rev() {
        tail[i] = tail[i + 1] + usize::from(!received[i].is_silence());
    }
    let lengths: Vec<usize> = (0..inner.t_limit).map(|t| 2 * m - 4 * t).filter(|&l| l <= full).collect();
    let mut best = usize::MAX;
    let mut winner: Option<u64> = None;
    let mut ambiguous = false;
    for y in 0..inner.family.message_count() {
        let cw = inner.family.encode_prefix(y, full).ok()?;
        for &l in &lengths {
            let score = mismatches(&cw[..l], &received[..l]) + tail[l];
            if score < best {
                best = score;
                winner = Some(y);
                ambiguous = false;
            } else if score == best && winner != Some(y) {
                ambiguous = true;
            }
        }
    }
    if ambiguous {
        None
    } else {
        winner
    }
}

struct Bob {
    inner: Arc<Inner>,
    y: u64,
    received: Vec<ChannelSymbol>,
    reply: Vec<u8>,
    output: Option<Output>,
}

impl Party for Bob {
    fn next_action(&mut self, round: usize) -> Action {
        let m = self.inner.m;
        if round <= m {
            return Action::Silent;
        }
        if round == m + 1 {
            let decoded = self.inner.family.decode_prefix(&self.received);
            let reply = match decoded {
                Ok((x, t)) if t < self.inner.t_limit => {
                    self.inner.family.encode_prefix(self.y, 2 * m - 4 * t).ok().map(|r| (x, r.to_vec()))
                }
                _ => None,
            };
            match reply {
                Some((x, r)) => {
                    self.reply = r;
                    self.output = Some(Output::Value((self.inner.f)(x, self.y)));
                }
                None => {
                    self.output = Some(Output::Abort);
                    return Action::Terminate(Output::Abort);
                }
            }
        }
        let k = round - m - 1;
        match self.reply.get(k) {
            Some(&s) => Action::Send(ChannelSymbol::Letter(u32::from(s))),
            None => Action::Terminate(self.output.unwrap_or(Output::Abort)),
        }
    }

    fn deliver(&mut self, round: usize, symbol: ChannelSymbol) {
        if round <= self.inner.m {
            self.received.push(symbol);
        }
    }

    fn finish(&mut self) -> Output {
        self.output.unwrap_or(Output::Abort)
    }
}
