//! A small fully-utilized protocol for the abort model.
//!
//! Both parties speak in every round. In round `r` each sends bit
//! `(r-1) mod n` of its input XORed with the last bit it received, and at the
//! end recovers the other's input from the last `n` rounds.

use std::sync::Arc;

use super::{identity_function, Function, Protocol, RunSetup};
use crate::channel::{Action, ChannelConfig, Model, Output, Party, TermSchedule};
use crate::error::{Error, Result};
use crate::symbol::{ChannelSymbol, Role};

#[derive(Clone)]
pub struct SampleFull {
    bits: usize,
    f: Function,
    setup: RunSetup,
}

impl SampleFull {
    pub fn new(bits: usize, r_max: usize) -> Result<Self> {
        if bits == 0 || bits > 32 || r_max <= bits {
            return Err(Error::config(format!("sample protocol needs 1 <= bits <= 32 and R_max > bits, got {bits}, {r_max}")));
        }
        let schedule = TermSchedule::fully_utilized(r_max)?;
        Ok(SampleFull { bits, f: identity_function(bits as u32), setup: RunSetup::Term { schedule, model: Model::Abort } })
    }
}

impl Protocol for SampleFull {
    fn name(&self) -> &'static str {
        "sample_full"
    }

    fn input_space(&self) -> (u64, u64) {
        (1 << self.bits, 1 << self.bits)
    }

    fn setup(&self) -> &RunSetup {
        &self.setup
    }

    fn channel(&self) -> ChannelConfig {
        ChannelConfig::new(2)
    }

    fn party(&self, role: Role, input: u64) -> Box<dyn Party> {
        Box::new(Echoer { role, bits: self.bits, input, f: Arc::clone(&self.f), sent: Vec::new(), heard: Vec::new() })
    }

    fn expected(&self, x: u64, y: u64) -> u64 {
        (self.f)(x, y)
    }
}

struct Echoer {
    role: Role,
    bits: usize,
    input: u64,
    f: Function,
    sent: Vec<u8>,
    heard: Vec<u8>,
}

fn bit(s: ChannelSymbol) -> u8 {
    u8::from(s == ChannelSymbol::Letter(1))
}

impl Party for Echoer {
    fn next_action(&mut self, round: usize) -> Action {
        let own = ((self.input >> ((round - 1) % self.bits)) & 1) as u8;
        let b = own ^ self.heard.last().copied().unwrap_or(0);
        self.sent.push(b);
        Action::Send(ChannelSymbol::Letter(u32::from(b)))
    }

    fn deliver(&mut self, _round: usize, symbol: ChannelSymbol) {
        self.heard.push(bit(symbol));
    }

    fn finish(&mut self) -> Output {
        // the last `bits` rounds carry every input bit once
        let mut other = 0u64;
        let len = self.heard.len().min(self.sent.len());
        for r in len.saturating_sub(self.bits)..len {
            // the other side masked with what it heard from us in round r-1
            let mask = if r == 0 { 0 } else { self.sent[r - 1] };
            other |= u64::from(self.heard[r] ^ mask) << (r % self.bits);
        }
        Output::Value(match self.role {
            Role::Alice => (self.f)(self.input, other),
            Role::Bob => (self.f)(other, self.input),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Noiseless;
    use crate::protocols::{run, Outcome};

    #[test]
    fn noiseless_run_is_correct_and_full() {
        let p = SampleFull::new(16, 40).unwrap();
        let rec = run(&p, 0xBEEF, 0x1234, &mut Noiseless).unwrap();
        assert_eq!(Outcome::classify(&rec, p.expected(0xBEEF, 0x1234)), Outcome::Correct);
        assert_eq!(rec.metrics().unwrap().cc, 78);
    }
}
