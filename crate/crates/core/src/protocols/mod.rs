//! Noise-resilient protocols, built as pairs of endpoints.

mod br;
mod noiseless;
mod one_third;
mod sample;
mod shared_rand;
mod two_thirds;

use std::sync::Arc;

pub use br::{effective_noise, make_br_half, BrHalf, BrParams, EffectiveNoise, GAMMA_SIZE};
pub use noiseless::NoiselessTree;
pub use one_third::{make_one_third, OneThird};
pub use sample::SampleFull;
pub use shared_rand::{epoch_logs, make_shared_rand, EpochLog, EpochOutcome, SharedRand};
pub use two_thirds::{make_two_thirds, TwoThirds};

use crate::adversaries::PartyFactory;
use crate::channel::{
    run_adp, run_term, Adversary, ChannelConfig, Endpoints, Model, Output, Party, RunRecord, TermSchedule,
};
use crate::error::Result;
use crate::symbol::Role;

/// The function the parties compute.
pub type Function = Arc<dyn Fn(u64, u64) -> u64 + Send + Sync>;

/// `f(x, y) = (x, y)` packed as `x·2^bits + y`, where `bits` is the width
/// of Bob's input.
pub fn identity_function(bits: u32) -> Function {
    Arc::new(move |x, y| (x << bits) | y)
}

/// How a protocol is executed.
#[derive(Clone, Debug)]
pub enum RunSetup {
    Term { schedule: TermSchedule, model: Model },
    Adp { r_max: usize },
}

impl RunSetup {
    pub fn r_max(&self) -> usize {
        match self {
            RunSetup::Term { schedule, .. } => schedule.r_max(),
            RunSetup::Adp { r_max } => *r_max,
        }
    }

    pub fn model(&self) -> Model {
        match self {
            RunSetup::Term { model, .. } => *model,
            RunSetup::Adp { .. } => Model::Adp,
        }
    }
}

/// A two-party protocol over input domains `0..|X|` and `0..|Y|`.
pub trait Protocol: Send + Sync {
    fn name(&self) -> &'static str;

    /// `(|X|, |Y|)`.
    fn input_space(&self) -> (u64, u64);

    fn setup(&self) -> &RunSetup;

    fn channel(&self) -> ChannelConfig;

    fn party(&self, role: Role, input: u64) -> Box<dyn Party>;

    /// The correct output on `(x, y)`.
    fn expected(&self, x: u64, y: u64) -> u64;
}

/// Endpoint factory for attacks that shadow the parties.
pub fn factory(protocol: Arc<dyn Protocol>) -> PartyFactory {
    Arc::new(move |role, input| protocol.party(role, input))
}

/// Runs `protocol` on `(x, y)` against `adversary`.
pub fn run(protocol: &dyn Protocol, x: u64, y: u64, adversary: &mut dyn Adversary) -> Result<RunRecord> {
    let mut endpoints = Endpoints { alice: protocol.party(Role::Alice, x), bob: protocol.party(Role::Bob, y) };
    let channel = protocol.channel();
    match protocol.setup() {
        RunSetup::Term { schedule, model } => run_term(&mut endpoints, schedule, adversary, &channel, *model),
        RunSetup::Adp { r_max } => run_adp(&mut endpoints, adversary, *r_max, &channel),
    }
}

/// How a run ended relative to the correct value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Both parties output the correct value.
    Correct,
    /// Some party output an incorrect value.
    Wrong,
    /// No party is wrong but at least one aborted.
    Abort,
    /// The run violated the channel contract.
    Fault,
}

impl Outcome {
    pub fn classify(record: &RunRecord, expected: u64) -> Outcome {
        let outs = [record.output(Role::Alice), record.output(Role::Bob)];
        if outs.iter().any(|o| matches!(o, Output::Value(v) if *v != expected)) {
            Outcome::Wrong
        } else if outs.contains(&Output::Abort) {
            Outcome::Abort
        } else {
            Outcome::Correct
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Correct => "correct",
            Outcome::Wrong => "wrong",
            Outcome::Abort => "abort",
            Outcome::Fault => "fault",
        }
    }
}

impl std::str::FromStr for Outcome {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "correct" => Outcome::Correct,
            "wrong" => Outcome::Wrong,
            "abort" => Outcome::Abort,
            "fault" => Outcome::Fault,
            other => return Err(crate::error::Error::config(format!("unknown outcome {other:?}"))),
        })
    }
}
