//! Experiment harness: builds a protocol/adversary pair from a flat
//! configuration, runs a batch of trials and reports one CSV row per run.
//!
//! Every trial derives its own seed from the experiment seed and the trial
//! index, so rows do not depend on execution order and trials run in
//! parallel.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{
    alternative_count, enumerate_patterns, pattern_count, Deleter, MidpointAdversary, PatternAdversary,
    RandomBudgeted, RollingAdversary,
};
use crate::channel::{Adversary, Model, Noiseless};
use crate::codes::{gen_prefix_family, Field};
use crate::error::{Error, Result};
use crate::protocols::{
    factory, identity_function, make_br_half, make_one_third, make_shared_rand, make_two_thirds, run, BrParams,
    NoiselessTree, Outcome, Protocol, RunSetup, SampleFull,
};
use crate::rate::NoiseRate;

/// Protocols addressable by name.
pub const PROTOCOLS: [&str; 6] = ["one_third", "two_thirds", "br_half", "shared_rand", "shared_rand_erasure", "sample_full"];

/// Largest enumeration the harness will start.
const MAX_PATTERNS: u128 = 1 << 32;

/// Experiment configuration. Field names match the CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: String,
    #[serde(default = "default_adversary")]
    pub adversary: String,
    /// Expected channel model (`term`, `abort`, `adp`); checked against the
    /// protocol when given.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Input bits (one_third, sample_full) or input-domain size (two_thirds).
    #[serde(default)]
    pub n: Option<usize>,
    /// Silence-encoding repetition of two_thirds.
    #[serde(default)]
    pub k: Option<usize>,
    /// Depth of the emulated tree (br_half, shared_rand).
    #[serde(default)]
    pub depth: Option<usize>,
    /// Field size of the one_third code.
    #[serde(default)]
    pub field: Option<u32>,
    /// Constant `c_N` in the number of emulation rounds.
    #[serde(default)]
    pub c_n: Option<f64>,
    /// Round budget of sample_full.
    #[serde(default)]
    pub r_max: Option<usize>,
    /// Fixed inputs; drawn per trial when absent.
    #[serde(default)]
    pub x: Option<u64>,
    #[serde(default)]
    pub y: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Noise-rate budget; defaults to the protocol's resilience.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub summary: bool,
}

fn default_adversary() -> String {
    "none".into()
}

fn default_trials() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(protocol: impl Into<String>) -> Self {
        ExperimentConfig {
            protocol: protocol.into(),
            adversary: default_adversary(),
            model: None,
            epsilon: None,
            n: None,
            k: None,
            depth: None,
            field: None,
            c_n: None,
            r_max: None,
            x: None,
            y: None,
            trials: 1,
            seed: 0,
            threshold: None,
            out: None,
            summary: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    fn eps(&self, default: f64) -> f64 {
        self.epsilon.unwrap_or(default)
    }
}

/// Adversary named in a configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdversarySpec {
    None,
    Random(f64),
    Delete(f64),
    Midpoint,
    Rolling,
    Enumerate(usize),
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(n, a)| (n, Some(a)));
        let prob = |a: Option<&str>| -> Result<f64> {
            let p: f64 = a
                .ok_or_else(|| Error::config(format!("adversary {name} needs a probability, e.g. {name}:0.01")))?
                .parse()
                .map_err(|_| Error::config(format!("bad probability in {s:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("probability {p} outside [0, 1]")));
            }
            Ok(p)
        };
        Ok(match (name, arg) {
            ("none", None) => AdversarySpec::None,
            ("random", a) => AdversarySpec::Random(prob(a)?),
            ("delete", a) => AdversarySpec::Delete(prob(a)?),
            ("midpoint", None) => AdversarySpec::Midpoint,
            ("rolling", None) => AdversarySpec::Rolling,
            ("enumerate", Some(w)) => {
                AdversarySpec::Enumerate(w.parse().map_err(|_| Error::config(format!("bad weight in {s:?}")))?)
            }
            _ => return Err(Error::config(format!("unknown adversary {s:?}"))),
        })
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversarySpec::None => f.write_str("none"),
            AdversarySpec::Random(p) => write!(f, "random:{p}"),
            AdversarySpec::Delete(p) => write!(f, "delete:{p}"),
            AdversarySpec::Midpoint => f.write_str("midpoint"),
            AdversarySpec::Rolling => f.write_str("rolling"),
            AdversarySpec::Enumerate(w) => write!(f, "enumerate:{w}"),
        }
    }
}

/// One run of an experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub protocol: String,
    pub adversary: String,
    pub trial: u64,
    pub seed: u64,
    pub cc: u64,
    pub nc: u64,
    /// `nc / cc` with six fractional digits, or `inf`.
    pub nr: String,
    pub rounds: u64,
    pub outcome: Outcome,
    pub within_budget: bool,
}

impl ReportRow {
    pub fn rate(&self) -> NoiseRate {
        NoiseRate::new(self.nc, self.cc)
    }

    /// A wrong output although the noise stayed within budget.
    pub fn is_suite_failure(&self) -> bool {
        self.outcome == Outcome::Wrong && self.within_budget
    }
}

/// A validated experiment, ready to run trials.
pub struct Experiment {
    config: ExperimentConfig,
    adversary: AdversarySpec,
    threshold: f64,
    /// `None` when the protocol depends on the trial seed.
    protocol: Option<Arc<dyn Protocol>>,
}

impl Experiment {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        if config.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        let adversary: AdversarySpec = config.adversary.parse()?;
        // build once to validate, and keep it unless it is seeded per trial
        let probe = build_protocol(config, config.seed)?;
        let per_trial = probe.name().starts_with("shared_rand");
        if let Some(model) = &config.model {
            let want: Model = serde_json::from_value(serde_json::Value::String(model.clone()))
                .map_err(|_| Error::config(format!("unknown model {model:?}")))?;
            if want != probe.setup().model() {
                return Err(Error::config(format!("{} runs in the {:?} model, not {model}", probe.name(), probe.setup().model())));
            }
        }
        match (adversary, probe.setup()) {
            (AdversarySpec::Midpoint, RunSetup::Adp { .. }) => {
                return Err(Error::config("the midpoint attack needs a fixed speaking order"));
            }
            (AdversarySpec::Rolling, RunSetup::Term { schedule, model })
                if !schedule.is_fully_utilized() || *model != Model::Abort =>
            {
                return Err(Error::config("the rolling attack needs a fully-utilized abort-model protocol"));
            }
            (AdversarySpec::Rolling, RunSetup::Adp { .. }) => {
                return Err(Error::config("the rolling attack needs a fully-utilized abort-model protocol"));
            }
            (AdversarySpec::Midpoint | AdversarySpec::Rolling, _) => {
                let (xs, ys) = probe.input_space();
                if xs < 2 || ys < 2 {
                    return Err(Error::config("attacks need at least two inputs per party"));
                }
            }
            (AdversarySpec::Enumerate(w), _) => {
                let count = pattern_count(slot_count(probe.as_ref()), w, alternative_count(&probe.channel()));
                if count > MAX_PATTERNS {
                    return Err(Error::config(format!("{count} noise patterns is too many to enumerate")));
                }
            }
            _ => {}
        }
        for (v, size, who) in [(config.x, probe.input_space().0, "x"), (config.y, probe.input_space().1, "y")] {
            if v.is_some_and(|v| v >= size) {
                return Err(Error::config(format!("input {who} outside 0..{size}")));
            }
        }
        let threshold = config.threshold.unwrap_or_else(|| default_threshold(config, probe.name()));
        Ok(Experiment {
            config: config.clone(),
            adversary,
            threshold,
            protocol: (!per_trial).then_some(probe),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Number of rows the experiment produces.
    pub fn row_count(&self) -> u128 {
        match (self.adversary, &self.protocol) {
            (AdversarySpec::Enumerate(w), Some(p)) => pattern_count(slot_count(p.as_ref()), w, alternative_count(&p.channel())),
            _ => self.config.trials as u128,
        }
    }

    /// Seed of trial `trial`, independent of every other trial.
    pub fn trial_seed(&self, trial: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(trial);
        rng.gen()
    }

    /// Runs one randomized trial. Enumerations go through
    /// [`for_each_row`](Self::for_each_row).
    pub fn run_trial(&self, trial: u64) -> ReportRow {
        let seed = self.trial_seed(trial);
        let protocol = match &self.protocol {
            Some(p) => Arc::clone(p),
            None => match build_protocol(&self.config, seed) {
                Ok(p) => p,
                Err(_) => return self.fault_row("?", trial, seed),
            },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (xs, ys) = protocol.input_space();
        let x = self.config.x.unwrap_or_else(|| rng.gen_range(0..xs));
        let y = self.config.y.unwrap_or_else(|| rng.gen_range(0..ys));
        let r_max = protocol.setup().r_max();
        let mut adversary: Box<dyn Adversary> = match self.adversary {
            AdversarySpec::None | AdversarySpec::Enumerate(_) => Box::new(Noiseless),
            AdversarySpec::Random(p) => Box::new(RandomBudgeted::new(p, rng.gen())),
            AdversarySpec::Delete(p) => Box::new(Deleter::new(p, rng.gen())),
            AdversarySpec::Midpoint => {
                let x_alt = other_value(&mut rng, x, xs);
                let y_alt = other_value(&mut rng, y, ys);
                Box::new(MidpointAdversary::new(&factory(Arc::clone(&protocol)), x, x_alt, y, y_alt, r_max))
            }
            AdversarySpec::Rolling => {
                let y_alt = other_value(&mut rng, y, ys);
                Box::new(RollingAdversary::new(&factory(Arc::clone(&protocol)), y, y_alt, r_max))
            }
        };
        self.row(protocol.as_ref(), x, y, adversary.as_mut(), trial, seed)
    }

    /// Streams every row in trial order without keeping them.
    pub fn for_each_row(&self, mut f: impl FnMut(ReportRow)) {
        match (self.adversary, &self.protocol) {
            (AdversarySpec::Enumerate(w), Some(p)) => {
                let x = self.config.x.unwrap_or(0);
                let y = self.config.y.unwrap_or(0);
                let patterns = enumerate_patterns(slot_count(p.as_ref()), w, alternative_count(&p.channel()));
                for (trial, pattern) in patterns.enumerate() {
                    let mut adversary = PatternAdversary::new(pattern);
                    f(self.row(p.as_ref(), x, y, &mut adversary, trial as u64, self.config.seed));
                }
            }
            _ => (0..self.config.trials as u64).for_each(|t| f(self.run_trial(t))),
        }
    }

    /// All rows, ordered by trial. Randomized trials run in parallel.
    pub fn run(&self) -> Vec<ReportRow> {
        match self.adversary {
            AdversarySpec::Enumerate(_) => {
                let mut rows = Vec::new();
                self.for_each_row(|r| rows.push(r));
                rows
            }
            _ => (0..self.config.trials as u64).into_par_iter().map(|t| self.run_trial(t)).collect(),
        }
    }

    fn row(&self, protocol: &dyn Protocol, x: u64, y: u64, adversary: &mut dyn Adversary, trial: u64, seed: u64) -> ReportRow {
        let record = run(protocol, x, y, adversary);
        let Ok((record, metrics)) = record.and_then(|r| r.metrics().map(|m| (r, m))) else {
            return self.fault_row(protocol.name(), trial, seed);
        };
        ReportRow {
            protocol: protocol.name().to_string(),
            adversary: self.adversary.to_string(),
            trial,
            seed,
            cc: metrics.cc,
            nc: metrics.nc,
            nr: metrics.nr.to_decimal(),
            rounds: record.rounds() as u64,
            outcome: Outcome::classify(&record, protocol.expected(x, y)),
            within_budget: metrics.nr.as_f64() <= self.threshold + 1e-12,
        }
    }

    fn fault_row(&self, protocol: &str, trial: u64, seed: u64) -> ReportRow {
        let protocol = if protocol == "?" { self.config.protocol.as_str() } else { protocol };
        ReportRow {
            protocol: protocol.to_string(),
            adversary: self.adversary.to_string(),
            trial,
            seed,
            cc: 0,
            nc: 0,
            nr: NoiseRate::new(0, 0).to_decimal(),
            rounds: 0,
            outcome: Outcome::Fault,
            within_budget: false,
        }
    }
}

/// Validates `config` and runs every trial.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    Ok(Experiment::new(config)?.run())
}

fn other_value(rng: &mut ChaCha8Rng, v: u64, size: u64) -> u64 {
    (v + rng.gen_range(1..size)) % size
}

/// Slots an oblivious noise pattern ranges over.
fn slot_count(protocol: &dyn Protocol) -> usize {
    match protocol.setup() {
        RunSetup::Term { schedule, .. } => schedule.r_max(),
        RunSetup::Adp { r_max } => 2 * r_max,
    }
}

fn default_threshold(config: &ExperimentConfig, protocol: &str) -> f64 {
    match protocol {
        "one_third" => 1.0 / 3.0 - config.eps(0.1),
        // strictly below 2/3 for every achievable rate
        "two_thirds" => 0.66,
        "br_half" => 0.5 - config.eps(0.2),
        "shared_rand" | "shared_rand_erasure" => 1.0 - config.eps(0.25),
        _ => 0.25,
    }
}

/// Builds the named protocol; `seed` feeds randomized constructions.
pub fn build_protocol(config: &ExperimentConfig, seed: u64) -> Result<Arc<dyn Protocol>> {
    Ok(match config.protocol.as_str() {
        "one_third" => {
            let n = config.n.unwrap_or(4);
            let eps = config.eps(0.1);
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::config(format!("eps {eps} outside (0, 1/2)")));
            }
            let field = Field::with_size(config.field.unwrap_or(16))?;
            // double from 8n until c_j·4ε ≥ c_1, then once more for the reply
            let base = 8 * n;
            let mut lengths = vec![base];
            while (*lengths.last().unwrap() as f64) * 4.0 * eps < base as f64 {
                lengths.push(lengths.last().unwrap() * 2);
            }
            lengths.push(lengths.last().unwrap() * 2);
            let family = gen_prefix_family(n, eps, &lengths, field, config.seed)?;
            Arc::new(make_one_third(n, eps, family, identity_function(n as u32))?)
        }
        "two_thirds" => {
            let size = config.n.unwrap_or(2);
            let bits = usize::BITS - size.saturating_sub(1).leading_zeros();
            Arc::new(make_two_thirds(size, size, config.k.unwrap_or(3), identity_function(bits))?)
        }
        "br_half" => {
            let tree = NoiselessTree::identity_exchange(config.depth.unwrap_or(6))?;
            Arc::new(make_br_half(tree, br_params(config, 0.2, config.seed))?)
        }
        "shared_rand" | "shared_rand_erasure" => {
            let tree = NoiselessTree::identity_exchange(config.depth.unwrap_or(6))?;
            let erasure = config.protocol == "shared_rand_erasure";
            Arc::new(make_shared_rand(tree, br_params(config, 0.25, seed), erasure)?)
        }
        "sample_full" => {
            let bits = config.n.unwrap_or(8);
            Arc::new(SampleFull::new(bits, config.r_max.unwrap_or(8 * bits))?)
        }
        other => {
            return Err(Error::config(format!("unknown protocol {other:?}; expected one of {}", PROTOCOLS.join(", "))))
        }
    })
}

fn br_params(config: &ExperimentConfig, eps: f64, seed: u64) -> BrParams {
    let defaults = BrParams::default();
    BrParams { eps: config.eps(eps), c_n: config.c_n.unwrap_or(defaults.c_n), seed, ..defaults }
}

/// Counts over a batch of rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub rows: u64,
    pub correct: u64,
    pub wrong: u64,
    pub abort: u64,
    pub fault: u64,
    pub within_budget: u64,
    pub suite_failures: u64,
}

impl Summary {
    pub fn add(&mut self, row: &ReportRow) {
        self.rows += 1;
        match row.outcome {
            Outcome::Correct => self.correct += 1,
            Outcome::Wrong => self.wrong += 1,
            Outcome::Abort => self.abort += 1,
            Outcome::Fault => self.fault += 1,
        }
        self.within_budget += u64::from(row.within_budget);
        self.suite_failures += u64::from(row.is_suite_failure());
    }

    pub fn of(rows: &[ReportRow]) -> Self {
        let mut s = Summary::default();
        rows.iter().for_each(|r| s.add(r));
        s
    }

    pub fn passed(&self) -> bool {
        self.suite_failures == 0
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rows: {} correct, {} wrong, {} abort, {} fault; {} within budget; {} suite failures -> {}",
            self.rows,
            self.correct,
            self.wrong,
            self.abort,
            self.fault,
            self.within_budget,
            self.suite_failures,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Writes rows as CSV with the fixed header.
pub fn write_csv_to(rows: &[ReportRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `experiment` and writes its rows as they are produced, so
/// enumerations never hold every row in memory.
pub fn stream_csv(experiment: &Experiment, out: impl Write) -> Result<Summary> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    let mut summary = Summary::default();
    let mut result = Ok(());
    let mut emit = |row: ReportRow| {
        summary.add(&row);
        if result.is_ok() {
            result = w.serialize(&row);
        }
    };
    match experiment.adversary {
        AdversarySpec::Enumerate(_) => experiment.for_each_row(&mut emit),
        _ => experiment.run().into_iter().for_each(&mut emit),
    }
    result?;
    w.flush()?;
    Ok(summary)
}

pub fn write_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    write_csv_to(rows, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Parses a CSV written by [`write_csv`].
pub fn read_csv_from(input: impl Read) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        return Err(Error::config("unexpected CSV header"));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>> {
    read_csv_from(std::fs::File::open(path)?)
}

pub const HEADER: [&str; 10] = ["protocol", "adversary", "trial", "seed", "cc", "nc", "nr", "rounds", "outcome", "within_budget"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversary_names() {
        for s in ["none", "random:0.01", "delete:0.5", "midpoint", "rolling", "enumerate:3"] {
            assert_eq!(s.parse::<AdversarySpec>().unwrap().to_string(), s);
        }
        for s in ["random", "random:2", "enumerate", "enumerate:x", "nope", "none:1"] {
            assert!(s.parse::<AdversarySpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn nr_rendering() {
        let row = |nc, cc| NoiseRate::new(nc, cc).to_decimal();
        assert_eq!(row(1, 3), "0.333333");
        assert_eq!(row(0, 0), "0.000000");
        assert_eq!(row(2, 0), "inf");
    }

    #[test]
    fn trial_seeds_are_independent_of_order() {
        let mut c = ExperimentConfig::new("two_thirds");
        c.trials = 8;
        c.adversary = "random:0.1".into();
        let e = Experiment::new(&c).unwrap();
        let forward: Vec<_> = (0..8).map(|t| e.run_trial(t)).collect();
        let backward: Vec<_> = (0..8).rev().map(|t| e.run_trial(t)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        assert_eq!(e.run(), forward);
    }
}
