//! Trace-level checks of the protocols against hand-derived transcripts.

use adaptive_ic::adversaries::{Deleter, RandomBudgeted};
use adaptive_ic::channel::{Adversary, Noiseless, Output, SlotView};
use adaptive_ic::codes::{gen_prefix_family, Field};
use adaptive_ic::protocols::{
    effective_noise, epoch_logs, identity_function, make_br_half, make_one_third, make_shared_rand, make_two_thirds,
    run, BrParams, EpochOutcome, NoiselessTree, OneThird, Outcome, Protocol,
};
use adaptive_ic::{ChannelSymbol, Role};

struct Silencer(Role);

impl Adversary for Silencer {
    fn corrupt(&mut self, view: &SlotView<'_>, sent: ChannelSymbol) -> ChannelSymbol {
        if view.sender == self.0 {
            ChannelSymbol::Silence
        } else {
            sent
        }
    }
}

fn one_third() -> OneThird {
    let family = gen_prefix_family(4, 0.1, &[32, 64, 128, 256], Field::with_size(16).unwrap(), 1).unwrap();
    make_one_third(4, 0.1, family, identity_function(4)).unwrap()
}

#[test]
fn one_third_noiseless_trace() {
    let p = one_third();
    let m = p.message_length();
    for (x, y) in [(0, 0), (3, 9), (15, 15)] {
        let rec = run(&p, x, y, &mut Noiseless).unwrap();
        let metrics = rec.metrics().unwrap();
        assert_eq!(metrics.cc, 3 * m as u64);
        assert_eq!(metrics.nc, 0);
        assert_eq!(rec.output(Role::Alice), Output::Value(p.expected(x, y)));
        assert_eq!(rec.output(Role::Bob), Output::Value(p.expected(x, y)));
        // Alice speaks first, Bob replies with twice as many letters
        let bob_letters = rec.slots_of(Role::Bob).filter(|s| !s.sent.is_silence()).count();
        assert_eq!(bob_letters, 2 * m);
    }
}

#[test]
fn one_third_bob_aborts_when_alice_is_silenced() {
    let p = one_third();
    let rec = run(&p, 5, 6, &mut Silencer(Role::Alice)).unwrap();
    assert_eq!(rec.output(Role::Bob), Output::Abort);
    assert!(rec.metrics().unwrap().nr.as_f64() > 1.0 / 3.0);
}

#[test]
fn two_thirds_noiseless_trace() {
    let k = 3;
    let p = make_two_thirds(2, 2, k, identity_function(1)).unwrap();
    // second value of X, first value of Y
    let rec = run(&p, 1, 0, &mut Noiseless).unwrap();
    let letters = |who: Role| -> Vec<usize> {
        rec.slots_of(who).filter(|s| !s.sent.is_silence()).map(|s| s.round).collect()
    };
    assert_eq!(letters(Role::Alice), vec![4, 5, 6]);
    assert_eq!(letters(Role::Bob), vec![7, 8, 9, 10, 11, 12]);
    assert_eq!(rec.metrics().unwrap().cc, 9);
    assert_eq!(Outcome::classify(&rec, p.expected(1, 0)), Outcome::Correct);
}

#[test]
fn two_thirds_abort_after_deleting_alice() {
    let k = 3;
    let p = make_two_thirds(2, 2, k, identity_function(1)).unwrap();
    let rec = run(&p, 0, 1, &mut Silencer(Role::Alice)).unwrap();
    assert_eq!(rec.output(Role::Bob), Output::Abort);
    let m = rec.metrics().unwrap();
    assert_eq!((m.cc, m.nc), (k as u64, k as u64));
    assert!(m.nr.le_ratio(1, 1) && !m.nr.lt_ratio(1, 1));
}

#[test]
fn br_noiseless_matches_tree_walk() {
    let tree = NoiselessTree::identity_exchange(4).unwrap();
    let p = make_br_half(tree.clone(), BrParams { seed: 3, ..BrParams::default() }).unwrap();
    for (x, y) in [(0, 0), (1, 2), (3, 3)] {
        let rec = run(&p, x, y, &mut Noiseless).unwrap();
        let leaf = tree.evaluate(x, y);
        assert_eq!(rec.output(Role::Alice), Output::Value(leaf));
        assert_eq!(rec.output(Role::Bob), Output::Value(leaf));
        assert_eq!(effective_noise(&rec, p.label_size()).unwrap().total(), 0);
    }
}

#[test]
fn br_survives_light_noise() {
    let p = make_br_half(NoiselessTree::identity_exchange(4).unwrap(), BrParams { seed: 4, ..BrParams::default() })
        .unwrap();
    for seed in 0..10 {
        let rec = run(&p, seed % 4, seed / 4 % 4, &mut RandomBudgeted::new(0.002, seed)).unwrap();
        if rec.metrics().unwrap().nr.le_ratio(3, 10) {
            assert_eq!(Outcome::classify(&rec, p.expected(seed % 4, seed / 4 % 4)), Outcome::Correct);
        }
    }
}

#[test]
fn shared_rand_noiseless_epochs_deliver_first_time() {
    let params = BrParams { eps: 0.25, seed: 9, ..BrParams::default() };
    let p = make_shared_rand(NoiselessTree::identity_exchange(4).unwrap(), params, false).unwrap();
    let rec = run(&p, 2, 1, &mut Noiseless).unwrap();
    assert_eq!(Outcome::classify(&rec, p.expected(2, 1)), Outcome::Correct);
    let logs = epoch_logs(&rec, &p).unwrap();
    assert!(logs.iter().all(|l| matches!(l.outcome, EpochOutcome::Delivered(_)) && l.requests_received == 0));
    assert!(logs.iter().all(|l| l.communication == p.k()));
}

#[test]
fn erasure_variant_repairs_deletions() {
    let params = BrParams { eps: 0.25, seed: 2, ..BrParams::default() };
    let p = make_shared_rand(NoiselessTree::identity_exchange(4).unwrap(), params, true).unwrap();
    let rec = run(&p, 3, 0, &mut Deleter::new(0.3, 7)).unwrap();
    if rec.metrics().unwrap().nr.le_ratio(3, 4) {
        assert_eq!(Outcome::classify(&rec, p.expected(3, 0)), Outcome::Correct);
    }
}

#[test]
fn replay_is_bit_identical() {
    let p = one_third();
    let a = run(&p, 7, 8, &mut RandomBudgeted::new(0.1, 42)).unwrap();
    let b = run(&p, 7, 8, &mut RandomBudgeted::new(0.1, 42)).unwrap();
    assert_eq!(a.slots, b.slots);
    assert_eq!(a.outputs, b.outputs);
    assert_eq!(a.ter, b.ter);
}
