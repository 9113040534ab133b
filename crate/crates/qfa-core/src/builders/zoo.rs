//! Small machines with short expected runtimes, used to cross-check engines.

use super::cores::{eq_core, pal_core, rw_gate};
use super::eps::Epsilon;
use super::fragments::{build_same_length, build_twice_as_long};
use super::rpal::compile_rpal_with;
use super::view::{LeftMode, Pred, View};
use crate::machine::{sym_index, Kind, MachineSpec, SpecBuilder, SYM_LEFT, SYM_RIGHT};
use crate::qkernel::QuantumChannel;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub spec: MachineSpec,
    pub inputs: Vec<&'static str>,
}

fn sym(c: char) -> u8 {
    sym_index(c).expect("tape symbol")
}

/// Classical: each `a` survives a fair coin, `b` is skipped; accepts at the
/// right end with probability `2^-#a`.
pub fn coin_per_a() -> MachineSpec {
    let mut b = SpecBuilder::new(1);
    let (start, acc, rej, scan) = (
        b.state("start"),
        b.state("acc"),
        b.state("rej"),
        b.state("scan"),
    );
    let coin = b.channel("coin", QuantumChannel::coin(1));
    b.det(start, SYM_LEFT, scan, 1);
    b.set(scan, sym('a'), coin, vec![(scan, 1), (rej, 0)]);
    b.det(scan, sym('b'), scan, 1);
    b.det(scan, SYM_RIGHT, acc, 0);
    b.build(Kind::Classical, "ab", start, acc, rej, Some(rej))
}

/// Rotates by `pi/4` per `a` and `-pi/8` per `b`, then measures once.
pub fn rotate_measure() -> MachineSpec {
    let mut b = SpecBuilder::new(2);
    let (start, acc, rej, scan) = (
        b.state("start"),
        b.state("acc"),
        b.state("rej"),
        b.state("scan"),
    );
    let ra = b.channel("rot.a", QuantumChannel::rotation(2, PI / 4.0));
    let rb = b.channel("rot.b", QuantumChannel::rotation(2, -PI / 8.0));
    let meas = b.channel("meas", QuantumChannel::basis_measurement(2));
    b.det(start, SYM_LEFT, scan, 1);
    b.set(scan, sym('a'), ra, vec![(scan, 1)]);
    b.set(scan, sym('b'), rb, vec![(scan, 1)]);
    b.set(scan, SYM_RIGHT, meas, vec![(acc, 0), (rej, 0)]);
    b.build(Kind::QuantumClassical, "ab", start, acc, rej, Some(rej))
}

/// Like [`rotate_measure`] with rotation `pi/3` per symbol, but outcome `0`
/// tosses a coin: heads accepts, tails returns to the left end and retries
/// from a reset register.
pub fn retry_measure() -> MachineSpec {
    let mut b = SpecBuilder::new(2);
    let (start, acc, rej) = (b.state("start"), b.state("acc"), b.state("rej"));
    let (scan, toss, back) = (b.state("scan"), b.state("toss"), b.state("back"));
    let reset = b.channel("reset", QuantumChannel::reset(2));
    let rot = b.channel("rot", QuantumChannel::rotation(2, PI / 3.0));
    let meas = b.channel("meas", QuantumChannel::basis_measurement(2));
    let coin = b.channel("coin", QuantumChannel::coin(2));
    b.set(start, SYM_LEFT, reset, vec![(scan, 1); 2]);
    for c in ['a', 'b'] {
        b.set(scan, sym(c), rot, vec![(scan, 1)]);
        b.det(back, sym(c), back, -1);
    }
    b.set(scan, SYM_RIGHT, meas, vec![(toss, 0), (rej, 0)]);
    b.set(
        toss,
        SYM_RIGHT,
        coin,
        vec![(acc, 0), (acc, 0), (back, -1), (back, -1)],
    );
    b.det(back, SYM_RIGHT, back, -1);
    b.det(back, SYM_LEFT, start, 0);
    b.build(Kind::QuantumClassical, "ab", start, acc, rej, Some(rej))
}

fn counting(left: Pred, right: Pred) -> View {
    View {
        pl: Pred::left_end(),
        pm: Some((Pred::dollar(), 1)),
        pr: (Pred::right_end(), 1),
        left,
        left_mode: LeftMode::Count,
        right,
        pm_shows: None,
    }
}

/// Machines paired with inputs whose expected runtimes stay in the low
/// thousands of steps.
pub fn regression_zoo() -> Vec<ZooEntry> {
    let loose = Epsilon::new(2, 5).expect("eps");
    let fifth = Epsilon::new(1, 5).expect("eps");
    vec![
        ZooEntry {
            name: "rw_gate_k0",
            spec: rw_gate(0),
            inputs: vec!["", "a", "ab", "a$b", "0101"],
        },
        ZooEntry {
            name: "rw_gate_k2",
            spec: rw_gate(2),
            inputs: vec!["", "a", "ab", "aab", "ab#ab"],
        },
        ZooEntry {
            name: "eq_core_c1",
            spec: eq_core(1, 2),
            inputs: vec!["", "ab", "aab", "abb", "ba", "aaab"],
        },
        ZooEntry {
            name: "eq_core_c2_dim4",
            spec: eq_core(2, 4),
            inputs: vec!["", "a", "b", "ab", "aab"],
        },
        ZooEntry {
            name: "pal_core_j0",
            spec: pal_core(0),
            inputs: vec!["a", "ab", "ba", "aab", "b"],
        },
        ZooEntry {
            name: "pal_core_j1",
            spec: pal_core(1),
            inputs: vec!["", "a", "ab", "bb", "ba"],
        },
        ZooEntry {
            name: "coin_per_a",
            spec: coin_per_a(),
            inputs: vec!["", "a", "ab", "aab", "aaaa", "bab"],
        },
        ZooEntry {
            name: "rotate_measure",
            spec: rotate_measure(),
            inputs: vec!["", "a", "aa", "ab", "abb", "aab"],
        },
        ZooEntry {
            name: "retry_measure",
            spec: retry_measure(),
            inputs: vec!["", "a", "ab", "aba", "abab"],
        },
        ZooEntry {
            name: "same_length",
            spec: build_same_length(counting(Pred::ab(), Pred::ab()), 1, loose)
                .expect("fragment")
                .spec,
            inputs: vec!["$", "a$b", "a$bb", "aa$b", "ab$ba", "$a"],
        },
        ZooEntry {
            name: "twice_as_long",
            spec: build_twice_as_long(counting(Pred::any_bin(), Pred::any_bin()), 1, loose)
                .expect("fragment")
                .spec,
            inputs: vec![
                "a0a$a",
                "a0a0a$a0a",
                "a0a$a0a",
                "a0a0a$a",
                "a$a",
                "a0a0a0a$a0a",
            ],
        },
        ZooEntry {
            name: "rpal_loop_k0",
            spec: compile_rpal_with(1, fifth, 0, true),
            inputs: vec!["a$1a1", "aa$1a1a1", "ab$1a1", "aa$1a", "ab", "aaa$1a1"],
        },
    ]
}
