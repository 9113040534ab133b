use crate::machine::{sym_index, Kind, MachineSpec, SpecBuilder, SYM_LEFT, SYM_RIGHT};
use crate::qkernel::{c, dilate_contraction, CMat, QuantumChannel};
use nalgebra::DMatrix;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

pub const PAL_DIM: usize = 4;
pub const PAL_SCALE: f64 = 8.0;

fn sym(ch: char) -> u8 {
    sym_index(ch).expect("tape symbol")
}

/// Branch labels of the shared coin channel, heads first.
pub(crate) fn coin_next(dim: usize, heads: (u32, i8), tails: (u32, i8)) -> Vec<(u32, i8)> {
    let mut v = vec![heads; dim];
    v.extend(std::iter::repeat_n(tails, dim));
    v
}

/// Digit of a symbol in the PAL counters.
pub fn pal_digit(ch: char) -> f64 {
    match ch {
        'a' => 1.0,
        'b' => 2.0,
        _ => 0.0,
    }
}

/// Counter update on `(u, x, y, z)`: `x <- 4x`, `y <- 4y + d u`, `z <- z + d x`.
pub fn pal_counter_matrix(ch: char) -> DMatrix<f64> {
    let d = pal_digit(ch);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 4.0, 0.0, 0.0, //
            d, 0.0, 4.0, 0.0, //
            0.0, d, 0.0, 1.0,
        ],
    )
}

pub fn pal_symbol_channel(ch: char) -> QuantumChannel {
    dilate_contraction(&pal_counter_matrix(ch), PAL_SCALE)
        .expect("counter matrix is a contraction after scaling")
}

/// Resets to `(e0 + e1)/sqrt 2`, i.e. `u = x`.
pub fn pal_prep_channel() -> QuantumChannel {
    let d = PAL_DIM;
    QuantumChannel::new(
        d,
        (0..d)
            .map(|k| {
                let mut p = CMat::zeros(d, d);
                p[(0, k)] = c(FRAC_1_SQRT_2);
                p[(1, k)] = c(FRAC_1_SQRT_2);
                (format!("p{k}"), p)
            })
            .collect(),
    )
}

/// Measures in `{e0, e1, (e2+e3)/sqrt 2, (e2-e3)/sqrt 2}`; outcome `d` is the
/// difference axis. Every branch resets to `e0`.
pub fn pal_measure_channel() -> QuantumChannel {
    let d = PAL_DIM;
    let h = FRAC_1_SQRT_2;
    let axes: [(&str, [f64; 4]); 4] = [
        ("0", [1.0, 0.0, 0.0, 0.0]),
        ("1", [0.0, 1.0, 0.0, 0.0]),
        ("s", [0.0, 0.0, h, h]),
        ("d", [0.0, 0.0, h, -h]),
    ];
    QuantumChannel::new(
        d,
        axes.iter()
            .map(|(label, f)| {
                let mut p = CMat::zeros(d, d);
                for k in 0..d {
                    p[(0, k)] = c(f[k]);
                }
                (label.to_string(), p)
            })
            .collect(),
    )
}

/// One-sided equality test on `a^j b^k`.
///
/// Each round resets the register, rotates by `+pi sqrt 2` per `a` and
/// `-pi sqrt 2` per `b`, and measures at the right endmarker; outcome `1`
/// rejects. Otherwise two chained random walks and `coins` fair coins must all
/// succeed to accept, else a new round starts. The first pass rejects any
/// input outside `a*b*`.
pub fn eq_core(coins: u32, dim: usize) -> MachineSpec {
    assert!(dim >= 2);
    let theta = PI * SQRT_2;
    let mut b = SpecBuilder::new(dim);
    let start = b.state("start");
    let acc = b.state("acc");
    let rej = b.state("rej");
    let [chk_a, chk_b, back, round, rot, seek1, walk1, seek2, walk2] = [
        "chk_a", "chk_b", "back", "round", "rot", "seek1", "walk1", "seek2", "walk2",
    ]
    .map(|n| b.state(n));
    let (sa, sb) = (sym('a'), sym('b'));
    let reset = b.channel("reset", QuantumChannel::reset(dim));
    let plus = b.channel("eq.rot+", QuantumChannel::rotation(dim, theta));
    let minus = b.channel("eq.rot-", QuantumChannel::rotation(dim, -theta));
    let meas = b.channel("meas", QuantumChannel::basis_measurement(dim));
    let coin = b.channel("coin", QuantumChannel::coin(dim));

    b.det(start, SYM_LEFT, chk_a, 1);
    b.det(chk_a, sa, chk_a, 1);
    b.det(chk_a, sb, chk_b, 1);
    b.det(chk_a, SYM_RIGHT, back, -1);
    b.det(chk_b, sb, chk_b, 1);
    b.det(chk_b, sa, rej, 0);
    b.det(chk_b, SYM_RIGHT, back, -1);
    for s in [sa, sb, SYM_RIGHT] {
        b.det(back, s, back, -1);
    }
    b.det(back, SYM_LEFT, round, 0);
    b.set(round, SYM_LEFT, reset, vec![(rot, 1); dim]);
    b.set(rot, sa, plus, vec![(rot, 1)]);
    b.set(rot, sb, minus, vec![(rot, 1)]);
    let mut after = vec![(seek1, -1); dim];
    after[1] = (rej, 0);
    b.set(rot, SYM_RIGHT, meas, after);
    for (seek, walk, next) in [(seek1, walk1, seek2), (seek2, walk2, u32::MAX)] {
        for s in [sa, sb, SYM_RIGHT] {
            b.det(seek, s, seek, -1);
        }
        b.det(seek, SYM_LEFT, walk, 1);
        for s in [sa, sb] {
            b.set(walk, s, coin, coin_next(dim, (walk, 1), (walk, -1)));
        }
        b.det(walk, SYM_LEFT, round, 0);
        if next != u32::MAX {
            b.det(walk, SYM_RIGHT, next, -1);
        }
    }
    let mut prev = walk2;
    let mut prev_is_walk = true;
    for t in 1..=coins {
        let q = b.state(&format!("coin{t}"));
        if prev_is_walk {
            b.det(prev, SYM_RIGHT, q, 0);
        } else {
            b.set(prev, SYM_RIGHT, coin, coin_next(dim, (q, 0), (back, -1)));
        }
        prev = q;
        prev_is_walk = false;
    }
    if prev_is_walk {
        b.det(prev, SYM_RIGHT, acc, 0);
    } else {
        b.set(prev, SYM_RIGHT, coin, coin_next(dim, (acc, 0), (back, -1)));
    }
    b.meta("builder", "eq_core");
    b.meta("coins", coins.to_string());
    b.build(Kind::QuantumClassical, "ab", start, acc, rej, Some(rej))
}

/// One-sided palindrome test on an `a`/`b` tape.
///
/// A pass prepares `u = x`, applies the dilated counter update per symbol
/// (outcome `restart` abandons the pass) and measures the `y - z` axis at the
/// right endmarker, rejecting on a hit. Acceptance needs `sweeps` full
/// left-to-right sweeps with one fair coin per symbol, all heads.
pub fn pal_core(sweeps: u32) -> MachineSpec {
    let dim = PAL_DIM;
    let mut b = SpecBuilder::new(dim);
    let start = b.state("start");
    let acc = b.state("acc");
    let rej = b.state("rej");
    let pass = b.state("pass");
    let back = b.state("back");
    let (sa, sb) = (sym('a'), sym('b'));
    let prep = b.channel("pal.prep", pal_prep_channel());
    let ca = b.channel("pal.a", pal_symbol_channel('a'));
    let cb = b.channel("pal.b", pal_symbol_channel('b'));
    let meas = b.channel("pal.meas", pal_measure_channel());
    let coin = b.channel("coin", QuantumChannel::coin(dim));

    b.set(start, SYM_LEFT, prep, vec![(pass, 1); dim]);
    b.set(pass, sa, ca, vec![(pass, 1), (back, -1)]);
    b.set(pass, sb, cb, vec![(pass, 1), (back, -1)]);
    for s in [sa, sb, SYM_RIGHT] {
        b.det(back, s, back, -1);
    }
    b.det(back, SYM_LEFT, start, 0);
    let gate = if sweeps == 0 { acc } else { b.state("gseek1") };
    let to_gate = if sweeps == 0 { (acc, 0) } else { (gate, -1) };
    b.set(
        pass,
        SYM_RIGHT,
        meas,
        vec![to_gate, to_gate, to_gate, (rej, 0)],
    );
    for t in 1..=sweeps {
        let seek = b.state(&format!("gseek{t}"));
        let sweep = b.state(&format!("gsweep{t}"));
        for s in [sa, sb, SYM_RIGHT] {
            b.det(seek, s, seek, -1);
        }
        b.det(seek, SYM_LEFT, sweep, 1);
        for s in [sa, sb] {
            b.set(sweep, s, coin, coin_next(dim, (sweep, 1), (back, -1)));
        }
        if t < sweeps {
            let next = b.state(&format!("gseek{}", t + 1));
            b.det(sweep, SYM_RIGHT, next, -1);
        } else {
            b.det(sweep, SYM_RIGHT, acc, 0);
        }
    }
    b.meta("builder", "pal_core");
    b.meta("sweeps", sweeps.to_string());
    b.build(Kind::QuantumClassical, "ab", start, acc, rej, Some(rej))
}

/// Unbiased walk from the leftmost input symbol. Absorption at the right
/// endmarker followed by `k` heads accepts (exit); anything else rejects
/// (continue).
pub fn rw_gate(k: u32) -> MachineSpec {
    let mut b = SpecBuilder::new(1);
    let start = b.state("start");
    let acc = b.state("exit");
    let rej = b.state("continue");
    let walk = b.state("walk");
    let coin = b.channel("coin", QuantumChannel::coin(1));
    b.det(start, SYM_LEFT, walk, 1);
    for ch in crate::langkit::TAPE_ALPHABET.iter() {
        b.set(walk, sym(*ch as char), coin, vec![(walk, 1), (walk, -1)]);
    }
    b.det(walk, SYM_LEFT, rej, 0);
    let mut prev = None;
    for t in 1..=k {
        let q = b.state(&format!("coin{t}"));
        match prev {
            None => b.det(walk, SYM_RIGHT, q, 0),
            Some(p) => b.set(p, SYM_RIGHT, coin, vec![(q, 0), (rej, 0)]),
        }
        prev = Some(q);
    }
    match prev {
        None => b.det(walk, SYM_RIGHT, acc, 0),
        Some(p) => b.set(p, SYM_RIGHT, coin, vec![(acc, 0), (rej, 0)]),
    }
    b.meta("builder", "rw_gate");
    b.meta("k_eps", k.to_string());
    let alphabet: String = crate::langkit::TAPE_ALPHABET
        .iter()
        .map(|&c| c as char)
        .collect();
    b.build(Kind::Classical, &alphabet, start, acc, rej, Some(rej))
}
