use qfa_core::builders::pal_core;
use qfa_core::machine::{sym_index, MachineSpec};
use qfa_core::qkernel::{CMat, C64};

/// Base-4 digit encoding, least significant digit first.
fn e(w: &[u8]) -> u64 {
    w.iter()
        .rev()
        .fold(0, |acc, &c| 4 * acc + if c == b'a' { 1 } else { 2 })
}

fn words(max: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for n in 1..=max {
        for m in 0..1u32 << n {
            out.push(
                (0..n)
                    .map(|k| if m >> k & 1 == 1 { b'b' } else { b'a' })
                    .collect(),
            );
        }
    }
    out
}

fn op(spec: &MachineSpec, state: &str, ch: char, label: &str) -> CMat {
    let q = spec.state_index(state).unwrap();
    let entry = spec.entry(q, sym_index(ch).unwrap()).unwrap();
    let channel = &spec.channels[entry.channel].channel;
    channel
        .branches
        .iter()
        .find(|b| b.label == label)
        .unwrap()
        .op
        .clone()
}

#[test]
fn brute_force_encoding() {
    assert_eq!((e(b"aa"), e(b"ab"), e(b"ba"), e(b"aba")), (5, 9, 6, 25));
}

#[test]
fn counter_amplitudes_match_integer_oracle() {
    let spec = pal_core(0);
    let (ga, gb) = (op(&spec, "pass", 'a', "go"), op(&spec, "pass", 'b', "go"));
    let diff = op(&spec, "pass", qfa_core::machine::RIGHT_END, "d");
    let one = C64::new(1.0, 0.0);
    for w in words(10) {
        let mut v =
            nalgebra::DVector::from_vec(vec![one, one, C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        for &c in &w {
            v = if c == b'a' { &ga * v } else { &gb * v };
        }
        let r: Vec<u8> = w.iter().rev().copied().collect();
        let scale = 8f64.powi(-(w.len() as i32));
        let (y, z) = (e(&r) as f64 * scale, e(&w) as f64 * scale);
        assert!(
            (v[2] - y).norm() < 1e-10 && (v[3] - z).norm() < 1e-10,
            "{w:?}"
        );
        let d = (&diff * &v).norm();
        assert_eq!(d == 0.0, w == r, "{w:?}: {d}");
    }
}
