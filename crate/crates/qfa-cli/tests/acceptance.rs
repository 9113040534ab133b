//! Acceptance suite. Each test prints one `PASS`/`FAIL` line to stdout,
//! bypassing the test harness capture, and then asserts.

use qfa_core::builders::*;
use qfa_core::engines::{
    estimate, run_trajectory, solve_exact, wilson_interval, ExactOptions, Z99,
};
use qfa_core::langkit::*;
use qfa_core::machine::{sym_index, RIGHT_END};
use qfa_core::par::Parallelism;
use qfa_core::qkernel::{CVec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

fn verdict(id: u8, name: &str, pass: bool, detail: String, started: Instant) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "\n[{id:>2}] {tag} {name}: {detail} ({:.1} s)\n",
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "{}", line.trim());
}

fn eps() -> Epsilon {
    Epsilon::new(1, 5).unwrap()
}

fn words(n: usize) -> impl Iterator<Item = String> {
    (0..1usize << n).map(move |m| {
        (0..n)
            .map(|k| if m >> k & 1 == 1 { 'b' } else { 'a' })
            .collect()
    })
}

fn palindromes(n: usize) -> impl Iterator<Item = String> {
    words(n).filter(|w| w.bytes().eq(w.bytes().rev()))
}

fn pppal_string(i: usize, w: &str) -> String {
    let p = lang_params(i as i64).unwrap();
    pad(&p, &punc(&p, w).unwrap()).unwrap()
}

#[test]
fn c01_random_walk_gate_law() {
    let t = Instant::now();
    let mut worst = 0f64;
    for k in 0..=2u32 {
        let spec = rw_gate(k);
        for n in 0..=10usize {
            let s = solve_exact(&spec, &"a".repeat(n), &ExactOptions::default()).unwrap();
            worst = worst.max((s.p_accept - 0.5f64.powi(k as i32) / (n + 1) as f64).abs());
        }
    }
    let fast = t.elapsed().as_secs_f64() < 1.0;
    verdict(
        1,
        "random-walk gate law",
        worst <= 1e-9 && fast,
        format!("max error {worst:.2e}"),
        t,
    );
}

#[test]
fn c02_members_accepted_exactly() {
    let t = Instant::now();
    let mut cases = Vec::new();
    let rpal = compile_rpal(1, eps(), eps().default_k());
    for k in 2..=7 {
        for w in palindromes(k) {
            let s = build_rl(1, &w).unwrap();
            if s.len() <= 57 {
                cases.push((&rpal, s));
            }
        }
    }
    let pppal = compile_pppal(1, eps(), eps().default_k());
    for m in [2, 3] {
        cases.extend(palindromes(m).map(|w| (&pppal, pppal_string(1, &w))));
    }
    let mut worst = 0f64;
    for (spec, s) in &cases {
        assert!(
            is_member(Family::Rpal, Some(1), s).unwrap()
                || is_member(Family::Pppal, Some(1), s).unwrap()
        );
        let a = solve_exact(spec, s, &ExactOptions::default())
            .unwrap()
            .p_accept;
        worst = worst.max((1.0 - a).abs());
    }
    let detail = format!("{} members, max |1 - p_accept| {worst:.2e}", cases.len());
    verdict(2, "one-sided error on members", worst <= 1e-8, detail, t);
}

#[test]
fn c03_negative_corpus_error_bound() {
    let t = Instant::now();
    let corpus = negative_corpus(50, 2024);
    let mut interps = std::collections::HashMap::new();
    let (mut bad, mut worst) = (Vec::new(), 0f64);
    let compiled = [
        (Template::Rpal, compile_rpal(1, eps(), eps().default_k())),
        (Template::Pppal, compile_pppal(1, eps(), eps().default_k())),
    ];
    for class in DefectClass::ALL {
        let n = corpus.iter().filter(|c| c.class == class).count();
        if n < 50 {
            bad.push(format!("{class}: only {n} strings"));
        }
    }
    for (k, c) in corpus.iter().enumerate() {
        let it = interps.entry((c.template, c.i)).or_insert_with(|| {
            Interpreter::new(c.template, c.i, eps(), eps().default_k()).unwrap()
        });
        let r = it
            .estimate(
                &c.input,
                10_000,
                7000 + k as u64,
                u64::MAX >> 1,
                Parallelism::Parallel,
            )
            .unwrap();
        worst = worst.max(r.p_hat);
        let ok = if c.class.caught_at_r() {
            let exact_zero = c.i != 1
                || compiled
                    .iter()
                    .filter(|(tp, _)| *tp == c.template)
                    .all(|(_, spec)| {
                        solve_exact(spec, &c.input, &ExactOptions::default())
                            .unwrap()
                            .p_accept
                            == 0.0
                    });
            r.verdict_counts.accept == 0 && exact_zero
        } else {
            r.cutoffs == 0 && r.wilson_lo <= eps().value()
        };
        if !ok {
            bad.push(format!("{} {}: p_hat {}", c.class, c.input, r.p_hat));
        }
    }
    let detail = format!(
        "{} strings, max p_hat {worst:.4}, violations {bad:?}",
        corpus.len()
    );
    verdict(
        3,
        "error bound on negative corpus",
        bad.is_empty(),
        detail,
        t,
    );
}

/// Sequences over `1..=levels` of length `len`, in lexicographic order.
fn all_sequences(len: usize, levels: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| (1..=levels).map(move |d| [v.clone(), vec![d]].concat()))
            .collect();
    }
    out
}

fn formula_length(i: usize, m: usize) -> u64 {
    let c = (usize::BITS - i.leading_zeros()) as u64;
    let (m, p) = (m as u64, 1u64 << (m + 1));
    (m - 1) * p + c * (p - m - 2) + m + 1
}

#[test]
fn c04_language_identities() {
    let t = Instant::now();
    let mut bad: Vec<String> = Vec::new();
    let mut chain = vec![2u64];
    for _ in 0..3 {
        chain.push(srel_next_len(*chain.last().unwrap()).unwrap());
    }
    if chain != [2, 7, 57, 3307] {
        bad.push(format!("chain {chain:?}"));
    }
    let p1 = lang_params(1).unwrap();
    for m in 2..=10usize {
        if total_length(&p1, m).unwrap() != m as u64 * (1 << (m + 1)) - 1 {
            bad.push(format!("total length m = {m}"));
        }
    }
    for i in 1..=3usize {
        let p = lang_params(i as i64).unwrap();
        for m in [p.min_segment, p.min_segment + 1] {
            let s = pppal_string(
                i,
                &"ab"
                    .repeat(m.pow(i as u32))
                    .chars()
                    .take(m.pow(i as u32))
                    .collect::<String>(),
            );
            if s.len() as u64 != formula_length(i, m) {
                bad.push(format!("pad length i = {i} m = {m}"));
            }
            let segs = s.split(['0', '1', '$']).filter(|x| !x.is_empty()).count();
            if segs != (1 << (m + 1)) - 2 {
                bad.push(format!("census i = {i} m = {m}: {segs}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut pairs, mut exhausted, mut samples) = (0, 0, 0u64);
    for i in 1..=5usize {
        let p = lang_params(i as i64).unwrap();
        let mut m = p.min_segment;
        while m.pow(i as u32 - 1) <= 10_000 && (i > 1 || m <= 64) {
            pairs += 1;
            let canon = well_ordered_sequence(&p, m).unwrap();
            let len = canon.entries.len();
            if !is_well_ordered(&p, m, &canon) {
                bad.push(format!("canonical not well ordered i = {i} m = {m}"));
            }
            for j in 1..=i {
                if sumdel(&canon, j) != m.pow((i - j) as u32) {
                    bad.push(format!("sumdel i = {i} m = {m} j = {j}"));
                }
            }
            if (i as f64).powi(len as i32) <= 10_000.0 {
                exhausted += 1;
                let found: Vec<_> = all_sequences(len, i)
                    .into_iter()
                    .map(|entries| DelimiterSeq { entries })
                    .filter(|s| is_well_ordered(&p, m, s))
                    .collect();
                if found != [canon.clone()] {
                    bad.push(format!("uniqueness i = {i} m = {m}: {} found", found.len()));
                }
            } else {
                let mut probe = canon.clone();
                for s in 0..100 {
                    if s % 2 == 0 {
                        probe
                            .entries
                            .iter_mut()
                            .for_each(|v| *v = rng.gen_range(1..=i));
                    } else {
                        probe.entries.clone_from(&canon.entries);
                        for _ in 0..rng.gen_range(1..=3) {
                            let at = rng.gen_range(0..len);
                            probe.entries[at] = rng.gen_range(1..=i);
                        }
                    }
                    samples += 1;
                    if probe != canon && is_well_ordered(&p, m, &probe) {
                        bad.push(format!("second well-ordered sequence i = {i} m = {m}"));
                    }
                }
            }
            m += 1;
        }
    }
    let detail = format!(
        "{pairs} (i, m) pairs, {exhausted} exhausted, {samples} random probes, violations {bad:?}"
    );
    verdict(4, "language-layer identities", bad.is_empty(), detail, t);
}

#[test]
fn c05_length_bounds() {
    let t = Instant::now();
    let (mut checked, mut bad) = (0u64, Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 1..=3usize {
        for k in 2.. {
            let n = (0..i)
                .try_fold(k as u64, |x, _| srel_next_len(x).ok())
                .unwrap();
            if n > 4096 {
                break;
            }
            let pool: Vec<String> = if k <= 10 {
                words(k).collect()
            } else {
                (0..32)
                    .map(|_| {
                        (0..k)
                            .map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' })
                            .collect()
                    })
                    .collect()
            };
            for w in pool {
                let s = build_rl(i, &w).unwrap();
                let s0 = s.find('$').unwrap() as u128;
                let len = s.len() as u128;
                checked += 1;
                if s.len() as u64 != n
                    || !is_member(Family::Rl, Some(i), &s).unwrap()
                    || s0.pow(1 << i) >= len
                {
                    bad.push(format!("RL_{i} |s0| = {s0} n = {len}"));
                }
            }
        }
    }
    for i in 1..=3usize {
        let p = lang_params(i as i64).unwrap();
        for m in p.min_segment..p.min_segment + 12 {
            let n = if m.pow(i as u32) <= 128 {
                let w: String = (0..m.pow(i as u32))
                    .map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' })
                    .collect();
                pppal_string(i, &w).len() as u64
            } else {
                total_length(&p, m).unwrap()
            };
            checked += 1;
            if (1u128 << m) >= n as u128 {
                bad.push(format!("PPPAL_{i} m = {m} n = {n}"));
            }
        }
    }
    let detail = format!("{checked} strings and patterns, violations {bad:?}");
    verdict(5, "segment length bounds", bad.is_empty(), detail, t);
}

#[test]
fn c06_counter_oracle() {
    let t = Instant::now();
    let spec = pal_core(0);
    let op = |c: char, label: &str| {
        let e = spec
            .entry(spec.state_index("pass").unwrap(), sym_index(c).unwrap())
            .unwrap();
        let ch = &spec.channels[e.channel].channel;
        ch.branches
            .iter()
            .find(|b| b.label == label)
            .unwrap()
            .op
            .clone()
    };
    let (ga, gb, diff) = (op('a', "go"), op('b', "go"), op(RIGHT_END, "d"));
    let e = |w: &[u8]| {
        w.iter()
            .rev()
            .fold(0u64, |acc, &c| 4 * acc + if c == b'a' { 1 } else { 2 })
    };
    let (mut worst, mut wrong, mut count) = (0f64, Vec::new(), 0);
    for n in 0..=10 {
        for w in words(n) {
            let w = w.into_bytes();
            let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
            let mut v = CVec::from_vec(vec![one, one, zero, zero]);
            for &c in &w {
                v = if c == b'a' { &ga * v } else { &gb * v };
            }
            let r: Vec<u8> = w.iter().rev().copied().collect();
            let s = 8f64.powi(-(n as i32));
            worst = worst
                .max((v[2] - e(&r) as f64 * s).norm())
                .max((v[3] - e(&w) as f64 * s).norm());
            if ((&diff * &v).norm() == 0.0) != (w == r) {
                wrong.push(String::from_utf8(w).unwrap());
            }
            count += 1;
        }
    }
    let detail =
        format!("{count} words, max amplitude error {worst:.2e}, diff-axis mismatches {wrong:?}");
    verdict(
        6,
        "counter oracle",
        worst <= 1e-10 && wrong.is_empty(),
        detail,
        t,
    );
}

#[test]
fn c07_engine_cross_validation() {
    let t = Instant::now();
    let zoo = regression_zoo();
    let mut bad = Vec::new();
    let mut cases = 0;
    let sized = zoo.len() >= 12 && zoo.iter().all(|z| z.inputs.len() >= 5);
    for (k, z) in zoo.iter().enumerate() {
        for (j, x) in z.inputs.iter().enumerate() {
            let s = solve_exact(&z.spec, x, &ExactOptions::default()).unwrap();
            let seed = 100 * k as u64 + j as u64;
            let r = estimate(
                &z.spec,
                x,
                100_000,
                seed,
                u64::MAX >> 1,
                Parallelism::Parallel,
            )
            .unwrap();
            let (lo, hi) = wilson_interval(r.verdict_counts.accept, r.trials, Z99);
            cases += 1;
            if !(lo <= s.p_accept && s.p_accept <= hi) || r.cutoffs > 0 {
                bad.push(format!(
                    "{} {x:?}: exact {} not in [{lo}, {hi}]",
                    z.name, s.p_accept
                ));
            }
        }
    }
    let detail = format!("{} machines, {cases} cases, misses {bad:?}", zoo.len());
    verdict(
        7,
        "engine cross-validation",
        sized && bad.is_empty(),
        detail,
        t,
    );
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn c08_runtime_trends() {
    let t = Instant::now();
    let pal = pal_core(0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 2..=8usize {
        let w = "a".repeat(n);
        let r = estimate(
            &pal,
            &w,
            400,
            80 + n as u64,
            u64::MAX >> 1,
            Parallelism::Parallel,
        )
        .unwrap();
        xs.push(n as f64);
        ys.push(r.mean_steps.log2());
    }
    let pal_slope = slope(&xs, &ys);
    let k = 0u32;
    let spec = compile_rpal_with(1, eps(), k, true);
    let mut per_round = Vec::new();
    for w in ["aa", "abaaaba"] {
        let s = build_rl(1, w).unwrap();
        let r = estimate(&spec, &s, 200, 90, u64::MAX >> 1, Parallelism::Parallel).unwrap();
        let rounds = 2f64.powi(k as i32) * (s.len() + 1) as f64;
        per_round.push((
            s.len() as f64,
            r.mean_steps / rounds,
            r.verdict_counts.accept == r.trials,
        ));
    }
    let loop_slope =
        (per_round[1].1 / per_round[0].1).ln() / (per_round[1].0 / per_round[0].0).ln();
    let members_ok = per_round.iter().all(|p| p.2);
    let detail = format!(
        "PAL core log2-steps slope {pal_slope:.3}/symbol; RPAL_1 steps per round {:.1} (n = 7), {:.1} (n = 57), log-log slope {loop_slope:.3}",
        per_round[0].1, per_round[1].1
    );
    verdict(
        8,
        "runtime trends",
        pal_slope >= 0.5 && loop_slope <= 4.0 && members_ok,
        detail,
        t,
    );
}

#[test]
fn c09_palindrome_dissimilarity() {
    let t = Instant::now();
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [2usize, 4, 6] {
        let sem = DissimSemantics::ExactLength;
        let got = dissim_lower_bound(Family::Pal, None, n, DissimMode::Constructive, sem).unwrap();
        let brute = exhaustive_dissimilarity(Family::Pal, None, n, sem).unwrap();
        let want = 1 << (n / 2);
        ok &= got.size() == want && brute.size() == want;
        ok &= got.verify(Family::Pal, None).unwrap() && brute.verify(Family::Pal, None).unwrap();
        rows.push(format!(
            "n = {n}: {} (exhaustive {})",
            got.size(),
            brute.size()
        ));
    }
    verdict(9, "palindrome dissimilarity", ok, rows.join(", "), t);
}

fn qfa(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_qfa"))
        .args(args)
        .arg("--no-timestamp")
        .output()
        .unwrap();
    assert!(
        o.status.success() || o.status.code() == Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    o.stdout
}

#[test]
fn c10_determinism() {
    let t = Instant::now();
    let commands: [&[&str]; 6] = [
        &[
            "run",
            "--machine",
            "eq-core",
            "--input",
            "aabbb",
            "--seed",
            "3",
        ],
        &[
            "estimate",
            "--machine",
            "rotate_measure",
            "--input",
            "aab",
            "--trials",
            "5000",
            "--seed",
            "3",
        ],
        &[
            "estimate",
            "--machine",
            "rpal",
            "--engine",
            "interp",
            "--input",
            "ab$1aa1",
            "--trials",
            "2000",
            "--seed",
            "3",
        ],
        &[
            "sweep",
            "--machine",
            "pal-core",
            "--eps",
            "2/5",
            "--n",
            "1..3",
            "--trials",
            "50",
            "--seed",
            "3",
            "--max-steps",
            "100000",
        ],
        &["gen", "--negative", "--per-class", "10", "--seed", "3"],
        &["verify", "--suite", "zoo", "--trials", "300", "--seed", "3"],
    ];
    let mut diverged = Vec::new();
    for args in commands {
        if qfa(args) != qfa(args) {
            diverged.push(args[0]);
        }
    }
    let spec = eq_core(3, 2);
    let a = estimate(&spec, "aab", 3000, 11, 1 << 30, Parallelism::Parallel).unwrap();
    let b = estimate(&spec, "aab", 3000, 11, 1 << 30, Parallelism::Sequential).unwrap();
    if a != b
        || run_trajectory(&spec, "aab", 5, 1 << 30) != run_trajectory(&spec, "aab", 5, 1 << 30)
    {
        diverged.push("library");
    }
    let detail = format!(
        "{} CLI commands rerun, diverged {diverged:?}",
        commands.len()
    );
    verdict(10, "determinism", diverged.is_empty(), detail, t);
}
