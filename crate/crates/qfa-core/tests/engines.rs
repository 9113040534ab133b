use nalgebra::DMatrix;
use qfa_core::builders::*;
use qfa_core::engines::*;
use qfa_core::machine::{
    tape, validate_spec, Kind, MachineSpec, SpecBuilder, Verdict, SYM_LEFT, SYM_RIGHT,
};
use qfa_core::par::Parallelism;
use qfa_core::qkernel::{QuantumChannel, C64};

fn scanner() -> MachineSpec {
    let mut b = SpecBuilder::new(1);
    let (start, acc, rej, scan) = (
        b.state("start"),
        b.state("acc"),
        b.state("rej"),
        b.state("scan"),
    );
    b.det(start, SYM_LEFT, scan, 1);
    b.det(scan, 2, scan, 1);
    b.det(scan, 3, scan, 1);
    b.det(scan, SYM_RIGHT, acc, 0);
    b.build(Kind::Classical, "ab", start, acc, rej, Some(rej))
}

/// Absorption by a dense solve of `(I - A) x = b` over (configuration, density)
/// pairs. Returns accept, reject and expected steps.
fn dense_oracle(spec: &MachineSpec, input: &str) -> (f64, f64, f64) {
    let t = tape(input).unwrap();
    let (len, d) = (t.len(), spec.register_dim);
    let nq = spec.states.len();
    let dd = d * d;
    let n = nq * len * dd;
    let idx = |q: usize, pos: usize| (q * len + pos) * dd;
    let mut a = DMatrix::<C64>::identity(n, n);
    let mut into_acc = vec![C64::new(0.0, 0.0); n];
    let mut into_rej = vec![C64::new(0.0, 0.0); n];
    for q in 0..nq {
        if spec.is_halting(q as u32).is_some() {
            continue;
        }
        for pos in 0..len {
            let Some(e) = spec.entry(q as u32, t[pos]) else {
                continue;
            };
            let ch = &spec.channels[e.channel].channel;
            for (br, &(q2, mv)) in ch.branches.iter().zip(&e.next) {
                let k = &br.op;
                // vec(K rho K^dag)[r*d + c] = sum K[r,i] rho[i*d + j] conj(K[c,j])
                let col = idx(q, pos);
                for r in 0..d {
                    for c in 0..d {
                        for i in 0..d {
                            for j in 0..d {
                                let w = k[(r, i)] * k[(c, j)].conj();
                                if w.norm() == 0.0 {
                                    continue;
                                }
                                match spec.is_halting(q2) {
                                    Some(v) => {
                                        if r == c {
                                            let tgt = if v == Verdict::Accept {
                                                &mut into_acc
                                            } else {
                                                &mut into_rej
                                            };
                                            tgt[col + i * d + j] += w;
                                        }
                                    }
                                    None => {
                                        let p2 = (pos as i64 + mv as i64) as usize;
                                        a[(idx(q2 as usize, p2) + r * d + c, col + i * d + j)] -= w;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut b = nalgebra::DVector::<C64>::zeros(n);
    b[idx(spec.q0 as usize, 0)] = C64::new(1.0, 0.0);
    let x = a.lu().solve(&b).unwrap();
    let dot = |v: &[C64]| v.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<C64>().re;
    let mut steps = 0.0;
    for q in 0..nq {
        if spec.is_halting(q as u32).is_some() {
            continue;
        }
        for pos in 0..len {
            for r in 0..d {
                steps += x[idx(q, pos) + r * d + r].re;
            }
        }
    }
    (dot(&into_acc), dot(&into_rej), steps)
}

#[test]
fn trajectory_examples() {
    let s = scanner();
    assert!(validate_spec(&s).pass);
    let r = run_trajectory(&s, "ab", 0, 100).unwrap();
    assert_eq!((r.verdict, r.steps), (Verdict::Accept, 4));
    let r = run_trajectory(&s, "ab", 0, 3).unwrap();
    assert_eq!((r.verdict, r.steps), (Verdict::Cutoff, 3));
    let g = rw_gate(1);
    for seed in 0..50 {
        let r = run_trajectory(&g, "abab", seed, 1 << 20).unwrap();
        assert_ne!(r.verdict, Verdict::Cutoff);
    }
    let eq = eq_core(3, 2);
    assert_eq!(
        run_trajectory(&eq, "ab", 9, 1 << 30).unwrap(),
        run_trajectory(&eq, "ab", 9, 1 << 30).unwrap()
    );
    assert!(run_trajectory(&eq, "ab", 9, 1 << 30)
        .unwrap()
        .digest
        .is_some());
}

#[test]
fn estimate_examples() {
    let r = estimate(
        &rw_gate(0),
        "ab",
        100_000,
        1,
        1 << 20,
        Parallelism::Parallel,
    )
    .unwrap();
    assert!(
        r.wilson_lo <= 1.0 / 3.0 && 1.0 / 3.0 <= r.wilson_hi,
        "{r:?}"
    );
    assert_eq!(
        r.verdict_counts.accept + r.verdict_counts.reject + r.cutoffs,
        r.trials
    );
    let eq = eq_core(Epsilon::new(1, 5).unwrap().eq_coins(), 2);
    let r = estimate(&eq, "aabb", 2000, 2, 1 << 30, Parallelism::Parallel).unwrap();
    assert_eq!(r.verdict_counts.reject, 0);
    let r = estimate(&scanner(), "ab", 10, 0, 3, Parallelism::Sequential).unwrap();
    assert_eq!(r.cutoffs, 10);
}

#[test]
fn compiled_member_always_accepts() {
    let eps = Epsilon::new(2, 5).unwrap();
    let spec = compile_rpal(1, eps, 0);
    let r = estimate(&spec, "aa$1aa1", 6, 3, 1 << 34, Parallelism::Parallel).unwrap();
    assert_eq!(r.verdict_counts.accept, 6, "{r:?}");
}

#[test]
fn exact_examples() {
    let s = solve_exact(&rw_gate(0), "ab", &ExactOptions::default()).unwrap();
    assert!((s.p_accept - 1.0 / 3.0).abs() < 1e-9);
    let s = solve_exact(&pal_core(0), "aa", &ExactOptions::default()).unwrap();
    assert_eq!(s.p_reject, 0.0);
    assert!((s.p_accept - 1.0).abs() < 1e-12);
    let s = solve_exact(&scanner(), "abba", &ExactOptions::default()).unwrap();
    assert_eq!((s.p_accept, s.expected_steps), (1.0, Some(6.0)));
    let tight = ExactOptions {
        config_cap: 10,
        ..ExactOptions::default()
    };
    assert!(matches!(
        solve_exact(&scanner(), "abba", &tight),
        Err(EngineError::ResourceCap(_))
    ));
}

#[test]
fn nonhalting_mass_is_reported() {
    let mut b = SpecBuilder::new(1);
    let (start, acc, rej, lp) = (
        b.state("start"),
        b.state("acc"),
        b.state("rej"),
        b.state("loop"),
    );
    let coin = b.channel("coin", QuantumChannel::coin(1));
    b.set(start, SYM_LEFT, coin, vec![(acc, 0), (lp, 1)]);
    b.det(lp, 2, lp, 0);
    b.det(lp, SYM_RIGHT, lp, 0);
    let spec = b.build(Kind::Classical, "a", start, acc, rej, Some(rej));
    let s = solve_exact(&spec, "a", &ExactOptions::default()).unwrap();
    assert!((s.p_accept - 0.5).abs() < 1e-12);
    assert!((s.p_nonhalting - 0.5).abs() < 1e-9);
    assert_eq!(s.expected_steps, None);
}

#[test]
fn exact_matches_dense_oracle_on_zoo() {
    let mut checked = 0;
    for z in regression_zoo() {
        let dd = z.spec.register_dim * z.spec.register_dim;
        for x in &z.inputs {
            if z.spec.states.len() * (x.len() + 2) * dd > 2500 {
                continue;
            }
            let s = solve_exact(&z.spec, x, &ExactOptions::default()).unwrap();
            let (a, r, steps) = dense_oracle(&z.spec, x);
            assert!(
                (s.p_accept - a).abs() < 1e-8,
                "{} {x}: {} vs {a}",
                z.name,
                s.p_accept
            );
            assert!(
                (s.p_reject - r).abs() < 1e-8,
                "{} {x}: {} vs {r}",
                z.name,
                s.p_reject
            );
            let e = s.expected_steps.unwrap();
            assert!(
                (e - steps).abs() < 1e-6 * steps.max(1.0),
                "{} {x}: {e} vs {steps}",
                z.name
            );
            checked += 1;
        }
    }
    assert!(checked >= 40, "{checked}");
}

#[test]
fn exact_conserves_mass_on_zoo() {
    for z in regression_zoo() {
        for x in &z.inputs {
            let s = solve_exact(&z.spec, x, &ExactOptions::default()).unwrap();
            assert!(
                (s.p_accept + s.p_reject + s.p_nonhalting - 1.0).abs() < 1e-8,
                "{} {x}",
                z.name
            );
            assert!(s.p_nonhalting < 1e-9 && s.expected_steps.unwrap() >= 0.0);
        }
    }
}

#[test]
fn estimates_are_deterministic() {
    let spec = eq_core(1, 2);
    let a = estimate(&spec, "aab", 3000, 42, 1 << 20, Parallelism::Parallel).unwrap();
    let b = estimate(&spec, "aab", 3000, 42, 1 << 20, Parallelism::Sequential).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = estimate(&spec, "aab", 3000, 43, 1 << 20, Parallelism::Parallel).unwrap();
    assert_ne!(a.mean_steps, c.mean_steps);
}

#[test]
fn wilson_interval_values() {
    let (lo, hi) = wilson_interval(50, 100, Z95);
    assert!((lo - 0.403_831).abs() < 1e-6 && (hi - 0.596_169).abs() < 1e-6);
    assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    let (lo, hi) = wilson_interval(0, 10, Z95);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.277_533).abs() < 1e-6);
}
