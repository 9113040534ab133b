use qfa_core::builders::*;
use qfa_core::engines::{estimate, solve_exact, EstimateReport, ExactOptions};
use qfa_core::langkit::{build_rl, lang_params, pad, punc};
use qfa_core::par::Parallelism;

fn eps() -> Epsilon {
    "1/5".parse().unwrap()
}

fn words(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|m| {
            (0..n)
                .map(|k| if m >> k & 1 == 1 { 'b' } else { 'a' })
                .collect()
        })
        .collect()
}

fn is_pal(w: &str) -> bool {
    w.chars().eq(w.chars().rev())
}

/// Two-sample z statistic for equal acceptance proportions.
fn z_two(a: &EstimateReport, b: &EstimateReport) -> f64 {
    let (x, y) = (
        a.verdict_counts.accept as f64,
        b.verdict_counts.accept as f64,
    );
    let (n, m) = (a.trials as f64, b.trials as f64);
    let p = (x + y) / (n + m);
    let se = (p * (1.0 - p) * (1.0 / n + 1.0 / m)).sqrt();
    if se == 0.0 {
        return if x / n == y / m { 0.0 } else { f64::INFINITY };
    }
    (x / n - y / m).abs() / se
}

const Z_1PCT: f64 = 2.575_829_303_548_901;

#[test]
fn rpal_plan_of_small_member() {
    let it = Interpreter::new(Template::Rpal, 1, eps(), 9).unwrap();
    let plan = it.plan("aa$1aa1").unwrap();
    assert!(plan.format_ok);
    assert_eq!(
        plan.calls,
        vec![
            Call::Eq { left: 2, right: 2 },
            Call::Eq { left: 2, right: 2 }
        ]
    );
    assert_eq!((plan.input_len, plan.pal_word.as_str()), (7, "aa"));
    let bad = it.plan("aa$1a1").unwrap();
    assert!(bad.format_ok);
    assert_eq!(bad.calls[1], Call::Eq { left: 2, right: 1 });
    assert!(!it.plan("aa$1aa").unwrap().format_ok);
    assert!(!it.plan("a$1a1").unwrap().format_ok);
}

#[test]
fn pppal_plan_of_small_member() {
    let it = Interpreter::new(Template::Pppal, 1, eps(), 9).unwrap();
    let plan = it.plan("ab1aa0aa0aa$a0a").unwrap();
    assert!(plan.format_ok);
    assert_eq!(plan.pal_word, "ab");
    assert!(plan
        .calls
        .iter()
        .all(|c| matches!(c, Call::Eq { left, right } if left == right)));
    assert!(!it.plan("ab1aa0aa0aa$a0").unwrap().format_ok);
}

#[test]
fn members_accept_with_certainty() {
    let e = eps();
    let mut r = Interpreter::new(Template::Rpal, 1, e, e.default_k()).unwrap();
    for n in [2, 7] {
        for w in words(n) {
            let p = r.p_accept(&build_rl(1, &w).unwrap()).unwrap();
            if is_pal(&w) {
                assert!((p - 1.0).abs() < 1e-8, "{w} {p}");
            } else {
                assert!(p <= 0.2, "{w} {p}");
            }
        }
    }
    for (i, m) in [(1usize, 2usize), (1, 3), (2, 2), (2, 3)] {
        let params = lang_params(i as i64).unwrap();
        let mut it = Interpreter::new(Template::Pppal, i, e, e.default_k()).unwrap();
        for w in words(m.pow(i as u32)).into_iter().filter(|w| is_pal(w)) {
            let s = pad(&params, &punc(&params, &w).unwrap()).unwrap();
            let p = it.p_accept(&s).unwrap();
            assert!((p - 1.0).abs() < 1e-8, "{s} {p}");
        }
    }
}

#[test]
fn estimates_are_reproducible() {
    let e = eps();
    for mode in [InterpMode::Fast, InterpMode::Stepwise] {
        let mut it = Interpreter::new(Template::Rpal, 1, e, 0)
            .unwrap()
            .with_mode(mode)
            .with_loop_only(true);
        let a = it
            .estimate("ab$1a1", 400, 5, 1 << 30, Parallelism::Parallel)
            .unwrap();
        let b = it
            .estimate("ab$1a1", 400, 5, 1 << 30, Parallelism::Sequential)
            .unwrap();
        assert_eq!(a, b);
        let c = it
            .estimate("ab$1a1", 400, 6, 1 << 30, Parallelism::Parallel)
            .unwrap();
        assert_ne!(a.seed, c.seed);
    }
    let x = interpret(Template::Rpal, 1, e, 9, "aa$1aa1", 3, 1 << 40).unwrap();
    let y = interpret(Template::Rpal, 1, e, 9, "aa$1aa1", 3, 1 << 40).unwrap();
    assert_eq!(x, y);
}

#[test]
fn fast_and_stepwise_agree() {
    let e = eps();
    for input in ["ab$1a1", "aa$1aaa1", "aab$1aa1aaa1", "aa$1aa1"] {
        let mut f = Interpreter::new(Template::Rpal, 1, e, 0)
            .unwrap()
            .with_loop_only(true);
        let p = f.p_accept(input).unwrap();
        let a = f
            .estimate(input, 4000, 1, 1 << 30, Parallelism::Parallel)
            .unwrap();
        let mut s = f.clone().with_mode(InterpMode::Stepwise);
        let b = s
            .estimate(input, 4000, 2, 1 << 30, Parallelism::Parallel)
            .unwrap();
        assert!(
            z_two(&a, &b) < Z_1PCT,
            "{input} p={p} fast {} step {}",
            a.p_hat,
            b.p_hat
        );
        let (lo, hi) = b.interval(Z_1PCT);
        assert!(lo <= p && p <= hi, "{input} p={p} [{lo}, {hi}]");
    }
}

#[test]
fn compiled_and_interpreted_runs_agree() {
    let e = eps();
    let spec = compile_rpal_with(1, e, 0, true);
    let mut it = Interpreter::new(Template::Rpal, 1, e, 0)
        .unwrap()
        .with_loop_only(true)
        .with_mode(InterpMode::Stepwise);
    for input in ["ab$1a1", "aa$1aaa1", "aa$1aa1", "ba$1aa1", "ab$1aaa1a1"] {
        let exact = solve_exact(&spec, input, &ExactOptions::default())
            .unwrap()
            .p_accept;
        let p = it.p_accept(input).unwrap();
        assert!((exact - p).abs() < 1e-9, "{input} {exact} {p}");
        let a = estimate(&spec, input, 2000, 11, 1 << 32, Parallelism::Parallel).unwrap();
        let b = it
            .estimate(input, 2000, 12, 1 << 32, Parallelism::Parallel)
            .unwrap();
        assert!(
            z_two(&a, &b) < Z_1PCT,
            "{input} compiled {} interp {}",
            a.p_hat,
            b.p_hat
        );
    }
}
