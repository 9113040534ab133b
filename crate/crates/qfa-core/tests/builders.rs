use qfa_core::builders::*;
use qfa_core::engines::{solve_exact, ExactOptions};
use qfa_core::machine::validate_spec;
use std::f64::consts::{PI, SQRT_2};

fn exact(spec: &qfa_core::MachineSpec, input: &str) -> (f64, f64) {
    let s = solve_exact(spec, input, &ExactOptions::default()).unwrap();
    assert!(s.p_nonhalting < 1e-9, "{s:?}");
    (s.p_accept, s.p_reject)
}

/// Renewal closed form: per round accept with `a`, reject with `r`.
fn renewal(a: f64, r: f64) -> f64 {
    a / (a + r)
}

#[test]
fn epsilon_gate_sizes() {
    let e: Epsilon = "1/5".parse().unwrap();
    assert_eq!((e.eq_coins(), e.pal_sweeps(), e.default_k()), (3, 11, 9));
    let e: Epsilon = "0.25".parse().unwrap();
    assert_eq!(e, Epsilon::new(1, 4).unwrap());
    assert_eq!((e.eq_coins(), e.pal_sweeps(), e.default_k()), (3, 10, 8));
    for bad in ["1/2", "0", "3/4", "x", "0.5", "1.0"] {
        assert!(bad.parse::<Epsilon>().is_err(), "{bad}");
    }
    for (n, d) in [(1u64, 3u64), (1, 10), (1, 100), (3, 7)] {
        let e = Epsilon::new(n, d).unwrap();
        let x = e.value();
        assert_eq!(e.eq_coins(), 1 + (1.0 / x - 1.0).log2().ceil() as u32);
        assert_eq!(e.default_k(), 6 + (1.0 / x).log2().ceil() as u32);
    }
}

#[test]
fn rw_gate_exit_law() {
    for k in 0..4u32 {
        let spec = rw_gate(k);
        assert!(validate_spec(&spec).pass);
        for input in ["", "a", "ab$", "0101#ab"] {
            let n = input.len() as f64;
            let (acc, rej) = exact(&spec, input);
            let want = 2f64.powi(-(k as i32)) / (n + 1.0);
            assert!((acc - want).abs() < 1e-12, "k={k} {input}: {acc} vs {want}");
            assert!((acc + rej - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn eq_core_round_law() {
    let coins = 3;
    let spec = eq_core(coins, 2);
    assert!(validate_spec(&spec).pass);
    for (j, k) in [(0, 0), (1, 1), (2, 1), (1, 3), (3, 3), (4, 0)] {
        let input = "a".repeat(j) + &"b".repeat(k);
        let n = (j + k) as f64;
        let r = ((j as f64 - k as f64) * PI * SQRT_2).sin().powi(2);
        let g = 2f64.powi(-(coins as i32)) / ((n + 1.0) * (n + 1.0));
        let (acc, _) = exact(&spec, &input);
        let want = renewal((1.0 - r) * g, r);
        assert!((acc - want).abs() < 1e-9, "{input}: {acc} vs {want}");
    }
    for bad in ["ba", "aba", "bba"] {
        assert_eq!(exact(&spec, bad).0, 0.0);
    }
}

/// Plain-float counter run: `(u, x, y, z)` after the scaled updates.
fn pal_vector(w: &str) -> [f64; 4] {
    let h = 0.5f64.sqrt();
    let mut v = [h, h, 0.0, 0.0];
    for ch in w.chars() {
        let d = if ch == 'a' { 1.0 } else { 2.0 };
        v = [
            v[0] / 8.0,
            4.0 * v[1] / 8.0,
            (d * v[0] + 4.0 * v[2]) / 8.0,
            (d * v[1] + v[3]) / 8.0,
        ];
    }
    v
}

#[test]
fn pal_core_round_law() {
    for sweeps in [0u32, 1, 2] {
        let spec = pal_core(sweeps);
        assert!(validate_spec(&spec).pass);
        for w in ["", "a", "ab", "aa", "aba", "abb", "abba", "baab", "bbab"] {
            let v = pal_vector(w);
            let norm: f64 = v.iter().map(|x| x * x).sum();
            let hit = (v[2] - v[3]).powi(2) / 2.0;
            let g = 2f64.powi(-((sweeps as usize * w.len()) as i32));
            let (acc, _) = exact(&spec, w);
            let want = renewal((norm - hit) * g, hit);
            assert!(
                (acc - want).abs() < 1e-9 * want.max(1e-3),
                "{sweeps} {w}: {acc} vs {want}"
            );
            let palin = w.chars().rev().collect::<String>() == w;
            assert_eq!(palin, hit < 1e-30, "{w}");
        }
    }
}

#[test]
fn rpal_small_examples() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let spec = compile_rpal(1, eps, eps.default_k());
    let rep = validate_spec(&spec);
    assert!(
        rep.pass,
        "{:?}",
        &rep.violations[..rep.violations.len().min(5)]
    );
    eprintln!("rpal states {}", spec.states.len());
    let (acc, _) = exact(&spec, "aa$1aa1");
    assert!((acc - 1.0).abs() < 1e-8, "{acc}");
    let (acc, _) = exact(&spec, "ab$1aa1");
    assert!(acc <= 0.2, "{acc}");
    let (acc, _) = exact(&spec, "aa$1aaa1");
    assert!(acc <= 0.2, "{acc}");
    assert_eq!(exact(&spec, "aa$1aa").0, 0.0);
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

#[test]
fn rpal_one_members_and_prefix_defects() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let spec = compile_rpal(1, eps, eps.default_k());
    let t = std::time::Instant::now();
    for n in [2, 7] {
        for w in words(n) {
            let s = qfa_core::langkit::build_rl(1, &w).unwrap();
            let member = w.chars().rev().collect::<String>() == w;
            let (acc, _) = exact(&spec, &s);
            if member {
                assert!((acc - 1.0).abs() < 1e-8, "{s}: {acc}");
            } else {
                assert!(acc <= 0.2 + 1e-8, "{s}: {acc}");
            }
        }
    }
    eprintln!("rpal sweep {:?}", t.elapsed());
}

fn pppal_member(i: usize, p: &str) -> String {
    let params = qfa_core::langkit::lang_params(i as i64).unwrap();
    let shell = qfa_core::langkit::punc(&params, p).unwrap();
    qfa_core::langkit::pad(&params, &shell).unwrap()
}

#[test]
fn pppal_members_and_prefix_defects() {
    let eps: Epsilon = "1/5".parse().unwrap();
    for (i, lens) in [(1usize, vec![2usize, 3]), (2, vec![4])] {
        let spec = compile_pppal(i as u16, eps, eps.default_k());
        let rep = validate_spec(&spec);
        assert!(
            rep.pass,
            "{:?}",
            &rep.violations[..rep.violations.len().min(5)]
        );
        eprintln!("pppal{i} states {}", spec.states.len());
        let t = std::time::Instant::now();
        for n in lens {
            for w in words(n) {
                let s = pppal_member(i, &w);
                let member = w.chars().rev().collect::<String>() == w;
                let (acc, _) = exact(&spec, &s);
                if member {
                    assert!((acc - 1.0).abs() < 1e-8, "{s}: {acc}");
                } else {
                    assert!(acc <= 0.2 + 1e-8, "{s}: {acc}");
                }
            }
        }
        eprintln!("pppal{i} sweep {:?}", t.elapsed());
    }
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

#[test]
fn token_views() {
    assert_eq!(
        tokenize("a01$b", 2)
            .unwrap()
            .iter()
            .map(|p| p.0)
            .collect::<Vec<_>>(),
        vec![
            Token::Left,
            Token::A,
            Token::Bin(1, 2),
            Token::Dollar,
            Token::B,
            Token::Right
        ]
    );
    assert!(matches!(
        tokenize("a011$", 2),
        Err(BuildError::Malformed(_))
    ));
    let v = counting(Pred::bin(1, 1), Pred::ab());
    let tv = TokenView::new("a01a01$aa", &v, 2).unwrap();
    assert_eq!(tv.framed(), "▷aabb◁");
    assert_eq!((tv.p_l, tv.p_m, tv.p_r), (0, Some(7), 10));
    assert!(matches!(
        TokenView::new("a01a01aa", &v, 2),
        Err(BuildError::MissingSignpost(_))
    ));
    let pal = View {
        pm: None,
        pr: (Pred::bin(3, 3), 1),
        left: Pred::ab(),
        left_mode: LeftMode::Copy,
        ..v
    };
    assert_eq!(
        TokenView::new("a01b10a11aa", &pal, 2).unwrap().virtual_tape,
        "aba"
    );
}

#[test]
fn same_length_fragment() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let f = build_same_length(counting(Pred::ab(), Pred::ab()), 1, eps).unwrap();
    assert!(validate_spec(&f.spec).pass);
    assert_eq!(f.return_continue, Some(f.spec.q_acc));
    assert!((exact(&f.spec, "ab$ba").0 - 1.0).abs() < 1e-9);
    assert!(exact(&f.spec, "ab$bab").0 <= 0.2);
    let f = build_same_length(counting(Pred::bin(1, 1), Pred::ab()), 2, eps).unwrap();
    assert!((exact(&f.spec, "a01a01$aa").0 - 1.0).abs() < 1e-9);
    assert!(exact(&f.spec, "a01a01$aaa").0 <= 0.2);
}

#[test]
fn twice_as_long_fragment() {
    let v = counting(Pred::any_bin(), Pred::any_bin());
    let eps: Epsilon = "1/5".parse().unwrap();
    let f = build_twice_as_long(v, 1, eps).unwrap();
    assert!(validate_spec(&f.spec).pass);
    assert!((exact(&f.spec, "a0a0a0a0a$a0a0a").0 - 1.0).abs() < 1e-9);
    assert_eq!(exact(&f.spec, "a0a0a0a$a0a0a").0, 0.0);
    let tenth: Epsilon = "1/10".parse().unwrap();
    let f = build_twice_as_long(v, 1, tenth).unwrap();
    assert!(exact(&f.spec, "a0a0a0a0a$a0a0a0a").0 <= 0.1);
}

#[test]
fn pal_check_fragment() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let f = build_pal_check(Pred::dollar(), 1, eps).unwrap();
    assert!(validate_spec(&f.spec).pass);
    assert_eq!(f.return_accept, Some(f.spec.q_acc));
    assert!((exact(&f.spec, "aa$1aa1").0 - 1.0).abs() < 1e-9);
    assert!(exact(&f.spec, "ab$1aa1").0 <= 0.2);
    let f = build_pal_check(Pred::bin(3, 3), 2, eps).unwrap();
    assert!((exact(&f.spec, "a01b10a11aa").0 - 1.0).abs() < 1e-9);
    assert!(exact(&f.spec, "a01b10b11aa").0 <= 0.2);
    assert!(build_pal_check(Pred::ab(), 1, eps).is_err());
    let g = build_rw_gate(2);
    assert!((exact(&g.spec, "ab").0 - 1.0 / 12.0).abs() < 1e-12);
}
