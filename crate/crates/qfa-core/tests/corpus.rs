use qfa_core::builders::*;
use qfa_core::engines::{solve_exact, ExactOptions};
use qfa_core::langkit::is_member;
use qfa_core::Family;
use std::collections::HashMap;

fn family(t: Template) -> Family {
    match t {
        Template::Rpal => Family::Rpal,
        Template::Pppal => Family::Pppal,
    }
}

#[test]
fn corpus_shape() {
    let corpus = negative_corpus(50, 7);
    for class in DefectClass::ALL {
        let n = corpus.iter().filter(|c| c.class == class).count();
        assert_eq!(n, 50, "{class}");
    }
    for c in &corpus {
        assert_eq!(
            is_member(family(c.template), Some(c.i), &c.input),
            Ok(false),
            "{c:?}"
        );
        let shaped = format_regex(c.template, c.i).is_match(&c.input);
        assert_eq!(shaped, !c.class.caught_at_r(), "{c:?}");
    }
    assert_eq!(negative_corpus(50, 7), corpus);
    assert_ne!(negative_corpus(50, 8), corpus);
}

#[test]
fn interpreter_format_check_matches_regex() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let mut interps: HashMap<(Template, usize), Interpreter> = HashMap::new();
    for c in negative_corpus(50, 11) {
        let it = interps
            .entry((c.template, c.i))
            .or_insert_with(|| Interpreter::new(c.template, c.i, eps, eps.default_k()).unwrap());
        let plan = it.plan(&c.input).unwrap();
        assert_eq!(plan.format_ok, !c.class.caught_at_r(), "{c:?}");
        let p = it.p_accept(&c.input).unwrap();
        if c.class.caught_at_r() {
            assert_eq!(p, 0.0);
        } else {
            assert!(p <= 0.2, "{c:?} {p}");
        }
    }
}

#[test]
fn compiled_and_interpreted_laws_agree() {
    let eps: Epsilon = "1/5".parse().unwrap();
    let k = eps.default_k();
    let rpal = compile_rpal(1, eps, k);
    let pppal = compile_pppal(1, eps, k);
    let mut ir = Interpreter::new(Template::Rpal, 1, eps, k).unwrap();
    let mut ip = Interpreter::new(Template::Pppal, 1, eps, k).unwrap();
    let mut checked = 0;
    for c in negative_corpus(120, 3) {
        if c.i != 1 || c.input.len() > 60 {
            continue;
        }
        let (spec, it) = match c.template {
            Template::Rpal => (&rpal, &mut ir),
            Template::Pppal => (&pppal, &mut ip),
        };
        let s = solve_exact(spec, &c.input, &ExactOptions::default()).unwrap();
        let want = it.p_accept(&c.input).unwrap();
        if c.class.caught_at_r() {
            assert_eq!(s.p_accept, 0.0, "{c:?}");
        }
        assert!(s.p_accept <= 0.2 + 1e-8, "{c:?} {}", s.p_accept);
        assert!(
            (s.p_accept - want).abs() < 1e-9,
            "{c:?} compiled {} interp {want}",
            s.p_accept
        );
        checked += 1;
    }
    assert!(checked >= 50, "{checked}");
}
