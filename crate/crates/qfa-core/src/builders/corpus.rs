//! Structured near-member inputs for the two templates.
//!
//! Every generated string is a nonmember by the membership oracle. All classes
//! except `RegexViolation` pass the format check of stage (R), so they reach
//! the probabilistic part of the machine.

use super::interp::Template;
use crate::langkit::{build_rl, cbin, is_member, lang_params, pad, punc, Family};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectClass {
    RegexViolation,
    SegmentLength,
    BlockCount,
    WellOrdering,
    NonpalindromicPrefix,
}

impl DefectClass {
    pub const ALL: [DefectClass; 5] = [
        DefectClass::RegexViolation,
        DefectClass::SegmentLength,
        DefectClass::BlockCount,
        DefectClass::WellOrdering,
        DefectClass::NonpalindromicPrefix,
    ];

    /// Whether the format check alone rejects every string of the class.
    pub fn caught_at_r(self) -> bool {
        self == DefectClass::RegexViolation
    }
}

impl fmt::Display for DefectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DefectClass::RegexViolation => "regex-violation",
            DefectClass::SegmentLength => "segment-length",
            DefectClass::BlockCount => "block-count",
            DefectClass::WellOrdering => "well-ordering",
            DefectClass::NonpalindromicPrefix => "nonpalindromic-prefix",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeCase {
    pub template: Template,
    pub i: usize,
    pub class: DefectClass,
    pub input: String,
}

/// Format accepted by stage (R) of a template.
pub fn format_regex(template: Template, i: usize) -> Regex {
    let pat = match template {
        Template::Rpal => format!(r"^[ab][ab]+(\$1(a+1)+){{{i}}}$"),
        Template::Pppal => {
            let p = lang_params(i as i64).expect("level");
            let bin = |j| cbin(&p, j).expect("delimiter");
            let inner: Vec<String> = (1..i).map(bin).collect();
            let d = if inner.is_empty() {
                String::new()
            } else {
                format!("(?:(?:{})[ab]+)*", inner.join("|"))
            };
            let (mark, zero) = (bin(i), "0".repeat(p.delim_width));
            format!(r"^[ab]+{d}{mark}(?:a+(?:\$|{zero}))*a+\$a{zero}a$")
        }
    };
    Regex::new(&pat).expect("pattern")
}

fn family(t: Template) -> Family {
    match t {
        Template::Rpal => Family::Rpal,
        Template::Pppal => Family::Pppal,
    }
}

fn words(n: usize) -> impl Iterator<Item = String> {
    (0..1usize << n).map(move |m| {
        (0..n)
            .map(|k| if m >> k & 1 == 1 { 'b' } else { 'a' })
            .collect()
    })
}

fn is_pal(w: &str) -> bool {
    w.bytes().eq(w.bytes().rev())
}

/// A well-formed input built around prefix word `w`.
#[derive(Debug, Clone)]
struct Base {
    template: Template,
    i: usize,
    w: String,
    s: String,
}

fn bases() -> Vec<Base> {
    let mut out = Vec::new();
    for n in [2, 7] {
        for w in words(n) {
            let s = build_rl(1, &w).expect("rl");
            out.push(Base {
                template: Template::Rpal,
                i: 1,
                w,
                s,
            });
        }
    }
    for (i, m) in [(1usize, 2usize), (1, 3), (2, 2), (2, 3)] {
        let p = lang_params(i as i64).expect("level");
        for w in words(m.pow(i as u32)) {
            let s = pad(&p, &punc(&p, &w).expect("punc")).expect("pad");
            out.push(Base {
                template: Template::Pppal,
                i,
                w,
                s,
            });
        }
    }
    out
}

/// Maximal runs of `a` directly followed by `sep`, as `(start, len)`.
fn a_runs_before(s: &[u8], sep: &[u8], from: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut k = from;
    while k < s.len() {
        if s[k] != b'a' || (k > 0 && s[k - 1] == b'a') {
            k += 1;
            continue;
        }
        let len = s[k..].iter().take_while(|&&c| c == b'a').count();
        if s[k + len..].starts_with(sep) {
            out.push((k, len));
        }
        k += len;
    }
    out
}

/// Letter runs, as `(start, len)`.
fn letter_runs(s: &[u8]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < s.len() {
        let len = s[k..]
            .iter()
            .take_while(|&&c| c == b'a' || c == b'b')
            .count();
        if len > 0 {
            out.push((k, len));
            k += len;
        } else {
            k += 1;
        }
    }
    out
}

fn splice(s: &[u8], at: usize, del: usize, ins: &[u8]) -> String {
    let mut v = s[..at].to_vec();
    v.extend_from_slice(ins);
    v.extend_from_slice(&s[at + del..]);
    String::from_utf8(v).expect("ascii")
}

fn mutate_regex(b: &Base, rng: &mut impl Rng) -> Option<String> {
    let s = b.s.as_bytes();
    let alpha = family(b.template).alphabet();
    let at = rng.gen_range(0..s.len());
    let c = [*alpha.choose(rng)?];
    Some(match rng.gen_range(0..4) {
        0 => splice(s, at, 1, &c),
        1 => splice(s, at, 1, b""),
        2 => splice(s, at, 0, &c),
        _ => {
            let j = rng.gen_range(0..s.len());
            let mut v = s.to_vec();
            v.swap(at, j);
            String::from_utf8(v).ok()?
        }
    })
}

fn pppal_sep(i: usize) -> (usize, String, String) {
    let p = lang_params(i as i64).expect("level");
    (
        p.delim_width,
        "0".repeat(p.delim_width),
        cbin(&p, i).expect("mark"),
    )
}

fn mutate_segment(b: &Base, rng: &mut impl Rng) -> Option<String> {
    let s = b.s.as_bytes();
    let runs = match b.template {
        Template::Rpal => {
            let d = b.s.find('$')?;
            a_runs_before(s, b"1", d)
        }
        Template::Pppal => letter_runs(s),
    };
    let &(at, len) = runs.choose(rng)?;
    if rng.gen_bool(0.5) {
        Some(splice(s, at, 0, b"a"))
    } else {
        (len > 1).then(|| splice(s, at + rng.gen_range(0..len), 1, b""))
    }
}

fn mutate_blocks(b: &Base, rng: &mut impl Rng) -> Option<String> {
    let s = b.s.as_bytes();
    let (runs, sep) = match b.template {
        Template::Rpal => (a_runs_before(s, b"1", b.s.find('$')?), b"1".to_vec()),
        Template::Pppal => {
            let (_, zero, mark) = pppal_sep(b.i);
            let from = b.s.find(&mark)? + mark.len();
            (a_runs_before(s, zero.as_bytes(), from), zero.into_bytes())
        }
    };
    let &(at, len) = runs.choose(rng)?;
    let unit = len + sep.len();
    if rng.gen_bool(0.5) {
        Some(splice(s, at, 0, &s[at..at + unit]))
    } else {
        Some(splice(s, at, unit, b""))
    }
}

fn mutate_order(b: &Base, rng: &mut impl Rng) -> Option<String> {
    if b.template != Template::Pppal || b.i < 2 {
        return None;
    }
    let (c, _, mark) = pppal_sep(b.i);
    let m = (b.w.len() as f64).powf(1.0 / b.i as f64).round() as usize;
    let s = b.s.as_bytes();
    let end = b.s.find(&mark)? + c;
    let cuts: Vec<usize> = (0..end)
        .filter(|&k| s[k].is_ascii_digit() && (k == 0 || !s[k - 1].is_ascii_digit()))
        .collect();
    let ins = |k: usize| k + c;
    match rng.gen_range(0..3) {
        0 => {
            let k = *cuts.choose(rng)?;
            let seg: Vec<u8> = (0..m).map(|_| *b"ab".choose(rng).unwrap()).collect();
            let one = cbin(&lang_params(b.i as i64).ok()?, rng.gen_range(1..b.i)).ok()?;
            let unit = [seg, one.into_bytes()].concat();
            Some(splice(s, ins(k), 0, &unit))
        }
        1 => {
            let k = *cuts[..cuts.len() - 1].choose(rng)?;
            let start = s[..k]
                .iter()
                .rposition(|c| c.is_ascii_digit())
                .map_or(0, |p| p + 1);
            Some(splice(s, start, k + c - start, b""))
        }
        _ => {
            let k = *cuts[..cuts.len() - 1].choose(rng)?;
            let from = s[..k]
                .iter()
                .rposition(|c| c.is_ascii_digit())
                .map_or(0, |p| p + 1);
            let at = rng.gen_range(from + 1..k + 1);
            let d = s[k..k + c].to_vec();
            let moved = splice(s, k, c, b"");
            Some(splice(moved.as_bytes(), at, 0, &d))
        }
    }
}

type Mutator = fn(&Base, &mut ChaCha8Rng) -> Option<String>;

fn sample(
    bases: &[Base],
    class: DefectClass,
    mutate: Mutator,
    per_class: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<NegativeCase> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut regexes = HashMap::new();
    for _ in 0..per_class * 200 {
        if out.len() == per_class {
            break;
        }
        let b = bases.choose(rng).expect("bases");
        let Some(s) = mutate(b, rng) else { continue };
        let re = regexes
            .entry((b.template, b.i))
            .or_insert_with(|| format_regex(b.template, b.i));
        let shaped = re.is_match(&s) != class.caught_at_r();
        if !shaped || is_member(family(b.template), Some(b.i), &s) != Ok(false) {
            continue;
        }
        if seen.insert((b.template, b.i, s.clone())) {
            out.push(NegativeCase {
                template: b.template,
                i: b.i,
                class,
                input: s,
            });
        }
    }
    out
}

/// `per_class` nonmembers for each defect class, reproducible from `seed`.
/// Classes with too few candidates come back short.
pub fn negative_corpus(per_class: usize, seed: u64) -> Vec<NegativeCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = bases();
    let mut out = Vec::new();
    let muts: [(DefectClass, Mutator); 4] = [
        (DefectClass::RegexViolation, mutate_regex),
        (DefectClass::SegmentLength, mutate_segment),
        (DefectClass::BlockCount, mutate_blocks),
        (DefectClass::WellOrdering, mutate_order),
    ];
    for (class, f) in muts {
        let pool: Vec<Base> = all
            .iter()
            .filter(|b| class != DefectClass::WellOrdering || b.i >= 2)
            .cloned()
            .collect();
        out.extend(sample(&pool, class, f, per_class, &mut rng));
    }
    let mut pal: Vec<&Base> = all.iter().filter(|b| !is_pal(&b.w)).collect();
    pal.shuffle(&mut rng);
    out.extend(pal.into_iter().take(per_class).map(|b| NegativeCase {
        template: b.template,
        i: b.i,
        class: DefectClass::NonpalindromicPrefix,
        input: b.s.clone(),
    }));
    out
}
