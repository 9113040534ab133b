use super::member::is_member;
use super::params::lang_params;
use super::ppal::{checked_pow, pad, punc, total_length};
use super::rl::{build_rl, srel_next_len};
use super::{Family, LangError};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub left: String,
    pub right: String,
    pub suffix: String,
}

/// A pairwise dissimilar set of strings together with one distinguishing
/// suffix per pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DissimilarWitness {
    pub n: usize,
    pub semantics: DissimSemantics,
    pub strings: Vec<String>,
    pub pairs: Vec<WitnessPair>,
}

/// Length constraint on `wv` and `w'v` when distinguishing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DissimSemantics {
    /// `|wv| <= n` and `|w'v| <= n`.
    Bounded,
    /// `|wv| = |w'v| = n`.
    #[default]
    ExactLength,
}

impl DissimSemantics {
    fn admits(self, total: usize, n: usize) -> bool {
        match self {
            DissimSemantics::Bounded => total <= n,
            DissimSemantics::ExactLength => total == n,
        }
    }
}

impl DissimilarWitness {
    pub fn size(&self) -> usize {
        self.strings.len()
    }

    /// Re-checks every pair against the membership oracle.
    pub fn verify(&self, family: Family, i: Option<usize>) -> Result<bool, LangError> {
        let k = self.strings.len();
        if self.pairs.len() != k * k.saturating_sub(1) / 2 {
            return Ok(false);
        }
        let known: HashSet<&str> = self.strings.iter().map(String::as_str).collect();
        if known.len() != k {
            return Ok(false);
        }
        for p in &self.pairs {
            if !known.contains(p.left.as_str()) || !known.contains(p.right.as_str()) {
                return Ok(false);
            }
            let l = format!("{}{}", p.left, p.suffix);
            let r = format!("{}{}", p.right, p.suffix);
            if !self.semantics.admits(l.len(), self.n) || !self.semantics.admits(r.len(), self.n) {
                return Ok(false);
            }
            if is_member(family, i, &l)? == is_member(family, i, &r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissimMode {
    /// Witness family built from palindrome completions.
    Constructive,
    /// Maximum clique of the distinguishability graph over all short strings.
    Exhaustive,
    /// Exhaustive when within the brute-force caps, constructive otherwise.
    Auto,
}

pub const EXHAUSTIVE_MAX_N: usize = 14;
const MAX_ENUMERATED: usize = 1 << 17;
const MAX_LIVE: usize = 4096;
const MAX_CONSTRUCTIVE: usize = 512;

pub fn dissim_lower_bound(
    family: Family,
    i: Option<usize>,
    n: usize,
    mode: DissimMode,
    semantics: DissimSemantics,
) -> Result<DissimilarWitness, LangError> {
    match mode {
        DissimMode::Constructive => constructive(family, i, n, semantics),
        DissimMode::Exhaustive => exhaustive_dissimilarity(family, i, n, semantics),
        DissimMode::Auto => match exhaustive_dissimilarity(family, i, n, semantics) {
            Err(LangError::ResourceCap(_)) => constructive(family, i, n, semantics),
            other => other,
        },
    }
}

fn all_pairs(
    n: usize,
    semantics: DissimSemantics,
    strings: Vec<String>,
    suffix: impl Fn(usize, usize) -> String,
) -> DissimilarWitness {
    let mut pairs = Vec::new();
    for a in 0..strings.len() {
        for b in a + 1..strings.len() {
            pairs.push(WitnessPair {
                left: strings[a].clone(),
                right: strings[b].clone(),
                suffix: suffix(a, b),
            });
        }
    }
    DissimilarWitness {
        n,
        semantics,
        strings,
        pairs,
    }
}

fn words(h: usize) -> Vec<String> {
    (0..1usize << h)
        .map(|bits| {
            (0..h)
                .map(|k| {
                    if bits >> (h - 1 - k) & 1 == 1 {
                        'b'
                    } else {
                        'a'
                    }
                })
                .collect()
        })
        .collect()
}

fn build_member(family: Family, i: Option<usize>, p: &str) -> Result<String, LangError> {
    match family {
        Family::Pal => Ok(p.to_string()),
        Family::Rpal => build_rl(i.unwrap_or(0), p),
        Family::Ppal => punc(&lang_params(i.unwrap_or(0) as i64)?, p),
        Family::Pppal => {
            let params = lang_params(i.unwrap_or(0) as i64)?;
            pad(&params, &punc(&params, p)?)
        }
        _ => Err(LangError::Domain(format!(
            "no palindrome completion for {family}"
        ))),
    }
}

/// Length of the member built from a palindrome of length `len`, if any.
fn member_length(family: Family, i: Option<usize>, len: usize) -> Result<Option<u64>, LangError> {
    let level = i.unwrap_or(0);
    Ok(match family {
        Family::Pal => Some(len as u64),
        Family::Rpal => {
            let mut k = len as u64;
            for _ in 0..level {
                k = srel_next_len(k)?;
            }
            Some(k)
        }
        Family::Ppal | Family::Pppal => {
            let params = lang_params(level as i64)?;
            let m = (1..=len).find(|&m| checked_pow(m, level).is_none_or(|p| p >= len));
            match m {
                Some(m) if checked_pow(m, level) == Some(len) && m >= params.min_segment => {
                    if family == Family::Ppal {
                        Some((len + params.delim_width * len / m) as u64)
                    } else if m <= 60 {
                        Some(total_length(&params, m)?)
                    } else {
                        Some(u64::MAX)
                    }
                }
                _ => None,
            }
        }
        _ => None,
    })
}

/// Under [`DissimSemantics::ExactLength`] the witness length is the common
/// length of the completed members, which may be below `n`.
fn constructive(
    family: Family,
    i: Option<usize>,
    n: usize,
    semantics: DissimSemantics,
) -> Result<DissimilarWitness, LangError> {
    if family == Family::Eq {
        let h = n / 2;
        return Ok(match semantics {
            DissimSemantics::Bounded => {
                let strings: Vec<String> = (0..=h).map(|k| "a".repeat(k)).collect();
                all_pairs(n, semantics, strings, |a, _| "b".repeat(a))
            }
            DissimSemantics::ExactLength => {
                // only a^h is live among strings of length h
                let strings = vec!["a".repeat(h), "b".repeat(h)];
                all_pairs(2 * h, semantics, strings, |_, _| "b".repeat(h))
            }
        });
    }
    // largest palindrome length whose member still fits in n
    let mut best = None;
    for len in 2..=n {
        match member_length(family, i, len)? {
            Some(t) if t <= n as u64 => best = Some(len),
            Some(_) => break,
            None => {}
        }
    }
    let Some(len) = best else {
        return Ok(DissimilarWitness {
            n,
            semantics,
            strings: vec![String::new()],
            pairs: vec![],
        });
    };
    let h = len / 2;
    if 1usize << h > MAX_CONSTRUCTIVE {
        return Err(LangError::ResourceCap(format!("2^{h} witness strings")));
    }
    let mid = if len % 2 == 1 { "a" } else { "" };
    let mut prefixes = Vec::new();
    let mut total = n;
    let mut suffixes = Vec::new();
    for x in words(h) {
        let xr: String = x.chars().rev().collect();
        let t = build_member(family, i, &format!("{x}{mid}{xr}"))?;
        let mut seen = 0;
        let mut cut = 0;
        for (k, c) in t.bytes().enumerate() {
            if seen == h {
                break;
            }
            if c == b'a' || c == b'b' {
                seen += 1;
            }
            cut = k + 1;
        }
        prefixes.push(t[..cut].to_string());
        suffixes.push(t[cut..].to_string());
        total = t.len();
    }
    if semantics == DissimSemantics::Bounded {
        total = n;
    }
    Ok(all_pairs(total, semantics, prefixes, |a, _| {
        suffixes[a].clone()
    }))
}

fn enumerate(alphabet: &[u8], n: usize) -> Result<Vec<String>, LangError> {
    let mut total = 0usize;
    let mut layer = 1usize;
    for _ in 0..=n {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(alphabet.len());
    }
    if total > MAX_ENUMERATED {
        return Err(LangError::ResourceCap(format!(
            "{total} strings of length <= {n} exceed the brute-force cap {MAX_ENUMERATED}"
        )));
    }
    let mut out = vec![String::new()];
    let mut start = 0;
    for _ in 0..n {
        let end = out.len();
        for k in start..end {
            for &c in alphabet {
                let mut s = out[k].clone();
                s.push(c as char);
                out.push(s);
            }
        }
        start = end;
    }
    Ok(out)
}

/// Exact dissimilarity by maximum clique search.
pub fn exhaustive_dissimilarity(
    family: Family,
    i: Option<usize>,
    n: usize,
    semantics: DissimSemantics,
) -> Result<DissimilarWitness, LangError> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(LangError::ResourceCap(format!(
            "n = {n} exceeds the brute-force bound {EXHAUSTIVE_MAX_N}"
        )));
    }
    let all = enumerate(family.alphabet(), n)?;
    let mut members = Vec::new();
    for s in &all {
        if semantics.admits(s.len(), n) && is_member(family, i, s)? {
            members.push(s.clone());
        }
    }
    // member suffixes of each live prefix
    let mut ext: HashMap<String, HashSet<String>> = HashMap::new();
    for t in &members {
        for k in 0..=t.len() {
            ext.entry(t[..k].to_string())
                .or_default()
                .insert(t[k..].to_string());
        }
    }
    let mut nodes: Vec<String> = ext.keys().cloned().collect();
    nodes.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    // one dead representative per length class suffices
    let classes = match semantics {
        DissimSemantics::Bounded => 1,
        DissimSemantics::ExactLength => n + 1,
    };
    let mut dead_seen = vec![false; classes];
    for s in &all {
        let class = s.len() % classes;
        if !dead_seen[class] && !ext.contains_key(s) {
            dead_seen[class] = true;
            nodes.push(s.clone());
        }
    }
    for s in &nodes[ext.len()..] {
        ext.insert(s.clone(), HashSet::new());
    }
    if nodes.len() > MAX_LIVE {
        return Err(LangError::ResourceCap(format!(
            "{} live strings exceed the clique cap {MAX_LIVE}",
            nodes.len()
        )));
    }
    let distinguish = |a: &str, b: &str| -> Option<String> {
        if semantics == DissimSemantics::ExactLength && a.len() != b.len() {
            return None;
        }
        let room = n - a.len().max(b.len());
        let (sa, sb) = (&ext[a], &ext[b]);
        sa.symmetric_difference(sb)
            .filter(|v| v.len() <= room)
            .min_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)))
            .cloned()
    };
    let k = nodes.len();
    let words_per = k.div_ceil(64);
    let mut adj = vec![vec![0u64; words_per]; k];
    for a in 0..k {
        for b in a + 1..k {
            if distinguish(&nodes[a], &nodes[b]).is_some() {
                adj[a][b / 64] |= 1 << (b % 64);
                adj[b][a / 64] |= 1 << (a % 64);
            }
        }
    }
    let clique = max_clique(&adj, k);
    let strings: Vec<String> = clique.iter().map(|&v| nodes[v].clone()).collect();
    let mut pairs = Vec::new();
    for a in 0..strings.len() {
        for b in a + 1..strings.len() {
            pairs.push(WitnessPair {
                left: strings[a].clone(),
                right: strings[b].clone(),
                suffix: distinguish(&strings[a], &strings[b]).expect("clique edge"),
            });
        }
    }
    Ok(DissimilarWitness {
        n,
        semantics,
        strings,
        pairs,
    })
}

type Bits = Vec<u64>;

fn bits_iter(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(w, &word)| {
        (0..64)
            .filter(move |k| word >> k & 1 == 1)
            .map(move |k| w * 64 + k)
    })
}

fn count(b: &Bits) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Bron-Kerbosch with pivoting and a size bound.
fn max_clique(adj: &[Bits], k: usize) -> Vec<usize> {
    let words = k.div_ceil(64);
    let mut p = vec![0u64; words];
    for v in 0..k {
        p[v / 64] |= 1 << (v % 64);
    }
    let mut best = Vec::new();
    let mut r = Vec::new();
    expand(adj, &mut r, p, vec![0u64; words], &mut best);
    best.sort_unstable();
    best
}

fn expand(adj: &[Bits], r: &mut Vec<usize>, mut p: Bits, mut x: Bits, best: &mut Vec<usize>) {
    if count(&p) == 0 {
        if count(&x) == 0 && r.len() > best.len() {
            *best = r.clone();
        }
        return;
    }
    if r.len() + count(&p) <= best.len() {
        return;
    }
    let pivot = bits_iter(&p)
        .chain(bits_iter(&x))
        .max_by_key(|&u| count(&and(&p, &adj[u])))
        .unwrap();
    let candidates: Vec<usize> = bits_iter(&p)
        .filter(|&v| adj[pivot][v / 64] >> (v % 64) & 1 == 0)
        .collect();
    for v in candidates {
        r.push(v);
        expand(adj, r, and(&p, &adj[v]), and(&x, &adj[v]), best);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}
