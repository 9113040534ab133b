use super::params::cbin;
use super::{LangError, LangParams};
use serde::{Deserialize, Serialize};

/// Delimiter values `j`, each rendered on the tape as `cbin_i(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelimiterSeq {
    pub entries: Vec<usize>,
}

impl DelimiterSeq {
    pub fn render(&self, params: &LangParams) -> Result<Vec<String>, LangError> {
        self.entries.iter().map(|&j| cbin(params, j)).collect()
    }
}

pub(crate) fn checked_pow(m: usize, e: usize) -> Option<usize> {
    m.checked_pow(e as u32)
}

/// Stage-by-stage slot assignment: stage `j` (from `i` down to 1) fills every
/// vacant slot whose 1-based index is a multiple of `m^(j-1)`.
pub fn well_ordered_sequence(params: &LangParams, m: usize) -> Result<DelimiterSeq, LangError> {
    let i = params.level;
    if m < params.min_segment {
        return Err(LangError::Domain(format!(
            "m = {m} is below m_{i} = {}",
            params.min_segment
        )));
    }
    let len = checked_pow(m, i - 1)
        .filter(|&l| l <= 1 << 24)
        .ok_or_else(|| LangError::ResourceCap(format!("sequence length {m}^{}", i - 1)))?;
    let mut slots = vec![0usize; len];
    for j in (1..=i).rev() {
        let step = m.pow((j - 1) as u32);
        let mut s = step;
        while s <= len {
            if slots[s - 1] == 0 {
                slots[s - 1] = j;
            }
            s += step;
        }
    }
    Ok(DelimiterSeq { entries: slots })
}

/// Checks the three conditions of well-ordering directly.
pub fn is_well_ordered(params: &LangParams, m: usize, seq: &DelimiterSeq) -> bool {
    let i = params.level;
    let e = &seq.entries;
    if e.is_empty() || e.iter().any(|&v| v < 1 || v > i) {
        return false;
    }
    if e.iter().filter(|&&v| v == i).count() != 1 || *e.last().unwrap() != i {
        return false;
    }
    for j in 2..=i {
        let mut count = 0usize;
        for &v in e {
            if v >= j {
                if count != m - 1 {
                    return false;
                }
                count = 0;
            } else if v == j - 1 {
                count += 1;
            }
        }
    }
    true
}

/// Number of entries with value at least `j`.
pub fn sumdel(seq: &DelimiterSeq, j: usize) -> usize {
    seq.entries.iter().filter(|&&v| v >= j).count()
}

fn integer_root(n: usize, k: usize) -> Option<usize> {
    if k == 1 {
        return Some(n);
    }
    let guess = (n as f64).powf(1.0 / k as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| checked_pow(r, k) == Some(n))
}

pub fn punc(params: &LangParams, p: &str) -> Result<String, LangError> {
    if !p.bytes().all(|c| c == b'a' || c == b'b') {
        return Err(LangError::Malformed(format!("{p:?} is not over {{a,b}}")));
    }
    let i = params.level;
    let m = integer_root(p.len(), i).ok_or_else(|| {
        LangError::Length(format!("|p| = {} is not a perfect {i}-th power", p.len()))
    })?;
    if m < params.min_segment {
        return Err(LangError::Length(format!(
            "segment length {m} is below m_{i} = {}",
            params.min_segment
        )));
    }
    let seq = well_ordered_sequence(params, m)?;
    let rendered = seq.render(params)?;
    let mut out = String::with_capacity(p.len() + rendered.len() * params.delim_width);
    for (k, d) in rendered.iter().enumerate() {
        out.push_str(&p[k * m..(k + 1) * m]);
        out.push_str(d);
    }
    Ok(out)
}

/// Index of the leftmost binary symbol.
pub fn segl(w: &str) -> Result<usize, LangError> {
    w.bytes()
        .position(|c| c == b'0' || c == b'1')
        .ok_or(LangError::UndefinedSegl)
}

fn p_block(params: &LangParams, l: usize, out: &mut String) {
    let zeros = "0".repeat(params.delim_width);
    let seg = "a".repeat(l);
    out.push('$');
    out.push_str(&seg);
    for _ in 1..(1usize << l) {
        out.push_str(&zeros);
        out.push_str(&seg);
    }
}

/// The text appended to a punctuated string with segment length `m`.
pub fn padding_suffix(params: &LangParams, m: usize) -> Result<String, LangError> {
    let i = params.level;
    if !(1..=40).contains(&m) {
        return Err(LangError::ResourceCap(format!("padding for m = {m}")));
    }
    let lead = checked_pow(m, i - 1).unwrap_or(usize::MAX);
    let reps = (1usize << m)
        .checked_sub(lead + 1)
        .ok_or_else(|| LangError::Domain(format!("m^(i-1) = {lead} exceeds 2^m - 1")))?;
    let zeros = "0".repeat(params.delim_width);
    let seg = "a".repeat(m);
    let mut out = String::new();
    for _ in 0..reps {
        out.push_str(&seg);
        out.push_str(&zeros);
    }
    out.push_str(&seg);
    for l in (1..m).rev() {
        p_block(params, l, &mut out);
    }
    Ok(out)
}

/// Checks that `w` is a punctuated shell and returns its segment length.
pub(crate) fn shell_segment_length(params: &LangParams, w: &str) -> Result<usize, LangError> {
    let m = segl(w)?;
    let i = params.level;
    let c = params.delim_width;
    let count =
        checked_pow(m, i - 1).ok_or_else(|| LangError::ResourceCap(format!("{m}^{}", i - 1)))?;
    let expected = count
        .checked_mul(m + c)
        .ok_or_else(|| LangError::ResourceCap("shell length".into()))?;
    if w.len() != expected {
        return Err(LangError::Malformed(format!(
            "length {} does not match {count} segments of {m} plus delimiters",
            w.len()
        )));
    }
    let b = w.as_bytes();
    for k in 0..count {
        let base = k * (m + c);
        let seg_ok = b[base..base + m].iter().all(|&x| x == b'a' || x == b'b');
        let del_ok = b[base + m..base + m + c]
            .iter()
            .all(|&x| x == b'0' || x == b'1');
        if !seg_ok || !del_ok {
            return Err(LangError::Malformed(format!(
                "segment {} is not {m} letters followed by a {c}-bit delimiter",
                k + 1
            )));
        }
    }
    Ok(m)
}

pub fn pad(params: &LangParams, w: &str) -> Result<String, LangError> {
    let m = shell_segment_length(params, w)?;
    if m < params.min_segment {
        return Err(LangError::Domain(format!(
            "segment length {m} is below m_{} = {}",
            params.level, params.min_segment
        )));
    }
    let mut out = w.to_string();
    out.push_str(&padding_suffix(params, m)?);
    Ok(out)
}

/// `(m-1) 2^(m+1) + c_i (2^(m+1) - m - 2) + m + 1`.
pub fn total_length(params: &LangParams, m: usize) -> Result<u64, LangError> {
    if m < params.min_segment || m > 60 {
        return Err(LangError::Domain(format!("m = {m} out of range")));
    }
    let m = m as u128;
    let p = 1u128 << (m + 1);
    let n = (m - 1) * p + params.delim_width as u128 * (p - m - 2) + m + 1;
    u64::try_from(n).map_err(|_| LangError::ResourceCap("total length".into()))
}
