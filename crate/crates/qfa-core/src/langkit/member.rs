use super::params::lang_params;
use super::ppal::{
    checked_pow, is_well_ordered, padding_suffix, shell_segment_length, DelimiterSeq,
};
use super::{check_alphabet, Family, LangError, LangParams};

pub fn is_palindrome(s: &[u8]) -> bool {
    s.iter().eq(s.iter().rev())
}

fn ab_only(s: &[u8]) -> bool {
    s.iter().all(|&c| c == b'a' || c == b'b')
}

/// Exact membership oracle. Symbols outside the tape alphabet are an error;
/// tape symbols foreign to the family just make the verdict false.
pub fn is_member(family: Family, i: Option<usize>, s: &str) -> Result<bool, LangError> {
    check_alphabet(s)?;
    let b = s.as_bytes();
    match (family.is_indexed(), i) {
        (true, None) => return Err(LangError::MissingIndex(family)),
        (false, Some(_)) => return Err(LangError::UnexpectedIndex(family)),
        (true, Some(0)) => return Err(LangError::InvalidLevel(0)),
        _ => {}
    }
    Ok(match family {
        Family::Eq => is_eq(b),
        Family::Pal => ab_only(b) && is_palindrome(b),
        Family::Rl => rl_base(i.unwrap(), b).is_some(),
        Family::Rpal => rl_base(i.unwrap(), b).is_some_and(is_palindrome),
        Family::Ppal => is_ppal(&lang_params(i.unwrap() as i64)?, b),
        Family::Pppal => is_pppal(&lang_params(i.unwrap() as i64)?, s),
        Family::Shl => is_shl(s),
    })
}

fn is_eq(b: &[u8]) -> bool {
    let k = b.iter().take_while(|&&c| c == b'a').count();
    b.len() == 2 * k && b[k..].iter().all(|&c| c == b'b')
}

/// For a member of `RL_i`, returns the leftmost block `s_0`.
fn rl_base(i: usize, b: &[u8]) -> Option<&[u8]> {
    let mut s = b;
    for _ in 0..i {
        let d = s.iter().rposition(|&c| c == b'$')?;
        let (u, tail) = (&s[..d], &s[d + 1..]);
        let k = u.len();
        if tail.len() != 1 + (k + 1) * (k.checked_sub(1)?) || tail[0] != b'1' {
            return None;
        }
        for blk in tail[1..].chunks(k + 1) {
            if blk[k] != b'1' || blk[..k].iter().any(|&c| c != b'a') {
                return None;
            }
        }
        s = u;
    }
    (s.len() >= 2 && ab_only(s)).then_some(s)
}

fn is_ppal(params: &LangParams, b: &[u8]) -> bool {
    let Ok(w) = std::str::from_utf8(b) else {
        return false;
    };
    let Ok(m) = shell_segment_length(params, w) else {
        return false;
    };
    if m < params.min_segment {
        return false;
    }
    let c = params.delim_width;
    let mut letters = Vec::with_capacity(b.len());
    let mut entries = Vec::new();
    for chunk in b.chunks(m + c) {
        letters.extend_from_slice(&chunk[..m]);
        let v = chunk[m..]
            .iter()
            .fold(0usize, |acc, &x| 2 * acc + (x - b'0') as usize);
        entries.push(v);
    }
    is_well_ordered(params, m, &DelimiterSeq { entries }) && is_palindrome(&letters)
}

fn is_pppal(params: &LangParams, s: &str) -> bool {
    let Some(m) = s.bytes().position(|c| c == b'0' || c == b'1') else {
        return false;
    };
    if m < params.min_segment || m > 40 {
        return false;
    }
    let i = params.level;
    let Some(count) = checked_pow(m, i - 1) else {
        return false;
    };
    let Some(head) = count.checked_mul(m + params.delim_width) else {
        return false;
    };
    if head > s.len() || !is_ppal(params, &s.as_bytes()[..head]) {
        return false;
    }
    match padding_suffix(params, m) {
        Ok(tail) => s[head..] == tail,
        Err(_) => false,
    }
}

fn is_shl(s: &str) -> bool {
    let parts: Vec<&str> = s.split('$').collect();
    if parts.len() < 2 {
        return false;
    }
    parts
        .iter()
        .enumerate()
        .all(|(k, p)| *p == format!("{k:b}"))
}
