use super::LangError;

pub fn srel_next_len(k: u64) -> Result<u64, LangError> {
    if k < 2 {
        return Err(LangError::InvalidBlock(format!(
            "block length {k} is below 2"
        )));
    }
    k.checked_mul(k)
        .and_then(|sq| sq.checked_add(k + 1))
        .ok_or_else(|| LangError::Length(format!("length overflow after {k}")))
}

/// Applies `w -> w$1(a^|w| 1)^(|w|-1)` `i` times.
pub fn build_rl(i: usize, w: &str) -> Result<String, LangError> {
    if w.len() < 2 || !w.bytes().all(|c| c == b'a' || c == b'b') {
        return Err(LangError::InvalidBlock(format!(
            "{w:?} is not in (a|b)(a|b)+"
        )));
    }
    let mut s = w.to_string();
    for _ in 0..i {
        let k = s.len();
        let next = srel_next_len(k as u64)? as usize;
        if next > 1 << 26 {
            return Err(LangError::ResourceCap(format!(
                "RL string of length {next}"
            )));
        }
        let mut t = String::with_capacity(next);
        t.push_str(&s);
        t.push_str("$1");
        for _ in 1..k {
            t.extend(std::iter::repeat_n('a', k));
            t.push('1');
        }
        s = t;
    }
    Ok(s)
}

/// Lengths `|s_0|, |s_1|, ...` while they stay within `max_len`.
pub fn rl_block_lengths(s0: u64, max_len: u64) -> Vec<u64> {
    let mut out = vec![s0];
    let mut k = s0;
    while let Ok(n) = srel_next_len(k) {
        if n > max_len {
            break;
        }
        out.push(n);
        k = n;
    }
    out
}
