use super::LangError;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Constants for one level of the punctuated palindrome families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangParams {
    pub level: usize,
    /// `c_i`: symbols per binary delimiter.
    pub delim_width: usize,
    /// `m_i`: least admissible segment length.
    pub min_segment: usize,
    pub alphabet: Vec<char>,
}

/// Evidence that `min_segment` is correct: the inequality was checked on
/// `[2, window_end]`, and `2^m / m^(i-1)` is increasing from `monotone_from` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSegmentCertificate {
    pub level: usize,
    pub min_segment: usize,
    pub window_end: usize,
    pub monotone_from: usize,
}

pub fn lang_params(i: i64) -> Result<LangParams, LangError> {
    if i < 1 {
        return Err(LangError::InvalidLevel(i));
    }
    let level = i as usize;
    let cert = min_segment(level);
    Ok(LangParams {
        level,
        delim_width: delim_width(level),
        min_segment: cert.min_segment,
        alphabet: vec!['a', 'b', '0', '1', '$'],
    })
}

/// `ceil(log2(i + 1))`, which is the bit length of `i`.
pub(crate) fn delim_width(level: usize) -> usize {
    (usize::BITS - level.leading_zeros()) as usize
}

fn below_power(m: usize, level: usize) -> bool {
    BigUint::from(m).pow((level - 1) as u32) < (BigUint::from(1u32) << m)
}

/// Scans the window `[2, max(i^2, 64)]` for the least `m` after which the
/// inequality never fails again inside the window.
pub fn min_segment(level: usize) -> MinSegmentCertificate {
    assert!(level >= 1);
    let window_end = (level * level).max(64);
    let mut candidate = 2;
    for m in 2..=window_end {
        if !below_power(m, level) {
            candidate = m + 1;
        }
    }
    // ratio 2 (m/(m+1))^(i-1) > 1 once m + 1 > 2 (i - 1)
    let monotone_from = (2 * level).saturating_sub(2).max(2);
    assert!(monotone_from <= window_end && candidate <= window_end);
    MinSegmentCertificate {
        level,
        min_segment: candidate,
        window_end,
        monotone_from,
    }
}

pub fn cbin(params: &LangParams, j: usize) -> Result<String, LangError> {
    if j < 1 || j > params.level {
        return Err(LangError::InvalidDelimiter {
            level: params.level,
            j,
        });
    }
    Ok(format!("{:0width$b}", j, width = params.delim_width))
}
