use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// An error bound kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Epsilon {
    pub num: u64,
    pub den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("epsilon must be a fraction p/q or decimal strictly between 0 and 1/2, got {0:?}")]
pub struct EpsilonError(pub String);

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self, EpsilonError> {
        if num == 0 || den == 0 || 2 * num >= den {
            return Err(EpsilonError(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Epsilon {
            num: num / g,
            den: den / g,
        })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Smallest `t >= 0` with `2^t * num >= target`.
    fn log2_ceil_ratio(num: u64, target: u64) -> u32 {
        let mut t = 0;
        while (num as u128) << t < target as u128 {
            t += 1;
        }
        t
    }

    /// Coins in the EQ acceptance gate: `1 + ceil(log2(1/eps - 1))`.
    pub fn eq_coins(&self) -> u32 {
        1 + Self::log2_ceil_ratio(self.num, self.den - self.num)
    }

    /// Coin sweeps in the PAL acceptance gate: `8 + ceil(log2(1/eps))`.
    pub fn pal_sweeps(&self) -> u32 {
        8 + Self::log2_ceil_ratio(self.num, self.den)
    }

    /// Default `k_eps`: `6 + ceil(log2(1/eps))`.
    pub fn default_k(&self) -> u32 {
        6 + Self::log2_ceil_ratio(self.num, self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = EpsilonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EpsilonError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Epsilon::new(p, q).map_err(|_| bad());
        }
        let (int, frac) = t.split_once('.').ok_or_else(bad)?;
        if !int.chars().all(|c| c == '0') || frac.is_empty() || frac.len() > 18 {
            return Err(bad());
        }
        let num: u64 = frac.parse().map_err(|_| bad())?;
        Epsilon::new(num, 10u64.pow(frac.len() as u32)).map_err(|_| bad())
    }
}
