//! Builders, recognizers and metrics for the EQ, PAL, RL, RPAL, PPAL, PPPAL and SHL families.

mod dissim;
mod member;
mod params;
mod ppal;
mod rl;

pub use dissim::{
    dissim_lower_bound, exhaustive_dissimilarity, DissimMode, DissimSemantics, DissimilarWitness,
    WitnessPair,
};
pub use member::{is_member, is_palindrome};
pub use params::{cbin, lang_params, min_segment, LangParams, MinSegmentCertificate};
pub use ppal::{
    is_well_ordered, pad, padding_suffix, punc, segl, sumdel, total_length, well_ordered_sequence,
    DelimiterSeq,
};
pub use rl::{build_rl, rl_block_lengths, srel_next_len};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Symbols that may appear on an input tape.
pub const TAPE_ALPHABET: &[u8] = b"ab01$#";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("invalid level {0}: levels start at 1")]
    InvalidLevel(i64),
    #[error("invalid delimiter value {j} for level {level}")]
    InvalidDelimiter { level: usize, j: usize },
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("symbol {0:?} is outside the tape alphabet")]
    InvalidSymbol(char),
    #[error("length error: {0}")]
    Length(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("string has no binary symbol, segl is undefined")]
    UndefinedSegl,
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("family {0} requires an index i")]
    MissingIndex(Family),
    #[error("family {0} takes no index")]
    UnexpectedIndex(Family),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Eq,
    Pal,
    Rl,
    Rpal,
    Ppal,
    Pppal,
    Shl,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Eq,
        Family::Pal,
        Family::Rl,
        Family::Rpal,
        Family::Ppal,
        Family::Pppal,
        Family::Shl,
    ];

    pub fn is_indexed(self) -> bool {
        matches!(
            self,
            Family::Rl | Family::Rpal | Family::Ppal | Family::Pppal
        )
    }

    /// The symbols a member string can contain.
    pub fn alphabet(self) -> &'static [u8] {
        match self {
            Family::Eq | Family::Pal => b"ab",
            Family::Rl | Family::Rpal => b"ab$1",
            Family::Ppal => b"ab01",
            Family::Pppal => b"ab01$",
            Family::Shl => b"01$",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Eq => "eq",
            Family::Pal => "pal",
            Family::Rl => "rl",
            Family::Rpal => "rpal",
            Family::Ppal => "ppal",
            Family::Pppal => "pppal",
            Family::Shl => "shl",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

pub(crate) fn check_alphabet(s: &str) -> Result<(), LangError> {
    match s
        .chars()
        .find(|c| !c.is_ascii() || !TAPE_ALPHABET.contains(&(*c as u8)))
    {
        Some(c) => Err(LangError::InvalidSymbol(c)),
        None => Ok(()),
    }
}
