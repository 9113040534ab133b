use crate::CliError;
use clap::Args;
use qfa_core::builders::{
    compile_pppal_with, compile_rpal_with, eq_core, pal_core, regression_zoo, rw_gate, Epsilon,
};
use qfa_core::langkit::{build_rl, lang_params, pad, punc, Family};
use qfa_core::MachineSpec;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;

/// Where a machine comes from: a spec file or a builder.
#[derive(Debug, Clone, Args, Serialize)]
pub struct MachineArgs {
    /// qsspec-1 file.
    #[arg(long, conflicts_with = "machine")]
    pub spec: Option<PathBuf>,
    /// rpal, pppal, eq-core, pal-core, rw-gate, or a regression-zoo name.
    #[arg(long)]
    pub machine: Option<String>,
    /// Template level.
    #[arg(long, default_value_t = 1)]
    pub i: u16,
    /// Error bound as a fraction, e.g. 1/5.
    #[arg(long, default_value = "1/5")]
    pub eps: String,
    /// Coins of the random-walk gate; defaults to the value derived from eps.
    #[arg(long)]
    pub k: Option<u32>,
    /// Compile the main loop without the final palindrome check.
    #[arg(long)]
    pub loop_only: bool,
}

pub fn epsilon(s: &str) -> Result<Epsilon, CliError> {
    s.parse::<Epsilon>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

impl MachineArgs {
    pub fn load(&self) -> Result<MachineSpec, CliError> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            return MachineSpec::from_json(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
        }
        let name = self
            .machine
            .as_deref()
            .ok_or(CliError::Usage("give --spec or --machine".into()))?;
        self.build(name)
    }

    pub fn build(&self, name: &str) -> Result<MachineSpec, CliError> {
        let eps = epsilon(&self.eps)?;
        let k = self.k.unwrap_or(eps.default_k());
        if self.i == 0 {
            return Err(CliError::Usage("--i must be at least 1".into()));
        }
        Ok(match name {
            "rpal" => compile_rpal_with(self.i, eps, k, self.loop_only),
            "pppal" => compile_pppal_with(self.i, eps, k, self.loop_only),
            "eq-core" => eq_core(eps.eq_coins(), 2),
            "pal-core" => pal_core(eps.pal_sweeps()),
            "rw-gate" => rw_gate(self.k.unwrap_or(0)),
            other => regression_zoo()
                .into_iter()
                .find(|z| z.name == other)
                .map(|z| z.spec)
                .ok_or_else(|| CliError::Usage(format!("unknown machine {other:?}")))?,
        })
    }
}

const MAX_WORDS: u32 = 20;

fn words(n: usize) -> Result<impl Iterator<Item = String>, CliError> {
    if n > MAX_WORDS as usize {
        return Err(CliError::Cap(format!("enumerating words of length {n}")));
    }
    Ok((0..1u64 << n).map(move |m| {
        (0..n)
            .rev()
            .map(|k| if m >> k & 1 == 1 { 'b' } else { 'a' })
            .collect()
    }))
}

fn palindromes(n: usize) -> Result<impl Iterator<Item = String>, CliError> {
    Ok(words(n.div_ceil(2))?.map(move |h| {
        let tail: String = h.chars().rev().skip(n % 2).collect();
        h + &tail
    }))
}

/// Members of `family` in lexicographic order of their base word: `n` is the
/// base-word length (EQ, PAL, RL, RPAL) and `m` the segment length (PPAL,
/// PPPAL).
pub fn members(
    family: Family,
    i: usize,
    n: Option<usize>,
    m: Option<usize>,
    limit: usize,
) -> Result<Vec<String>, CliError> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("{family} needs --{flag}")))
    };
    let lang = |e: qfa_core::LangError| CliError::Usage(e.to_string());
    let out: Vec<String> = match family {
        Family::Eq => {
            let n = need(n, "n")?;
            if n % 2 == 0 {
                vec!["a".repeat(n / 2) + &"b".repeat(n / 2)]
            } else {
                vec![]
            }
        }
        Family::Pal => palindromes(need(n, "n")?)?.take(limit).collect(),
        Family::Rl | Family::Rpal => {
            let n = need(n, "n")?;
            let base: Box<dyn Iterator<Item = String>> = if family == Family::Rl {
                Box::new(words(n)?)
            } else {
                Box::new(palindromes(n)?)
            };
            base.take(limit)
                .map(|w| build_rl(i, &w).map_err(lang))
                .collect::<Result<_, _>>()?
        }
        Family::Ppal | Family::Pppal => {
            let m = need(m, "m")?;
            let p = lang_params(i as i64).map_err(lang)?;
            let len = m
                .checked_pow(i as u32)
                .filter(|&l| l <= MAX_WORDS as usize * 2)
                .ok_or_else(|| CliError::Cap(format!("segment side m^i for m = {m}, i = {i}")))?;
            let base: Box<dyn Iterator<Item = String>> = if family == Family::Ppal {
                Box::new(words(len)?)
            } else {
                Box::new(palindromes(len)?)
            };
            base.take(limit)
                .map(|w| punc(&p, &w).and_then(|s| pad(&p, &s)).map_err(lang))
                .collect::<Result<_, _>>()?
        }
        Family::Shl => return Err(CliError::Usage("gen does not enumerate shl".into())),
    };
    Ok(out)
}
