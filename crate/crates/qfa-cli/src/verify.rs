use crate::CliError;
use qfa_core::builders::{pal_core, regression_zoo, rw_gate};
use qfa_core::engines::{estimate, solve_exact, wilson_interval, ExactOptions, Z99};
use qfa_core::langkit::{
    dissim_lower_bound, lang_params, srel_next_len, sumdel, total_length, well_ordered_sequence,
    DissimMode, DissimSemantics,
};
use qfa_core::machine::{sym_index, RIGHT_END};
use qfa_core::par::Parallelism;
use qfa_core::qkernel::{CVec, C64};
use qfa_core::Family;
use serde::Serialize;

pub const SUITES: [&str; 4] = ["lang", "rw-gate", "counter", "zoo"];

#[derive(Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Log<'a>(&'static str, &'a mut Vec<Check>);

impl Log<'_> {
    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.1.push(Check {
            suite: self.0,
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

fn lang(log: &mut Log) {
    let mut chain = vec![2u64];
    for _ in 0..3 {
        chain.push(srel_next_len(*chain.last().unwrap()).unwrap_or(0));
    }
    log.check(
        "srel chain",
        chain == [2, 7, 57, 3307],
        format!("{chain:?}"),
    );
    let p1 = lang_params(1).expect("level 1");
    let bad: Vec<usize> = (2..=10)
        .filter(|&m| total_length(&p1, m).ok() != Some(m as u64 * (1 << (m + 1)) - 1))
        .collect();
    log.check(
        "total length at level 1",
        bad.is_empty(),
        format!("mismatched m: {bad:?}"),
    );
    let mut bad = Vec::new();
    for (i, ms) in [(1, 2..=6), (2, 2..=6), (3, 5..=6)] {
        let p = lang_params(i as i64).expect("level");
        for m in ms {
            let Ok(seq) = well_ordered_sequence(&p, m) else {
                continue;
            };
            for j in 1..=i {
                if sumdel(&seq, j) != m.pow((i - j) as u32) {
                    bad.push((i, m, j));
                }
            }
        }
    }
    log.check(
        "delimiter census",
        bad.is_empty(),
        format!("mismatched (i, m, j): {bad:?}"),
    );
    for n in [2, 4, 6] {
        let got = dissim_lower_bound(
            Family::Pal,
            None,
            n,
            DissimMode::Exhaustive,
            DissimSemantics::ExactLength,
        )
        .map(|w| w.strings.len());
        log.check(
            format!("pal dissimilarity n = {n}"),
            got == Ok(1 << (n / 2)),
            format!("{got:?}"),
        );
    }
}

fn rw(log: &mut Log) {
    let mut worst = 0f64;
    for k in 0..=2 {
        let spec = rw_gate(k);
        for n in 0..=10 {
            let want = 0.5f64.powi(k as i32) / (n + 1) as f64;
            match solve_exact(&spec, &"a".repeat(n), &ExactOptions::default()) {
                Ok(s) => worst = worst.max((s.p_accept - want).abs()),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    log.check(
        "exit law 2^-k/(n+1)",
        worst <= 1e-9,
        format!("max error {worst:e}"),
    );
}

fn counter(log: &mut Log) {
    let spec = pal_core(0);
    let op = |c: char, label: &str| {
        let q = spec.state_index("pass").expect("pass state");
        let e = spec.entry(q, sym_index(c).expect("symbol")).expect("entry");
        let ch = &spec.channels[e.channel].channel;
        ch.branches
            .iter()
            .find(|b| b.label == label)
            .expect("branch")
            .op
            .clone()
    };
    let (ga, gb, diff) = (op('a', "go"), op('b', "go"), op(RIGHT_END, "d"));
    let enc = |w: &[u8]| {
        w.iter()
            .rev()
            .fold(0u64, |acc, &c| 4 * acc + if c == b'a' { 1 } else { 2 })
    };
    let (mut worst, mut wrong) = (0f64, Vec::new());
    for n in 0..=10usize {
        for bits in 0..1u32 << n {
            let w: Vec<u8> = (0..n)
                .map(|k| if bits >> k & 1 == 1 { b'b' } else { b'a' })
                .collect();
            let one = C64::new(1.0, 0.0);
            let mut v = CVec::from_vec(vec![one, one, C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
            for &c in &w {
                v = if c == b'a' { &ga * v } else { &gb * v };
            }
            let r: Vec<u8> = w.iter().rev().copied().collect();
            let s = 8f64.powi(-(n as i32));
            worst = worst
                .max((v[2] - enc(&r) as f64 * s).norm())
                .max((v[3] - enc(&w) as f64 * s).norm());
            if ((&diff * &v).norm() == 0.0) != (w == r) {
                wrong.push(String::from_utf8_lossy(&w).into_owned());
            }
        }
    }
    log.check(
        "counter amplitudes",
        worst <= 1e-10,
        format!("max error {worst:e}"),
    );
    log.check(
        "difference axis vanishes iff palindrome",
        wrong.is_empty(),
        format!("{wrong:?}"),
    );
}

fn zoo(log: &mut Log, trials: u64, seed: u64) -> Result<(), CliError> {
    for z in regression_zoo() {
        for x in &z.inputs {
            let s = solve_exact(&z.spec, x, &ExactOptions::default())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let r = estimate(&z.spec, x, trials, seed, 1 << 40, Parallelism::Parallel)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let (lo, hi) = wilson_interval(r.verdict_counts.accept, r.trials, Z99);
            let pass = lo <= s.p_accept && s.p_accept <= hi;
            log.check(
                format!("{} {x:?}", z.name),
                pass,
                format!("exact {:.6} in [{lo:.6}, {hi:.6}]", s.p_accept),
            );
        }
    }
    Ok(())
}

pub fn run(suites: &[String], trials: u64, seed: u64) -> Result<VerifyReport, CliError> {
    let mut checks = Vec::new();
    for s in suites {
        match s.as_str() {
            "lang" => lang(&mut Log("lang", &mut checks)),
            "rw-gate" => rw(&mut Log("rw-gate", &mut checks)),
            "counter" => counter(&mut Log("counter", &mut checks)),
            "zoo" => zoo(&mut Log("zoo", &mut checks), trials, seed)?,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown suite {other:?}; known: {}",
                    SUITES.join(", ")
                )))
            }
        }
    }
    Ok(VerifyReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
