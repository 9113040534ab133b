//! Host-level execution of the two templates for cross-validation.
//!
//! Signposts are located by index arithmetic on the input; each subroutine
//! call becomes a run of the EQ or PAL core on its virtual tape. In fast mode
//! call outcomes are drawn from exact core solutions and, since main-loop
//! rounds are independent and identical, the loop outcome is drawn directly.
//! Stepwise mode samples every core trajectory and random walk.

use super::cores::{eq_core, pal_core};
use super::eps::Epsilon;
use crate::engines::trajectory::{trial_rng, RunReport, Sampler};
use crate::engines::{solve_exact, EngineError, EstimateReport, ExactOptions};
use crate::langkit::lang_params;
use crate::machine::{MachineSpec, Verdict};
use crate::par::{map_indexed, Parallelism};
use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Rpal,
    Pppal,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Template::Rpal => "rpal",
            Template::Pppal => "pppal",
        })
    }
}

impl FromStr for Template {
    type Err = InterpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rpal" => Ok(Template::Rpal),
            "pppal" => Ok(Template::Pppal),
            _ => Err(InterpError::Template(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpMode {
    #[default]
    Fast,
    Stepwise,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterpError {
    #[error("unknown template {0:?}")]
    Template(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One subroutine call of a main-loop round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Call {
    /// EQ core on `a^left b^right`.
    Eq { left: usize, right: usize },
    /// Deterministic rejection (odd block in the doubling check).
    Fail,
}

/// What a run does on a given input, fixed before any coin is tossed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    /// `false` when the format check rejects.
    pub format_ok: bool,
    pub calls: Vec<Call>,
    pub input_len: usize,
    /// Virtual tape of the final palindrome check.
    pub pal_word: String,
}

#[derive(Debug, Clone)]
pub struct Interpreter {
    pub template: Template,
    pub i: usize,
    pub eps: Epsilon,
    pub k_eps: u32,
    pub mode: InterpMode,
    pub loop_only: bool,
    eq: MachineSpec,
    pal: MachineSpec,
    eq_reject: HashMap<(usize, usize), f64>,
    pal_accept: HashMap<String, f64>,
}

impl Interpreter {
    pub fn new(
        template: Template,
        i: usize,
        eps: Epsilon,
        k_eps: u32,
    ) -> Result<Self, InterpError> {
        if i < 1 {
            return Err(InterpError::Params("i must be positive".into()));
        }
        Ok(Interpreter {
            template,
            i,
            eps,
            k_eps,
            mode: InterpMode::Fast,
            loop_only: false,
            eq: eq_core(eps.eq_coins(), 2),
            pal: pal_core(eps.pal_sweeps()),
            eq_reject: HashMap::new(),
            pal_accept: HashMap::new(),
        })
    }

    pub fn with_mode(mut self, mode: InterpMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_loop_only(mut self, loop_only: bool) -> Self {
        self.loop_only = loop_only;
        self
    }

    pub fn plan(&self, input: &str) -> Result<Plan, InterpError> {
        match self.template {
            Template::Rpal => Ok(rpal_plan(self.i, input)),
            Template::Pppal => pppal_plan(self.i, input),
        }
    }

    fn eq_reject(&mut self, left: usize, right: usize) -> Result<f64, InterpError> {
        if let Some(&r) = self.eq_reject.get(&(left, right)) {
            return Ok(r);
        }
        let w = "a".repeat(left) + &"b".repeat(right);
        let r = solve_exact(&self.eq, &w, &ExactOptions::default())?.p_reject;
        self.eq_reject.insert((left, right), r);
        Ok(r)
    }

    fn pal_accept(&mut self, w: &str) -> Result<f64, InterpError> {
        if let Some(&a) = self.pal_accept.get(w) {
            return Ok(a);
        }
        let a = solve_exact(&self.pal, w, &ExactOptions::default())?.p_accept;
        self.pal_accept.insert(w.to_string(), a);
        Ok(a)
    }

    /// Per-round rejection probability, per-round exit probability and the
    /// final acceptance probability of a plan.
    pub fn round_law(&mut self, plan: &Plan) -> Result<(f64, f64, f64), InterpError> {
        let mut pass = 1.0;
        for c in &plan.calls {
            pass *= match *c {
                Call::Fail => 0.0,
                Call::Eq { left, right } => 1.0 - self.eq_reject(left, right)?,
            };
        }
        let exit = 0.5f64.powi(self.k_eps as i32) / (plan.input_len as f64 + 1.0);
        let fin = if self.loop_only {
            1.0
        } else {
            self.pal_accept(&plan.pal_word)?
        };
        Ok((1.0 - pass, exit, fin))
    }

    /// Exact acceptance probability of the plan under the template.
    pub fn p_accept(&mut self, input: &str) -> Result<f64, InterpError> {
        let plan = self.plan(input)?;
        if !plan.format_ok {
            return Ok(0.0);
        }
        let (rej, exit, fin) = self.round_law(&plan)?;
        let out = (1.0 - rej) * exit;
        Ok(out / (out + rej) * fin)
    }

    /// One run. Fast mode counts main-loop rounds as steps; stepwise mode
    /// counts core and walk steps.
    pub fn run(
        &mut self,
        plan: &Plan,
        rng: &mut impl Rng,
        max_steps: u64,
    ) -> Result<(Verdict, u64), InterpError> {
        if !plan.format_ok {
            return Ok((Verdict::Reject, 0));
        }
        match self.mode {
            InterpMode::Fast => Ok(fast_draw(self.round_law(plan)?, rng, max_steps)),
            InterpMode::Stepwise => Ok(self.stepper(plan)?.draw(rng, max_steps)),
        }
    }

    fn stepper(&self, plan: &Plan) -> Result<Stepper<'_>, InterpError> {
        let calls = plan
            .calls
            .iter()
            .map(|c| match *c {
                Call::Eq { left, right } => {
                    Sampler::new(&self.eq, &("a".repeat(left) + &"b".repeat(right))).map(Some)
                }
                Call::Fail => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        let pal = if self.loop_only {
            None
        } else {
            Some(Sampler::new(&self.pal, &plan.pal_word)?)
        };
        Ok(Stepper {
            calls,
            pal,
            n: plan.input_len as i64,
            k_eps: self.k_eps,
        })
    }

    /// `trials` runs; run `t` uses stream `t` of `seed`.
    pub fn estimate(
        &mut self,
        input: &str,
        trials: u64,
        seed: u64,
        max_steps: u64,
        mode: Parallelism,
    ) -> Result<EstimateReport, InterpError> {
        let plan = self.plan(input)?;
        let n = trials as usize;
        let runs = if !plan.format_ok {
            vec![(Verdict::Reject, 0); n]
        } else if self.mode == InterpMode::Fast {
            let law = self.round_law(&plan)?;
            map_indexed(n, mode, |t| {
                fast_draw(law, &mut trial_rng(seed, t as u64), max_steps)
            })
        } else {
            let st = self.stepper(&plan)?;
            map_indexed(n, mode, |t| {
                st.draw(&mut trial_rng(seed, t as u64), max_steps)
            })
        };
        Ok(EstimateReport::from_runs(&runs, seed))
    }
}

/// Draws the round count geometrically, then how the loop ended.
fn fast_draw(
    (rej, exit, fin): (f64, f64, f64),
    rng: &mut impl Rng,
    max_steps: u64,
) -> (Verdict, u64) {
    let out = (1.0 - rej) * exit;
    let stop = rej + out;
    let u: f64 = 1.0 - rng.gen::<f64>();
    let rounds = if stop >= 1.0 {
        1
    } else {
        (u.ln() / (1.0 - stop).ln()).ceil().max(1.0) as u64
    };
    if rounds > max_steps {
        return (Verdict::Cutoff, max_steps);
    }
    if rng.gen::<f64>() * stop < rej {
        return (Verdict::Reject, rounds);
    }
    let v = if rng.gen::<f64>() < fin {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    (v, rounds)
}

struct Stepper<'a> {
    calls: Vec<Option<Sampler<'a>>>,
    pal: Option<Sampler<'a>>,
    n: i64,
    k_eps: u32,
}

impl Stepper<'_> {
    fn draw(&self, rng: &mut impl Rng, max_steps: u64) -> (Verdict, u64) {
        let mut steps = 0u64;
        loop {
            for s in &self.calls {
                let Some(s) = s else {
                    return (Verdict::Reject, steps);
                };
                let (v, k, _) = s.sample(rng, max_steps.saturating_sub(steps), false);
                steps += k;
                match v {
                    Verdict::Reject => return (Verdict::Reject, steps),
                    Verdict::Cutoff => return (Verdict::Cutoff, max_steps),
                    Verdict::Accept => {}
                }
            }
            let mut pos = 1i64;
            while (1..=self.n).contains(&pos) {
                pos += if rng.gen::<bool>() { 1 } else { -1 };
                steps += 1;
            }
            if pos > self.n && (0..self.k_eps).all(|_| rng.gen::<bool>()) {
                break;
            }
            if steps >= max_steps {
                return (Verdict::Cutoff, max_steps);
            }
        }
        let Some(pal) = &self.pal else {
            return (Verdict::Accept, steps);
        };
        let (v, k, _) = pal.sample(rng, max_steps.saturating_sub(steps), false);
        (v, steps + k)
    }
}

/// A single fast-mode run on stream 0 of `seed`.
pub fn interpret(
    template: Template,
    i: usize,
    eps: Epsilon,
    k_eps: u32,
    input: &str,
    seed: u64,
    max_steps: u64,
) -> Result<RunReport, InterpError> {
    let mut it = Interpreter::new(template, i, eps, k_eps)?;
    let plan = it.plan(input)?;
    let mut rng = trial_rng(seed, 0);
    let (verdict, steps) = it.run(&plan, &mut rng, max_steps)?;
    Ok(RunReport {
        verdict,
        steps,
        seed,
        stream: 0,
        digest: None,
    })
}

fn rejected(input_len: usize) -> Plan {
    Plan {
        format_ok: false,
        calls: Vec::new(),
        input_len,
        pal_word: String::new(),
    }
}

fn rpal_plan(i: usize, input: &str) -> Plan {
    let re = Regex::new(&format!(r"^[ab][ab]+(\$1(a+1)+){{{i}}}$")).expect("pattern");
    if !re.is_match(input) {
        return rejected(input.chars().count());
    }
    let t: Vec<char> = std::iter::once('<')
        .chain(input.chars())
        .chain(std::iter::once('>'))
        .collect();
    let end = t.len() - 1;
    let dollars: Vec<usize> = (0..t.len()).filter(|&k| t[k] == '$').collect();
    let count =
        |lo: usize, hi: usize, f: &dyn Fn(char) -> bool| (lo + 1..hi).filter(|&k| f(t[k])).count();
    let mut calls = Vec::new();
    for j in (1..=i).rev() {
        let (p_l, p_m) = (0, dollars[j - 1]);
        let p_r = if j == i { end } else { dollars[j] };
        calls.push(Call::Eq {
            left: count(p_l, p_m, &|_| true),
            right: count(p_m, p_r, &|c| c == '1'),
        });
        let (mut p_l, mut p_m) = (p_l, p_m);
        let mut p_r = (p_m + 1..end)
            .filter(|&k| t[k] == '1')
            .nth(1)
            .unwrap_or(end);
        while t[p_r] == '1' {
            calls.push(Call::Eq {
                left: count(p_l, p_m, &|_| true),
                right: count(p_m, p_r, &|c| c == 'a'),
            });
            p_r = (p_r + 1..=end).find(|&k| t[k] != 'a').unwrap_or(end);
            p_m = (0..p_r).rev().find(|&k| t[k] == '1').unwrap_or(0);
            p_l = (0..p_m).rev().find(|&k| t[k] == '1').unwrap_or(0);
        }
    }
    let first = dollars[0];
    Plan {
        format_ok: true,
        calls,
        input_len: input.chars().count(),
        pal_word: t[1..first]
            .iter()
            .filter(|c| matches!(c, 'a' | 'b'))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    Left,
    Right,
    Seg(String),
    Dollar,
    /// Binary delimiter with its value.
    Bin(usize),
}

fn pppal_plan(i: usize, input: &str) -> Result<Plan, InterpError> {
    let params = lang_params(i as i64).map_err(|e| InterpError::Params(e.to_string()))?;
    let c = params.delim_width;
    let n = input.chars().count();
    let letter = |ch: char| ch == 'a' || ch == 'b';
    // (R): parse into letter runs and separators.
    let mut items = vec![Item::Left];
    let chars: Vec<char> = input.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let run = chars[k..]
            .iter()
            .take_while(|&&ch| letter(ch) == letter(chars[k]))
            .count();
        let s: String = chars[k..k + run].iter().collect();
        k += run;
        if letter(s.chars().next().unwrap()) {
            items.push(Item::Seg(s));
        } else if s == "$" {
            items.push(Item::Dollar);
        } else if s.len() == c && s.chars().all(|ch| ch == '0' || ch == '1') {
            let v = usize::from_str_radix(&s, 2).unwrap();
            if v > i {
                return Ok(rejected(n));
            }
            items.push(Item::Bin(v));
        } else {
            return Ok(rejected(n));
        }
    }
    items.push(Item::Right);
    let last = items.len() - 1;
    let zero = "0".repeat(c);
    let begins = matches!(items.get(1), Some(Item::Seg(_)));
    let ends = input.ends_with(&format!("$a{zero}a")) && matches!(items[last - 1], Item::Seg(_));
    let marks: Vec<usize> = (0..items.len())
        .filter(|&k| items[k] == Item::Bin(i))
        .collect();
    if !begins || !ends || marks.len() != 1 {
        return Ok(rejected(n));
    }
    let mark = marks[0];
    let before_bad = items[..mark]
        .iter()
        .any(|x| matches!(x, Item::Bin(0) | Item::Dollar));
    let after_bad = items[mark + 1..].iter().any(|x| match x {
        Item::Seg(s) => s.contains('b'),
        Item::Bin(v) => *v != 0,
        _ => false,
    });
    if before_bad || after_bad {
        return Ok(rejected(n));
    }

    let is_sep = |x: &Item| matches!(x, Item::Dollar | Item::Bin(_));
    let letters = |lo: usize, hi: usize, f: &dyn Fn(char) -> bool| -> usize {
        items[lo + 1..hi]
            .iter()
            .map(|x| match x {
                Item::Seg(s) => s.chars().filter(|&ch| f(ch)).count(),
                _ => 0,
            })
            .sum()
    };
    let left_of = |pos: usize, f: &dyn Fn(&Item) -> bool| {
        (0..pos)
            .rev()
            .find(|&k| f(&items[k]) || k == 0)
            .unwrap_or(0)
    };
    let mut calls = Vec::new();
    let mut p_r = last;
    while (1..p_r).any(|k| is_sep(&items[k])) {
        let p_m = left_of(p_r, &is_sep);
        let p_l = left_of(p_m, &is_sep);
        let (left, right) = if items[p_m] == Item::Dollar {
            (
                letters(p_l, p_m, &|ch| ch == 'a'),
                letters(p_m, p_r, &|ch| ch == 'a') + 1,
            )
        } else {
            (letters(p_l, p_m, &letter), letters(p_m, p_r, &letter))
        };
        calls.push(Call::Eq { left, right });
        if matches!(items[p_r], Item::Dollar | Item::Right)
            && (1..p_r).any(|k| items[k] == Item::Dollar)
        {
            let p_m = left_of(p_r, &|x| *x == Item::Dollar);
            let p_l = left_of(p_m, &|x| *x == Item::Dollar);
            let segs = items[p_l + 1..p_m]
                .iter()
                .filter(|x| matches!(x, Item::Seg(_)))
                .count();
            let seps = items[p_m..p_r].iter().filter(|x| is_sep(x)).count();
            if segs % 2 == 1 {
                calls.push(Call::Fail);
            } else {
                calls.push(Call::Eq {
                    left: segs / 2,
                    right: seps,
                });
            }
        }
        p_r = left_of(p_r, &is_sep);
    }
    for j in (2..=i).rev() {
        let mut p_m = mark + 1;
        while p_m != 0 {
            let p_r = (p_m + 1..=last)
                .find(|&k| is_sep(&items[k]) || k == last)
                .unwrap();
            let p_l = left_of(p_m - 1, &|x| matches!(x, Item::Bin(v) if *v >= j));
            let left = items[p_l + 1..p_m]
                .iter()
                .filter(|x| **x == Item::Bin(j - 1))
                .count();
            let right = letters(p_m - 1, p_r, &letter).saturating_sub(1);
            calls.push(Call::Eq { left, right });
            p_m = if p_l == 0 { 0 } else { p_l + 1 };
        }
    }
    let pal_word: String = items[..mark]
        .iter()
        .filter_map(|x| match x {
            Item::Seg(s) => Some(s.as_str()),
            _ => None,
        })
        .collect();
    Ok(Plan {
        format_ok: true,
        calls,
        input_len: n,
        pal_word,
    })
}
