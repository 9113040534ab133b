//! Two-way constant-space machines over an endmarked tape, classical or
//! quantum-classical, with validation and one-step semantics.

use crate::qkernel::{apply_channel, check_channel, QkError, QuantumChannel, QuantumState};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

pub const LEFT_END: char = '▷';
pub const RIGHT_END: char = '◁';
/// Tape symbols by index. Positions `0` and `n + 1` hold the endmarkers.
pub const SYMBOLS: [char; 8] = [LEFT_END, RIGHT_END, 'a', 'b', '0', '1', '$', '#'];
pub const NSYM: usize = SYMBOLS.len();
pub const SYM_LEFT: u8 = 0;
pub const SYM_RIGHT: u8 = 1;
pub const SPEC_FORMAT: &str = "qsspec-1";

pub fn sym_index(c: char) -> Option<u8> {
    SYMBOLS.iter().position(|&s| s == c).map(|k| k as u8)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MachineError {
    #[error("symbol {0:?} is not a tape symbol")]
    BadSymbol(char),
    #[error("no transition for state {state} on {symbol:?}")]
    Totality { state: String, symbol: char },
    #[error("head position {0} is off the tape")]
    HeadBounds(usize),
    #[error(transparent)]
    Kernel(#[from] QkError),
    #[error("spec file error: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Cutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Classical,
    QuantumClassical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedChannel {
    pub name: String,
    pub channel: QuantumChannel,
}

/// Channel to apply and, per branch, the next state and head move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub channel: usize,
    pub next: Vec<(u32, i8)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineSpec {
    pub kind: Kind,
    pub states: Vec<String>,
    pub q0: u32,
    pub q_acc: u32,
    pub q_rej: u32,
    pub register_dim: usize,
    /// Input symbols the machine is defined on, endmarkers excluded.
    pub alphabet: Vec<char>,
    pub channels: Vec<NamedChannel>,
    /// Dense table indexed by `state * NSYM + symbol`.
    pub table: Vec<Option<Entry>>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub state: u32,
    pub pos: usize,
    pub psi: QuantumState,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Successor {
    Config(Configuration),
    Halt(Verdict),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub verdict: Option<Verdict>,
    pub successors: Vec<(f64, Successor)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// An input string framed by endmarkers, as symbol indices.
pub fn tape(input: &str) -> Result<Vec<u8>, MachineError> {
    let mut t = Vec::with_capacity(input.len() + 2);
    t.push(SYM_LEFT);
    for c in input.chars() {
        match sym_index(c) {
            Some(k) if k >= 2 => t.push(k),
            _ => return Err(MachineError::BadSymbol(c)),
        }
    }
    t.push(SYM_RIGHT);
    Ok(t)
}

impl MachineSpec {
    pub fn entry(&self, state: u32, sym: u8) -> Option<&Entry> {
        self.table[state as usize * NSYM + sym as usize].as_ref()
    }

    pub fn is_halting(&self, state: u32) -> Option<Verdict> {
        if state == self.q_acc {
            Some(Verdict::Accept)
        } else if state == self.q_rej {
            Some(Verdict::Reject)
        } else {
            None
        }
    }

    pub fn state_index(&self, name: &str) -> Option<u32> {
        self.states.iter().position(|s| s == name).map(|k| k as u32)
    }

    pub fn initial(&self) -> Configuration {
        Configuration {
            state: self.q0,
            pos: 0,
            psi: QuantumState::basis(self.register_dim, 0),
        }
    }

    fn symbols_in_scope(&self) -> Vec<u8> {
        let mut v = vec![SYM_LEFT, SYM_RIGHT];
        v.extend(self.alphabet.iter().filter_map(|&c| sym_index(c)));
        v
    }
}

pub fn validate_spec(spec: &MachineSpec) -> ValidationReport {
    let mut v = Vec::new();
    fn push(v: &mut Vec<Violation>, rule: &str, location: String) {
        v.push(Violation {
            rule: rule.into(),
            location,
        })
    }
    let ns = spec.states.len() as u32;
    if spec.q_acc == spec.q_rej {
        push(&mut v, "distinct-halting-states", "q_acc = q_rej".into());
    }
    for (name, q) in [
        ("q0", spec.q0),
        ("q_acc", spec.q_acc),
        ("q_rej", spec.q_rej),
    ] {
        if q >= ns {
            push(&mut v, "state-range", name.into());
        }
    }
    if spec.table.len() != spec.states.len() * NSYM {
        push(
            &mut v,
            "table-shape",
            format!("{} entries", spec.table.len()),
        );
    }
    for c in &spec.alphabet {
        if !matches!(sym_index(*c), Some(k) if k >= 2) {
            push(&mut v, "alphabet", format!("{c:?}"));
        }
    }
    for (k, nc) in spec.channels.iter().enumerate() {
        let ch = &nc.channel;
        if ch.dim != spec.register_dim {
            push(&mut v, "channel-dimension", format!("channel {}", nc.name));
        }
        let rep = check_channel(ch);
        if !rep.pass {
            push(
                &mut v,
                "channel-completeness",
                format!("channel {} residual {:.3e}", nc.name, rep.residual),
            );
        }
        let mut labels: Vec<&str> = ch.labels().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != ch.branches.len() {
            push(
                &mut v,
                "one-operator-per-outcome",
                format!("channel {}", nc.name),
            );
        }
        if spec.kind == Kind::Classical && !is_classical_channel(ch) {
            push(
                &mut v,
                "classical-channel",
                format!("channel {k} ({})", nc.name),
            );
        }
    }
    if spec.kind == Kind::Classical && spec.register_dim != 1 {
        push(
            &mut v,
            "classical-register",
            format!("register_dim = {}", spec.register_dim),
        );
    }
    if v.is_empty() {
        let syms = spec.symbols_in_scope();
        for q in 0..ns {
            if spec.is_halting(q).is_some() {
                continue;
            }
            for &s in &syms {
                let loc = || format!("({}, {:?})", spec.states[q as usize], SYMBOLS[s as usize]);
                let Some(e) = spec.entry(q, s) else {
                    push(&mut v, "totality", loc());
                    continue;
                };
                let Some(ch) = spec.channels.get(e.channel) else {
                    push(&mut v, "channel-reference", loc());
                    continue;
                };
                if e.next.len() != ch.channel.branches.len() {
                    push(&mut v, "totality", format!("{} outcome count", loc()));
                }
                for &(nq, mv) in &e.next {
                    if nq >= ns || !(-1..=1).contains(&mv) {
                        push(&mut v, "transition-range", loc());
                    }
                    if (s == SYM_LEFT && mv < 0) || (s == SYM_RIGHT && mv > 0) {
                        push(&mut v, "endmarker-guard", loc());
                    }
                }
            }
        }
    }
    ValidationReport {
        pass: v.is_empty(),
        violations: v,
    }
}

/// Identity or a fair two-outcome coin on a one-dimensional register.
fn is_classical_channel(ch: &QuantumChannel) -> bool {
    if ch.dim != 1 {
        return false;
    }
    let probs: Vec<f64> = ch
        .branches
        .iter()
        .map(|b| b.op[(0, 0)].norm_sqr())
        .collect();
    match probs.as_slice() {
        [p] => (p - 1.0).abs() < 1e-12,
        [p, q] => (p - 0.5).abs() < 1e-12 && (q - 0.5).abs() < 1e-12,
        _ => false,
    }
}

pub fn step_distribution(
    spec: &MachineSpec,
    cfg: &Configuration,
    tape: &[u8],
) -> Result<StepOutcome, MachineError> {
    if let Some(v) = spec.is_halting(cfg.state) {
        return Ok(StepOutcome {
            verdict: Some(v),
            successors: vec![],
        });
    }
    let sym = *tape.get(cfg.pos).ok_or(MachineError::HeadBounds(cfg.pos))?;
    let entry = spec
        .entry(cfg.state, sym)
        .ok_or_else(|| MachineError::Totality {
            state: spec.states[cfg.state as usize].clone(),
            symbol: SYMBOLS[sym as usize],
        })?;
    let ch = &spec.channels[entry.channel].channel;
    let outcomes = apply_channel(ch, &cfg.psi)?;
    let mut successors = Vec::with_capacity(outcomes.len());
    for (o, &(nq, mv)) in outcomes.into_iter().zip(&entry.next) {
        let Some(post) = o.post else { continue };
        let succ = match spec.is_halting(nq) {
            Some(v) => Successor::Halt(v),
            None => {
                let pos = cfg.pos as i64 + mv as i64;
                if pos < 0 || pos as usize >= tape.len() {
                    return Err(MachineError::HeadBounds(pos.max(0) as usize));
                }
                Successor::Config(Configuration {
                    state: nq,
                    pos: pos as usize,
                    psi: post,
                })
            }
        };
        successors.push((o.probability, succ));
    }
    Ok(StepOutcome {
        verdict: None,
        successors,
    })
}

/// Incremental construction of a spec with interned state and channel names.
#[derive(Debug, Clone)]
pub struct SpecBuilder {
    dim: usize,
    states: Vec<String>,
    index: HashMap<String, u32>,
    channels: Vec<NamedChannel>,
    channel_index: HashMap<String, usize>,
    table: HashMap<(u32, u8), Entry>,
    metadata: BTreeMap<String, String>,
}

impl SpecBuilder {
    pub fn new(register_dim: usize) -> Self {
        let mut b = SpecBuilder {
            dim: register_dim,
            states: Vec::new(),
            index: HashMap::new(),
            channels: Vec::new(),
            channel_index: HashMap::new(),
            table: HashMap::new(),
            metadata: BTreeMap::new(),
        };
        b.channel("id", QuantumChannel::identity(register_dim));
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&mut self, name: &str) -> u32 {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let q = self.states.len() as u32;
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), q);
        q
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn channel(&mut self, name: &str, ch: QuantumChannel) -> usize {
        if let Some(&k) = self.channel_index.get(name) {
            return k;
        }
        let k = self.channels.len();
        self.channels.push(NamedChannel {
            name: name.to_string(),
            channel: ch,
        });
        self.channel_index.insert(name.to_string(), k);
        k
    }

    pub fn channel_ref(&self, name: &str) -> Option<(usize, &QuantumChannel)> {
        self.channel_index
            .get(name)
            .map(|&k| (k, &self.channels[k].channel))
    }

    pub fn set(&mut self, q: u32, sym: u8, channel: usize, next: Vec<(u32, i8)>) {
        self.table.insert((q, sym), Entry { channel, next });
    }

    /// Identity-channel transition.
    pub fn det(&mut self, q: u32, sym: u8, next: u32, mv: i8) {
        self.set(q, sym, 0, vec![(next, mv)]);
    }

    pub fn is_set(&self, q: u32, sym: u8) -> bool {
        self.table.contains_key(&(q, sym))
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    /// Completes the table, sending every missing non-halting entry to `fill`
    /// without moving.
    pub fn build(
        self,
        kind: Kind,
        alphabet: &str,
        q0: u32,
        q_acc: u32,
        q_rej: u32,
        fill: Option<u32>,
    ) -> MachineSpec {
        let n = self.states.len();
        let mut table = vec![None; n * NSYM];
        for ((q, s), e) in self.table {
            table[q as usize * NSYM + s as usize] = Some(e);
        }
        if let Some(f) = fill {
            let mut syms = vec![SYM_LEFT, SYM_RIGHT];
            syms.extend(alphabet.chars().filter_map(sym_index));
            for q in 0..n as u32 {
                if q == q_acc || q == q_rej {
                    continue;
                }
                for &s in &syms {
                    let slot = &mut table[q as usize * NSYM + s as usize];
                    if slot.is_none() {
                        *slot = Some(Entry {
                            channel: 0,
                            next: vec![(f, 0)],
                        });
                    }
                }
            }
        }
        MachineSpec {
            kind,
            states: self.states,
            q0,
            q_acc,
            q_rej,
            register_dim: self.dim,
            alphabet: alphabet.chars().collect(),
            channels: self.channels,
            table,
            metadata: self.metadata,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    dim: usize,
    branches: Vec<crate::qkernel::Branch>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    channel: String,
    next: BTreeMap<String, (String, i8)>,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    format: String,
    kind: Kind,
    states: Vec<String>,
    q0: String,
    q_acc: String,
    q_rej: String,
    register_dim: usize,
    alphabet: String,
    channels: BTreeMap<String, ChannelFile>,
    classical: BTreeMap<String, BTreeMap<String, EntryFile>>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

impl MachineSpec {
    pub fn to_json(&self) -> String {
        let name = |q: u32| self.states[q as usize].clone();
        let mut classical = BTreeMap::new();
        for q in 0..self.states.len() as u32 {
            let mut row = BTreeMap::new();
            for s in 0..NSYM as u8 {
                if let Some(e) = self.entry(q, s) {
                    let ch = &self.channels[e.channel];
                    let next = ch
                        .channel
                        .branches
                        .iter()
                        .zip(&e.next)
                        .map(|(b, &(nq, mv))| (b.label.clone(), (name(nq), mv)))
                        .collect();
                    row.insert(
                        SYMBOLS[s as usize].to_string(),
                        EntryFile {
                            channel: ch.name.clone(),
                            next,
                        },
                    );
                }
            }
            if !row.is_empty() {
                classical.insert(name(q), row);
            }
        }
        let file = SpecFile {
            format: SPEC_FORMAT.into(),
            kind: self.kind,
            states: self.states.clone(),
            q0: name(self.q0),
            q_acc: name(self.q_acc),
            q_rej: name(self.q_rej),
            register_dim: self.register_dim,
            alphabet: self.alphabet.iter().collect(),
            channels: self
                .channels
                .iter()
                .map(|c| {
                    (
                        c.name.clone(),
                        ChannelFile {
                            dim: c.channel.dim,
                            branches: c.channel.branches.clone(),
                        },
                    )
                })
                .collect(),
            classical,
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        let f: SpecFile =
            serde_json::from_str(text).map_err(|e| MachineError::Format(e.to_string()))?;
        if f.format != SPEC_FORMAT {
            return Err(MachineError::Format(format!(
                "unknown format {:?}",
                f.format
            )));
        }
        let idx: HashMap<&str, u32> = f
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k as u32))
            .collect();
        let lookup = |s: &str| {
            idx.get(s)
                .copied()
                .ok_or_else(|| MachineError::Format(format!("unknown state {s:?}")))
        };
        let mut names: Vec<&String> = f.channels.keys().collect();
        names.sort();
        let channels: Vec<NamedChannel> = names
            .iter()
            .map(|n| NamedChannel {
                name: (*n).clone(),
                channel: QuantumChannel {
                    dim: f.channels[*n].dim,
                    branches: f.channels[*n].branches.clone(),
                },
            })
            .collect();
        let ch_idx: HashMap<&str, usize> = channels
            .iter()
            .enumerate()
            .map(|(k, c)| (c.name.as_str(), k))
            .collect();
        let mut table = vec![None; f.states.len() * NSYM];
        for (q, row) in &f.classical {
            let qi = lookup(q)?;
            for (sym, e) in row {
                let mut cs = sym.chars();
                let s = match (cs.next(), cs.next()) {
                    (Some(c), None) => sym_index(c),
                    _ => None,
                }
                .ok_or_else(|| MachineError::Format(format!("bad symbol {sym:?}")))?;
                let k = *ch_idx.get(e.channel.as_str()).ok_or_else(|| {
                    MachineError::Format(format!("unknown channel {:?}", e.channel))
                })?;
                let mut next = Vec::new();
                for b in &channels[k].channel.branches {
                    let (nq, mv) = e.next.get(&b.label).ok_or_else(|| {
                        MachineError::Format(format!("missing outcome {:?} at {q}", b.label))
                    })?;
                    next.push((lookup(nq)?, *mv));
                }
                table[qi as usize * NSYM + s as usize] = Some(Entry { channel: k, next });
            }
        }
        Ok(MachineSpec {
            kind: f.kind,
            q0: lookup(&f.q0)?,
            q_acc: lookup(&f.q_acc)?,
            q_rej: lookup(&f.q_rej)?,
            states: f.states,
            register_dim: f.register_dim,
            alphabet: f.alphabet.chars().collect(),
            channels,
            table,
            metadata: f.metadata,
        })
    }
}
