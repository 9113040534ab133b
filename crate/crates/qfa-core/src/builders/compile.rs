//! Lowers a token-level program to a cell-level machine.
//!
//! The program sees whole tokens: single symbols, or binary runs of a fixed
//! width. After a token is read in direction `d` the head rests on its far
//! end in that direction; reversing first crosses the token again.

use super::view::{Token, VState, View};
use crate::machine::{sym_index, Kind, MachineSpec, SpecBuilder, SYMBOLS, SYM_LEFT, SYM_RIGHT};
use crate::qkernel::QuantumChannel;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Target<X> {
    To(X),
    Accept,
    Reject,
}

/// A transition: optional channel (identity when `None`) and, per outcome,
/// the next program state with an absolute head move in tokens.
#[derive(Debug, Clone)]
pub(crate) struct Action<X> {
    pub channel: Option<(String, QuantumChannel)>,
    pub next: Vec<(Target<X>, i8)>,
}

impl<X> Action<X> {
    pub fn go(x: X, mv: i8) -> Self {
        Action {
            channel: None,
            next: vec![(Target::To(x), mv)],
        }
    }

    pub fn reject() -> Self {
        Action {
            channel: None,
            next: vec![(Target::Reject, 0)],
        }
    }

    pub fn accept() -> Self {
        Action {
            channel: None,
            next: vec![(Target::Accept, 0)],
        }
    }
}

pub(crate) trait TokenProgram {
    type X: Clone + Eq + Hash + Debug;

    /// State entered at the left endmarker; it receives `on(start, Left, 1)`.
    fn start(&self) -> Self::X;

    /// Width of binary runs read as one token in state `x`; 1 reads cells.
    fn width(&self, x: &Self::X) -> usize;

    /// Transition on token `t`, reached by a move in `arrive` (0 when the
    /// previous transition did not move).
    fn on(&self, x: &Self::X, t: Token, arrive: i8) -> Action<Self::X>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Cell<X> {
    /// Reading cells in direction `d`; `bits` is a partial binary run.
    Scan {
        x: X,
        d: i8,
        bits: Option<(u8, u16)>,
    },
    /// Parked on token `t` at its end facing `d`, where `sym` is the symbol.
    Rest {
        x: X,
        t: Token,
        d: i8,
        w: u8,
        sym: u8,
    },
    /// Inside a binary run moving `d`; `r` cells remain before the exit move.
    Skip { x: X, d: i8, r: u8 },
}

struct Lowering<'p, P: TokenProgram> {
    prog: &'p P,
    b: SpecBuilder,
    ids: HashMap<Cell<P::X>, u32>,
    work: Vec<Cell<P::X>>,
    acc: u32,
    rej: u32,
    syms: Vec<u8>,
}

const BITS: [u8; 2] = [4, 5];
const MAX_CELLS: usize = 100_000;

fn token_of(sym: u8) -> Token {
    match SYMBOLS[sym as usize] {
        'a' => Token::A,
        'b' => Token::B,
        '$' => Token::Dollar,
        '#' => Token::Hash,
        '0' => Token::Bin(0, 1),
        '1' => Token::Bin(1, 1),
        _ if sym == SYM_LEFT => Token::Left,
        _ => Token::Right,
    }
}

impl<'p, P: TokenProgram> Lowering<'p, P> {
    fn id(&mut self, c: Cell<P::X>) -> u32 {
        if let Some(&q) = self.ids.get(&c) {
            return q;
        }
        let name = match &c {
            Cell::Scan { x, d, bits } => match bits {
                None => format!("{x:?}/scan{d:+}"),
                Some((k, v)) => format!("{x:?}/scan{d:+}/bits{k}:{v}"),
            },
            Cell::Rest { x, t, d, sym, .. } => {
                format!("{x:?}/rest{d:+}/{t:?}/{}", SYMBOLS[*sym as usize])
            }
            Cell::Skip { x, d, r } => format!("{x:?}/skip{d:+}/{r}"),
        };
        assert!(
            self.ids.len() < MAX_CELLS,
            "token program exceeds {MAX_CELLS} cell states at {name}"
        );
        let q = self.b.state(&name);
        self.ids.insert(c.clone(), q);
        self.work.push(c);
        q
    }

    /// Successor cell state and move for a program move `mv` from a token of
    /// width `w` read in direction `d`.
    fn place(&mut self, x: P::X, t: Token, d: i8, w: u8, sym: u8, mv: i8) -> (u32, i8) {
        let d = if d == 0 { 1 } else { d };
        if mv == 0 {
            return (self.id(Cell::Rest { x, t, d, w, sym }), 0);
        }
        if (t == Token::Left && mv < 0) || (t == Token::Right && mv > 0) {
            return (self.rej, 0);
        }
        if mv == d || w == 1 {
            return (
                self.id(Cell::Scan {
                    x,
                    d: mv,
                    bits: None,
                }),
                mv,
            );
        }
        (self.id(Cell::Skip { x, d: mv, r: w - 2 }), mv)
    }

    fn emit(&mut self, q: u32, sym: u8, act: Action<P::X>, t: Token, d: i8, w: u8) {
        let next: Vec<(u32, i8)> = act
            .next
            .into_iter()
            .map(|(tg, mv)| match tg {
                Target::Accept => (self.acc, 0),
                Target::Reject => (self.rej, 0),
                Target::To(x) => self.place(x, t, d, w, sym, mv),
            })
            .collect();
        let ch = match act.channel {
            None => 0,
            Some((name, ch)) => self.b.channel(&name, ch),
        };
        self.b.set(q, sym, ch, next);
    }

    fn expand(&mut self, c: Cell<P::X>) {
        let q = self.ids[&c];
        match c {
            Cell::Rest { x, t, d, w, sym } => {
                let act = self.prog.on(&x, t, 0);
                self.emit(q, sym, act, t, d, w);
            }
            Cell::Skip { x, d, r } => {
                let next = if r == 0 {
                    self.id(Cell::Scan { x, d, bits: None })
                } else {
                    self.id(Cell::Skip { x, d, r: r - 1 })
                };
                for s in BITS {
                    self.b.det(q, s, next, d);
                }
            }
            Cell::Scan { x, d, bits } => {
                let width = self.prog.width(&x);
                for sym in self.syms.clone() {
                    let is_bit = BITS.contains(&sym);
                    if width > 1 && is_bit {
                        let bit = (sym - BITS[0]) as u16;
                        let (k, v) = bits.unwrap_or((0, 0));
                        let v = if d > 0 {
                            (v << 1) | bit
                        } else {
                            v | (bit << k)
                        };
                        if (k as usize) + 1 < width {
                            let nq = self.id(Cell::Scan {
                                x: x.clone(),
                                d,
                                bits: Some((k + 1, v)),
                            });
                            self.b.det(q, sym, nq, d);
                        } else {
                            let t = Token::Bin(v, width as u8);
                            let act = self.prog.on(&x, t, d);
                            self.emit(q, sym, act, t, d, width as u8);
                        }
                    } else if bits.is_some() {
                        self.b.det(q, sym, self.rej, 0);
                    } else {
                        let t = token_of(sym);
                        let act = self.prog.on(&x, t, d);
                        self.emit(q, sym, act, t, d, 1);
                    }
                }
            }
        }
    }
}

/// Compiles `prog` into a validated-shape spec over `alphabet`.
pub(crate) fn lower<P: TokenProgram>(prog: &P, dim: usize, alphabet: &str) -> MachineSpec {
    let mut b = SpecBuilder::new(dim);
    let acc = b.state("accept");
    let rej = b.state("reject");
    let mut l = Lowering {
        prog,
        b,
        ids: HashMap::new(),
        work: Vec::new(),
        acc,
        rej,
        syms: [SYM_LEFT, SYM_RIGHT]
            .into_iter()
            .chain(alphabet.chars().filter_map(sym_index))
            .collect(),
    };
    let q0 = l.id(Cell::Scan {
        x: prog.start(),
        d: 1,
        bits: None,
    });
    while let Some(c) = l.work.pop() {
        l.expand(c);
    }
    l.b.build(Kind::QuantumClassical, alphabet, q0, acc, rej, Some(rej))
}

/// One step of `core` running on the virtual tape of `view`.
///
/// `s` is the tracker state before the move that brought the head onto `t`;
/// `q` is the core state waiting for the next virtual symbol. Core acceptance
/// is handed to `done` with the token under the head.
#[allow(clippy::too_many_arguments)]
pub(crate) fn core_action<X>(
    core: &MachineSpec,
    view: &View,
    q: u32,
    s: VState,
    t: Token,
    arrive: i8,
    wrap: impl Fn(u32, VState) -> X,
    done: impl Fn(Token) -> (Target<X>, i8),
) -> Action<X> {
    let s = if arrive == 0 {
        s
    } else {
        match view.step(s, arrive, t) {
            Some(s) => s,
            None => return Action::reject(),
        }
    };
    let Some(v) = view.vsym(s) else {
        if arrive == 0 {
            return Action::reject();
        }
        return Action::go(wrap(q, s), arrive);
    };
    let sym = sym_index(v.tape_char()).expect("virtual symbol");
    let Some(e) = core.entry(q, sym) else {
        return Action::reject();
    };
    let nc = &core.channels[e.channel];
    let channel = (e.channel != 0).then(|| (nc.name.clone(), nc.channel.clone()));
    let next = e
        .next
        .iter()
        .map(|&(nq, mv)| {
            if nq == core.q_acc {
                done(t)
            } else if nq == core.q_rej {
                (Target::Reject, 0)
            } else {
                (Target::To(wrap(nq, s)), mv)
            }
        })
        .collect();
    Action { channel, next }
}
