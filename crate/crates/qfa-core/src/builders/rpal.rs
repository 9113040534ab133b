//! Template compiler for the RPAL family.

use super::compile::{core_action, lower, Action, Target, TokenProgram};
use super::cores::{eq_core, pal_core, PAL_DIM};
use super::eps::Epsilon;
use super::view::{LeftMode, Pred, Token, VState, View};
use crate::machine::MachineSpec;
use crate::qkernel::QuantumChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Stage {
    C1(u16),
    C2First(u16),
    C2Next(u16),
    Pal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Then {
    Core(Stage),
    Walk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum X {
    /// Format check: automaton state and blocks seen.
    R(u8, u16),
    Home(Then),
    Core(Stage, u32, VState),
    NextPr(u16),
    FindPm(u16),
    FindPl(u16),
    Walk,
    Coins(u32),
}

pub(crate) fn one() -> Pred {
    Pred::bin(1, 1)
}

fn view(stage: Stage) -> View {
    let base = View {
        pl: Pred::left_end(),
        pm: None,
        pr: (Pred::dollar(), 1),
        left: Pred::sigma(),
        left_mode: LeftMode::Count,
        right: Pred::NONE,
        pm_shows: None,
    };
    match stage {
        Stage::C1(j) => View {
            pm: Some((Pred::dollar(), j)),
            pr: (Pred::dollar().or(Pred::right_end()), 1),
            right: one(),
            ..base
        },
        Stage::C2First(j) => View {
            pm: Some((Pred::dollar(), j)),
            pr: (one(), 2),
            right: Pred::a(),
            ..base
        },
        Stage::C2Next(_) => View {
            pl: one().or(Pred::left_end()),
            pm: Some((one(), 1)),
            pr: (Pred::non_a(), 1),
            right: Pred::a(),
            ..base
        },
        Stage::Pal => View {
            left: Pred::ab(),
            left_mode: LeftMode::Copy,
            ..base
        },
    }
}

struct Rpal {
    i: u16,
    k: u32,
    loop_only: bool,
    eq: MachineSpec,
    pal: MachineSpec,
}

impl Rpal {
    fn enter(&self, stage: Stage) -> X {
        let core = if stage == Stage::Pal {
            &self.pal
        } else {
            &self.eq
        };
        X::Core(stage, core.q0, VState::at_pl())
    }

    fn after_loop(&self, j: u16) -> (Target<X>, i8) {
        if j > 1 {
            (Target::To(X::Home(Then::Core(Stage::C1(j - 1)))), -1)
        } else {
            (Target::To(X::Home(Then::Walk)), -1)
        }
    }

    fn restart(&self) -> (Target<X>, i8) {
        (Target::To(X::Home(Then::Core(Stage::C1(self.i)))), -1)
    }

    fn on_core(&self, stage: Stage, q: u32, s: VState, t: Token, arrive: i8) -> Action<X> {
        let v = view(stage);
        let core = if stage == Stage::Pal {
            &self.pal
        } else {
            &self.eq
        };
        let wrap = |q, s| X::Core(stage, q, s);
        match stage {
            Stage::C1(j) => core_action(core, &v, q, s, t, arrive, wrap, |_| {
                (Target::To(X::Home(Then::Core(Stage::C2First(j)))), -1)
            }),
            Stage::C2First(j) | Stage::C2Next(j) => {
                core_action(core, &v, q, s, t, arrive, wrap, |_| {
                    (Target::To(X::NextPr(j)), 1)
                })
            }
            Stage::Pal => core_action(core, &v, q, s, t, arrive, wrap, |_| (Target::Accept, 0)),
        }
    }

    fn on_r(&self, st: u8, blk: u16, t: Token) -> Action<X> {
        use Token::*;
        let go = |st, blk| Action::go(X::R(st, blk), 1);
        match (st, t) {
            (0, Left) => go(0, 0),
            (0, A | B) => go(1, 0),
            (1, A | B) => go(2, 0),
            (2, A | B) => go(2, 0),
            (2, Dollar) => go(3, 1),
            (3, Bin(1, 1)) => go(4, blk),
            (4, A) => go(5, blk),
            (5, A) => go(5, blk),
            (5, Bin(1, 1)) => go(6, blk),
            (6, A) => go(5, blk),
            (6, Dollar) if blk < self.i => go(3, blk + 1),
            (6, Right) if blk == self.i => Action::go(X::Home(Then::Core(Stage::C1(self.i))), -1),
            _ => Action::reject(),
        }
    }
}

impl TokenProgram for Rpal {
    type X = X;

    fn start(&self) -> X {
        X::R(0, 0)
    }

    fn width(&self, _: &X) -> usize {
        1
    }

    fn on(&self, x: &X, t: Token, arrive: i8) -> Action<X> {
        let coin = || Some(("coin".to_string(), QuantumChannel::coin(PAL_DIM)));
        match *x {
            X::R(st, blk) => self.on_r(st, blk, t),
            X::Home(then) => match (t, then) {
                (Token::Left, Then::Core(stage)) => Action::go(self.enter(stage), 0),
                (Token::Left, Then::Walk) => Action::go(X::Walk, 1),
                _ => Action::go(X::Home(then), -1),
            },
            X::Core(stage, q, s) => self.on_core(stage, q, s, t, arrive),
            X::NextPr(j) => match t {
                Token::A => Action::go(X::NextPr(j), 1),
                Token::Bin(1, 1) => Action::go(X::FindPm(j), -1),
                _ => {
                    let (tg, mv) = self.after_loop(j);
                    Action {
                        channel: None,
                        next: vec![(tg, mv)],
                    }
                }
            },
            X::FindPm(j) => match t {
                Token::A => Action::go(X::FindPm(j), -1),
                Token::Bin(1, 1) => Action::go(X::FindPl(j), -1),
                _ => Action::reject(),
            },
            X::FindPl(j) => match t {
                Token::A => Action::go(X::FindPl(j), -1),
                Token::Bin(1, 1) => Action::go(self.enter(Stage::C2Next(j)), 0),
                _ => Action::reject(),
            },
            X::Walk => match t {
                Token::Left => Action::go(self.enter(Stage::C1(self.i)), 0),
                Token::Right => self.on(&X::Coins(0), t, 0),
                _ => Action {
                    channel: coin(),
                    next: flip((Target::To(X::Walk), 1), (Target::To(X::Walk), -1)),
                },
            },
            X::Coins(n) if n == self.k => {
                if self.loop_only {
                    Action::accept()
                } else {
                    Action::go(X::Home(Then::Core(Stage::Pal)), -1)
                }
            }
            X::Coins(n) => Action {
                channel: coin(),
                next: flip((Target::To(X::Coins(n + 1)), 0), self.restart()),
            },
        }
    }
}

/// Branch list of the shared coin channel on the compiled register.
pub(crate) fn flip<X: Clone>(
    heads: (Target<X>, i8),
    tails: (Target<X>, i8),
) -> Vec<(Target<X>, i8)> {
    let mut v = vec![heads; PAL_DIM];
    v.extend(std::iter::repeat_n(tails, PAL_DIM));
    v
}

/// Compiles the RPAL template for block count `i`. With `loop_only`, leaving
/// the main loop accepts instead of running the palindrome stage.
pub fn compile_rpal_with(i: u16, eps: Epsilon, k_eps: u32, loop_only: bool) -> MachineSpec {
    assert!(i >= 1, "i must be positive");
    let prog = Rpal {
        i,
        k: k_eps,
        loop_only,
        eq: eq_core(eps.eq_coins(), PAL_DIM),
        pal: pal_core(eps.pal_sweeps()),
    };
    let mut spec = lower(&prog, PAL_DIM, "ab01$#");
    spec.metadata
        .insert("builder".into(), "compile_rpal".into());
    spec.metadata.insert("i".into(), i.to_string());
    spec.metadata.insert("epsilon".into(), eps.to_string());
    spec.metadata.insert("k_eps".into(), k_eps.to_string());
    spec.metadata
        .insert("eq_coins".into(), eps.eq_coins().to_string());
    spec.metadata
        .insert("j".into(), eps.pal_sweeps().to_string());
    if loop_only {
        spec.metadata.insert("loop_only".into(), "true".into());
    }
    spec
}

pub fn compile_rpal(i: u16, eps: Epsilon, k_eps: u32) -> MachineSpec {
    compile_rpal_with(i, eps, k_eps, false)
}
