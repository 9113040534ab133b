//! Template compiler for the PPPAL family.

use super::compile::{core_action, lower, Action, Target, TokenProgram};
use super::cores::{eq_core, pal_core, PAL_DIM};
use super::eps::Epsilon;
use super::rpal::flip;
use super::view::{LeftMode, Pred, Token, VState, VSym, View};
use crate::langkit::lang_params;
use crate::machine::MachineSpec;
use crate::qkernel::QuantumChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Stage {
    C1,
    C2,
    Tw,
    C3(u16),
    Pal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Phase {
    Before,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Last {
    Start,
    Letter,
    Sep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum X {
    /// Format checks: phase around `cbin(i)`, previous token kind and
    /// progress through the closing `$ a 0^c a`.
    R(Phase, Last, u8),
    Core(Stage, u32, VState),
    FindSep,
    FindPl(Stage),
    UpdatePr,
    TwFindPm,
    TwFindPl(bool),
    TwBack,
    LFindD(u16),
    LBack(u16),
    LOldPl(u16),
    LFindPl(u16),
    ToEnd,
    Home,
    Walk,
    Coins(u32),
}

pub(crate) fn view(stage: Stage, i: u16) -> View {
    let sep_or = |p: Pred| Pred::sep().or(p);
    let base = View {
        pl: sep_or(Pred::left_end()),
        pm: Some((Pred::sep(), 1)),
        pr: (sep_or(Pred::right_end()), 1),
        left: Pred::ab(),
        left_mode: LeftMode::Count,
        right: Pred::ab(),
        pm_shows: None,
    };
    match stage {
        Stage::C1 => base,
        Stage::C2 => View {
            left: Pred::a(),
            right: Pred::a(),
            pm_shows: Some(VSym::B),
            ..base
        },
        Stage::Tw => View {
            pl: Pred::dollar().or(Pred::left_end()),
            pm: Some((Pred::dollar(), 1)),
            pr: (Pred::dollar().or(Pred::right_end()), 1),
            left: Pred::any_bin(),
            left_mode: LeftMode::OddParity,
            right: Pred::any_bin(),
            pm_shows: Some(VSym::B),
        },
        Stage::C3(j) => View {
            pl: Pred::bin(j, u16::MAX).or(Pred::left_end()),
            pm: Some((Pred::bin(j, u16::MAX), 1)),
            left: Pred::bin(j - 1, j - 1),
            pm_shows: Some(VSym::A),
            ..base
        },
        Stage::Pal => View {
            pl: Pred::left_end(),
            pm: None,
            pr: (Pred::bin(i, i), 1),
            left_mode: LeftMode::Copy,
            ..base
        },
    }
}

struct Pppal {
    i: u16,
    c: usize,
    k: u32,
    loop_only: bool,
    eq: MachineSpec,
    pal: MachineSpec,
}

impl Pppal {
    fn core(&self, stage: Stage) -> &MachineSpec {
        if stage == Stage::Pal {
            &self.pal
        } else {
            &self.eq
        }
    }

    fn enter(&self, stage: Stage) -> Action<X> {
        Action::go(X::Core(stage, self.core(stage).q0, VState::at_pl()), 0)
    }

    fn bin_at_least(t: Token, j: u16) -> bool {
        matches!(t, Token::Bin(v, _) if v >= j)
    }

    fn on_r(&self, ph: Phase, last: Last, tail: u8, t: Token) -> Action<X> {
        let i = self.i;
        let go = |ph, last, tail| Action::go(X::R(ph, last, tail), 1);
        match t {
            Token::Left if last == Last::Start => go(ph, last, 0),
            Token::A | Token::B => {
                if t == Token::B && ph == Phase::After {
                    return Action::reject();
                }
                let tail = match (t, tail) {
                    (Token::A, 1) => 2,
                    (Token::A, 3) => 4,
                    _ => 0,
                };
                go(ph, Last::Letter, tail)
            }
            Token::Dollar | Token::Bin(..) if last == Last::Letter => {
                let (ph, ok) = match (ph, t) {
                    (Phase::Before, Token::Bin(v, _)) if v == i => (Phase::After, true),
                    (Phase::Before, Token::Bin(v, _)) => (ph, v >= 1 && v < i),
                    (Phase::After, Token::Bin(v, _)) => (ph, v == 0),
                    (Phase::After, Token::Dollar) => (ph, true),
                    _ => (ph, false),
                };
                if !ok {
                    return Action::reject();
                }
                let tail = match (t, tail) {
                    (Token::Dollar, _) => 1,
                    (Token::Bin(0, _), 2) => 3,
                    _ => 0,
                };
                go(ph, Last::Sep, tail)
            }
            Token::Right if ph == Phase::After && last == Last::Letter && tail == 4 => {
                Action::go(X::FindSep, -1)
            }
            _ => Action::reject(),
        }
    }

    fn on_core(&self, stage: Stage, q: u32, s: VState, t: Token, arrive: i8) -> Action<X> {
        let v = view(stage, self.i);
        let wrap = |q, s| X::Core(stage, q, s);
        let core = self.core(stage);
        match stage {
            Stage::C1 | Stage::C2 => core_action(core, &v, q, s, t, arrive, wrap, |t| match t {
                Token::Dollar | Token::Right => (Target::To(X::TwFindPm), -1),
                _ => (Target::To(X::UpdatePr), -1),
            }),
            Stage::Tw => core_action(core, &v, q, s, t, arrive, wrap, |_| {
                (Target::To(X::UpdatePr), -1)
            }),
            Stage::C3(j) => core_action(core, &v, q, s, t, arrive, wrap, |_| {
                (Target::To(X::LBack(j)), -1)
            }),
            Stage::Pal => core_action(core, &v, q, s, t, arrive, wrap, |_| (Target::Accept, 0)),
        }
    }

    fn after_sweep(&self) -> Action<X> {
        if self.i > 1 {
            Action::go(X::LFindD(self.i), 1)
        } else {
            Action::go(X::Walk, 1)
        }
    }
}

impl TokenProgram for Pppal {
    type X = X;

    fn start(&self) -> X {
        X::R(Phase::Before, Last::Start, 0)
    }

    fn width(&self, x: &X) -> usize {
        match x {
            X::Walk | X::Coins(_) => 1,
            _ => self.c,
        }
    }

    fn on(&self, x: &X, t: Token, arrive: i8) -> Action<X> {
        let coin = || Some(("coin".to_string(), QuantumChannel::coin(PAL_DIM)));
        let letter = t.is_letter();
        match *x {
            X::R(ph, last, tail) => self.on_r(ph, last, tail, t),
            X::Core(stage, q, s) => self.on_core(stage, q, s, t, arrive),
            X::FindSep => match t {
                _ if letter => Action::go(X::FindSep, -1),
                Token::Dollar => Action::go(X::FindPl(Stage::C2), -1),
                Token::Bin(..) => Action::go(X::FindPl(Stage::C1), -1),
                Token::Left => self.after_sweep(),
                _ => Action::reject(),
            },
            X::FindPl(stage) => match t {
                _ if letter => Action::go(X::FindPl(stage), -1),
                _ if t.is_sep() || t == Token::Left => self.enter(stage),
                _ => Action::reject(),
            },
            X::UpdatePr => match t {
                _ if letter => Action::go(X::UpdatePr, -1),
                _ if t.is_sep() => Action::go(X::FindSep, -1),
                _ => Action::reject(),
            },
            X::TwFindPm => match t {
                Token::Dollar => Action::go(X::TwFindPl(false), -1),
                Token::Left => Action::go(X::TwBack, 1),
                _ => Action::go(X::TwFindPm, -1),
            },
            X::TwFindPl(odd) => match t {
                Token::Dollar | Token::Left if odd => self.enter(Stage::Tw),
                Token::Dollar | Token::Left => Action::reject(),
                Token::Bin(..) => Action::go(X::TwFindPl(!odd), -1),
                _ => Action::go(X::TwFindPl(odd), -1),
            },
            X::TwBack => match t {
                Token::Dollar | Token::Right => Action::go(X::UpdatePr, -1),
                _ => Action::go(X::TwBack, 1),
            },
            X::LFindD(j) => match t {
                Token::Bin(v, _) if v == self.i => Action::go(X::LFindPl(j), -1),
                Token::Right => Action::reject(),
                _ => Action::go(X::LFindD(j), 1),
            },
            X::LBack(j) => match t {
                _ if Self::bin_at_least(t, j) => Action::go(X::LOldPl(j), -1),
                _ if t.is_end() => Action::reject(),
                _ => Action::go(X::LBack(j), -1),
            },
            X::LOldPl(j) => match t {
                Token::Left if j > 2 => Action::go(X::LFindD(j - 1), 1),
                Token::Left => Action::go(X::Walk, 1),
                _ if Self::bin_at_least(t, j) => Action::go(X::LFindPl(j), -1),
                _ => Action::go(X::LOldPl(j), -1),
            },
            X::LFindPl(j) => match t {
                _ if Self::bin_at_least(t, j) || t == Token::Left => self.enter(Stage::C3(j)),
                _ if t.is_end() => Action::reject(),
                _ => Action::go(X::LFindPl(j), -1),
            },
            X::ToEnd => match t {
                Token::Right => Action::go(X::FindSep, -1),
                _ => Action::go(X::ToEnd, 1),
            },
            X::Home => match t {
                Token::Left => self.enter(Stage::Pal),
                _ => Action::go(X::Home, -1),
            },
            X::Walk => match t {
                Token::Left => Action::go(X::ToEnd, 1),
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
                    Action::go(X::Home, -1)
                }
            }
            X::Coins(n) => Action {
                channel: coin(),
                next: flip(
                    (Target::To(X::Coins(n + 1)), 0),
                    (Target::To(X::FindSep), -1),
                ),
            },
        }
    }
}

/// Compiles the PPPAL template for level `i`. With `loop_only`, leaving the
/// main loop accepts instead of running the palindrome stage.
pub fn compile_pppal_with(i: u16, eps: Epsilon, k_eps: u32, loop_only: bool) -> MachineSpec {
    assert!(i >= 1, "i must be positive");
    let params = lang_params(i as i64).expect("valid level");
    let prog = Pppal {
        i,
        c: params.delim_width,
        k: k_eps,
        loop_only,
        eq: eq_core(eps.eq_coins(), PAL_DIM),
        pal: pal_core(eps.pal_sweeps()),
    };
    let mut spec = lower(&prog, PAL_DIM, "ab01$#");
    spec.metadata
        .insert("builder".into(), "compile_pppal".into());
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

pub fn compile_pppal(i: u16, eps: Epsilon, k_eps: u32) -> MachineSpec {
    compile_pppal_with(i, eps, k_eps, false)
}
