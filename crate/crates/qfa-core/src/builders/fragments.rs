//! Stand-alone subroutine fragments and the token view they run on.

use super::compile::{core_action, lower, Action, Target, TokenProgram};
use super::cores::{eq_core, pal_core, rw_gate};
use super::eps::Epsilon;
use super::view::{LeftMode, Pred, Token, VState, VSym, View, Zone};
use crate::machine::{MachineSpec, LEFT_END, RIGHT_END};

/// A spec with an entry state and exit hooks. Hooks are halting states of
/// the spec; a fragment never halts anywhere else.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineFragment {
    pub spec: MachineSpec,
    pub entry: u32,
    pub return_accept: Option<u32>,
    pub return_reject: Option<u32>,
    pub return_continue: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("malformed region: {0}")]
    Malformed(String),
    #[error("signpost {0} not found")]
    MissingSignpost(&'static str),
    #[error("contract: {0}")]
    Contract(String),
}

/// Splits `▷ input ◁` into tokens; binary runs are cut into `width` pieces.
/// Returns each token with its first tape index (the left endmarker is 0).
pub fn tokenize(input: &str, width: usize) -> Result<Vec<(Token, usize)>, BuildError> {
    let cells: Vec<char> = input.chars().collect();
    let mut out = vec![(Token::Left, 0)];
    let mut k = 0;
    while k < cells.len() {
        let pos = k + 1;
        let t = match cells[k] {
            'a' => Token::A,
            'b' => Token::B,
            '$' => Token::Dollar,
            '#' => Token::Hash,
            '0' | '1' => {
                let run = cells[k..]
                    .iter()
                    .take_while(|c| matches!(c, '0' | '1'))
                    .count();
                if width == 0 || run % width != 0 {
                    return Err(BuildError::Malformed(format!(
                        "binary run of length {run} at {pos} is not a multiple of {width}"
                    )));
                }
                for chunk in cells[k..k + run].chunks(width) {
                    let v = chunk
                        .iter()
                        .fold(0u16, |v, &c| (v << 1) | (c == '1') as u16);
                    out.push((Token::Bin(v, width as u8), k + 1));
                    k += width;
                }
                continue;
            }
            c => return Err(BuildError::Malformed(format!("symbol {c:?} at {pos}"))),
        };
        out.push((t, pos));
        k += 1;
    }
    out.push((Token::Right, cells.len() + 1));
    Ok(out)
}

/// A view applied to a concrete input: signpost positions and the virtual
/// tape the core sees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenView {
    pub input: String,
    pub tokens: Vec<(Token, usize)>,
    pub p_l: usize,
    pub p_m: Option<usize>,
    pub p_r: usize,
    /// Virtual tape between the endmarkers.
    pub virtual_tape: String,
}

impl TokenView {
    /// `p_l` is the first `pl` token from the left.
    pub fn new(input: &str, view: &View, width: usize) -> Result<Self, BuildError> {
        let tokens = tokenize(input, width)?;
        let start = tokens
            .iter()
            .position(|(t, _)| view.pl.matches(*t))
            .ok_or(BuildError::MissingSignpost("p_l"))?;
        let mut s = VState::at_pl();
        let mut p_m = None;
        let mut tape = String::new();
        for &(t, pos) in &tokens[start + 1..] {
            s = view.step(s, 1, t).ok_or(BuildError::MissingSignpost(
                if p_m.is_none() && view.pm.is_some() {
                    "p_m"
                } else {
                    "p_r"
                },
            ))?;
            if s.zone == Zone::PM {
                p_m = Some(pos);
            }
            match view.vsym(s) {
                Some(VSym::Right) => {
                    return Ok(TokenView {
                        input: input.to_string(),
                        p_l: tokens[start].1,
                        p_m,
                        p_r: pos,
                        tokens,
                        virtual_tape: tape,
                    })
                }
                Some(v) => tape.push(v.tape_char()),
                None => {}
            }
        }
        Err(BuildError::MissingSignpost("p_r"))
    }

    /// The virtual tape with endmarkers.
    pub fn framed(&self) -> String {
        format!("{LEFT_END}{}{RIGHT_END}", self.virtual_tape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Fx {
    Seek,
    Parity(VState),
    Back(VState),
    Core(u32, VState),
}

struct Adapter {
    view: View,
    width: usize,
    core: MachineSpec,
    even_check: bool,
}

impl TokenProgram for Adapter {
    type X = Fx;

    fn start(&self) -> Fx {
        Fx::Seek
    }

    fn width(&self, _: &Fx) -> usize {
        self.width
    }

    fn on(&self, x: &Fx, t: Token, arrive: i8) -> Action<Fx> {
        let begin = || Action::go(Fx::Core(self.core.q0, VState::at_pl()), 0);
        match *x {
            Fx::Seek if self.view.pl.matches(t) => {
                if self.even_check {
                    Action::go(Fx::Parity(VState::at_pl()), 1)
                } else {
                    begin()
                }
            }
            Fx::Seek if t == Token::Right => Action::reject(),
            Fx::Seek => Action::go(Fx::Seek, 1),
            Fx::Parity(s) => match self.view.step(s, 1, t) {
                None => Action::reject(),
                Some(n) if matches!(n.zone, Zone::PM | Zone::PR) => {
                    if s.left_parity() {
                        Action::reject()
                    } else {
                        Action::go(Fx::Back(n), -1)
                    }
                }
                Some(n) => Action::go(Fx::Parity(n), 1),
            },
            Fx::Back(s) => match self.view.step(s, -1, t) {
                None => Action::reject(),
                Some(n) if n.zone == Zone::PL => begin(),
                Some(n) => Action::go(Fx::Back(n), -1),
            },
            Fx::Core(q, s) => core_action(
                &self.core,
                &self.view,
                q,
                s,
                t,
                arrive,
                Fx::Core,
                |_| (Target::Accept, 0),
            ),
        }
    }
}

fn wrap_core(spec: MachineSpec, cont: bool) -> MachineFragment {
    let (acc, rej, q0) = (spec.q_acc, spec.q_rej, spec.q0);
    MachineFragment {
        spec,
        entry: q0,
        return_accept: (!cont).then_some(acc),
        return_reject: Some(rej),
        return_continue: cont.then_some(acc),
    }
}

fn adapter(
    view: View,
    width: usize,
    core: MachineSpec,
    even_check: bool,
    name: &str,
    eps: Epsilon,
) -> MachineFragment {
    let dim = core.register_dim;
    let mut spec = lower(
        &Adapter {
            view,
            width,
            core,
            even_check,
        },
        dim,
        "ab01$#",
    );
    spec.metadata.insert("builder".into(), name.into());
    spec.metadata.insert("epsilon".into(), eps.to_string());
    wrap_core(spec, name != "pal_check")
}

pub fn build_eq_core(eps: Epsilon) -> MachineFragment {
    wrap_core(eq_core(eps.eq_coins(), 2), false)
}

pub fn build_pal_core(eps: Epsilon) -> MachineFragment {
    wrap_core(pal_core(eps.pal_sweeps()), false)
}

/// Exit on all heads after reaching the right end; continue otherwise.
pub fn build_rw_gate(k_eps: u32) -> MachineFragment {
    let spec = rw_gate(k_eps);
    let (acc, rej, q0) = (spec.q_acc, spec.q_rej, spec.q0);
    MachineFragment {
        spec,
        entry: q0,
        return_accept: Some(acc),
        return_reject: None,
        return_continue: Some(rej),
    }
}

/// Compares `left` tokens in `(p_l, p_m)` with `right` tokens in `(p_m, p_r)`,
/// with signposts located by the view. Core acceptance is return-continue.
pub fn build_same_length(
    view: View,
    width: usize,
    eps: Epsilon,
) -> Result<MachineFragment, BuildError> {
    if view.left_mode != LeftMode::Count {
        return Err(BuildError::Contract(
            "same-length views count left tokens".into(),
        ));
    }
    Ok(adapter(
        view,
        width,
        eq_core(eps.eq_coins(), 2),
        false,
        "same_length",
        eps,
    ))
}

/// Rejects an odd number of left tokens, then compares every second left
/// token with the right tokens.
pub fn build_twice_as_long(
    view: View,
    width: usize,
    eps: Epsilon,
) -> Result<MachineFragment, BuildError> {
    let view = View {
        left_mode: LeftMode::OddParity,
        ..view
    };
    Ok(adapter(
        view,
        width,
        eq_core(eps.eq_coins(), 2),
        true,
        "twice_as_long",
        eps,
    ))
}

/// Palindrome test on the `a`/`b` symbols before the first `d`.
pub fn build_pal_check(d: Pred, width: usize, eps: Epsilon) -> Result<MachineFragment, BuildError> {
    if d.a || d.b || d.left || d.matches(Token::A) {
        return Err(BuildError::Contract(
            "the delimiter must not be a letter or the left end".into(),
        ));
    }
    let view = View {
        pl: Pred::left_end(),
        pm: None,
        pr: (d, 1),
        left: Pred::ab(),
        left_mode: LeftMode::Copy,
        right: Pred::NONE,
        pm_shows: None,
    };
    Ok(adapter(
        view,
        width,
        pal_core(eps.pal_sweeps()),
        false,
        "pal_check",
        eps,
    ))
}
