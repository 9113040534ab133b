//! Signpost views: which real-tape tokens appear on a virtual `a`/`b` tape.

use serde::Serialize;

/// A unit of the real tape: a single symbol or a binary run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Token {
    Left,
    Right,
    A,
    B,
    Dollar,
    Hash,
    /// Value of the run read most significant bit first, and its width.
    Bin(u16, u8),
}

impl Token {
    pub fn is_letter(self) -> bool {
        matches!(self, Token::A | Token::B)
    }

    pub fn is_sep(self) -> bool {
        matches!(self, Token::Dollar | Token::Bin(..))
    }

    pub fn is_end(self) -> bool {
        matches!(self, Token::Left | Token::Right)
    }
}

/// A set of tokens; binary runs match by value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pred {
    pub left: bool,
    pub right: bool,
    pub a: bool,
    pub b: bool,
    pub dollar: bool,
    pub hash: bool,
    pub bin_lo: u16,
    pub bin_hi: u16,
}

impl Pred {
    pub const NONE: Pred = Pred {
        left: false,
        right: false,
        a: false,
        b: false,
        dollar: false,
        hash: false,
        bin_lo: 1,
        bin_hi: 0,
    };

    pub fn matches(&self, t: Token) -> bool {
        match t {
            Token::Left => self.left,
            Token::Right => self.right,
            Token::A => self.a,
            Token::B => self.b,
            Token::Dollar => self.dollar,
            Token::Hash => self.hash,
            Token::Bin(v, _) => self.bin_lo <= v && v <= self.bin_hi,
        }
    }

    pub fn left_end() -> Self {
        Pred {
            left: true,
            ..Self::NONE
        }
    }
    pub fn right_end() -> Self {
        Pred {
            right: true,
            ..Self::NONE
        }
    }
    pub fn a() -> Self {
        Pred {
            a: true,
            ..Self::NONE
        }
    }
    pub fn ab() -> Self {
        Pred {
            a: true,
            b: true,
            ..Self::NONE
        }
    }
    pub fn dollar() -> Self {
        Pred {
            dollar: true,
            ..Self::NONE
        }
    }
    pub fn bin(lo: u16, hi: u16) -> Self {
        Pred {
            bin_lo: lo,
            bin_hi: hi,
            ..Self::NONE
        }
    }
    pub fn any_bin() -> Self {
        Self::bin(0, u16::MAX)
    }
    /// Every non-endmarker token.
    pub fn sigma() -> Self {
        Pred {
            a: true,
            b: true,
            dollar: true,
            hash: true,
            ..Self::any_bin()
        }
    }
    pub fn sep() -> Self {
        Pred {
            dollar: true,
            ..Self::any_bin()
        }
    }
    pub fn or(self, o: Pred) -> Self {
        let (bin_lo, bin_hi) = match (self.bin_lo <= self.bin_hi, o.bin_lo <= o.bin_hi) {
            (true, true) => (self.bin_lo.min(o.bin_lo), self.bin_hi.max(o.bin_hi)),
            (true, false) => (self.bin_lo, self.bin_hi),
            (false, true) => (o.bin_lo, o.bin_hi),
            (false, false) => (1, 0),
        };
        Pred {
            left: self.left || o.left,
            right: self.right || o.right,
            a: self.a || o.a,
            b: self.b || o.b,
            dollar: self.dollar || o.dollar,
            hash: self.hash || o.hash,
            bin_lo,
            bin_hi,
        }
    }
    /// Everything except `a` and `>`.
    pub fn non_a() -> Self {
        Pred {
            right: true,
            b: true,
            dollar: true,
            hash: true,
            ..Self::any_bin()
        }
    }
}

/// Symbol shown to the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VSym {
    Left,
    A,
    B,
    Right,
}

impl VSym {
    pub fn tape_char(self) -> char {
        match self {
            VSym::Left => crate::machine::LEFT_END,
            VSym::Right => crate::machine::RIGHT_END,
            VSym::A => 'a',
            VSym::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeftMode {
    /// Each matching token is one `a`.
    Count,
    /// Only matches at odd positions (1st, 3rd, ...) count.
    OddParity,
    /// Matching tokens are copied: `a` to `a`, `b` to `b`.
    Copy,
}

/// Three signposts located by counting from `p_l`:
/// `p_m` is the `pm_n`-th `pm` token after `p_l`, and `p_r` the `pr_n`-th
/// `pr` token after `p_m`. Moving left, `p_l` is the first `pl` token left of
/// `p_m`, and `p_m` the first `pm` token left of `p_r`. Without `pm`, the
/// middle signpost is absent and `p_r` is counted from `p_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct View {
    pub pl: Pred,
    pub pm: Option<(Pred, u16)>,
    pub pr: (Pred, u16),
    pub left: Pred,
    pub left_mode: LeftMode,
    pub right: Pred,
    pub pm_shows: Option<VSym>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    PL,
    L,
    PM,
    R,
    PR,
}

/// Tracker state for the token under the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VState {
    pub zone: Zone,
    /// `pm` matches in `(p_l, pos]`, or `pr` matches when there is no `p_m`.
    cnt: u16,
    cur_pm: bool,
    /// Parity of `left` matches in `(p_l, pos]`.
    par: bool,
    cur_left: bool,
    tok_a: bool,
    /// `pr` matches in `(p_m, pos]`.
    rc: u16,
    cur_pr: bool,
    cur_right: bool,
}

impl VState {
    /// Parity of left-set matches in `(p_l, pos]`.
    pub fn left_parity(&self) -> bool {
        self.par
    }

    pub fn at_pl() -> Self {
        VState {
            zone: Zone::PL,
            cnt: 0,
            cur_pm: false,
            par: false,
            cur_left: false,
            tok_a: false,
            rc: 0,
            cur_pr: false,
            cur_right: false,
        }
    }
}

impl View {
    fn left_counter(&self) -> (Pred, u16) {
        self.pm.unwrap_or(self.pr)
    }

    /// Tracker state after moving one token in `dir` onto `t`.
    pub fn step(&self, s: VState, dir: i8, t: Token) -> Option<VState> {
        let (cp, cn) = self.left_counter();
        match (s.zone, dir) {
            (Zone::PL, 1) | (Zone::L, 1) => {
                if t == Token::Left {
                    return None;
                }
                let m = cp.matches(t);
                let cnt = s.cnt + m as u16;
                let mut n = VState {
                    zone: Zone::L,
                    cnt,
                    cur_pm: m,
                    par: s.par ^ self.left.matches(t),
                    cur_left: self.left.matches(t),
                    tok_a: t == Token::A,
                    rc: 0,
                    cur_pr: false,
                    cur_right: false,
                };
                if cnt == cn {
                    n.zone = if self.pm.is_some() {
                        Zone::PM
                    } else {
                        Zone::PR
                    };
                } else if t == Token::Right {
                    return None;
                }
                Some(n)
            }
            (Zone::L, -1) | (Zone::PM, -1) => self.back_into_left(s, t),
            (Zone::PR, -1) if self.pm.is_none() => self.back_into_left(s, t),
            (Zone::PM, 1) | (Zone::R, 1) => {
                if t == Token::Left {
                    return None;
                }
                let m = self.pr.0.matches(t);
                let rc = s.rc + m as u16;
                let mut n = VState {
                    zone: Zone::R,
                    rc,
                    cur_pr: m,
                    cur_right: self.right.matches(t),
                    ..s
                };
                if rc == self.pr.1 {
                    n.zone = Zone::PR;
                } else if t == Token::Right {
                    return None;
                }
                Some(n)
            }
            (Zone::R, -1) | (Zone::PR, -1) => {
                let rc = s.rc.checked_sub(s.cur_pr as u16)?;
                let (pm, _) = self.pm?;
                if pm.matches(t) {
                    if rc != 0 {
                        return None;
                    }
                    return Some(VState {
                        zone: Zone::PM,
                        rc: 0,
                        cur_pr: false,
                        cur_right: false,
                        ..s
                    });
                }
                if t.is_end() {
                    return None;
                }
                let cur_pr = self.pr.0.matches(t);
                if cur_pr && rc == 0 {
                    return None;
                }
                Some(VState {
                    zone: Zone::R,
                    rc,
                    cur_pr,
                    cur_right: self.right.matches(t),
                    ..s
                })
            }
            _ => None,
        }
    }

    fn back_into_left(&self, s: VState, t: Token) -> Option<VState> {
        let (cp, _) = self.left_counter();
        let cnt = s.cnt.checked_sub(s.cur_pm as u16)?;
        let par = s.par ^ s.cur_left;
        if self.pl.matches(t) {
            if cnt != 0 || par {
                return None;
            }
            return Some(VState::at_pl());
        }
        if t.is_end() {
            return None;
        }
        let cur_pm = cp.matches(t);
        if cur_pm && cnt == 0 {
            return None;
        }
        Some(VState {
            zone: Zone::L,
            cnt,
            cur_pm,
            par,
            cur_left: self.left.matches(t),
            tok_a: t == Token::A,
            rc: 0,
            cur_pr: false,
            cur_right: false,
        })
    }

    /// Virtual symbol under the head, or `None` for a skipped token.
    pub fn vsym(&self, s: VState) -> Option<VSym> {
        match s.zone {
            Zone::PL => Some(VSym::Left),
            Zone::PR => Some(VSym::Right),
            Zone::PM => self.pm_shows,
            Zone::L => match self.left_mode {
                LeftMode::Count => s.cur_left.then_some(VSym::A),
                LeftMode::OddParity => (s.cur_left && s.par).then_some(VSym::A),
                LeftMode::Copy => s
                    .cur_left
                    .then_some(if s.tok_a { VSym::A } else { VSym::B }),
            },
            Zone::R => s.cur_right.then_some(VSym::B),
        }
    }
}

/// Virtual tape of a view over a token sequence starting at `p_l`
/// (index 0), ending at the first `p_r`. Used to cross-check the tracker.
pub fn virtual_tape(view: &View, tokens: &[Token]) -> Option<String> {
    let mut s = VState::at_pl();
    let mut out = String::new();
    for &t in &tokens[1..] {
        s = view.step(s, 1, t)?;
        match view.vsym(s) {
            Some(VSym::Right) => return Some(out),
            Some(v) => out.push(v.tape_char()),
            None => {}
        }
    }
    None
}
